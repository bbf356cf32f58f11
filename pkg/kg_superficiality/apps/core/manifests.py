"""
Run manifests: one ``manifest.json`` per output directory, plus a database record.
"""
import logging
import os
import resource
import time

import psutil

import kg_superficiality
from kg_superficiality.apps.core.constants import MANIFEST_FILE
from kg_superficiality.apps.core.models import RunManifest
from kg_superficiality.apps.core.utils import (
    file_digest,
    localized_utcnow,
    read_json,
    write_json,
)


logger = logging.getLogger(__name__)


class RunTimer:
    """
    Context manager measuring wall-clock time and peak resident memory of a run.
    """

    def __init__(self):
        self.started_at = None
        self.wall_clock_seconds = None
        self.peak_memory_bytes = None

    def __enter__(self):
        self.started_at = localized_utcnow()
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.wall_clock_seconds = time.perf_counter() - self._start
        # ru_maxrss is in KiB on Linux; psutil has no portable peak counter.
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
        self.peak_memory_bytes = max(peak, psutil.Process().memory_info().rss)
        return False

    def as_metrics(self):
        return {
            'started_at': self.started_at.isoformat() if self.started_at else None,
            'wall_clock_seconds': self.wall_clock_seconds,
            'peak_memory_bytes': self.peak_memory_bytes,
        }


def build_manifest(subcommand, config, seed=None, inputs=(), metrics=None, report=None):
    """
    Returns the manifest dict of a run.

    Arguments:
        subcommand (str): one of the kgsim subcommands.
        config (dict): the fully resolved configuration.
        seed (int): the run seed, None for deterministic subcommands.
        inputs (iterable of str): input files to digest.
        metrics (dict): timing and memory metrics.
        report (dict): headline results of the run, if any.
    """
    manifest = {
        'subcommand': subcommand,
        'config': config,
        'seed': seed,
        'input_digests': {path: file_digest(path) for path in inputs if os.path.isfile(path)},
        'tool_version': kg_superficiality.__version__,
        'metrics': metrics or {},
    }
    if report:
        manifest['report'] = report
    return manifest


def write_manifest(output_dir, manifest):
    """
    Writes ``manifest.json`` into ``output_dir`` and records the run in the database.
    """
    path = os.path.join(output_dir, MANIFEST_FILE)
    write_json(path, manifest)
    RunManifest.record(manifest, output_dir=output_dir)
    logger.info('Wrote %s run manifest to %s', manifest['subcommand'], path)
    return path


def load_config_file(path):
    """
    Loads a ``--config`` JSON file. A run manifest is accepted too, in which case
    its resolved config (with the recorded seed) is returned, so a run can be replayed.
    """
    payload = read_json(path)
    if 'subcommand' in payload and isinstance(payload.get('config'), dict):
        config = dict(payload['config'])
        if payload.get('seed') is not None:
            config['seed'] = payload['seed']
        return config
    return payload
