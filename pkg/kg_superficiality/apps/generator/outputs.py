"""
Files of a generation run.
"""
import logging
import os

from kg_superficiality.apps.core.constants import REGISTRY_FILE, TELEMETRY_FILE
from kg_superficiality.apps.ingest.edge_stream import EdgeStream


logger = logging.getLogger(__name__)


def write_generation(out_dir, result):
    """
    Writes edges.bin, entities.txt, relationships.txt, telemetry.csv and registry.npz.

    Returns:
        list: the written paths.
    """
    result.edge_stream().save(out_dir)
    result.telemetry.write(os.path.join(out_dir, TELEMETRY_FILE))
    result.registry.save(os.path.join(out_dir, REGISTRY_FILE))
    logger.info('Wrote generation outputs (%d exceptional steps) to %s', result.exceptional_steps, out_dir)
    return EdgeStream.files(out_dir) + [os.path.join(out_dir, TELEMETRY_FILE), os.path.join(out_dir, REGISTRY_FILE)]
