"""
Base class of the kgsim subcommands.

Every subcommand accepts the global flags ``--threads``, ``--out``, ``--seed``,
``--log-level`` and ``--config``. Values from the ``--config`` JSON file are
overridden by flags given on the command line; the merged dict is what the
subcommand runs with and what its manifest records.
"""
import logging

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from kg_superficiality.apps.core.exceptions import KgSimError
from kg_superficiality.apps.core.manifests import (
    RunTimer,
    build_manifest,
    load_config_file,
    write_manifest,
)
from kg_superficiality.apps.core.utils import ensure_dir


logger = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
RANDOM_SEED = 'random'

# Options Django adds to every command; they never enter a run config.
DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color', 'force_color',
    'skip_checks', 'config',
}


def parse_seed(value):
    """
    Returns an integer seed; ``random`` draws 32 bits of OS entropy.
    """
    if value is None:
        return settings.KGSIM_DEFAULT_SEED
    if isinstance(value, str) and value.lower() == RANDOM_SEED:
        return int(np.random.SeedSequence().generate_state(1, dtype=np.uint32)[0])
    try:
        seed = int(value)
    except (TypeError, ValueError) as exc:
        raise KgSimError(f'--seed must be an integer or "{RANDOM_SEED}", got {value!r}') from exc
    if seed < 0:
        raise KgSimError(f'--seed must be non-negative, got {seed}')
    return seed


class KgSimCommand(BaseCommand):
    """
    Shared plumbing of the kgsim subcommands: option resolution, logging,
    error mapping and run manifests.

    Subclasses set ``subcommand``, define ``add_command_arguments`` and ``run``.
    ``run`` receives the resolved config dict and returns a dict with optional
    keys ``inputs`` (files to digest into the manifest), ``seed``, ``report`` and ``manifest``
    (False to skip writing a manifest, e.g. when output went to stdout).
    """
    subcommand = None
    # Defaults applied below the config file and the command line.
    defaults = {}

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        self._parser = parser
        return parser

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            help='JSON file of option values (a run manifest replays that run); command-line flags win.',
        )
        parser.add_argument(
            '--out',
            help='Output directory of the run.',
        )
        parser.add_argument(
            '--seed',
            help=f'Integer seed, or "{RANDOM_SEED}" for OS entropy (default: KGSIM_DEFAULT_SEED).',
        )
        parser.add_argument(
            '--threads',
            type=int,
            help='Number of parallel work units to split the run into.',
        )
        parser.add_argument(
            '--log-level',
            choices=LOG_LEVELS,
            type=str.upper,
            help='Level of the kg_superficiality loggers for this run.',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        """
        Adds the subcommand's own flags. Flags must default to None so that
        values from ``--config`` are not silently overridden.
        """

    def usage_error(self, message):
        """
        Reports a usage problem: exit status 2 from the command line, CommandError otherwise.
        """
        parser = getattr(self, '_parser', None)
        if parser is None:
            raise CommandError(message)
        parser.error(message)

    def resolve_config(self, options):
        config = {'threads': 1, 'out': None, 'seed': None, 'log_level': None}
        config.update(self.defaults)
        if options.get('config'):
            try:
                config.update(load_config_file(options['config']))
            except (OSError, ValueError) as exc:
                raise CommandError(f'Cannot read --config {options["config"]}: {exc}') from exc
        for key, value in options.items():
            if key in DJANGO_OPTIONS or value is None:
                continue
            config[key] = value
        if config['threads'] is None or int(config['threads']) < 1:
            self.usage_error('--threads must be at least 1')
        return config

    @staticmethod
    def configure_logging(level):
        if level:
            logging.getLogger('kg_superficiality').setLevel(level)
            logging.getLogger().setLevel(level)

    def output_dir(self, config):
        """
        Directory receiving the run manifest; None when nothing is written.
        """
        return config.get('out')

    def handle(self, *args, **options):
        config = self.resolve_config(options)
        self.configure_logging(config.get('log_level'))
        output_dir = self.output_dir(config)
        if output_dir:
            ensure_dir(output_dir)
        with RunTimer() as timer:
            try:
                result = self.run(config) or {}
            except KgSimError as exc:
                logger.error('%s failed: %s', self.subcommand, exc)
                raise CommandError(str(exc)) from exc
        if output_dir and result.get('manifest', True):
            manifest = build_manifest(
                self.subcommand,
                config,
                seed=result.get('seed'),
                inputs=result.get('inputs', ()),
                metrics=timer.as_metrics(),
                report=result.get('report'),
            )
            write_manifest(output_dir, manifest)

    def run(self, config):
        raise NotImplementedError
