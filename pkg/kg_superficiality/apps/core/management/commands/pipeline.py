"""
Management command chaining ingest, fit and the ablation evaluation on one dump.
"""
import logging
import os

from django.core.management import call_command

from kg_superficiality.apps.core.constants import EVALUATE, FIT, INGEST, PIPELINE, ROLE_OUT, ROLES
from kg_superficiality.apps.core.management.base import KgSimCommand, parse_seed


logger = logging.getLogger(__name__)

STAGES = (INGEST, FIT, EVALUATE)


class Command(KgSimCommand):
    help = (
        'Runs ingest, fit and evaluate ablate on one N-Triples dump. Each stage writes its outputs '
        'and its own manifest.json into --out/ingest, --out/fit and --out/evaluate.'
    )
    subcommand = PIPELINE
    defaults = {'role': ROLE_OUT, 'scale': 1.0, 'seeds': 1}

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--input',
            help='N-Triples file to parse (.nt or .nt.gz).',
        )
        parser.add_argument(
            '--prefix',
            help='IRI prefix of the entities of the graph.',
        )
        parser.add_argument(
            '--dedup',
            action='store_true',
            default=None,
            help='Drop exact duplicate facts during ingest.',
        )
        parser.add_argument(
            '--role',
            choices=ROLES,
            help='Role fitted and compared (default out).',
        )
        parser.add_argument(
            '--scale',
            type=float,
            help='Ablation steps as a fraction of the fitted facts (default 1).',
        )
        parser.add_argument(
            '--seeds',
            type=int,
            help='Seeds per ablation variant (default 1).',
        )

    def stage_dirs(self, out_dir):
        return {stage: os.path.join(out_dir, stage) for stage in STAGES}

    def run(self, config):
        if not config.get('input') or not config.get('prefix') or not config.get('out'):
            self.usage_error('pipeline requires --input, --prefix and --out')
        seed = parse_seed(config.get('seed'))
        dirs = self.stage_dirs(config['out'])
        common = ['--threads', str(config['threads'])]
        if config.get('log_level'):
            common += ['--log-level', config['log_level']]

        ingest_args = ['--input', config['input'], '--prefix', config['prefix'], '--out', dirs[INGEST]]
        if config.get('dedup'):
            ingest_args.append('--dedup')
        logger.info('pipeline: ingesting %s', config['input'])
        call_command(INGEST, *ingest_args, *common)

        logger.info('pipeline: fitting %s', dirs[INGEST])
        call_command(FIT, '--edges', dirs[INGEST], '--out', dirs[FIT], '--role', config['role'], *common)

        logger.info('pipeline: comparing the ablation variants with seed %d', seed)
        call_command(
            EVALUATE, 'ablate',
            '--stats', dirs[FIT],
            '--out', dirs[EVALUATE],
            '--role', config['role'],
            '--scale', str(config['scale']),
            '--seeds', str(config['seeds']),
            '--seed', str(seed),
            *common,
        )
        # Every stage directory already holds its own manifest.
        return {'manifest': False}
