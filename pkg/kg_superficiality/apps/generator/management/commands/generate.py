"""
Management command generating a synthetic knowledge graph.
"""
import logging
import os
import shutil

from celery import group

from kg_superficiality.apps.core.constants import GENERATE, ROLES, TASK_TIMEOUT
from kg_superficiality.apps.core.management.base import KgSimCommand, parse_seed
from kg_superficiality.apps.core.utils import ensure_dir
from kg_superficiality.apps.generator.config import (
    EXCLUSION_SCOPES,
    MODES,
    GenerationConfig,
)
from kg_superficiality.apps.generator.engine import generate, generate_per_relationship
from kg_superficiality.apps.generator.outputs import write_generation
from kg_superficiality.apps.generator.tasks import replay_relationship_task
from kg_superficiality.apps.ingest.edge_stream import read_edges


logger = logging.getLogger(__name__)

WORK_DIR = '.generate-work'


class Command(KgSimCommand):
    help = (
        'Generates a synthetic knowledge graph from a generation config (--config FILE.json holding '
        'relationships or homogeneous, sigma and steps) and writes edges.bin, entities.txt, '
        'relationships.txt, telemetry.csv and registry.npz to --out.'
    )
    subcommand = GENERATE
    defaults = {'per_relationship': False}

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--steps',
            type=int,
            help='Number of steps T after seeding (overrides the config file).',
        )
        parser.add_argument(
            '--mode',
            choices=MODES,
            help='single_role generates one role per step; joint emits full facts.',
        )
        parser.add_argument(
            '--role',
            choices=ROLES,
            help='Role generated in single_role mode.',
        )
        parser.add_argument(
            '--exclusion-scope',
            choices=EXCLUSION_SCOPES,
            help='Case (c) excludes entities attached to (relationship, role) or to the relationship in any role.',
        )
        parser.add_argument(
            '--per-relationship',
            action='store_true',
            default=None,
            help='Resolve attachments one relationship at a time, each in its own task.',
        )

    def _replay_in_tasks(self, work_dir):
        def replay(logs, generation, seed):
            tasks = []
            for log in logs:
                log_path = log.save(os.path.join(work_dir, f'log-{log.relationship_id}.npz'))
                alphas = {
                    role: parameters.alpha
                    for role, parameters in generation.relationships[log.relationship_id].roles.items()
                }
                edges_path = os.path.join(work_dir, f'edges-{log.relationship_id}.bin')
                logger.info('Spinning off replay_relationship_task for relationship %d', log.relationship_id)
                tasks.append(replay_relationship_task.s(log_path, alphas, seed, edges_path))
            paths = group(tasks).apply_async().get(timeout=TASK_TIMEOUT)
            return [read_edges(path, mmap=False) for path in paths]
        return replay

    def run(self, config):
        if not config.get('out'):
            self.usage_error('generate requires --out')
        if config.get('sigma') is None or config.get('steps') is None:
            self.usage_error('generate requires a --config file with sigma and steps')
        seed = parse_seed(config.get('seed'))
        generation = GenerationConfig.from_dict(config)
        generation.seed = seed
        generation.validate()
        config.update(generation.to_dict())
        out_dir = config['out']
        if config['per_relationship']:
            work_dir = ensure_dir(os.path.join(out_dir, WORK_DIR))
            try:
                result = generate_per_relationship(generation, seed, replay=self._replay_in_tasks(work_dir))
            finally:
                shutil.rmtree(work_dir, ignore_errors=True)
        else:
            result = generate(generation, seed)
        write_generation(out_dir, result)
        return {'seed': seed}
