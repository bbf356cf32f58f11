"""
Management command evaluating the closed forms of the model.
"""
import logging
import os

from kg_superficiality.apps.core.constants import THEORY
from kg_superficiality.apps.core.management.base import KgSimCommand
from kg_superficiality.apps.core.utils import write_csv
from kg_superficiality.apps.theory.distributions import (
    heatmap_grid,
    parse_range,
    relationship_count_distribution,
)


logger = logging.getLogger(__name__)

PR = 'pr'
HEATMAP = 'heatmap'
ACTIONS = (PR, HEATMAP)
DEFAULT_FILE_NAMES = {PR: 'pr.csv', HEATMAP: 'heatmap.csv'}


class Command(KgSimCommand):
    help = (
        'Evaluates the distribution of distinct relationship counts (pr) or the share of misdescribed '
        'entities over a grid of n and sigma (heatmap). CSV goes to standard output unless --out is given; '
        '--out names a .csv file or a directory.'
    )
    subcommand = THEORY
    defaults = {'r': 3}

    def add_command_arguments(self, parser):
        parser.add_argument(
            'action',
            choices=ACTIONS,
            help='pr: P(r) for r = 1..n; heatmap: P(r_e <= R) over a grid.',
        )
        parser.add_argument(
            '--n',
            type=int,
            help='Number of relationships (pr).',
        )
        parser.add_argument(
            '--sigma',
            type=float,
            help='Superficiality (pr).',
        )
        parser.add_argument(
            '--n-range',
            help='Relationship counts START:STOP[:STEP] or a comma-separated list (heatmap).',
        )
        parser.add_argument(
            '--sigma-range',
            help='Superficialities START:STOP:STEP or a comma-separated list (heatmap).',
        )
        parser.add_argument(
            '--r',
            type=int,
            help='Largest relationship count of a misdescribed entity (heatmap, default 3).',
        )

    def output_file(self, config):
        out = config.get('out')
        if not out:
            return None
        if out.endswith('.csv'):
            return out
        return os.path.join(out, DEFAULT_FILE_NAMES[config['action']])

    def output_dir(self, config):
        output_file = self.output_file(config)
        if output_file is None:
            return None
        return os.path.dirname(output_file) or '.'

    def _pr(self, config):
        if config.get('n') is None or config.get('sigma') is None:
            self.usage_error('theory pr requires --n and --sigma')
        distribution = relationship_count_distribution(config['n'], config['sigma'])
        logger.info(
            'P(r) for n=%d, sigma=%s: mode at r=%d, P(r <= 3)=%.6f',
            distribution.n, distribution.sigma, distribution.mode, distribution.cumulative(3),
        )
        return ['r', 'P_r'], distribution.rows()

    def _heatmap(self, config):
        if not config.get('n_range') or not config.get('sigma_range'):
            self.usage_error('theory heatmap requires --n-range and --sigma-range')
        if int(config['r']) < 1:
            self.usage_error('--r must be at least 1')
        try:
            n_values = parse_range(config['n_range'], cast=int)
            sigma_values = parse_range(config['sigma_range'], cast=float)
        except ValueError as exc:
            self.usage_error(str(exc))
        cells = heatmap_grid(n_values, sigma_values, int(config['r']))
        logger.info(
            'Evaluated %d heatmap cells, %d outside the n > 1/sigma - 1 domain',
            len(cells), sum(1 for cell in cells if not cell.defined),
        )
        return ['n', 'sigma', 'value', 'defined'], [
            (cell.n, cell.sigma, cell.value if cell.defined else None, cell.defined) for cell in cells
        ]

    def run(self, config):
        if config['action'] == PR:
            header, rows = self._pr(config)
        else:
            header, rows = self._heatmap(config)
        output_file = self.output_file(config)
        if output_file is None:
            write_csv(self.stdout, header, rows)
            return {'manifest': False}
        write_csv(output_file, header, rows)
        return {}
