"""
Management command estimating the model parameters of an edge stream.
"""
import logging

from kg_superficiality.apps.core.constants import FIT, ROLE_IN, ROLE_OUT, ROLES
from kg_superficiality.apps.core.management.base import KgSimCommand
from kg_superficiality.apps.ingest.degrees import scan_degrees
from kg_superficiality.apps.ingest.edge_stream import EdgeStream
from kg_superficiality.apps.stats.estimators import fit_graph
from kg_superficiality.apps.stats.histograms import build_histograms
from kg_superficiality.apps.stats.reports import write_fit_outputs


logger = logging.getLogger(__name__)

BOTH = 'both'
ROLE_OPTIONS = {ROLE_IN: (ROLE_IN,), ROLE_OUT: (ROLE_OUT,), BOTH: ROLES}


class Command(KgSimCommand):
    help = (
        'Scans the degree tables of an edge stream (ingested or generated) and writes profiles.json, '
        'summary.json, characteristics.csv and hist_{role}_{relationship|global}.csv to --out.'
    )
    subcommand = FIT
    defaults = {'role': BOTH, 'groups': 1}

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--edges',
            help='Directory holding edges.bin, entities.txt and relationships.txt.',
        )
        parser.add_argument(
            '--role',
            choices=sorted(ROLE_OPTIONS),
            help='Role(s) to fit: in (object side), out (subject side) or both (default).',
        )
        parser.add_argument(
            '--groups',
            type=int,
            help='Number of relationship groups counted in separate degree passes.',
        )

    def run(self, config):
        if not config.get('edges') or not config.get('out'):
            self.usage_error('fit requires --edges and --out')
        if int(config['groups']) < 1:
            self.usage_error('--groups must be at least 1')
        edge_stream = EdgeStream.load(config['edges'])
        tables_by_role = {
            role: scan_degrees(edge_stream, role, grouping=int(config['groups']))
            for role in ROLE_OPTIONS[config['role']]
        }
        for role, tables in tables_by_role.items():
            if tables.facts == 0:
                logger.warning('The edge stream has no %s endpoints; the role is skipped', role)
        profiles, summary = fit_graph(tables_by_role, labels=list(edge_stream.relationships))
        histograms_by_role = {
            role: build_histograms(tables)
            for role, tables in tables_by_role.items() if role in summary.roles
        }
        write_fit_outputs(config['out'], profiles, summary, histograms_by_role)
        return {'inputs': EdgeStream.files(config['edges'])}
