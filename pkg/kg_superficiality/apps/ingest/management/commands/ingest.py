"""
Management command parsing an N-Triples dump into an edge stream.
"""
import logging
import os
import shutil

from celery import group
from django.conf import settings

from kg_superficiality.apps.core.constants import (
    EDGES_FILE,
    INGEST,
    INGEST_SUMMARY_FILE,
    ROLE_IN,
    ROLE_OUT,
    TASK_TIMEOUT,
)
from kg_superficiality.apps.core.exceptions import IngestError
from kg_superficiality.apps.core.management.base import KgSimCommand
from kg_superficiality.apps.core.utils import ensure_dir, write_json
from kg_superficiality.apps.ingest.degrees import scan_degrees
from kg_superficiality.apps.ingest.ntriples import IngestFilter
from kg_superficiality.apps.ingest.parsing import merge_chunks, split_byte_ranges
from kg_superficiality.apps.ingest.tasks import parse_chunk_task


logger = logging.getLogger(__name__)

WORK_DIR = '.ingest-work'


def build_ingest_summary(edge_stream, groups):
    """
    Returns the ingest summary dict: the counters plus entity, relationship and per-role totals.
    """
    summary = edge_stream.counters.to_dict()
    summary.update({
        'entities': edge_stream.num_entities,
        'relationships': edge_stream.num_relationships,
        'groups': groups,
    })
    for role in (ROLE_OUT, ROLE_IN):
        tables = scan_degrees(edge_stream, role, grouping=groups)
        summary[f'{role}_degree_sum'] = tables.facts
        summary[f'{role}_entities'] = tables.distinct_entities
    return summary


class Command(KgSimCommand):
    help = (
        'Parses an N-Triples dump (optionally gzip-compressed), keeps the facts between entities of the '
        'graph and writes edges.bin, entities.txt, relationships.txt and ingest_summary.json to --out.'
    )
    subcommand = INGEST
    defaults = {'dedup': False, 'groups': 1, 'keep_predicate': None}

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--input',
            help='N-Triples file to parse (.nt or .nt.gz).',
        )
        parser.add_argument(
            '--prefix',
            help='IRI prefix of the entities of the graph; blank nodes always count as entities.',
        )
        parser.add_argument(
            '--dedup',
            action='store_true',
            default=None,
            help='Drop exact duplicate facts (kept by default).',
        )
        parser.add_argument(
            '--groups',
            type=int,
            help='Number of relationship groups counted in separate degree passes.',
        )
        parser.add_argument(
            '--keep-predicate',
            action='append',
            help='Only keep facts of this predicate IRI; may be repeated.',
        )

    def _parse_chunk_task(self, path, byte_range, ingest_filter, work_dir, index):
        start, end = byte_range
        logger.info('Spinning off parse_chunk_task for bytes [%s, %s) of %s', start, end, path)
        return parse_chunk_task.s(
            path,
            start,
            end,
            ingest_filter.to_dict(),
            work_dir,
            index,
            spill_threshold=settings.KGSIM_DICTIONARY_SPILL_THRESHOLD,
        )

    def run(self, config):
        if not config.get('input') or not config.get('prefix') or not config.get('out'):
            self.usage_error('ingest requires --input, --prefix and --out')
        if int(config['groups']) < 1:
            self.usage_error('--groups must be at least 1')
        path = config['input']
        if not os.path.isfile(path):
            raise IngestError(f'Cannot read {path}: no such file')
        keep = config.get('keep_predicate')
        ingest_filter = IngestFilter(
            entity_prefix=config['prefix'],
            keep_predicates=frozenset(keep) if keep else None,
        )
        out_dir = config['out']
        work_dir = ensure_dir(os.path.join(out_dir, WORK_DIR))
        try:
            byte_ranges = split_byte_ranges(path, int(config['threads']))
            tasks = [
                self._parse_chunk_task(path, byte_range, ingest_filter, work_dir, index)
                for index, byte_range in enumerate(byte_ranges)
            ]
            payloads = group(tasks).apply_async().get(timeout=TASK_TIMEOUT)
            edge_stream = merge_chunks(
                payloads,
                os.path.join(out_dir, EDGES_FILE),
                dedup=bool(config['dedup']),
                spill_threshold=settings.KGSIM_DICTIONARY_SPILL_THRESHOLD,
                spill_dir=work_dir,
            )
            edge_stream.save_dictionaries(out_dir)
            summary = build_ingest_summary(edge_stream, int(config['groups']))
            edge_stream.entities.close()
            edge_stream.relationships.close()
        finally:
            shutil.rmtree(work_dir, ignore_errors=True)
        write_json(os.path.join(out_dir, INGEST_SUMMARY_FILE), summary)
        logger.info(
            'Ingested %d facts over %d entities and %d relationships from %s '
            '(%d literals, %d external, %d malformed, %d duplicates removed)',
            summary['facts'], summary['entities'], summary['relationships'], path,
            summary['literals_removed'], summary['external_removed'], summary['malformed'],
            summary['duplicates_removed'],
        )
        return {'inputs': [path]}
