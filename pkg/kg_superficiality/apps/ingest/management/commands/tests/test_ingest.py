import os
import shutil
import tempfile
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from kg_superficiality.apps.core.constants import (
    EDGES_FILE,
    ENTITIES_FILE,
    INGEST_SUMMARY_FILE,
    MANIFEST_FILE,
    RELATIONSHIPS_FILE,
)
from kg_superficiality.apps.core.models import RunManifest
from kg_superficiality.apps.core.utils import file_digest, read_json
from kg_superficiality.apps.ingest.tests.utils import (
    GOLDEN_5,
    GOLDEN_10,
    GOLDEN_200,
    GOLDEN_200_COUNTS,
    PREFIX,
)
from kg_superficiality.apps.stats.reports import load_profiles, load_summary


class IngestCommandTests(TestCase):
    command_name = 'ingest'

    def setUp(self):
        super().setUp()
        self.out_root = tempfile.mkdtemp()

    def tearDown(self):
        super().tearDown()
        shutil.rmtree(self.out_root, ignore_errors=True)

    def _ingest(self, name, *args, source=GOLDEN_200):
        out = os.path.join(self.out_root, name)
        call_command(self.command_name, '--input', source, '--prefix', PREFIX, '--out', out, *args)
        return out

    def test_golden_200_counts(self):
        out = self._ingest('golden')
        summary = read_json(os.path.join(out, INGEST_SUMMARY_FILE))
        for name, expected in GOLDEN_200_COUNTS.items():
            self.assertEqual(summary[name], expected, name)
        self.assertEqual(summary['out_degree_sum'], GOLDEN_200_COUNTS['facts'])
        self.assertEqual(summary['in_degree_sum'], GOLDEN_200_COUNTS['facts'])
        self.assertEqual(os.path.getsize(os.path.join(out, EDGES_FILE)), 12 * GOLDEN_200_COUNTS['facts'])
        with open(os.path.join(out, ENTITIES_FILE), encoding='utf-8') as handle:
            self.assertEqual(len(handle.read().splitlines()), GOLDEN_200_COUNTS['entities'])
        self.assertFalse(os.path.exists(os.path.join(out, '.ingest-work')))

    def test_golden_200_dedup(self):
        summary = read_json(os.path.join(self._ingest('dedup', '--dedup'), INGEST_SUMMARY_FILE))
        self.assertEqual(summary['facts'], 115)
        self.assertEqual(summary['duplicates_removed'], 10)

    def test_groups_do_not_change_results(self):
        one = read_json(os.path.join(self._ingest('g1', '--groups', '1'), INGEST_SUMMARY_FILE))
        four = read_json(os.path.join(self._ingest('g4', '--groups', '4'), INGEST_SUMMARY_FILE))
        one.pop('groups')
        four.pop('groups')
        self.assertEqual(one, four)

    def test_threads_do_not_change_outputs(self):
        single = self._ingest('t1', '--threads', '1')
        parallel = self._ingest('t4', '--threads', '4')
        for name in (EDGES_FILE, ENTITIES_FILE, RELATIONSHIPS_FILE, INGEST_SUMMARY_FILE):
            self.assertEqual(
                file_digest(os.path.join(single, name)),
                file_digest(os.path.join(parallel, name)),
                name,
            )

    def test_manifest_written_and_recorded(self):
        out = self._ingest('manifest', source=GOLDEN_10)
        manifest = read_json(os.path.join(out, MANIFEST_FILE))
        self.assertEqual(manifest['subcommand'], 'ingest')
        self.assertEqual(manifest['config']['prefix'], PREFIX)
        self.assertIn(GOLDEN_10, manifest['input_digests'])
        self.assertIn('wall_clock_seconds', manifest['metrics'])
        self.assertEqual(RunManifest.objects.get().output_dir, out)

    def test_keep_predicate(self):
        out = self._ingest('keep', '--keep-predicate', 'p:knows', source=GOLDEN_10)
        summary = read_json(os.path.join(out, INGEST_SUMMARY_FILE))
        self.assertEqual(summary['facts'], 3)
        self.assertEqual(summary['predicates_filtered'], 2)

    @mock.patch('kg_superficiality.apps.ingest.management.commands.ingest.group')
    @mock.patch('kg_superficiality.apps.ingest.management.commands.ingest.parse_chunk_task')
    def test_one_task_per_chunk(self, mock_task, mock_group):
        mock_group.return_value.apply_async.return_value.get.side_effect = RuntimeError('stop')
        with self.assertRaises(RuntimeError):
            self._ingest('mocked', '--threads', '3')
        self.assertEqual(mock_task.s.call_count, 3)
        self.assertEqual(len(mock_group.call_args[0][0]), 3)

    def test_missing_input(self):
        with self.assertRaises(CommandError):
            self._ingest('missing', source=os.path.join(self.out_root, 'nope.nt'))

    def test_invalid_utf8_lines_are_malformed(self):
        source = os.path.join(self.out_root, 'latin1.nt')
        with open(GOLDEN_5, 'rb') as golden, open(source, 'wb') as handle:
            handle.write(golden.read())
            handle.write(b'<p:A> <p:r\xe9l> <p:D> .\n')
            handle.write('<p:A> <p:rél> <p:C> .\n'.encode('utf-8'))
        out = self._ingest('latin1', source=source)
        summary = read_json(os.path.join(out, INGEST_SUMMARY_FILE))
        self.assertEqual(summary['malformed'], 1)
        self.assertEqual(summary['facts'], 6)

        stats_dir = os.path.join(self.out_root, 'latin1-stats')
        call_command('fit', '--edges', out, '--out', stats_dir)
        self.assertEqual([profile.label for profile in load_profiles(stats_dir)], ['p:r1', 'p:r2', 'p:rél'])
        self.assertEqual(load_summary(stats_dir).facts, 6)
