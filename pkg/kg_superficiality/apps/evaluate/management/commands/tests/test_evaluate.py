import os
import shutil
import tempfile

import ddt
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from kg_superficiality.apps.core.constants import (
    DIVERGENCE_FILE,
    LONGITUDINAL_FILE,
    MANIFEST_FILE,
    REFIT_GRID_FILE,
    SUMMARY_FILE,
    TELEMETRY_FILE,
    TELEMETRY_REPORT_FILE,
)
from kg_superficiality.apps.core.models import RunManifest
from kg_superficiality.apps.core.utils import read_csv, read_json, write_json
from kg_superficiality.apps.evaluate.tests.utils import fitted_ground_truth
from kg_superficiality.apps.generator.config import VARIANTS


GENERATION = {
    'homogeneous': {'n': 4, 'beta': 0.6, 'alpha': 1.0},
    'sigma': 0.8,
    'steps': 500,
}


@ddt.ddt
class EvaluateCommandTests(TestCase):
    command_name = 'evaluate'

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.fixture_root = tempfile.mkdtemp()
        cls.stats_dir = fitted_ground_truth(cls.fixture_root)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.fixture_root, ignore_errors=True)
        super().tearDownClass()

    def setUp(self):
        super().setUp()
        self.root = tempfile.mkdtemp()
        self.out = os.path.join(self.root, 'out')

    def tearDown(self):
        super().tearDown()
        shutil.rmtree(self.root, ignore_errors=True)

    def _evaluate(self, action, *args):
        call_command(self.command_name, action, '--out', self.out, *args)
        return read_json(os.path.join(self.out, MANIFEST_FILE))

    def test_ablate(self):
        manifest = self._evaluate('ablate', '--stats', self.stats_dir, '--scale', '0.5', '--seeds', '2',
                                  '--seed', '5')
        rows = read_csv(os.path.join(self.out, DIVERGENCE_FILE))
        self.assertEqual(len(rows), 2 * len(VARIANTS))
        self.assertEqual({row['variant'] for row in rows}, set(VARIANTS))
        self.assertEqual({row['seed'] for row in rows}, {'5', '6'})
        for row in rows:
            self.assertGreaterEqual(float(row['kl']), 0.0)
        head = read_csv(os.path.join(self.out, 'head_out.csv'))
        self.assertEqual(list(head[0])[:2], ['k', 'P_reference'])
        self.assertEqual(manifest['subcommand'], 'evaluate')
        self.assertEqual(manifest['seed'], 5)
        self.assertIn(os.path.join(self.stats_dir, SUMMARY_FILE), manifest['input_digests'])
        self.assertIn(manifest['report']['roles']['out']['best_variant'], VARIANTS)

    def test_ablate_single_variant(self):
        self._evaluate('ablate', '--stats', self.stats_dir, '--variant', 'simplex_linear')
        rows = read_csv(os.path.join(self.out, DIVERGENCE_FILE))
        self.assertEqual([row['variant'] for row in rows], ['simplex_linear'])

    def test_ablate_empty_generation(self):
        with self.assertRaisesRegex(CommandError, 'empty generation'):
            self._evaluate('ablate', '--stats', self.stats_dir, '--scale', '0')

    @ddt.data('fig3a', 'multiplexing')
    def test_fig3a(self, action):
        manifest = self._evaluate(action, '--steps', '2000', '--sigma', '0.95', '--seed', '3')
        rows = read_csv(os.path.join(self.out, 'fig3a_sigma0.95.csv'))
        self.assertEqual(list(rows[0]), ['k', 'P_k', 'r', 'P_r_emp', 'P_r_theory'])
        self.assertEqual(sum(1 for row in rows if row['r']), 25)
        self.assertAlmostEqual(sum(float(row['P_r_theory']) for row in rows if row['r']), 1.0, places=9)
        self.assertFalse(os.path.exists(os.path.join(self.out, 'fig3a_sigma0.05.csv')))
        run, = manifest['report']['runs']
        self.assertEqual(run['sigma'], 0.95)
        self.assertEqual(run['theory_mode'], 1)

    def test_telemetry_generates_runs(self):
        config = write_json(os.path.join(self.root, 'generation.json'), GENERATION)
        manifest = self._evaluate('telemetry', '--config', config, '--seeds', '3', '--seed', '11')
        for seed in (11, 12, 13):
            self.assertTrue(os.path.isfile(os.path.join(self.out, 'runs', f'seed-{seed}', TELEMETRY_FILE)))
        report = read_json(os.path.join(self.out, TELEMETRY_REPORT_FILE))
        self.assertEqual(report['runs'], 3)
        self.assertEqual(report['steps'], 500)
        self.assertEqual(manifest['report']['passed'], report['passed'])

    def test_telemetry_reads_runs(self):
        config = write_json(os.path.join(self.root, 'generation.json'), GENERATION)
        first = os.path.join(self.root, 'first')
        call_command(self.command_name, 'telemetry', '--config', config, '--seeds', '2', '--out', first)
        manifest = self._evaluate('telemetry', '--runs', os.path.join(first, 'runs'))
        self.assertIsNone(manifest['seed'])
        self.assertEqual(len(manifest['input_digests']), 2)
        self.assertEqual(read_json(os.path.join(self.out, TELEMETRY_REPORT_FILE))['runs'], 2)

    def test_telemetry_needs_runs_or_generation(self):
        with self.assertRaisesRegex(CommandError, '--runs'):
            self._evaluate('telemetry')

    def test_longitudinal(self):
        self._evaluate(
            'longitudinal',
            '--summary', f'2015={self.stats_dir}',
            '--summary', f'2016={os.path.join(self.stats_dir, SUMMARY_FILE)}',
        )
        rows = read_csv(os.path.join(self.out, LONGITUDINAL_FILE))
        self.assertEqual([row['label'] for row in rows], ['2015', '2016'])
        self.assertEqual(rows[0]['n'], '5')
        self.assertEqual(rows[0]['facts'], rows[1]['facts'])

    def test_refit(self):
        manifest = self._evaluate('refit', '--alphas', '0.5', '--betas', '0.5', '--steps', '2000', '--seed', '8')
        rows = read_csv(os.path.join(self.out, REFIT_GRID_FILE))
        self.assertEqual(len(rows), 1)
        self.assertEqual(float(rows[0]['alpha']), 0.5)
        summary = read_json(os.path.join(self.out, 'refit_summary.json'))
        self.assertEqual(summary['cells'], 1)
        self.assertEqual(manifest['report'], summary)

    def _assert_replays(self, args, files):
        self._evaluate(*args)
        replay = os.path.join(self.root, 'replay')
        call_command(self.command_name, args[0], '--config', os.path.join(self.out, MANIFEST_FILE), '--out', replay)
        for name in files:
            with open(os.path.join(self.out, name), 'rb') as first, open(os.path.join(replay, name), 'rb') as second:
                self.assertEqual(first.read(), second.read(), name)
        original = RunManifest.objects.get(output_dir=self.out)
        replayed = RunManifest.objects.get(output_dir=replay)
        self.assertEqual(replayed.seed, original.seed)
        self.assertEqual(replayed.config['scale'], original.config['scale'])

    def test_ablate_replays_from_manifest(self):
        self._assert_replays(
            ('ablate', '--stats', self.stats_dir, '--scale', '0.5', '--seeds', '2', '--seed', '5'),
            (DIVERGENCE_FILE, 'head_out.csv'),
        )

    def test_fig3a_replays_from_manifest(self):
        self._assert_replays(
            ('fig3a', '--steps', '2000', '--sigma', '0.05', '--seed', '3'),
            ('fig3a_sigma0.05.csv',),
        )

    @ddt.data(
        ('ablate',),
        ('longitudinal',),
        ('longitudinal', '--summary', '=missing'),
        ('refit', '--alphas', '0.9:0.1:0.1'),
        ('fig3a', '--steps', '0'),
        ('multiplexing', '--sigma', '0'),
    )
    def test_usage_errors(self, args):
        with self.assertRaises(CommandError):
            self._evaluate(*args)

    def test_requires_out(self):
        with self.assertRaisesRegex(CommandError, '--out'):
            call_command(self.command_name, 'refit')
