""" Tests for the telemetry law checks. """
import os
import shutil
import tempfile

from django.test import TestCase

from kg_superficiality.apps.core.constants import TELEMETRY_REPORT_FILE
from kg_superficiality.apps.core.exceptions import DomainError, KgSimError
from kg_superficiality.apps.core.utils import read_json
from kg_superficiality.apps.evaluate.laws import load_runs, telemetry_checks
from kg_superficiality.apps.generator.config import MODE_JOINT, GenerationConfig
from kg_superficiality.apps.generator.engine import generate
from kg_superficiality.apps.generator.outputs import write_generation
from kg_superficiality.apps.generator.telemetry import SimulationTelemetry
from kg_superficiality.apps.theory.distributions import relationship_count_distribution


N = 2
SIGMA = 0.9
BETA = 0.5
STEPS = 100_000


def _config():
    return GenerationConfig.homogeneous_config(N, BETA, 1.0, SIGMA, STEPS)


def _telemetry(entities, relationship_entities, relationship_facts, histogram):
    """
    A two-row telemetry: the seeded state and the final state at STEPS.
    """
    telemetry = SimulationTelemetry(num_relationships=N)
    telemetry.steps = [0, STEPS]
    telemetry.entities = [N, entities]
    telemetry.exceptional = [0, 0]
    telemetry.relationship_entities = [[1] * N, relationship_entities]
    telemetry.relationship_facts = [[0] * N, relationship_facts]
    telemetry.relationship_histogram = [[N] + [0] * (N - 1), histogram]
    return telemetry


def _exact_telemetry(shift=0):
    """
    Final counts sitting exactly on their limits, with ``shift`` extra entities.
    """
    a = N * (1 / N) * (1 - BETA) * SIGMA
    c = (1 / N) * (1 - BETA)
    entities = N + round(a * STEPS) + shift
    theory = relationship_count_distribution(N, SIGMA)
    shared = round(theory[2] * entities)
    return _telemetry(
        entities,
        [1 + round(c * STEPS)] * N,
        [STEPS // N] * N,
        [entities - shared, shared],
    )


class TelemetryChecksTests(TestCase):
    """
    Tests for ``telemetry_checks``.
    """

    def test_exact_limits_pass(self):
        report = telemetry_checks([_exact_telemetry()] * 3, _config())
        self.assertTrue(report.passed, [check for check in report.checks if check.passed is False])
        laws = [check.law for check in report.checks]
        self.assertIn('m(t)/t -> a', laws)
        self.assertIn('F_r(t)/t -> rho_r [r=1]', laws)
        self.assertIn('M_i(t)/m(t) -> P(i) [i=2]', laws)
        self.assertEqual(report.runs, 3)
        self.assertEqual(report.steps, STEPS)

    def test_entity_growth_off_the_band_fails(self):
        report = telemetry_checks([_exact_telemetry(shift=2000)], _config())
        self.assertFalse(report.passed)
        self.assertIn('m(t)/t -> a', [check.law for check in report.failures()])

    def test_variance_needs_several_runs(self):
        single = telemetry_checks([_exact_telemetry()], _config())
        self.assertNotIn('var(m(t))/t -> a(1-a)', [check.law for check in single.checks])
        # Identical runs have no spread at all.
        repeated = telemetry_checks([_exact_telemetry()] * 25, _config())
        self.assertIn('var(m(t))/t -> a(1-a)', [check.law for check in repeated.failures()])

    def test_exceptional_steps_are_informational(self):
        report = telemetry_checks([_exact_telemetry()], _config())
        exceptional = [check for check in report.checks if check.law.startswith('exceptional')]
        self.assertEqual(len(exceptional), 1)
        self.assertIsNone(exceptional[0].passed)

    def test_joint_mode_rejected(self):
        config = GenerationConfig.homogeneous_config(N, BETA, 1.0, SIGMA, STEPS, mode=MODE_JOINT)
        with self.assertRaisesRegex(DomainError, 'single_role'):
            telemetry_checks([_exact_telemetry()], config)

    def test_no_runs(self):
        with self.assertRaises(DomainError):
            telemetry_checks([], _config())

    def test_generated_runs_keep_exact_invariants(self):
        config = GenerationConfig.homogeneous_config(5, 0.6, 1.0, 0.9, 2000)
        telemetries = [generate(config, seed).telemetry for seed in range(3)]
        report = telemetry_checks(telemetries, config)
        self.assertEqual(len([check for check in report.checks if check.law.startswith('F_r')]), 5)
        self.assertEqual(len([check for check in report.checks if check.law.startswith('M_i')]), 5)


class LoadRunsTests(TestCase):
    """
    Tests for ``load_runs``.
    """

    def setUp(self):
        super().setUp()
        self.root = tempfile.mkdtemp()

    def tearDown(self):
        super().tearDown()
        shutil.rmtree(self.root, ignore_errors=True)

    def test_missing_directory(self):
        with self.assertRaises(KgSimError):
            load_runs(os.path.join(self.root, 'missing'))

    def test_no_runs(self):
        with self.assertRaisesRegex(KgSimError, 'No run directories'):
            load_runs(self.root)

    def test_run_without_config(self):
        run_dir = os.path.join(self.root, 'a')
        os.makedirs(run_dir)
        write_generation(run_dir, generate(_config().with_steps(10), 1))
        with self.assertRaisesRegex(KgSimError, 'generation.json'):
            load_runs(self.root)

    def test_report_written(self):
        report = telemetry_checks([_exact_telemetry()], _config())
        report.write(self.root)
        payload = read_json(os.path.join(self.root, TELEMETRY_REPORT_FILE))
        self.assertEqual(payload['runs'], 1)
        self.assertEqual(len(payload['checks']), len(report.checks))
