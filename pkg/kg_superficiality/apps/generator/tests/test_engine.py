""" Tests for the generation process. """
import os
import shutil
import tempfile

import ddt
import numpy as np
from django.test import TestCase

from kg_superficiality.apps.core.constants import NULL_ENTITY, ROLE_IN, ROLE_OUT
from kg_superficiality.apps.core.exceptions import DomainError
from kg_superficiality.apps.generator.config import (
    MODE_JOINT,
    SCOPE_RELATIONSHIP,
    GenerationConfig,
    RelationshipParameters,
    RoleParameters,
)
from kg_superficiality.apps.generator.engine import (
    DRAW,
    RelationshipLog,
    UniformStream,
    generate,
    generate_per_relationship,
    replay_relationship,
    seed_sequence,
)
from kg_superficiality.apps.generator.outputs import write_generation
from kg_superficiality.apps.generator.registry import EntityRegistry
from kg_superficiality.apps.generator.telemetry import SimulationTelemetry, sample_steps
from kg_superficiality.apps.ingest.degrees import scan_degrees
from kg_superficiality.apps.ingest.edge_stream import EdgeStream


def heterogeneous_config(steps, mode='single_role', **kwargs):
    roles = (ROLE_OUT, ROLE_IN) if mode == MODE_JOINT else (ROLE_OUT,)
    relationships = [
        RelationshipParameters(
            rho=rho,
            roles={role: RoleParameters(beta=beta, alpha=alpha) for role in roles},
        )
        for rho, beta, alpha in ((0.4, 0.8, 1.0), (0.3, 0.5, 0.3), (0.2, 0.2, 0.0), (0.1, 0.9, 0.7))
    ]
    return GenerationConfig(
        relationships=relationships,
        sigma={role: 0.6 for role in roles},
        steps=steps,
        mode=mode,
        **kwargs,
    )


@ddt.ddt
class SeedTests(TestCase):
    """
    Tests for the seed facts of a generation.
    """

    def test_no_steps_single_role(self):
        result = generate(GenerationConfig.homogeneous_config(3, 0.5, 1.0, 1.0, 0))
        self.assertEqual(result.edges.tolist(), [[0, 0, NULL_ENTITY], [1, 1, NULL_ENTITY], [2, 2, NULL_ENTITY]])
        self.assertEqual(len(result.registry), 3)
        self.assertEqual(result.telemetry.steps, [0])
        self.assertEqual(result.telemetry.entities, [3])
        self.assertEqual(result.registry.created_at, [0, 0, 0])

    def test_no_steps_in_role(self):
        result = generate(GenerationConfig.homogeneous_config(2, 0.5, 1.0, 1.0, 0, role=ROLE_IN))
        self.assertEqual(result.edges.tolist(), [[NULL_ENTITY, 0, 0], [NULL_ENTITY, 1, 1]])

    def test_no_steps_joint(self):
        result = generate(GenerationConfig.homogeneous_config(1, 0.5, 1.0, 1.0, 0, mode=MODE_JOINT))
        self.assertEqual(result.edges.tolist(), [[0, 0, 1]])
        self.assertEqual(len(result.registry), 2)
        self.assertEqual(result.registry.attachments(0), [(0, ROLE_OUT)])
        self.assertEqual(result.registry.attachments(1), [(0, ROLE_IN)])

    def test_every_step_creates_an_entity(self):
        result = generate(GenerationConfig.homogeneous_config(1, 0.0, 1.0, 1.0, 100))
        self.assertEqual(len(result.registry), 101)
        tables = scan_degrees(result.edge_stream(), ROLE_OUT)
        self.assertEqual(tables.global_degrees().tolist(), [1] * 101)
        self.assertEqual(result.exceptional_steps, 0)


@ddt.ddt
class GenerateTests(TestCase):
    """
    Tests for ``generate``.
    """

    def test_same_seed_same_edges(self):
        config = heterogeneous_config(3000)
        first = generate(config, seed=11)
        second = generate(config, seed=11)
        self.assertTrue(np.array_equal(first.edges, second.edges))
        self.assertFalse(np.array_equal(first.edges, generate(config, seed=12).edges))

    def test_config_seed_is_used(self):
        config = heterogeneous_config(200, seed=4)
        self.assertEqual(generate(config).seed, 4)
        self.assertTrue(np.array_equal(generate(config).edges, generate(config, seed=4).edges))

    @ddt.data('single_role', MODE_JOINT)
    def test_telemetry_laws_hold_exactly(self, mode):
        result = generate(heterogeneous_config(2000, mode=mode, telemetry_samples=20))
        telemetry = result.telemetry
        self.assertEqual(telemetry.invariant_violations(), [])
        self.assertEqual(telemetry.steps[0], 0)
        self.assertEqual(telemetry.steps[-1], 2000)
        self.assertEqual(telemetry.steps, sample_steps(2000, 20))
        self.assertEqual(telemetry.entities[-1], len(result.registry))
        self.assertEqual(result.edges.shape[0], 2000 + 4)

    def test_relationship_facts_match_edges(self):
        result = generate(heterogeneous_config(1500))
        counts = np.bincount(result.edges[:, 1], minlength=4) - 1
        self.assertEqual(counts.tolist(), result.telemetry.relationship_facts[-1])

    def test_degrees_are_per_relationship(self):
        result = generate(heterogeneous_config(1500))
        tables = scan_degrees(result.edge_stream(), ROLE_OUT)
        for relationship_id, degrees in tables.relationships.items():
            self.assertEqual(
                degrees.distinct_entities,
                result.telemetry.relationship_entities[-1][relationship_id],
            )

    def test_case_c_reuses_entities(self):
        result = generate(GenerationConfig.homogeneous_config(3, 0.0, 1.0, 0.7, 600))
        histogram = result.telemetry.relationship_histogram[-1]
        self.assertGreater(histogram[1] + histogram[2], 0)
        for entity in range(len(result.registry)):
            attachments = result.registry.attachments(entity)
            self.assertEqual(len(attachments), len(set(attachments)))

    def test_exceptional_steps_fall_back_to_new_entities(self):
        # A single relationship leaves case (c) nothing to pick.
        result = generate(GenerationConfig.homogeneous_config(1, 0.0, 1.0, 0.6, 200))
        self.assertGreater(result.exceptional_steps, 0)
        self.assertEqual(len(result.registry), 201)
        self.assertEqual(result.telemetry.invariant_violations(), [])

    def test_relationship_exclusion_scope(self):
        config = heterogeneous_config(3000, mode=MODE_JOINT, exclusion_scope=SCOPE_RELATIONSHIP)
        registry = generate(config).registry
        for relationship_id in range(config.n):
            subjects = registry.attached(relationship_id, ROLE_OUT)
            objects = registry.attached(relationship_id, ROLE_IN)
            self.assertFalse(subjects & objects)

    def test_constraint_violation(self):
        with self.assertRaisesRegex(DomainError, 'needs n > 19'):
            generate(GenerationConfig.homogeneous_config(10, 0.85, 1.0, 0.05, 10))

    def test_uniform_stream_is_block_independent(self):
        small = UniformStream(seed_sequence(9, 0), block=7)
        large = UniformStream(seed_sequence(9, 0), block=1000)
        self.assertEqual([small.next() for _ in range(50)], [large.next() for _ in range(50)])


@ddt.ddt
class PerRelationshipTests(TestCase):
    """
    Tests for ``generate_per_relationship``.
    """

    @ddt.data('single_role', MODE_JOINT)
    def test_identical_to_generate(self, mode):
        config = heterogeneous_config(4000, mode=mode)
        sequential = generate(config, seed=21)
        serialized = generate_per_relationship(config, seed=21)
        self.assertTrue(np.array_equal(sequential.edges, serialized.edges))
        self.assertEqual(sequential.telemetry, serialized.telemetry)
        self.assertEqual(sequential.registry.creators, serialized.registry.creators)

    def test_injected_replay(self):
        calls = []

        def replay(logs, config, seed):
            calls.append([log.relationship_id for log in logs])
            return [
                replay_relationship(log, {ROLE_OUT: config.relationships[log.relationship_id].roles[ROLE_OUT].alpha}, seed)
                for log in logs
            ]

        config = heterogeneous_config(500)
        result = generate_per_relationship(config, seed=2, replay=replay)
        self.assertEqual(calls, [[0, 1, 2, 3]])
        self.assertTrue(np.array_equal(result.edges, generate(config, seed=2).edges))

    def test_replay_resolves_draws(self):
        log = RelationshipLog(0, [0, 1, 2, 3], {ROLE_OUT: [5, DRAW, 8, DRAW]})
        edges = replay_relationship(log, {ROLE_OUT: 1.0}, seed=1)
        self.assertEqual(edges[:, 1].tolist(), [0, 0, 0, 0])
        self.assertEqual(edges[:, 2].tolist(), [NULL_ENTITY] * 4)
        self.assertEqual(edges[[0, 2], 0].tolist(), [5, 8])
        self.assertEqual(edges[1, 0], 5)
        self.assertIn(edges[3, 0], (5, 8))


class OutputTests(TestCase):
    """
    Tests for the files of a generation.
    """

    def setUp(self):
        super().setUp()
        self.out_dir = tempfile.mkdtemp()

    def tearDown(self):
        super().tearDown()
        shutil.rmtree(self.out_dir, ignore_errors=True)

    def test_outputs_load_back(self):
        result = generate(heterogeneous_config(300, mode=MODE_JOINT, telemetry_samples=10))
        paths = write_generation(self.out_dir, result)
        self.assertTrue(all(os.path.isfile(path) for path in paths))
        stream = EdgeStream.load(self.out_dir)
        self.assertTrue(np.array_equal(np.asarray(stream.edges), result.edges))
        self.assertEqual(len(stream.entities), len(result.registry))
        self.assertEqual(SimulationTelemetry.read(paths[3]), result.telemetry)
        registry = EntityRegistry.load(paths[4])
        self.assertEqual(registry.created_at, result.registry.created_at)
        self.assertEqual(registry.relationship_histogram(), result.registry.relationship_histogram())

    def test_telemetry_header(self):
        result = generate(GenerationConfig.homogeneous_config(2, 0.5, 1.0, 1.0, 4, telemetry_samples=2))
        self.assertEqual(
            result.telemetry.header(),
            ['t', 'm', 'exceptional', 'm_r_0', 'm_r_1', 'f_r_0', 'f_r_1', 'M_1', 'M_2'],
        )
        self.assertEqual(result.telemetry.steps, sample_steps(4, 2))


@ddt.ddt
class SampleStepsTests(TestCase):
    """
    Tests for the telemetry sampling schedule.
    """

    @ddt.data(
        (1_000_000, 7, [0, 1, 10, 100, 1_000, 10_000, 100_000, 1_000_000]),
        (500, 1, [0, 500]),
        (1, 5, [0, 1]),
        (0, 10, [0]),
    )
    @ddt.unpack
    def test_log_spaced(self, steps, samples, expected):
        self.assertEqual(sample_steps(steps, samples), expected)

    def test_early_steps_merge(self):
        schedule = sample_steps(2000, 20)
        self.assertEqual(schedule[:2], [0, 1])
        self.assertEqual(schedule[-1], 2000)
        self.assertLess(len(schedule), 21)
        self.assertEqual(schedule, sorted(set(schedule)))


class ExceptionalStepTests(TestCase):
    """
    The share of exceptional steps vanishes as a generation grows.
    """

    def test_fraction_decreases_with_steps(self):
        config = GenerationConfig.homogeneous_config(25, 0.85, 1.0, 0.05, 100_000, seed=9, telemetry_samples=5)
        telemetry = generate(config).telemetry
        self.assertEqual(telemetry.steps, [0, 1, 10, 100, 1_000, 10_000, 100_000])
        fractions = [
            exceptional / step
            for step, exceptional in zip(telemetry.steps, telemetry.exceptional)
            if step >= 1_000
        ]
        self.assertLessEqual(fractions[1], fractions[0])
        self.assertLessEqual(fractions[2], fractions[1])
        self.assertLessEqual(fractions[2], 1e-3)
