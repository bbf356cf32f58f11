"""
The generation process: a global timeline of steps, each drawing a relationship
proportionally to rho_r and, per generated role, one of three attachment cases:

    (a) with probability beta_r, an entity already attached to (r, role), drawn
        with probability k_e^alpha_r / Z and its degree incremented;
    (b) with probability (1 - beta_r) sigma, a brand-new entity;
    (c) otherwise, an existing entity not yet attached to (r, role), uniformly.

Random streams derive from ``SeedSequence(seed)``: the timeline (relationship
and case draws), the case (c) pool picks, and one stream per (relationship, role)
for the case (a) draws. ``generate`` and ``generate_per_relationship`` consume
them identically and produce the same edges for the same seed.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from kg_superficiality.apps.core.constants import (
    EDGE_DTYPE,
    NULL_ENTITY,
    ROLE_COLUMNS,
    ROLE_IN,
    ROLE_OUT,
    ROLES,
)
from kg_superficiality.apps.generator.config import SCOPE_RELATIONSHIP
from kg_superficiality.apps.generator.registry import EntityRegistry
from kg_superficiality.apps.generator.sampler import DegreeWeightedIndex
from kg_superficiality.apps.generator.telemetry import SimulationTelemetry, sample_steps
from kg_superficiality.apps.ingest.dictionaries import SyntheticLabels
from kg_superficiality.apps.ingest.edge_stream import EdgeStream


logger = logging.getLogger(__name__)

TIMELINE_STREAM = 0
POOL_STREAM = 1
ATTACH_STREAM = 2

UNIFORM_BLOCK = 4096
REJECTION_ATTEMPTS = 64

# Phase 1 log marker of a case (a) event, resolved during the replay.
DRAW = -1

ENTITY_PREFIX = 'urn:kgsim:entity:'
RELATIONSHIP_PREFIX = 'urn:kgsim:relationship:'


def seed_sequence(seed, *spawn_key):
    return np.random.SeedSequence(seed, spawn_key=spawn_key)


class UniformStream:
    """
    Uniform doubles in [0, 1) from a PCG64 generator, drawn in blocks.
    """

    def __init__(self, sequence, block=UNIFORM_BLOCK):
        self._generator = np.random.Generator(np.random.PCG64(sequence))
        self._block = block
        self._buffer = []
        self._position = 0

    def next(self):
        if self._position == len(self._buffer):
            self._buffer = self._generator.random(self._block).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value


def attach_stream(seed, relationship_id, role):
    return UniformStream(seed_sequence(seed, ATTACH_STREAM, relationship_id * len(ROLES) + ROLES.index(role)))


@dataclass
class GenerationResult:
    config: object
    seed: int
    edges: np.ndarray
    registry: EntityRegistry
    telemetry: SimulationTelemetry

    @property
    def exceptional_steps(self):
        return self.telemetry.final_exceptional

    def edge_stream(self):
        return EdgeStream(
            self.edges,
            SyntheticLabels(len(self.registry), ENTITY_PREFIX),
            SyntheticLabels(self.config.n, RELATIONSHIP_PREFIX),
        )


class _Timeline:
    """
    The step loop shared by both generation paths.

    ``on_attach(entity, relationship_id, role)`` is called for every seed, case (b)
    and case (c) attachment; ``on_draw(relationship_id, role)`` resolves case (a).
    """

    def __init__(self, config, seed, on_attach, on_draw):
        self.config = config
        self.seed = seed
        self.roles = config.active_roles
        self.registry = EntityRegistry(config.n)
        self.on_attach = on_attach
        self.on_draw = on_draw
        self.timeline = UniformStream(seed_sequence(seed, TIMELINE_STREAM))
        self.pool = UniformStream(seed_sequence(seed, POOL_STREAM))
        self.cumulative_rho = np.cumsum([relationship.rho for relationship in config.relationships]).tolist()
        self.relationship_facts = [0] * config.n
        self.exceptional = 0
        samples = config.telemetry_samples or settings.KGSIM_TELEMETRY_SAMPLES
        self.sample_steps = sample_steps(config.steps, samples)
        self.telemetry = SimulationTelemetry(num_relationships=config.n)

    def attach(self, entity, relationship_id, role):
        self.registry.attach(entity, relationship_id, role)
        self.on_attach(entity, relationship_id, role)
        return entity

    def seed_graph(self, emit):
        """
        One fresh entity per relationship and active role, attached with degree 1.
        """
        for relationship_id in range(self.config.n):
            endpoints = {}
            for role in self.roles:
                entity = self.registry.create(relationship_id, 0)
                endpoints[role] = self.attach(entity, relationship_id, role)
            emit(0, relationship_id, endpoints)

    def draw_relationship(self):
        relationship_id = bisect_right(self.cumulative_rho, self.timeline.next())
        return min(relationship_id, self.config.n - 1)

    def excluded(self, relationship_id, role):
        if self.config.exclusion_scope == SCOPE_RELATIONSHIP:
            return self.registry.members(relationship_id)
        return self.registry.attached(relationship_id, role)

    def reuse(self, relationship_id, role):
        """
        Case (c): a uniform pick among the entities not attached yet, None when there is none.
        """
        excluded = self.excluded(relationship_id, role)
        size = len(self.registry)
        if len(excluded) >= size:
            return None
        for _ in range(REJECTION_ATTEMPTS):
            entity = int(self.pool.next() * size)
            if entity not in excluded:
                return entity
        candidates = np.setdiff1d(
            np.arange(size, dtype=np.int64),
            np.fromiter(excluded, dtype=np.int64, count=len(excluded)),
        )
        return int(candidates[int(self.pool.next() * candidates.shape[0])])

    def step(self, step):
        relationship_id = self.draw_relationship()
        parameters = self.config.relationships[relationship_id].roles
        endpoints = {}
        for role in self.roles:
            beta = parameters[role].beta
            uniform = self.timeline.next()
            if uniform < beta:
                endpoints[role] = self.on_draw(relationship_id, role)
                continue
            entity = None
            if uniform >= beta + (1 - beta) * self.config.sigma[role]:
                entity = self.reuse(relationship_id, role)
                if entity is None:
                    self.exceptional += 1
            if entity is None:
                entity = self.registry.create(relationship_id, step)
            endpoints[role] = self.attach(entity, relationship_id, role)
        self.relationship_facts[relationship_id] += 1
        return relationship_id, endpoints

    def sample(self, step):
        self.telemetry.record(step, self.registry, self.exceptional, self.relationship_facts)

    def run(self, emit):
        self.seed_graph(emit)
        pending = iter(self.sample_steps)
        next_sample = next(pending)
        if next_sample == 0:
            self.sample(0)
            next_sample = next(pending, None)
        for step in range(1, self.config.steps + 1):
            relationship_id, endpoints = self.step(step)
            emit(step, relationship_id, endpoints)
            if step == next_sample:
                self.sample(step)
                next_sample = next(pending, None)
        if self.exceptional:
            logger.info('%d of %d steps were exceptional', self.exceptional, self.config.steps)
        return self


class _EdgeColumns:
    """
    Accumulates facts column by column; absent roles get NULL_ENTITY.
    """

    def __init__(self):
        self.subjects = []
        self.relationships = []
        self.objects = []

    def append(self, relationship_id, endpoints):
        self.subjects.append(endpoints.get(ROLE_OUT, NULL_ENTITY))
        self.relationships.append(relationship_id)
        self.objects.append(endpoints.get(ROLE_IN, NULL_ENTITY))

    def to_array(self):
        return np.column_stack((
            np.asarray(self.subjects, dtype=EDGE_DTYPE),
            np.asarray(self.relationships, dtype=EDGE_DTYPE),
            np.asarray(self.objects, dtype=EDGE_DTYPE),
        )).reshape(-1, 3)


def resolve_seed(config, seed=None):
    seed = config.seed if seed is None else seed
    if seed is None:
        seed = settings.KGSIM_DEFAULT_SEED
    return int(seed)


def _log_done(config, edges, registry):
    logger.info(
        'Generated %d facts (%d steps) over %d entities and %d relationships',
        edges.shape[0], config.steps, len(registry), config.n,
    )


def generate(config, seed=None):
    """
    Runs the generation with one degree-weighted index per (relationship, role).

    The edge stream starts with the seed facts, one per relationship, followed
    by one fact per step.

    Returns:
        GenerationResult
    """
    config.validate()
    seed = resolve_seed(config, seed)
    indexes = {
        (relationship_id, role): DegreeWeightedIndex(relationship.roles[role].alpha)
        for relationship_id, relationship in enumerate(config.relationships)
        for role in config.active_roles
    }
    streams = {}
    columns = _EdgeColumns()

    def on_attach(entity, relationship_id, role):
        indexes[(relationship_id, role)].add(entity)

    def on_draw(relationship_id, role):
        key = (relationship_id, role)
        if key not in streams:
            streams[key] = attach_stream(seed, relationship_id, role)
        return indexes[key].draw(streams[key].next())

    timeline = _Timeline(config, seed, on_attach, on_draw).run(
        lambda step, relationship_id, endpoints: columns.append(relationship_id, endpoints),
    )
    edges = columns.to_array()
    _log_done(config, edges, timeline.registry)
    return GenerationResult(config, seed, edges, timeline.registry, timeline.telemetry)


@dataclass
class RelationshipLog:
    """
    The events of one relationship in timeline order: the step of each fact and,
    per generated role, the attached entity or DRAW for a case (a) draw.
    The first event is the seed fact at step 0.
    """
    relationship_id: int
    steps: list
    entities: dict

    def to_arrays(self):
        payload = {'steps': np.asarray(self.steps, dtype=np.int64)}
        for role, entities in self.entities.items():
            payload[f'entities_{role}'] = np.asarray(entities, dtype=np.int64)
        return payload

    def save(self, path):
        with open(path, 'wb') as handle:
            np.savez(handle, relationship_id=self.relationship_id, **self.to_arrays())
        return path

    @classmethod
    def load(cls, path):
        with np.load(path) as payload:
            entities = {
                role: payload[f'entities_{role}'].tolist()
                for role in ROLES if f'entities_{role}' in payload.files
            }
            return cls(int(payload['relationship_id']), payload['steps'].tolist(), entities)


def replay_relationship(log, alphas, seed):
    """
    Resolves the case (a) draws of one relationship with its own degree-weighted
    index per role, consuming the same attach streams as ``generate``.

    Arguments:
        log (RelationshipLog): the relationship's events.
        alphas (dict): role -> alpha_r.
        seed (int): the run seed.
    Returns:
        np.ndarray: (facts, 3) edges of the relationship in event order.
    """
    columns = {}
    for role, entities in log.entities.items():
        index = DegreeWeightedIndex(alphas[role])
        stream = attach_stream(seed, log.relationship_id, role)
        resolved = []
        for entity in entities:
            if entity == DRAW:
                resolved.append(index.draw(stream.next()))
            else:
                index.add(entity)
                resolved.append(entity)
        columns[role] = np.asarray(resolved, dtype=EDGE_DTYPE)
        logger.debug('Replayed %d %s events of relationship %d over %d entities',
                     len(entities), role, log.relationship_id, len(index))
    facts = len(log.steps)
    edges = np.full((facts, 3), NULL_ENTITY, dtype=EDGE_DTYPE)
    edges[:, 1] = log.relationship_id
    for role, values in columns.items():
        edges[:, ROLE_COLUMNS[role]] = values
    return edges


def replay_locally(logs, config, seed):
    return [
        replay_relationship(
            log,
            {role: parameters.alpha for role, parameters in config.relationships[log.relationship_id].roles.items()},
            seed,
        )
        for log in logs
    ]


def generate_per_relationship(config, seed=None, replay=None):
    """
    Two-phase generation with the same output as ``generate``.

    Phase 1 walks the timeline, resolving cases (b) and (c) against the entity
    registry and logging every event per relationship; case (a) is only marked.
    Phase 2 replays each relationship's log separately, so only one relationship's
    degree index is built at a time.

    Arguments:
        replay: callable(logs, config, seed) returning one edge array per log, in
            log order. Defaults to replaying in this process.
    """
    config.validate()
    seed = resolve_seed(config, seed)
    roles = config.active_roles
    logs = [RelationshipLog(relationship_id, [], {role: [] for role in roles}) for relationship_id in range(config.n)]

    def emit(step, relationship_id, endpoints):
        log = logs[relationship_id]
        log.steps.append(step)
        for role, entity in endpoints.items():
            log.entities[role].append(entity)

    timeline = _Timeline(config, seed, on_attach=lambda *args: None, on_draw=lambda *args: DRAW).run(emit)
    replayed = (replay or replay_locally)(logs, config, seed)
    steps = np.concatenate([np.asarray(log.steps, dtype=np.int64) for log in logs])
    relationship_ids = np.concatenate([np.full(len(log.steps), log.relationship_id, dtype=np.int64) for log in logs])
    # Seed facts share step 0 and come in relationship order; every later step holds one fact.
    order = np.lexsort((relationship_ids, steps))
    edges = np.concatenate(replayed)[order]
    _log_done(config, edges, timeline.registry)
    return GenerationResult(config, seed, edges, timeline.registry, timeline.telemetry)

