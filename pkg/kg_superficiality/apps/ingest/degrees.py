"""
Per-relationship degree tables, counted in passes over an edge stream.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from kg_superficiality.apps.core.constants import (
    NULL_ENTITY,
    ROLE_COLUMNS,
    ROLE_IN,
    ROLE_OUT,
)


logger = logging.getLogger(__name__)

RELATIONSHIP_SHIFT = np.uint64(32)
ENTITY_MASK = np.uint64(0xFFFFFFFF)


@dataclass
class RelationshipDegrees:
    """
    Degrees of the entities having at least one fact of one relationship in one role.
    """
    relationship_id: int
    entities: np.ndarray
    degrees: np.ndarray

    @property
    def facts(self):
        return int(self.degrees.sum())

    @property
    def distinct_entities(self):
        return int(self.entities.shape[0])

    @property
    def k_max(self):
        return int(self.degrees.max()) if self.degrees.size else 0

    def as_dict(self):
        return dict(zip(self.entities.tolist(), self.degrees.tolist()))


@dataclass
class DegreeTables:
    """
    The degree tables of one role: per relationship, and global per-entity totals.
    """
    role: str
    num_entities: int
    num_relationships: int
    relationships: Dict[int, RelationshipDegrees] = field(default_factory=dict)
    entity_degrees: np.ndarray = None
    relationship_facts: np.ndarray = None

    @property
    def facts(self):
        """Facts having an entity in this role."""
        return int(self.entity_degrees.sum())

    @property
    def distinct_entities(self):
        return int(np.count_nonzero(self.entity_degrees))

    @property
    def k_max(self):
        return int(self.entity_degrees.max()) if self.entity_degrees.size else 0

    def global_degrees(self):
        """Nonzero global degrees, one per entity in this role."""
        return self.entity_degrees[self.entity_degrees > 0]


def _role_column(role):
    if role not in (ROLE_IN, ROLE_OUT):
        raise ValueError(f'Unknown role {role!r}')
    return ROLE_COLUMNS[role]


def scan_degrees(edge_stream, role, grouping=1, block_edges=None):
    """
    Counts, for every relationship and entity, the facts of the relationship having
    the entity in ``role``, plus per-entity totals over all relationships.

    Relationships are split into ``grouping`` groups (by id modulo ``grouping``),
    each counted in its own pass so only one group's tables are in memory at a time.
    Endpoints equal to the null entity (single-role synthetic graphs) are skipped.
    """
    if grouping < 1:
        raise ValueError(f'grouping must be at least 1, got {grouping}')
    column = _role_column(role)
    num_entities = edge_stream.num_entities
    num_relationships = edge_stream.num_relationships

    entity_degrees = np.zeros(num_entities, dtype=np.int64)
    relationship_facts = np.zeros(num_relationships, dtype=np.int64)
    for block in edge_stream.iter_blocks(block_edges):
        relationship_facts += np.bincount(block[:, 1], minlength=num_relationships)[:num_relationships]
        endpoints = block[:, column]
        endpoints = endpoints[endpoints != NULL_ENTITY]
        entity_degrees += np.bincount(endpoints, minlength=num_entities)[:num_entities]

    tables = DegreeTables(
        role=role,
        num_entities=num_entities,
        num_relationships=num_relationships,
        entity_degrees=entity_degrees,
        relationship_facts=relationship_facts,
    )
    for group in range(grouping):
        keys, counts = [], []
        for block in edge_stream.iter_blocks(block_edges):
            relationship_ids = block[:, 1]
            endpoints = block[:, column]
            mask = endpoints != NULL_ENTITY
            if grouping > 1:
                mask &= (relationship_ids % grouping) == group
            if not mask.any():
                continue
            block_keys = (relationship_ids[mask].astype(np.uint64) << RELATIONSHIP_SHIFT) | endpoints[mask].astype(np.uint64)
            unique_keys, unique_counts = np.unique(block_keys, return_counts=True)
            keys.append(unique_keys)
            counts.append(unique_counts)
        if not keys:
            continue
        merged_keys, inverse = np.unique(np.concatenate(keys), return_inverse=True)
        merged_counts = np.bincount(inverse, weights=np.concatenate(counts)).astype(np.int64)
        relationship_ids = (merged_keys >> RELATIONSHIP_SHIFT).astype(np.int64)
        entity_ids = (merged_keys & ENTITY_MASK).astype(np.int64)
        # Keys are sorted by relationship first, so each relationship is one slice.
        splits = np.flatnonzero(np.diff(relationship_ids)) + 1
        for start, stop in zip(np.r_[0, splits], np.r_[splits, relationship_ids.shape[0]]):
            relationship_id = int(relationship_ids[start])
            tables.relationships[relationship_id] = RelationshipDegrees(
                relationship_id=relationship_id,
                entities=entity_ids[start:stop],
                degrees=merged_counts[start:stop],
            )
        logger.debug('Degree pass %d/%d (%s) counted %d relationships', group + 1, grouping, role, len(splits) + 1)
    tables.relationships = dict(sorted(tables.relationships.items()))
    return tables
