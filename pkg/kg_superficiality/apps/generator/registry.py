"""
Bookkeeping of the entities of a synthetic graph: who created them, when, and
which (relationship, role) pairs they are attached to.
"""
import logging
from collections import Counter

import numpy as np

from kg_superficiality.apps.core.constants import ROLES
from kg_superficiality.apps.core.exceptions import ConsistencyError


logger = logging.getLogger(__name__)


class EntityRegistry:
    """
    Entity ids are allocated in creation order starting at 0.

    Besides the per-(relationship, role) attachment sets used to exclude entities
    from case (c), the registry keeps the counters the telemetry samples:
    ``relationship_entities`` (m_r, distinct entities of r in any role) and the
    histogram M_i of entities attached to exactly i distinct relationships.
    """

    def __init__(self, num_relationships):
        self.num_relationships = num_relationships
        self.creators = []
        self.created_at = []
        self._attached = {}
        self._members = [set() for _ in range(num_relationships)]
        self._relationship_counts = []
        self._relationship_histogram = Counter()
        self._log_entities = []
        self._log_relationships = []
        self._log_roles = []

    def __len__(self):
        return len(self.creators)

    def create(self, relationship_id, step):
        entity = len(self.creators)
        self.creators.append(relationship_id)
        self.created_at.append(step)
        self._relationship_counts.append(0)
        return entity

    def attached(self, relationship_id, role):
        """Entities attached to ``relationship_id`` in ``role``."""
        return self._attached.setdefault((relationship_id, role), set())

    def members(self, relationship_id):
        """Entities attached to ``relationship_id`` in any role."""
        return self._members[relationship_id]

    def attach(self, entity, relationship_id, role):
        attached = self.attached(relationship_id, role)
        if entity in attached:
            raise ConsistencyError(f'entity {entity} is already attached to relationship {relationship_id} ({role})')
        attached.add(entity)
        self._log_entities.append(entity)
        self._log_relationships.append(relationship_id)
        self._log_roles.append(ROLES.index(role))
        members = self._members[relationship_id]
        if entity not in members:
            members.add(entity)
            count = self._relationship_counts[entity]
            if count:
                self._relationship_histogram[count] -= 1
            self._relationship_histogram[count + 1] += 1
            self._relationship_counts[entity] = count + 1

    def relationship_entities(self):
        """m_r for every relationship."""
        return [len(members) for members in self._members]

    def relationship_histogram(self, max_count=None):
        """
        M_i for i = 1..max_count (default: the number of relationships).
        """
        max_count = max_count or self.num_relationships
        return [self._relationship_histogram[count] for count in range(1, max_count + 1)]

    def attachments(self, entity):
        """
        The (relationship, role) pairs of ``entity`` in attachment order.
        """
        entities = np.asarray(self._log_entities, dtype=np.int64)
        positions = np.flatnonzero(entities == entity)
        return [(self._log_relationships[position], ROLES[self._log_roles[position]]) for position in positions]

    def to_arrays(self):
        return {
            'creators': np.asarray(self.creators, dtype=np.int64),
            'created_at': np.asarray(self.created_at, dtype=np.int64),
            'attachment_entities': np.asarray(self._log_entities, dtype=np.int64),
            'attachment_relationships': np.asarray(self._log_relationships, dtype=np.int64),
            'attachment_roles': np.asarray(self._log_roles, dtype=np.int8),
        }

    def save(self, path):
        with open(path, 'wb') as handle:
            np.savez_compressed(handle, num_relationships=self.num_relationships, **self.to_arrays())
        return path

    @classmethod
    def load(cls, path):
        with np.load(path) as payload:
            registry = cls(int(payload['num_relationships']))
            for relationship_id, step in zip(payload['creators'].tolist(), payload['created_at'].tolist()):
                registry.create(relationship_id, step)
            for entity, relationship_id, role in zip(
                payload['attachment_entities'].tolist(),
                payload['attachment_relationships'].tolist(),
                payload['attachment_roles'].tolist(),
            ):
                registry.attach(entity, relationship_id, ROLES[role])
        return registry
