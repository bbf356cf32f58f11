"""
Degree-weighted sampling of the entities attached to one relationship in one role.
"""
import numpy as np


MIN_CAPACITY = 16


class DegreeWeightedIndex:
    """
    Sum tree over entity weights w_e = k_e^alpha, where k_e is the entity's
    degree for the relationship and role.

    Leaves hold the weights of the attached entities in attachment order; every
    internal node holds the sum of its two children, so the root is the
    normalization Z. Weights are always recomputed from the integer degree and
    parents from their children, so Z never accumulates rounding drift.
    Sampling and updating walk one root-to-leaf path: O(log m).
    """

    def __init__(self, alpha, capacity=MIN_CAPACITY):
        if not 0 <= alpha <= 1:
            raise ValueError(f'alpha must lie in [0, 1], got {alpha}')
        self.alpha = float(alpha)
        self._capacity = MIN_CAPACITY
        while self._capacity < capacity:
            self._capacity *= 2
        self._value = [0.0] * (2 * self._capacity)
        self._entities = []
        self._degrees = []

    def __len__(self):
        return len(self._entities)

    @property
    def total(self):
        """Z, the sum of all weights."""
        return self._value[1]

    @property
    def entities(self):
        return list(self._entities)

    @property
    def degrees(self):
        return list(self._degrees)

    def weight(self, degree):
        return float(degree) ** self.alpha

    def weights(self):
        return np.array(self._value[self._capacity:self._capacity + len(self)])

    def _set(self, slot, value):
        node = slot + self._capacity
        self._value[node] = value
        node >>= 1
        while node >= 1:
            self._value[node] = self._value[node << 1] + self._value[node << 1 | 1]
            node >>= 1

    def _grow(self):
        leaves = self._value[self._capacity:]
        self._capacity *= 2
        self._value = [0.0] * self._capacity + leaves + [0.0] * (self._capacity - len(leaves))
        for node in range(self._capacity - 1, 0, -1):
            self._value[node] = self._value[node << 1] + self._value[node << 1 | 1]

    def add(self, entity, degree=1):
        """
        Attaches ``entity`` with ``degree`` (1 for a new attachment, weight 1 for any alpha).

        Returns:
            int: the entity's slot.
        """
        slot = len(self._entities)
        if slot == self._capacity:
            self._grow()
        self._entities.append(entity)
        self._degrees.append(degree)
        self._set(slot, self.weight(degree))
        return slot

    def find(self, target):
        """
        Returns the slot whose cumulative weight interval contains ``target`` in [0, Z).
        """
        node = 1
        capacity = self._capacity
        value = self._value
        while node < capacity:
            left = node << 1
            if target < value[left]:
                node = left
            else:
                target -= value[left]
                node = left | 1
        # Rounding can step past the last occupied leaf.
        return min(node - capacity, len(self._entities) - 1)

    def sample(self, uniform):
        """
        Maps a uniform draw in [0, 1) to a slot with probability w_e / Z.
        """
        return self.find(uniform * self._value[1])

    def sample_many(self, uniforms):
        """
        Vectorized ``sample`` for a frozen index.
        """
        value = np.asarray(self._value)
        targets = np.asarray(uniforms, dtype=np.float64) * value[1]
        nodes = np.ones(targets.shape[0], dtype=np.int64)
        while nodes[0] < self._capacity:
            left = nodes << 1
            left_values = value[left]
            go_left = targets < left_values
            targets = np.where(go_left, targets, targets - left_values)
            nodes = np.where(go_left, left, left | 1)
        return np.minimum(nodes - self._capacity, len(self._entities) - 1)

    def increment(self, slot):
        """
        Adds one fact to the entity in ``slot`` and returns the entity.
        """
        self._degrees[slot] += 1
        self._set(slot, self.weight(self._degrees[slot]))
        return self._entities[slot]

    def draw(self, uniform):
        """
        Samples an entity by weight and increments its degree.
        """
        return self.increment(self.sample(uniform))
