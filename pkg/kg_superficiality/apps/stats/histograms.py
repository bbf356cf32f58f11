"""
Sparse degree histograms: degree -> number of entities with that degree.
"""
from dataclasses import dataclass

import numpy as np

from kg_superficiality.apps.core.utils import read_csv, write_csv


GLOBAL = 'global'
HISTOGRAM_HEADER = ('degree', 'count', 'probability')


@dataclass
class DegreeHistogram:
    """
    Degrees present (sorted, positive) and the number of entities having each.
    """
    degrees: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_degrees(cls, degree_values):
        values = np.asarray(degree_values, dtype=np.int64)
        values = values[values > 0]
        degrees, counts = np.unique(values, return_counts=True)
        return cls(degrees.astype(np.int64), counts.astype(np.int64))

    @classmethod
    def from_mapping(cls, mapping):
        items = sorted((int(degree), int(count)) for degree, count in mapping.items() if count)
        if not items:
            return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        degrees, counts = zip(*items)
        return cls(np.array(degrees, dtype=np.int64), np.array(counts, dtype=np.int64))

    def __len__(self):
        return int(self.degrees.shape[0])

    @property
    def total_entities(self):
        return int(self.counts.sum())

    @property
    def total_facts(self):
        return int((self.degrees * self.counts).sum())

    @property
    def k_max(self):
        return int(self.degrees[-1]) if len(self) else 0

    def probabilities(self):
        total = self.total_entities
        if not total:
            return np.zeros(0)
        return self.counts / total

    def as_dict(self):
        return dict(zip(self.degrees.tolist(), self.counts.tolist()))

    def probability_of(self, degrees):
        """
        P(k) for every k in ``degrees`` (0 for degrees absent from the histogram).
        """
        degrees = np.asarray(degrees, dtype=np.int64)
        result = np.zeros(degrees.shape[0])
        if not len(self):
            return result
        positions = np.searchsorted(self.degrees, degrees)
        positions = np.minimum(positions, len(self) - 1)
        found = self.degrees[positions] == degrees
        result[found] = self.probabilities()[positions[found]]
        return result

    def __add__(self, other):
        degrees = np.concatenate((self.degrees, other.degrees))
        counts = np.concatenate((self.counts, other.counts))
        merged, inverse = np.unique(degrees, return_inverse=True)
        return DegreeHistogram(merged, np.bincount(inverse, weights=counts).astype(np.int64))

    def rows(self):
        return zip(self.degrees.tolist(), self.counts.tolist(), self.probabilities().tolist())

    def write(self, path):
        return write_csv(path, HISTOGRAM_HEADER, self.rows())

    @classmethod
    def read(cls, path):
        rows = read_csv(path)
        return cls(
            np.array([int(row['degree']) for row in rows], dtype=np.int64),
            np.array([int(row['count']) for row in rows], dtype=np.int64),
        )


def build_histograms(tables):
    """
    Histograms of one role's degree tables.

    Returns:
        dict: relationship id -> DegreeHistogram, plus ``'global'`` for the per-entity totals.
    """
    histograms = {
        relationship_id: DegreeHistogram.from_degrees(degrees.degrees)
        for relationship_id, degrees in tables.relationships.items()
    }
    histograms[GLOBAL] = DegreeHistogram.from_degrees(tables.entity_degrees)
    return histograms


def histogram_file_name(role, key):
    return f'hist_{role}_{key}.csv'
