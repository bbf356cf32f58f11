"""
Time series sampled during a generation.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from kg_superficiality.apps.core.utils import read_csv, write_csv


def sample_steps(steps, samples):
    """
    Step 0 plus up to ``samples`` log-spaced steps in [1, steps], always including ``steps``.

    Rounding merges neighbouring early steps, so fewer than ``samples + 1`` rows are common.
    """
    if steps <= 0:
        return [0]
    if samples <= 1:
        return [0, int(steps)]
    spaced = np.round(np.geomspace(1, steps, samples)).astype(np.int64)
    return [0] + np.unique(np.append(spaced, steps)).tolist()


@dataclass
class SimulationTelemetry:
    """
    One row per sampled step t: m(t), the exceptional-step count, m_r(t) and
    F_r(t) per relationship and M_i(t) for i = 1..n.

    F_r counts the facts of post-seed steps, so sum_r F_r(t) = t.
    """
    num_relationships: int
    steps: List[int] = field(default_factory=list)
    entities: List[int] = field(default_factory=list)
    exceptional: List[int] = field(default_factory=list)
    relationship_entities: List[List[int]] = field(default_factory=list)
    relationship_facts: List[List[int]] = field(default_factory=list)
    relationship_histogram: List[List[int]] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def record(self, step, registry, exceptional, relationship_facts):
        self.steps.append(int(step))
        self.entities.append(len(registry))
        self.exceptional.append(int(exceptional))
        self.relationship_entities.append(registry.relationship_entities())
        self.relationship_facts.append(list(relationship_facts))
        self.relationship_histogram.append(registry.relationship_histogram(self.num_relationships))

    @property
    def final_exceptional(self):
        return self.exceptional[-1] if self.exceptional else 0

    def last(self):
        """The final row as a dict of arrays."""
        return {
            't': self.steps[-1],
            'm': self.entities[-1],
            'exceptional': self.exceptional[-1],
            'm_r': np.asarray(self.relationship_entities[-1]),
            'f_r': np.asarray(self.relationship_facts[-1]),
            'M': np.asarray(self.relationship_histogram[-1]),
        }

    def invariant_violations(self):
        """
        Steps where sum_i M_i != m or sum_r F_r != t.
        """
        violations = []
        for row, step in enumerate(self.steps):
            if sum(self.relationship_histogram[row]) != self.entities[row]:
                violations.append((step, 'M'))
            if sum(self.relationship_facts[row]) != step:
                violations.append((step, 'F'))
        return violations

    def header(self):
        n = self.num_relationships
        return (
            ['t', 'm', 'exceptional']
            + [f'm_r_{index}' for index in range(n)]
            + [f'f_r_{index}' for index in range(n)]
            + [f'M_{count}' for count in range(1, n + 1)]
        )

    def rows(self):
        for row, step in enumerate(self.steps):
            yield (
                [step, self.entities[row], self.exceptional[row]]
                + self.relationship_entities[row]
                + self.relationship_facts[row]
                + self.relationship_histogram[row]
            )

    def write(self, path):
        return write_csv(path, self.header(), self.rows())

    @classmethod
    def read(cls, path):
        rows = read_csv(path)
        if not rows:
            return cls(num_relationships=0)
        n = sum(1 for name in rows[0] if name.startswith('m_r_'))
        telemetry = cls(num_relationships=n)
        for row in rows:
            telemetry.steps.append(int(row['t']))
            telemetry.entities.append(int(row['m']))
            telemetry.exceptional.append(int(row['exceptional']))
            telemetry.relationship_entities.append([int(row[f'm_r_{index}']) for index in range(n)])
            telemetry.relationship_facts.append([int(row[f'f_r_{index}']) for index in range(n)])
            telemetry.relationship_histogram.append([int(row[f'M_{count}']) for count in range(1, n + 1)])
        return telemetry
