"""
Kullback-Leibler divergence between degree histograms, and the tables that report it.
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from django.conf import settings
from scipy.special import rel_entr

from kg_superficiality.apps.core.constants import DIVERGENCE_FILE
from kg_superficiality.apps.core.exceptions import DomainError
from kg_superficiality.apps.core.utils import write_csv, write_json


logger = logging.getLogger(__name__)

DIVERGENCE_HEADER = ('variant', 'role', 'kl', 'epsilon', 'seed', 'floored')
ORIENTATION = 'KL(reference || generated)'
DIVERGENCE_SUMMARY_FILE = 'divergence_summary.json'


@dataclass(frozen=True)
class Divergence:
    """
    KL(p || q) on the union of both supports.

    ``floored`` counts the degrees of p's support that q lacks and that got the
    floor probability ``epsilon``.
    """
    kl: float
    epsilon: float
    floored: int
    support_reference: int
    support_generated: int


def kl_divergence(reference, generated, floor_factor=None):
    """
    sum_k p(k) ln(p(k) / q'(k)) over the degrees with p(k) > 0, where q' replaces
    empty generated bins by epsilon = 1 / (floor_factor * N_q) and is renormalized.

    Arguments:
        reference (DegreeHistogram): p, the real or ground-truth distribution.
        generated (DegreeHistogram): q, with N_q entities.
    """
    if not len(reference) or not len(generated):
        raise DomainError('empty histogram: KL divergence needs entities on both sides')
    floor_factor = floor_factor or settings.KGSIM_KL_FLOOR_FACTOR
    epsilon = 1 / (floor_factor * generated.total_entities)
    support = np.union1d(reference.degrees, generated.degrees)
    p = reference.probability_of(support)
    q = generated.probability_of(support)
    missing = (q == 0) & (p > 0)
    floored = int(np.count_nonzero(missing))
    if floored:
        q = np.where(missing, epsilon, q)
        q = q / q.sum()
        logger.debug('KL floor used for %d degrees (epsilon=%g)', floored, epsilon)
    kl = float(math.fsum(rel_entr(p, q).tolist()))
    return Divergence(
        kl=max(kl, 0.0),
        epsilon=epsilon,
        floored=floored,
        support_reference=len(reference),
        support_generated=len(generated),
    )


@dataclass
class DivergenceRow:
    variant: str
    role: str
    seed: Optional[int]
    divergence: Divergence


@dataclass
class DivergenceReport:
    """
    KL values of several generated distributions against one reference, per role.
    The reference is always the first argument of the divergence.
    """
    rows: List[DivergenceRow] = field(default_factory=list)
    orientation: str = ORIENTATION

    def add(self, variant, role, seed, divergence):
        self.rows.append(DivergenceRow(variant, role, seed, divergence))

    def mean_by_variant(self, role):
        values = {}
        for row in self.rows:
            if row.role == role:
                values.setdefault(row.variant, []).append(row.divergence.kl)
        return {variant: math.fsum(kls) / len(kls) for variant, kls in values.items()}

    def best_variant(self, role):
        means = self.mean_by_variant(role)
        return min(means, key=means.get) if means else None

    def table(self):
        return [
            (row.variant, row.role, row.divergence.kl, row.divergence.epsilon, row.seed, row.divergence.floored)
            for row in self.rows
        ]

    def summary(self):
        roles = sorted({row.role for row in self.rows})
        return {
            'orientation': self.orientation,
            'roles': {
                role: {'mean_kl': self.mean_by_variant(role), 'best_variant': self.best_variant(role)}
                for role in roles
            },
            'floored_rows': sum(1 for row in self.rows if row.divergence.floored),
        }

    def write(self, out_dir):
        write_csv(os.path.join(out_dir, DIVERGENCE_FILE), DIVERGENCE_HEADER, self.table())
        write_json(os.path.join(out_dir, DIVERGENCE_SUMMARY_FILE), self.summary())
        return os.path.join(out_dir, DIVERGENCE_FILE)


def head_table(reference, generated_by_label, head_degrees=None):
    """
    P(k) for k = 1..head_degrees: the reference column, then one column per label.

    Returns:
        (header, rows)
    """
    head_degrees = head_degrees or settings.KGSIM_HEAD_DEGREES
    degrees = np.arange(1, head_degrees + 1)
    labels = list(generated_by_label)
    columns = [reference.probability_of(degrees)] + [generated_by_label[label].probability_of(degrees) for label in labels]
    header = ['k', 'P_reference'] + [f'P_{label}' for label in labels]
    rows = [[int(degree)] + [float(column[index]) for column in columns] for index, degree in enumerate(degrees)]
    return header, rows
