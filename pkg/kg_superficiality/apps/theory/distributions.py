"""
Closed forms of the superficiality model.

Nothing here simulates: every function is a direct evaluation, so simulation
results can be checked against it.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from kg_superficiality.apps.core.exceptions import DomainError


# Below this distance from 1 the max-degree formula switches to its alpha = 1 limit.
ALPHA_ONE_TOLERANCE = 1e-9


def check_relationship_constraint(n, sigma):
    """
    Raises DomainError unless ``n > 1/sigma - 1`` (with ``0 < sigma <= 1`` and ``n >= 1``).
    """
    if not 0 < sigma <= 1:
        raise DomainError(f'sigma must satisfy 0 < sigma <= 1, got sigma={sigma}')
    if n < 1:
        raise DomainError(f'n must be at least 1, got n={n}')
    minimum = 1 / sigma - 1
    if not n > minimum:
        raise DomainError(
            f'n > 1/sigma - 1 does not hold for n={n}, sigma={sigma}: '
            f'needs n > {minimum:g}'
        )


def _check_distribution_domain(n, sigma):
    check_relationship_constraint(n, sigma)
    if sigma < 1 and not n * sigma > 1:
        raise DomainError(
            f'the distribution of distinct relationship counts needs n > 1/sigma - 1 and n*sigma > 1; '
            f'n*sigma = {n * sigma:g} for n={n}, sigma={sigma}'
        )


@dataclass(frozen=True)
class RelationshipCountDistribution:
    """
    P(r_e = r), the probability that an entity is attached to exactly r distinct
    relationships, for r = 1..n, together with the constants K_1..K_n.
    """
    n: int
    sigma: float
    probabilities: Tuple[float, ...]
    constants: Tuple[float, ...]

    def __getitem__(self, r):
        """P(r) for 1 <= r <= n."""
        if not 1 <= r <= self.n:
            raise IndexError(r)
        return self.probabilities[r - 1]

    def cumulative(self, r_max):
        return math.fsum(self.probabilities[:r_max])

    @property
    def mode(self):
        return int(np.argmax(self.probabilities)) + 1

    def rows(self):
        return [(r, probability) for r, probability in enumerate(self.probabilities, start=1)]


def relationship_count_distribution(n, sigma):
    """
    Evaluates P(r) = (K_1 ... K_{r-1}) / ((1 + K_1) ... (1 + K_r)) with
    K_i = (1 - sigma) / (n*sigma - 1) * (n - i).

    Products are taken as sums of logarithms so that n in the thousands does not overflow.
    """
    n = int(n)
    _check_distribution_domain(n, sigma)
    if sigma == 1:
        probabilities = np.zeros(n)
        probabilities[0] = 1.0
        return RelationshipCountDistribution(n, sigma, tuple(probabilities), tuple(np.zeros(n)))

    constants = (1 - sigma) / (n * sigma - 1) * (n - np.arange(1, n + 1, dtype=np.float64))
    log_numerators = np.concatenate(([0.0], np.cumsum(np.log(constants[:-1]))))
    log_denominators = np.cumsum(np.log1p(constants))
    probabilities = np.exp(log_numerators - log_denominators)
    return RelationshipCountDistribution(n, sigma, tuple(probabilities.tolist()), tuple(constants.tolist()))


def misdescribed_proportion(n, sigma, r_max):
    """
    P(r_e <= r_max): the share of entities attached to at most ``r_max`` relationships.
    """
    if not 1 <= r_max <= n:
        raise DomainError(f'r_max must satisfy 1 <= r_max <= n, got r_max={r_max}, n={n}')
    return relationship_count_distribution(n, sigma).cumulative(r_max)


def misdescribed_limit(sigma, r_max):
    """
    The n -> infinity limit of ``misdescribed_proportion``: 1 - (1 - sigma)^r_max.
    """
    if not 0 < sigma <= 1:
        raise DomainError(f'sigma must satisfy 0 < sigma <= 1, got sigma={sigma}')
    return 1 - (1 - sigma) ** r_max


def powerlaw_exponent(beta):
    """
    Tail exponent 1 + 1/beta of the degree distribution under linear attachment.
    """
    if not 0 < beta <= 1:
        raise DomainError(f'the power-law exponent needs 0 < beta <= 1, got beta={beta}')
    return 1 + 1 / beta


def mean_max_degree(alpha, beta, t):
    """
    Expected maximum degree after ``t`` facts of a relationship whose first entity
    arrived at the first step:

        (beta * (1 - beta)^(alpha - 1) * (1 - alpha) * ln t + 1)^(1 / (1 - alpha))

    and the limit t^beta when alpha is 1.
    """
    if t <= 1:
        return 1.0
    if 1 - alpha < ALPHA_ONE_TOLERANCE:
        return float(t) ** beta
    growth = beta * (1 - beta) ** (alpha - 1) * (1 - alpha) * math.log(t)
    return math.exp(math.log1p(growth) / (1 - alpha))


@dataclass(frozen=True)
class HeatmapCell:
    n: int
    sigma: float
    value: float
    defined: bool


def heatmap_grid(n_values, sigma_values, r_max):
    """
    ``misdescribed_proportion`` over every (n, sigma) pair; pairs outside the
    domain are returned with ``defined`` False and a NaN value.
    """
    cells = []
    for sigma in sigma_values:
        for n in n_values:
            try:
                value = misdescribed_proportion(n, sigma, min(r_max, n))
            except DomainError:
                cells.append(HeatmapCell(int(n), float(sigma), math.nan, False))
            else:
                cells.append(HeatmapCell(int(n), float(sigma), value, True))
    return cells


def parse_range(text, cast=float):
    """
    Parses ``START:STOP[:STEP]`` (STOP included when it lies on the grid) or a
    comma-separated list of values.
    """
    text = text.strip()
    if ':' not in text:
        return [cast(value) for value in text.split(',') if value.strip()]
    parts = text.split(':')
    if len(parts) not in (2, 3):
        raise ValueError(f'expected START:STOP[:STEP], got {text!r}')
    start, stop = cast(parts[0]), cast(parts[1])
    step = cast(parts[2]) if len(parts) == 3 else cast(1)
    if step <= 0:
        raise ValueError(f'step must be positive, got {parts[2]!r}')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise ValueError(f'empty range {text!r}')
    if cast is float:
        return [round(start + index * step, 12) for index in range(count)]
    return [start + index * step for index in range(count)]
