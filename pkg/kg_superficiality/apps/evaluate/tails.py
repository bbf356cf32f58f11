"""
Power-law tail estimates of degree histograms.
"""
import numpy as np

from kg_superficiality.apps.core.exceptions import DomainError


BINS_PER_DECADE = 10
MIN_BIN_ENTITIES = 5


def log_bins(histogram, k_min, bins_per_decade=BINS_PER_DECADE):
    """
    Groups the degrees k >= k_min into logarithmic bins of whole degrees.

    Returns:
        (centres, densities, entities): per non-empty bin the geometric centre,
        the entity count per unit degree and the entity count.
    """
    if k_min < 1:
        raise DomainError(f'k_min must be at least 1, got {k_min}')
    k_max = histogram.k_max
    if k_max < k_min:
        raise DomainError(f'no degrees at or above k_min={k_min} (k_max={k_max})')
    decades = np.log10((k_max + 1) / k_min)
    count = max(1, int(np.ceil(decades * bins_per_decade)))
    edges = np.unique(np.floor(np.logspace(np.log10(k_min), np.log10(k_max + 1), count + 1) + 1e-9).astype(np.int64))
    edges[0] = k_min
    edges[-1] = max(edges[-1], k_max + 1)
    bins = np.searchsorted(edges, histogram.degrees, side='right') - 1
    inside = (histogram.degrees >= k_min) & (bins < edges.shape[0] - 1)
    entities = np.bincount(bins[inside], weights=histogram.counts[inside], minlength=edges.shape[0] - 1)
    widths = np.diff(edges)
    centres = np.sqrt(edges[:-1] * (edges[1:] - 1).astype(np.float64))
    keep = entities > 0
    return centres[keep], entities[keep] / widths[keep], entities[keep]


def powerlaw_tail(histogram, k_min=10, bins_per_decade=BINS_PER_DECADE, min_entities=MIN_BIN_ENTITIES):
    """
    Tail exponent gamma of P(k) ~ k^-gamma for k >= k_min: least squares of the
    log density against the log bin centre over log bins holding at least
    ``min_entities`` entities.
    """
    centres, densities, entities = log_bins(histogram, k_min, bins_per_decade)
    keep = entities >= min_entities
    if np.count_nonzero(keep) < 2:
        raise DomainError(f'the tail above k_min={k_min} has fewer than two populated log bins')
    slope, _ = np.polyfit(np.log(centres[keep]), np.log(densities[keep]), 1)
    return float(-slope)
