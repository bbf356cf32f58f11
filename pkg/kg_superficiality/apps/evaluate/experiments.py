"""
Experiment drivers: ablation runs against a fitted graph, the two-superficiality
multiplexing run, the refit grid and the longitudinal table.
"""
import logging
from dataclasses import dataclass

import numpy as np

from kg_superficiality.apps.core.constants import ROLE_OUT
from kg_superficiality.apps.core.exceptions import DomainError
from kg_superficiality.apps.evaluate.divergence import kl_divergence
from kg_superficiality.apps.evaluate.tails import powerlaw_tail
from kg_superficiality.apps.generator.config import GenerationConfig, ablation_variant
from kg_superficiality.apps.generator.engine import generate
from kg_superficiality.apps.ingest.degrees import scan_degrees
from kg_superficiality.apps.stats.estimators import fit_graph
from kg_superficiality.apps.stats.histograms import GLOBAL, DegreeHistogram, build_histograms
from kg_superficiality.apps.stats.reports import load_histogram, load_profiles, load_summary
from kg_superficiality.apps.theory.distributions import relationship_count_distribution


logger = logging.getLogger(__name__)

MULTIPLEXING_RELATIONSHIPS = 25
MULTIPLEXING_BETA = 0.85
MULTIPLEXING_ALPHA = 1.0
MULTIPLEXING_SIGMAS = (0.05, 0.95)
MULTIPLEXING_STEPS = 2_000_000
MULTIPLEXING_HEADER = ('k', 'P_k', 'r', 'P_r_emp', 'P_r_theory')
TAIL_K_MIN = 10

REFIT_GRID = '0.05:0.95:0.15'
REFIT_STEPS = 100_000
REFIT_HEADER = ('alpha', 'beta', 'alpha_hat', 'beta_hat', 'clamped', 'kl')

LONGITUDINAL_HEADER = ('label', 'role', 'sigma', 'n', 'entities', 'facts', 'k_max')


def generated_tables(result, role):
    stream = result.edge_stream()
    return scan_degrees(stream, role, block_edges=max(1, stream.facts))


def generated_histogram(result, role):
    """Global degree histogram of ``role`` in a generated graph."""
    return build_histograms(generated_tables(result, role))[GLOBAL]


def ablation_steps(summary, role, scale):
    """
    T = round(scale * |F|) for the facts of ``role``.
    """
    if role not in summary.roles:
        raise DomainError(f'the fitted summary has no {role} role')
    steps = int(round(scale * summary.roles[role].facts))
    if steps <= 0:
        raise DomainError(f'empty generation: round({scale} * |F|) = {steps} steps')
    return steps


@dataclass
class VariantComparison:
    variant: str
    role: str
    seed: int
    steps: int
    divergence: object
    histogram: DegreeHistogram


def compare_to_real(stats_dir, variant, seed, role=ROLE_OUT, scale=1.0):
    """
    Generates the ablation ``variant`` of a fitted graph and compares its global
    degree histogram with the fitted graph's: KL(real || generated).
    """
    profiles = load_profiles(stats_dir)
    summary = load_summary(stats_dir)
    reference = load_histogram(stats_dir, role)
    steps = ablation_steps(summary, role, scale)
    config = ablation_variant(profiles, summary, variant, role=role, steps=steps, seed=seed)
    histogram = generated_histogram(generate(config, seed), role)
    divergence = kl_divergence(reference, histogram)
    logger.info('%s (%s, seed %d, %d steps): KL=%.6g', variant, role, seed, steps, divergence.kl)
    return VariantComparison(variant, role, seed, steps, divergence, histogram)


@dataclass
class MultiplexingRun:
    """
    Empirical P(k) and P(r) of one homogeneous multiplexing run with the closed form of P(r).
    """
    sigma: float
    histogram: DegreeHistogram
    relationship_counts: np.ndarray
    theory: object
    tail_exponent: float
    exceptional_steps: int

    @property
    def empirical_mode(self):
        return int(np.argmax(self.relationship_counts)) + 1

    def total_variation(self):
        return 0.5 * float(np.abs(self.relationship_counts - np.asarray(self.theory.probabilities)).sum())

    def rows(self):
        probabilities = self.histogram.probabilities()
        length = max(len(self.histogram), self.theory.n)
        for index in range(length):
            row = [None] * len(MULTIPLEXING_HEADER)
            if index < len(self.histogram):
                row[0], row[1] = int(self.histogram.degrees[index]), float(probabilities[index])
            if index < self.theory.n:
                row[2] = index + 1
                row[3] = float(self.relationship_counts[index])
                row[4] = self.theory.probabilities[index]
            yield row

    def summary(self):
        return {
            'sigma': self.sigma,
            'empirical_mode': self.empirical_mode,
            'theory_mode': self.theory.mode,
            'total_variation': self.total_variation(),
            'tail_exponent': self.tail_exponent,
            'exceptional_steps': self.exceptional_steps,
        }


def multiplexing_experiment(sigma, steps=MULTIPLEXING_STEPS, seed=None, n=MULTIPLEXING_RELATIONSHIPS, beta=MULTIPLEXING_BETA,
                        alpha=MULTIPLEXING_ALPHA):
    """
    Multiplexes n identical relationships at superficiality ``sigma`` and returns
    the empirical degree distribution, the empirical share M_r / m of entities
    attached to r distinct relationships and its closed form.
    """
    theory = relationship_count_distribution(n, sigma)
    config = GenerationConfig.homogeneous_config(n, beta, alpha, sigma, steps, seed=seed)
    result = generate(config, seed)
    final = result.telemetry.last()
    histogram = generated_histogram(result, config.role)
    try:
        tail = powerlaw_tail(histogram, TAIL_K_MIN)
    except DomainError:
        tail = None
    return MultiplexingRun(
        sigma=sigma,
        histogram=histogram,
        relationship_counts=final['M'] / final['m'],
        theory=theory,
        tail_exponent=tail,
        exceptional_steps=result.exceptional_steps,
    )


def multiplexing_file_name(sigma):
    return f'fig3a_sigma{sigma:g}.csv'


def refit_cell(alpha, beta, steps, seed):
    """
    Generates one relationship with (alpha, beta), refits it, regenerates with the
    fitted values under the next seed and compares the two degree distributions.
    """
    truth = GenerationConfig.homogeneous_config(1, beta, alpha, 1.0, steps)
    truth_result = generate(truth, seed)
    tables = generated_tables(truth_result, ROLE_OUT)
    profiles, _ = fit_graph({ROLE_OUT: tables})
    fitted = profiles[0].roles[ROLE_OUT]
    refit = GenerationConfig.homogeneous_config(1, fitted.beta, fitted.alpha, 1.0, steps)
    refit_histogram = generated_histogram(generate(refit, seed + 1), ROLE_OUT)
    divergence = kl_divergence(build_histograms(tables)[GLOBAL], refit_histogram)
    return {
        'alpha': alpha,
        'beta': beta,
        'alpha_hat': fitted.alpha,
        'beta_hat': fitted.beta,
        'clamped': fitted.alpha_flag is not None,
        'kl': divergence.kl,
    }


def refit_grid_experiment(alphas, betas, steps=REFIT_STEPS, seed=0, run_cell=None):
    """
    ``refit_cell`` over the (alpha, beta) grid. Cell i uses seeds seed + 2i and seed + 2i + 1.

    Arguments:
        run_cell: callable(cells) mapping a list of (alpha, beta, steps, seed) to
            cell dicts in order. Defaults to running them in this process.
    Returns:
        (cells, summary)
    """
    grid = [(alpha, beta) for alpha in alphas for beta in betas]
    arguments = [(alpha, beta, steps, seed + 2 * index) for index, (alpha, beta) in enumerate(grid)]
    cells = (run_cell or (lambda items: [refit_cell(*item) for item in items]))(arguments)
    kls = np.array([cell['kl'] for cell in cells])
    summary = {
        'cells': len(cells),
        'mean_kl': float(kls.mean()) if kls.size else None,
        'std_kl': float(kls.std()) if kls.size else None,
        'max_kl': float(kls.max()) if kls.size else None,
        'clamped': sum(1 for cell in cells if cell['clamped']),
        'max_alpha_error': max(
            (abs(cell['alpha_hat'] - cell['alpha']) for cell in cells if not cell['clamped']),
            default=None,
        ),
    }
    return cells, summary


def refit_rows(cells):
    return [[cell[name] for name in REFIT_HEADER] for cell in cells]


def longitudinal_report(labelled_summaries):
    """
    One row per (snapshot, role) in the given order: sigma, n, |E|, |F| and k_max.

    Arguments:
        labelled_summaries: iterable of (label, GraphSummary).
    """
    rows = []
    for label, summary in labelled_summaries:
        for role, values in sorted(summary.roles.items()):
            rows.append((label, role, values.sigma, summary.relationships, values.entities, values.facts, values.k_max))
    return rows


def parse_labelled_path(text):
    """
    Splits ``LABEL=PATH``; a bare path is labelled by itself.
    """
    label, separator, path = text.partition('=')
    if not separator:
        return text, text
    if not label or not path:
        raise ValueError(f'expected LABEL=PATH, got {text!r}')
    return label, path
