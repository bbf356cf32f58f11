"""
Checks of the asymptotic laws of a generation against its telemetry.

Every law compares a mean over independent runs with its limit and passes when
the difference lies within the stated band; failures are report entries.
"""
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from kg_superficiality.apps.core.constants import MANIFEST_FILE, TELEMETRY_FILE, TELEMETRY_REPORT_FILE
from kg_superficiality.apps.core.exceptions import DomainError, KgSimError
from kg_superficiality.apps.core.manifests import load_config_file
from kg_superficiality.apps.core.utils import write_json
from kg_superficiality.apps.generator.config import MODE_SINGLE_ROLE, GenerationConfig
from kg_superficiality.apps.generator.telemetry import SimulationTelemetry
from kg_superficiality.apps.theory.distributions import relationship_count_distribution


logger = logging.getLogger(__name__)

SIGMAS = 3
RELATIONSHIP_SHARE_TOLERANCE = 0.02
GENERATION_FILE = 'generation.json'


@dataclass
class LawCheck:
    law: str
    observed: float
    expected: float
    tolerance: Optional[float]
    passed: Optional[bool]


@dataclass
class TelemetryReport:
    runs: int
    steps: int
    checks: List[LawCheck] = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed is not False for check in self.checks)

    def failures(self):
        return [check for check in self.checks if check.passed is False]

    def check(self, law, observed, expected, tolerance):
        passed = None if tolerance is None else bool(abs(observed - expected) <= tolerance)
        self.checks.append(LawCheck(law, float(observed), float(expected), tolerance, passed))

    def to_dict(self):
        return {
            'runs': self.runs,
            'steps': self.steps,
            'passed': self.passed,
            'checks': [asdict(check) for check in self.checks],
        }

    def write(self, out_dir):
        return write_json(os.path.join(out_dir, TELEMETRY_REPORT_FILE), self.to_dict())


def _band(rate, steps, runs):
    """SIGMAS standard deviations of the mean of ``runs`` Binomial(steps, rate) / steps."""
    return SIGMAS * math.sqrt(rate * (1 - rate) / steps) / math.sqrt(runs)


def telemetry_checks(telemetries, config):
    """
    Checks, on the final telemetry rows of independent runs of ``config``:

    m(t)/t -> a = sum_r rho_r (1 - beta_r) sigma, with the variance of m(t)/t
    against a (1 - a) / t; m_r(t)/t -> c_r = rho_r (1 - beta_r) and
    F_r(t)/t -> rho_r per relationship; M_i(t)/m(t) -> P(i), per i and in
    total variation. Growth is measured from the seeded state at t = 0.
    """
    if config.mode != MODE_SINGLE_ROLE:
        raise DomainError('telemetry checks need a single_role generation')
    if not telemetries:
        raise DomainError('telemetry checks need at least one run')
    role = config.role
    sigma = config.sigma[role]
    steps = telemetries[0].steps[-1]
    if steps <= 0 or any(telemetry.steps[-1] != steps for telemetry in telemetries):
        raise DomainError('telemetry checks need runs with the same positive number of steps')
    runs = len(telemetries)
    report = TelemetryReport(runs=runs, steps=steps)
    first = [telemetry.last() for telemetry in telemetries]
    seeded = [telemetry.entities[0] if telemetry.steps[0] == 0 else config.n for telemetry in telemetries]

    rho = np.array([relationship.rho for relationship in config.relationships])
    beta = np.array([relationship.roles[role].beta for relationship in config.relationships])
    rates = rho * (1 - beta)
    a = float(rates.sum() * sigma)

    growth = np.array([(row['m'] - start) / steps for row, start in zip(first, seeded)])
    report.check('m(t)/t -> a', growth.mean(), a, _band(a, steps, runs))
    if runs > 1:
        # Relative spread of a sample variance over runs - 1 degrees of freedom.
        variance = float(growth.var(ddof=1) * steps)
        expected = a * (1 - a)
        tolerance = SIGMAS * math.sqrt(2 / (runs - 1)) * expected
        report.check('var(m(t))/t -> a(1-a)', variance, expected, tolerance)

    for relationship_id, (rate, share) in enumerate(zip(rates.tolist(), rho.tolist())):
        entities = np.mean([(row['m_r'][relationship_id] - 1) / steps for row in first])
        report.check(f'm_r(t)/t -> c_r [r={relationship_id}]', entities, rate, _band(rate, steps, runs))
        facts = np.mean([row['f_r'][relationship_id] / steps for row in first])
        report.check(f'F_r(t)/t -> rho_r [r={relationship_id}]', facts, share, _band(share, steps, runs))

    exceptional = np.mean([row['exceptional'] / steps for row in first])
    report.check('exceptional steps / t', exceptional, 0.0, None)

    try:
        theory = relationship_count_distribution(config.n, sigma)
    except DomainError as exc:
        logger.info('Skipping the relationship-count laws: %s', exc)
        return report
    shares = np.mean([row['M'] / row['m'] for row in first], axis=0)
    for count, (observed, expected) in enumerate(zip(shares.tolist(), theory.probabilities), start=1):
        report.check(f'M_i(t)/m(t) -> P(i) [i={count}]', observed, expected, RELATIONSHIP_SHARE_TOLERANCE)
    total_variation = 0.5 * float(np.abs(shares - np.asarray(theory.probabilities)).sum())
    report.check('total variation of M(t)/m(t) and P', total_variation, 0.0, RELATIONSHIP_SHARE_TOLERANCE)
    if report.failures():
        logger.warning('%d of %d telemetry laws failed', len(report.failures()), len(report.checks))
    return report


def load_run_config(run_dir):
    """
    The generation config of a run directory: its manifest, or ``generation.json``.
    """
    for name in (MANIFEST_FILE, GENERATION_FILE):
        path = os.path.join(run_dir, name)
        if os.path.isfile(path):
            try:
                return GenerationConfig.from_dict(load_config_file(path))
            except (OSError, ValueError, KeyError) as exc:
                raise KgSimError(f'Cannot read the generation config {path}: {exc}') from exc
    raise KgSimError(f'No {MANIFEST_FILE} or {GENERATION_FILE} in {run_dir}')


def load_runs(runs_dir):
    """
    Reads the telemetry of every run directory under ``runs_dir`` (sorted by name).

    Returns:
        (telemetries, config of the first run)
    """
    if not os.path.isdir(runs_dir):
        raise KgSimError(f'Cannot read runs: {runs_dir} is not a directory')
    run_dirs = sorted(
        os.path.join(runs_dir, name) for name in os.listdir(runs_dir)
        if os.path.isfile(os.path.join(runs_dir, name, TELEMETRY_FILE))
    )
    if not run_dirs:
        raise KgSimError(f'No run directories with {TELEMETRY_FILE} under {runs_dir}')
    telemetries = [SimulationTelemetry.read(os.path.join(run_dir, TELEMETRY_FILE)) for run_dir in run_dirs]
    return telemetries, load_run_config(run_dirs[0])
