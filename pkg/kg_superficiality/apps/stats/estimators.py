"""
Estimators of the model parameters from degree tables.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy import optimize

from kg_superficiality.apps.core.exceptions import ConsistencyError, DomainError
from kg_superficiality.apps.stats.profiles import (
    GraphSummary,
    RelationshipProfile,
    RoleProfile,
    RoleSummary,
)
from kg_superficiality.apps.theory.distributions import mean_max_degree


logger = logging.getLogger(__name__)

ALPHA_TOLERANCE = 1e-6

# Flags of clamped or impossible alpha fits
ALPHA_LOW = 'low'
ALPHA_HIGH = 'high'
ALPHA_INSUFFICIENT = 'insufficient'


def build_profiles(tables_by_role, labels=None):
    """
    Returns one RelationshipProfile per relationship having facts, with the raw
    per-role counts of the degree tables filled in.
    """
    any_tables = next(iter(tables_by_role.values()))
    profiles = []
    for relationship_id, facts in enumerate(any_tables.relationship_facts.tolist()):
        if not facts:
            continue
        profile = RelationshipProfile(
            relationship_id=relationship_id,
            facts=int(facts),
            label=labels[relationship_id] if labels is not None else '',
        )
        for role, tables in tables_by_role.items():
            degrees = tables.relationships.get(relationship_id)
            if degrees is None:
                continue
            profile.roles[role] = RoleProfile(
                facts=degrees.facts,
                distinct_entities=degrees.distinct_entities,
                k_max=degrees.k_max,
            )
        profiles.append(profile)
    return profiles


def estimate_rho(profiles, facts=None):
    """
    Sets rho_r = |F_r| / |F| on every profile.
    """
    if facts is None:
        facts = sum(profile.facts for profile in profiles)
    if facts <= 0:
        raise DomainError('no facts: rho_r = |F_r| / |F| needs |F| > 0')
    for profile in profiles:
        profile.rho = profile.facts / facts
    return profiles


def estimate_beta(profiles):
    """
    Sets beta_r = 1 - |E_r| / |F_r| on every role of every profile.
    """
    for profile in profiles:
        for role, role_profile in profile.roles.items():
            if role_profile.facts < 1:
                raise DomainError(
                    f'beta_r needs |F_r| >= 1; relationship {profile.relationship_id} has no {role} facts'
                )
            if role_profile.distinct_entities < 1:
                raise ConsistencyError(
                    f'relationship {profile.relationship_id} has {role_profile.facts} {role} facts '
                    f'but no entities (|E_r| = 0 with |F_r| > 0)'
                )
            if role_profile.distinct_entities > role_profile.facts:
                raise ConsistencyError(
                    f'relationship {profile.relationship_id} has more {role} entities than facts (|E_r| > |F_r|)'
                )
            role_profile.beta = 1 - role_profile.distinct_entities / role_profile.facts
    return profiles


@dataclass(frozen=True)
class SigmaEstimate:
    sigma: float
    entities: int
    relationship_entities: int
    relationships: int

    @property
    def constraint_holds(self):
        """Whether n > 1/sigma - 1."""
        return self.relationships > 1 / self.sigma - 1


def estimate_sigma(summary, profiles):
    """
    sigma = |E| / sum_r |E_r| for every role of the summary, with the n > 1/sigma - 1 check.

    Returns:
        dict: role -> SigmaEstimate
    """
    estimates = {}
    for role, role_summary in summary.roles.items():
        relationship_entities = sum(
            profile.roles[role].distinct_entities for profile in profiles if role in profile.roles
        )
        relationships = sum(1 for profile in profiles if role in profile.roles)
        if relationship_entities <= 0:
            raise DomainError(f'sigma needs sum_r |E_r| > 0; the {role} role has no entities')
        estimate = SigmaEstimate(
            sigma=role_summary.entities / relationship_entities,
            entities=role_summary.entities,
            relationship_entities=relationship_entities,
            relationships=relationships,
        )
        if not estimate.constraint_holds:
            logger.warning(
                'n > 1/sigma - 1 does not hold for the %s role: n=%d, sigma=%.6f',
                role, relationships, estimate.sigma,
            )
        estimates[role] = estimate
    return estimates


@dataclass(frozen=True)
class AlphaFit:
    alpha: float
    flag: Optional[str] = None

    @property
    def clamped(self):
        return self.flag is not None


def fit_alpha(beta, facts, observed_kmax):
    """
    Finds the attachment exponent whose expected maximum degree after ``facts``
    facts matches ``observed_kmax``, by bisection on the log of the ratio.

    Observations below the alpha = 0 prediction clamp to 0 (flag ``low``),
    above the alpha = 1 prediction to 1 (flag ``high``).
    """
    if facts < 2:
        return AlphaFit(0.0, ALPHA_INSUFFICIENT)
    if not 0 <= beta < 1:
        raise DomainError(f'fit_alpha needs 0 <= beta < 1, got beta={beta}')
    if not 1 <= observed_kmax <= facts:
        raise DomainError(f'fit_alpha needs 1 <= k_max <= |F_r|, got k_max={observed_kmax}, |F_r|={facts}')
    log_observed = math.log(observed_kmax)

    def objective(alpha):
        return math.log(mean_max_degree(alpha, beta, facts)) - log_observed

    at_zero, at_one = objective(0.0), objective(1.0)
    if at_zero == 0:
        return AlphaFit(0.0)
    if at_one == 0:
        return AlphaFit(1.0)
    if at_zero > 0 and at_one > 0:
        return AlphaFit(0.0 if at_zero <= at_one else 1.0, ALPHA_LOW)
    if at_zero < 0 and at_one < 0:
        return AlphaFit(1.0 if at_one >= at_zero else 0.0, ALPHA_HIGH)
    return AlphaFit(float(optimize.bisect(objective, 0.0, 1.0, xtol=ALPHA_TOLERANCE)))


def fit_alphas(profiles):
    """
    Fits alpha on every role of every profile; clamped fits are logged and flagged.
    """
    clamped = 0
    for profile in profiles:
        for role, role_profile in profile.roles.items():
            fit = fit_alpha(role_profile.beta, role_profile.facts, role_profile.k_max)
            role_profile.alpha = fit.alpha
            role_profile.alpha_flag = fit.flag
            if fit.clamped:
                clamped += 1
                logger.debug(
                    'alpha of relationship %d (%s) clamped to %s (%s)',
                    profile.relationship_id, role, fit.alpha, fit.flag,
                )
    if clamped:
        logger.info('%d alpha fits were clamped or had too few facts', clamped)
    return profiles


def summarize(tables_by_role, profiles):
    """
    Builds the GraphSummary of fitted profiles: per-role |E|, |F|, k_max, sigma,
    the constraint check, a = sum_r rho_r (1 - beta_r) sigma and c_r = rho_r (1 - beta_r).
    """
    any_tables = next(iter(tables_by_role.values()))
    summary = GraphSummary(
        facts=int(any_tables.relationship_facts.sum()),
        relationships=len(profiles),
    )
    for role, tables in tables_by_role.items():
        if tables.facts == 0:
            continue
        summary.roles[role] = RoleSummary(
            entities=tables.distinct_entities,
            facts=tables.facts,
            k_max=tables.k_max,
        )
    for role, estimate in estimate_sigma(summary, profiles).items():
        role_summary = summary.roles[role]
        role_summary.sigma = estimate.sigma
        role_summary.relationship_entities = estimate.relationship_entities
        role_summary.constraint_holds = estimate.constraint_holds
        role_summary.c = {
            profile.relationship_id: profile.rho * (1 - profile.roles[role].beta)
            for profile in profiles if role in profile.roles
        }
        role_summary.a = math.fsum(role_summary.c.values()) * estimate.sigma
    return summary


def fit_graph(tables_by_role, labels=None):
    """
    Runs every estimator over the degree tables of the requested roles.

    Returns:
        (profiles, summary)
    """
    tables_by_role = {role: tables for role, tables in tables_by_role.items() if tables.facts > 0}
    if not tables_by_role:
        raise DomainError('no facts: the edge stream has no facts in the requested roles')
    profiles = build_profiles(tables_by_role, labels)
    estimate_rho(profiles)
    estimate_beta(profiles)
    fit_alphas(profiles)
    summary = summarize(tables_by_role, profiles)
    logger.info(
        'Fitted %d relationships over %d facts: %s',
        summary.relationships, summary.facts,
        ', '.join(f'{role} sigma={values.sigma:.6f}' for role, values in summary.roles.items()),
    )
    return profiles, summary

