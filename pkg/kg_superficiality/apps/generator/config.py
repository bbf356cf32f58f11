"""
Generation configs: everything that determines a synthetic graph, and the
ablation variants derived from fitted profiles.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional

from kg_superficiality.apps.core.constants import ROLE_OUT, ROLES
from kg_superficiality.apps.core.exceptions import DomainError
from kg_superficiality.apps.stats.estimators import fit_alpha
from kg_superficiality.apps.theory.distributions import check_relationship_constraint


logger = logging.getLogger(__name__)

MODE_SINGLE_ROLE = 'single_role'
MODE_JOINT = 'joint'
MODES = (MODE_SINGLE_ROLE, MODE_JOINT)

MULTIPLEX_PARAM = 'multiplex_param'
MULTIPLEX_LINEAR = 'multiplex_linear'
SIMPLEX_PARAM = 'simplex_param'
SIMPLEX_LINEAR = 'simplex_linear'
VARIANTS = (MULTIPLEX_PARAM, MULTIPLEX_LINEAR, SIMPLEX_PARAM, SIMPLEX_LINEAR)
SIMPLEX_VARIANTS = (SIMPLEX_PARAM, SIMPLEX_LINEAR)

SCOPE_ROLE = 'role'
SCOPE_RELATIONSHIP = 'relationship'
EXCLUSION_SCOPES = (SCOPE_ROLE, SCOPE_RELATIONSHIP)

RHO_TOLERANCE = 1e-9

# Keys of a generation config in a JSON file or run config.
CONFIG_KEYS = (
    'relationships', 'sigma', 'steps', 'mode', 'role', 'variant', 'seed',
    'exclusion_scope', 'telemetry_samples', 'homogeneous',
)


@dataclass(frozen=True)
class RoleParameters:
    beta: float
    alpha: float


@dataclass(frozen=True)
class RelationshipParameters:
    rho: float
    roles: Dict[str, RoleParameters]
    label: str = ''


@dataclass
class GenerationConfig:
    """
    A synthetic run: per-relationship (rho, beta, alpha), sigma per role, the
    number of steps after seeding, the mode and the seed.

    In ``single_role`` mode only ``role`` is generated and each step attaches one
    entity; in ``joint`` mode each step emits a full fact using the parameters of both roles.
    """
    relationships: List[RelationshipParameters]
    sigma: Dict[str, float]
    steps: int
    mode: str = MODE_SINGLE_ROLE
    role: str = ROLE_OUT
    variant: str = MULTIPLEX_PARAM
    seed: Optional[int] = None
    exclusion_scope: str = SCOPE_ROLE
    telemetry_samples: Optional[int] = None
    homogeneous: Optional[dict] = field(default=None, compare=False)

    @property
    def n(self):
        return len(self.relationships)

    @property
    def active_roles(self):
        if self.mode == MODE_JOINT:
            return ROLES
        return (self.role,)

    def validate(self):
        """
        Raises DomainError when the config cannot be generated; returns self otherwise.
        """
        if self.mode not in MODES:
            raise DomainError(f'mode must be one of {", ".join(MODES)}, got {self.mode!r}')
        if self.role not in ROLES:
            raise DomainError(f'role must be one of {", ".join(ROLES)}, got {self.role!r}')
        if self.variant not in VARIANTS:
            raise DomainError(f'variant must be one of {", ".join(VARIANTS)}, got {self.variant!r}')
        if self.exclusion_scope not in EXCLUSION_SCOPES:
            raise DomainError(f'exclusion_scope must be one of {", ".join(EXCLUSION_SCOPES)}')
        if not isinstance(self.steps, int) or self.steps < 0:
            raise DomainError(f'steps must be a non-negative integer, got {self.steps!r}')
        if not self.relationships:
            raise DomainError('a generation needs at least one relationship')
        rho_total = math.fsum(relationship.rho for relationship in self.relationships)
        if abs(rho_total - 1) > RHO_TOLERANCE:
            raise DomainError(f'sum_r rho_r must be 1, got {rho_total!r}')
        for index, relationship in enumerate(self.relationships):
            if not 0 < relationship.rho <= 1:
                raise DomainError(f'rho_r must lie in (0, 1], relationship {index} has rho={relationship.rho}')
            for role in self.active_roles:
                parameters = relationship.roles.get(role)
                if parameters is None:
                    raise DomainError(f'relationship {index} has no {role} parameters')
                if not 0 <= parameters.beta < 1:
                    raise DomainError(f'beta_r must lie in [0, 1), relationship {index} has beta={parameters.beta}')
                if not 0 <= parameters.alpha <= 1:
                    raise DomainError(f'alpha_r must lie in [0, 1], relationship {index} has alpha={parameters.alpha}')
        for role in self.active_roles:
            if role not in self.sigma:
                raise DomainError(f'no sigma for the {role} role')
            check_relationship_constraint(self.n, self.sigma[role])
            if self.variant in SIMPLEX_VARIANTS and (self.n != 1 or self.sigma[role] != 1):
                raise DomainError(f'simplex variants need n=1 and sigma=1, got n={self.n}, sigma={self.sigma[role]}')
        return self

    def to_dict(self):
        payload = asdict(self)
        payload.pop('homogeneous')
        return payload

    @classmethod
    def from_dict(cls, payload):
        """
        Builds a config from its JSON form. ``sigma`` may be a number (used for
        every generated role) and ``homogeneous: {n, beta, alpha}`` may replace
        the relationship list with n identical relationships of rho = 1/n.
        """
        payload = {key: value for key, value in payload.items() if key in CONFIG_KEYS}
        mode = payload.get('mode', MODE_SINGLE_ROLE)
        role = payload.get('role', ROLE_OUT)
        roles = ROLES if mode == MODE_JOINT else (role,)
        sigma = payload.get('sigma')
        if sigma is None:
            raise DomainError('a generation config needs sigma')
        if not isinstance(sigma, dict):
            sigma = {active_role: float(sigma) for active_role in roles}
        homogeneous = payload.get('homogeneous')
        if homogeneous is not None:
            n = int(homogeneous['n'])
            parameters = RoleParameters(beta=float(homogeneous['beta']), alpha=float(homogeneous['alpha']))
            relationships = [
                RelationshipParameters(rho=1 / n, roles={active_role: parameters for active_role in roles})
                for _ in range(n)
            ]
        else:
            relationships = [
                RelationshipParameters(
                    rho=float(item['rho']),
                    roles={name: RoleParameters(**values) for name, values in item['roles'].items()},
                    label=item.get('label', ''),
                )
                for item in payload.get('relationships', ())
            ]
        steps = payload.get('steps')
        if steps is None:
            raise DomainError('a generation config needs steps')
        return cls(
            relationships=relationships,
            sigma={name: float(value) for name, value in sigma.items()},
            steps=int(steps),
            mode=mode,
            role=role,
            variant=payload.get('variant', MULTIPLEX_PARAM),
            seed=payload.get('seed'),
            exclusion_scope=payload.get('exclusion_scope', SCOPE_ROLE),
            telemetry_samples=payload.get('telemetry_samples'),
            homogeneous=homogeneous,
        )

    @classmethod
    def homogeneous_config(cls, n, beta, alpha, sigma, steps, **kwargs):
        """
        n relationships sharing (beta, alpha) with rho = 1/n.
        """
        payload = {'homogeneous': {'n': n, 'beta': beta, 'alpha': alpha}, 'sigma': sigma, 'steps': steps}
        payload.update(kwargs)
        return cls.from_dict(payload)

    def with_steps(self, steps):
        return replace(self, steps=int(steps))


def ablation_variant(profiles, summary, variant, role=ROLE_OUT, steps=None, seed=None):
    """
    Builds the config of one ablation variant from fitted profiles of ``role``:

    multiplex_param keeps the fit as is; multiplex_linear sets every alpha to 1;
    simplex_param treats the graph as a single relationship with beta = 1 - |E|/|F|,
    its fitted alpha and sigma = 1; simplex_linear is simplex_param with alpha = 1.
    ``steps`` defaults to the number of facts of the role.
    """
    if variant not in VARIANTS:
        raise DomainError(f'variant must be one of {", ".join(VARIANTS)}, got {variant!r}')
    role_summary = summary.roles.get(role)
    if role_summary is None:
        raise DomainError(f'the fitted summary has no {role} role')
    if steps is None:
        steps = role_summary.facts
    fitted = [profile for profile in profiles if role in profile.roles]
    if variant in SIMPLEX_VARIANTS:
        beta = 1 - role_summary.entities / role_summary.facts
        if variant == SIMPLEX_LINEAR:
            alpha = 1.0
        else:
            alpha = fit_alpha(beta, role_summary.facts, role_summary.k_max).alpha
        relationships = [RelationshipParameters(rho=1.0, roles={role: RoleParameters(beta=beta, alpha=alpha)})]
        sigma = 1.0
    else:
        total = sum(profile.facts for profile in fitted)
        relationships = [
            RelationshipParameters(
                rho=profile.facts / total,
                roles={role: RoleParameters(
                    beta=profile.roles[role].beta,
                    alpha=1.0 if variant == MULTIPLEX_LINEAR else profile.roles[role].alpha,
                )},
                label=profile.label,
            )
            for profile in fitted
        ]
        sigma = role_summary.sigma
    config = GenerationConfig(
        relationships=relationships,
        sigma={role: sigma},
        steps=int(steps),
        mode=MODE_SINGLE_ROLE,
        role=role,
        variant=variant,
        seed=seed,
    )
    logger.debug('Built %s config with %d relationships and %d steps', variant, config.n, config.steps)
    return config
