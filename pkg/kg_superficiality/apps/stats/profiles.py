"""
Parameter records of a graph: per-relationship profiles and the whole-graph summary.
"""
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional


@dataclass
class RoleProfile:
    """
    Counts and fitted parameters of one relationship in one role.
    """
    facts: int
    distinct_entities: int
    k_max: int
    beta: Optional[float] = None
    alpha: Optional[float] = None
    alpha_flag: Optional[str] = None


@dataclass
class RelationshipProfile:
    """
    Counts and fitted parameters of one relationship, per role.
    """
    relationship_id: int
    facts: int
    label: str = ''
    rho: Optional[float] = None
    roles: Dict[str, RoleProfile] = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, payload):
        return cls(
            relationship_id=int(payload['relationship_id']),
            facts=int(payload['facts']),
            label=payload.get('label', ''),
            rho=payload.get('rho'),
            roles={role: RoleProfile(**values) for role, values in payload.get('roles', {}).items()},
        )


@dataclass
class RoleSummary:
    """
    Whole-graph statistics of one role.

    ``relationship_entities`` is the sum over relationships of their distinct
    entities; ``a`` and ``c`` are the entity-creation rates derived from the fit.
    """
    entities: int
    facts: int
    k_max: int
    relationship_entities: int = 0
    sigma: Optional[float] = None
    constraint_holds: Optional[bool] = None
    a: Optional[float] = None
    c: Dict[int, float] = field(default_factory=dict)


@dataclass
class GraphSummary:
    facts: int
    relationships: int
    roles: Dict[str, RoleSummary] = field(default_factory=dict)

    def to_dict(self):
        payload = asdict(self)
        for role_payload in payload['roles'].values():
            role_payload['c'] = {str(key): value for key, value in role_payload['c'].items()}
        return payload

    @classmethod
    def from_dict(cls, payload):
        roles = {}
        for role, values in payload.get('roles', {}).items():
            values = dict(values)
            values['c'] = {int(key): value for key, value in values.get('c', {}).items()}
            roles[role] = RoleSummary(**values)
        return cls(facts=int(payload['facts']), relationships=int(payload['relationships']), roles=roles)
