"""Geometric constants of two-dimensional normed spaces."""

from .normspace import NormConfigError, NormedPlane, NormSpec, Vector2, parse_space, unit_vector, validate_norm
from .orthogonality import ConsistencyError, find_iso_orthogonal, sample_constraint_manifold
from .constants import (
    ConstantEstimate,
    DomainError,
    L_direct,
    L_extended,
    L_via_gamma,
    cnj,
    cnj_doubleprime,
    cnj_from_L,
    cnj_prime,
    delta,
    gamma,
    james,
    rho,
    rho1_from_delta,
    sweep,
)

__version__ = "0.1.0"
