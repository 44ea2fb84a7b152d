"""Model parameters, derived constants and parameter validation.

The model has four inputs: the clique size ``N`` and the branching
probabilities ``p`` (new vertex), ``q`` (weighted choice of an N-clique) and
``r`` (weighted choice of an (N-1)-clique).  Everything downstream is driven
by four derived constants::

    alpha1 = (1 - p) q
    alpha2 = (N - 1)/N * p r
    alpha  = alpha1 + alpha2
    beta   = (N - 1)(1 - r) + N (1 - p)(1 - q) / p

and the scale-free exponent ``1 + 1/alpha``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, asdict
from typing import Optional


class DomainError(ValueError):
    """Raised when parameters fall outside the domain of an operation."""


class ValidationTier(enum.Enum):
    #: Only the basic parameter box, which is all the simulator needs.
    SIMULABLE = "simulable"
    #: Additionally the strict inequalities under which the limit theorems hold.
    THEOREM_GRADE = "theorem_grade"


@dataclass(frozen=True)
class ModelParams:
    N: int
    p: float
    q: float
    r: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedConstants:
    alpha1: float
    alpha2: float
    alpha: float
    beta: float
    gamma_exponent: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def validate(params: ModelParams, tier: ValidationTier = ValidationTier.SIMULABLE) -> list[str]:
    """Return the list of violated conditions (empty when ``params`` is ok).

    Violations are reported as short condition labels such as ``"p<1"``.
    """
    N, p, q, r = params.N, params.p, params.q, params.r
    problems = []
    if not (isinstance(N, int) and not isinstance(N, bool)) or N < 3:
        problems.append("N>=3")
    if not 0 < p <= 1:
        problems.append("0<p<=1")
    if not 0 <= q <= 1:
        problems.append("0<=q<=1")
    if not 0 <= r <= 1:
        problems.append("0<=r<=1")
    if tier is ValidationTier.THEOREM_GRADE:
        if not p < 1:
            problems.append("p<1")
        if not q > 0:
            problems.append("q>0")
        if not r > 0:
            problems.append("r>0")
        if not (1 - r) * (1 - q) > 0:
            problems.append("(1-r)(1-q)>0")
    return problems


def derive_constants(params: ModelParams) -> DerivedConstants:
    problems = validate(params, ValidationTier.SIMULABLE)
    if problems:
        raise DomainError(f"invalid model parameters {params}: violates {', '.join(problems)}")
    N, p, q, r = params.N, params.p, params.q, params.r
    alpha1 = (1 - p) * q
    alpha2 = (N - 1) / N * p * r
    alpha = alpha1 + alpha2
    beta = (N - 1) * (1 - r) + N * (1 - p) * (1 - q) / p
    gamma_exponent = 1 + 1 / alpha if alpha > 0 else None
    return DerivedConstants(alpha1, alpha2, alpha, beta, gamma_exponent)
