"""Closed-form evaluators for the subspace-size, entropy and gap formulas.

All functions are pure and deterministic; entropies are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InfeasibleParametersError, InvalidArgumentError

LIPSCHITZ_MIN_P = 1.0 + 1e-6


@dataclass(frozen=True)
class SubspaceParams:
    """Parameters of the random-subspace entanglement guarantee.

    ``gamma_p`` is an unspecified positive constant of the guarantee; it is
    a required knob here, defaulting to 1.
    """

    p: float
    dim_a: int
    dim_b: int
    alpha: float = 1.0
    gamma_p: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.p < 2.0:
            raise InvalidArgumentError(f"p must lie in (1, 2), got {self.p!r}")
        if not 2 <= self.dim_a <= self.dim_b:
            raise InvalidArgumentError(f"need 2 <= |A| <= |B|, got |A|={self.dim_a}, |B|={self.dim_b}")
        if not self.alpha > 0:
            raise InvalidArgumentError(f"alpha must be positive, got {self.alpha!r}")
        if not self.gamma_p > 0:
            raise InvalidArgumentError(f"gamma_p must be positive, got {self.gamma_p!r}")

    @property
    def beta(self) -> float:
        return 2.0 * self.dim_a / self.dim_b


class SubspaceDimension(NamedTuple):
    dim: int
    exceeds_ambient: bool


class FailureBound(NamedTuple):
    value: float
    log_value: float


def subspace_dimension(params: SubspaceParams) -> SubspaceDimension:
    """``floor(gamma_p |A|^(2-p) |B| alpha^2.5 / (p - 1))``.

    The raw value is returned even when it exceeds ``|A||B|``; the flag tells
    the caller to cap it.
    """
    raw = (params.gamma_p * params.dim_a ** (2.0 - params.p) * params.dim_b
           * params.alpha**2.5 / (params.p - 1.0))
    dim = math.floor(raw)
    if dim < 1:
        raise InfeasibleParametersError(f"subspace dimension {raw!r} rounds below 1")
    return SubspaceDimension(dim, dim > params.dim_a * params.dim_b)


def entanglement_floor(params: SubspaceParams) -> float:
    """``ln|A| - alpha - beta`` with ``beta = 2|A|/|B|``."""
    return math.log(params.dim_a) - params.alpha - params.beta


def failure_probability_bound(params: SubspaceParams, dim_s: int) -> FailureBound:
    """Probability bound that a random ``dim_s`` subspace misses the floor.

    Evaluated in log space; ``value`` is capped at 1.
    """
    if dim_s < 1:
        raise InvalidArgumentError(f"dim_s must be >= 1, got {dim_s!r}")
    a, b, p, alpha = params.dim_a, params.dim_b, params.p, params.alpha
    log_prefactor = 2.0 * dim_s * ((p - 1.0) / 2.0 * math.log(a) - math.log(alpha))
    log_tail = -(2.0 * a * b - 1.0) * alpha**2 / (2.0 * a ** (p - 1.0))
    log_value = log_prefactor + log_tail
    return FailureBound(math.exp(min(log_value, 0.0)), log_value)


def lipschitz_bound(p: float, dim_a: int) -> float:
    """Lipschitz constant ``2p/(p-1) |A|^((p-1)/2)`` of the output Renyi entropy."""
    if p < LIPSCHITZ_MIN_P:
        raise InvalidArgumentError(f"Lipschitz bound diverges as p -> 1; need p >= {LIPSCHITZ_MIN_P}, got {p!r}")
    return 2.0 * p / (p - 1.0) * dim_a ** ((p - 1.0) / 2.0)


def entangled_input_entropy_bound(p: float, dim_s: int, dim_a: int, dim_b: int) -> float:
    """Upper bound ``p/(p-1) ln(|A||B|/|S|)`` on ``H_p`` of the product output on ``Phi``."""
    if not p > 1:
        raise InvalidArgumentError(f"need p > 1, got {p!r}")
    if dim_s > dim_a * dim_b:
        raise InvalidArgumentError(f"|S|={dim_s} exceeds |A||B|={dim_a * dim_b}")
    return p / (p - 1.0) * math.log(dim_a * dim_b / dim_s)


def single_eigenvalue_entropy_bound(p: float, top_eigenvalue: float) -> float:
    """``H_p(rho) <= p/(p-1) ln(1/lambda_max)``, valid for any state and p > 1."""
    if not p > 1:
        raise InvalidArgumentError(f"need p > 1, got {p!r}")
    if not 0 < top_eigenvalue <= 1 + 1e-12:
        raise InvalidArgumentError(f"top eigenvalue {top_eigenvalue!r} outside (0, 1]")
    return p / (p - 1.0) * -math.log(min(top_eigenvalue, 1.0))


def violation_gap_prediction(p: float, dim_a: int) -> float:
    """Leading-order additivity gap ``(2 - p) ln|A|``; a prediction, not a measurement."""
    if not 1.0 < p < 2.0:
        raise InvalidArgumentError(f"p must lie in (1, 2), got {p!r}")
    return (2.0 - p) * math.log(dim_a)
