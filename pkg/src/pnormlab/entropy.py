"""Entropy functionals of spectra. Every value is in nats."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSpectrumError, InvalidArgumentError

NORMALIZATION_TOL = 1e-8
NEGATIVE_TOL = 1e-10


def _check_order(p: float) -> float:
    p = float(p)
    if not p > 0 or not math.isfinite(p):
        raise InvalidArgumentError(f"Renyi order must be positive, got {p!r}")
    return p


def _clean(spectrum) -> np.ndarray:
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0:
        raise InvalidArgumentError("empty spectrum")
    if lam.min() < -NEGATIVE_TOL:
        raise InvalidArgumentError(f"spectrum has negative entry {lam.min():.3g}")
    total = lam.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise InvalidArgumentError(f"spectrum sums to {total!r}, not 1")
    return np.clip(lam, 0.0, None)


def renyi_entropy(spectrum, p: float) -> float:
    """Renyi entropy ``ln(sum lam^p) / (1 - p)``; ``p == 1`` gives von Neumann."""
    p = _check_order(p)
    lam = _clean(spectrum)
    pos = lam[lam > 0]
    if p == 1.0:
        h = -float(np.sum(pos * np.log(pos)))
    else:
        h = math.log(float(np.sum(pos**p))) / (1.0 - p)
    return min(max(h, 0.0), math.log(lam.size))


def von_neumann_entropy(spectrum) -> float:
    return renyi_entropy(spectrum, 1.0)


def binary_entropy(x: float) -> float:
    x = float(x)
    if x < -1e-12 or x > 1 + 1e-12:
        raise InvalidArgumentError(f"probability {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log1p(-x)


class Grouping(NamedTuple):
    lambda1: float
    binary_part: float
    residual_entropy: float
    recombined: float


def _split_top(spectrum) -> tuple[float, np.ndarray]:
    lam = np.sort(_clean(spectrum))[::-1]
    return float(lam[0]), lam[1:]


def grouping_decomposition(spectrum) -> Grouping:
    """Split ``H_1`` into the top eigenvalue and the renormalized remainder.

    ``H_1(lam) = h(lam_1) + (1 - lam_1) H_1(lam~)`` with
    ``lam~_j = lam_j / (1 - lam_1)`` for ``j > 1``. When ``lam_1`` is 1 up to
    rounding the remainder is empty and its entropy is taken to be 0.
    """
    lam1, rest = _split_top(spectrum)
    if rest.size == 0:
        raise InvalidArgumentError("grouping needs at least two eigenvalues")
    mass = 1.0 - lam1
    if mass <= 1e-12 or rest.sum() <= 0:
        # Pure up to rounding: the remainder carries no weight.
        residual = 0.0
    else:
        tilde = rest / rest.sum()
        pos = tilde[tilde > 0]
        residual = -float(np.sum(pos * np.log(pos)))
    binary = binary_entropy(lam1)
    return Grouping(lam1, binary, residual, binary + mass * residual)


def residual_h2_lower_bound(spectrum) -> float:
    """``-ln sum_{j>1} lam~_j^2``, a lower bound on the residual entropy."""
    lam1, rest = _split_top(spectrum)
    if 1.0 - lam1 <= 1e-12 or rest.sum() <= 0:
        raise DegenerateSpectrumError("top eigenvalue is 1; the residual distribution is undefined")
    tilde = rest / rest.sum()
    return -math.log(float(np.sum(tilde**2)))


def max_p_norm_from_entropy(hmin: float, p: float) -> float:
    """Maximal output p-norm matching a minimum output Renyi entropy.

    ``||rho||_p = (Tr rho^p)^{1/p} = exp((1 - p) / p * H_p(rho))``.
    """
    p = _check_order(p)
    if p <= 1:
        raise InvalidArgumentError(f"p-norm bridge needs p > 1, got {p!r}")
    return math.exp((1.0 - p) / p * float(hmin))


def entropy_from_max_p_norm(nu: float, p: float) -> float:
    p = _check_order(p)
    if p <= 1:
        raise InvalidArgumentError(f"p-norm bridge needs p > 1, got {p!r}")
    if not nu > 0:
        raise InvalidArgumentError(f"p-norm must be positive, got {nu!r}")
    return p / (1.0 - p) * math.log(float(nu))
