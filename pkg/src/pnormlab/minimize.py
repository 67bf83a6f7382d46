"""Multi-start estimation of the minimum output Renyi entropy of a channel.

Each restart runs projected gradient descent on the unit sphere of ``S`` from
a Haar-random start. Steps use the Barzilai-Borwein length as the first trial
of an Armijo backtracking line search, and the iterate is renormalized after
every step. The best value over all restarts is an upper bound on the true
minimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Channel
from .errors import InvalidArgumentError

EIGEN_FLOOR = 1e-14


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 2000
    grad_tol: float = 1e-8
    armijo: float = 1e-4
    max_backtracks: int = 50
    # Stop once the objective has moved less than stall_rtol over stall_window
    # iterations; at that point float resolution, not the gradient, is limiting.
    stall_window: int = 20
    stall_rtol: float = 1e-12
    min_step: float = 1e-8
    max_step: float = 1e8


@dataclass
class RestartResult:
    value: float
    state: np.ndarray = field(repr=False)
    iterations: int
    stop_reason: str

    @property
    def converged(self) -> bool:
        return self.stop_reason == "gradient"


@dataclass
class MinEntropyEstimate:
    value: float
    witness: np.ndarray = field(repr=False)
    restart_values: list[float]
    restarts: int
    converged_flags: list[bool]
    stop_reasons: list[str]
    p: float


def entropy_and_gradient(v: np.ndarray, psi: np.ndarray, dim_a: int, dim_b: int, p: float,
                         vh: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Output entropy ``H_p(rho(psi))`` and its Euclidean gradient in ``psi``.

    ``rho(psi) = M M^dag`` with ``M = reshape(V psi, (|A|, |B|))``. The value
    is the spectral function evaluated on the (possibly unnormalized) ``rho``,
    so the gradient is exact off the sphere as well. It is returned as the
    complex vector ``g`` with ``dH = Re <g, d psi>``, namely
    ``g = 2 V^dag vec(F'(rho) M)``. ``F'(rho)`` is assembled from whichever of
    ``M M^dag`` and ``M^dag M`` is smaller, using ``F'(rho) M = M F'(M^dag M)``
    on the support of ``M``.
    """
    m = (v @ psi).reshape(dim_a, dim_b)
    small_left = dim_a <= dim_b
    gram = m @ m.conj().T if small_left else m.conj().T @ m
    lam, vec = np.linalg.eigh(gram)
    keep = lam > EIGEN_FLOOR
    lk = np.where(keep, lam, 0.0)
    if p == 1.0:
        logs = np.log(np.where(keep, lam, 1.0))
        value = -float(np.sum(lk * logs))
        dfun = np.where(keep, -(logs + 1.0), 0.0)
    else:
        powsum = float(np.sum(lk**p))
        value = math.log(powsum) / (1.0 - p)
        dfun = p / (1.0 - p) * lk ** (p - 1.0) / powsum
    deriv = (vec * dfun) @ vec.conj().T
    gm = deriv @ m if small_left else m @ deriv
    if vh is None:
        vh = v.conj().T
    return value, 2.0 * (vh @ gm.reshape(-1))


def _tangent(psi: np.ndarray, grad: np.ndarray) -> np.ndarray:
    return grad - np.vdot(psi, grad).real * psi


def minimize_from(ch: Channel, p: float, start: np.ndarray,
                  config: OptimizerConfig = OptimizerConfig()) -> RestartResult:
    """One local minimization of ``psi -> H_p(N(psi))`` over unit vectors."""
    d = ch.dims
    v = ch.isometry
    vh = np.ascontiguousarray(v.conj().T)
    psi = np.asarray(start, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    f, g = entropy_and_gradient(v, psi, d.a, d.b, p, vh)
    rg = _tangent(psi, g)
    step = 1.0
    history = [f]
    for it in range(config.max_iter):
        gnorm = float(np.linalg.norm(rg))
        if gnorm < config.grad_tol:
            return RestartResult(f, psi, it, "gradient")
        w = config.stall_window
        if len(history) > w and history[-w - 1] - f <= config.stall_rtol * max(1.0, abs(f)):
            return RestartResult(f, psi, it, "stalled")
        t = step
        for _ in range(config.max_backtracks):
            trial = psi - t * rg
            trial /= np.linalg.norm(trial)
            ft, gt = entropy_and_gradient(v, trial, d.a, d.b, p, vh)
            if ft <= f - config.armijo * t * gnorm * gnorm:
                break
            t *= 0.5
        else:
            return RestartResult(f, psi, it, "line_search")
        rgt = _tangent(trial, gt)
        s = trial - psi
        y = rgt - rg
        sy = np.vdot(s, y).real
        step = np.vdot(s, s).real / sy if sy > 0 else 1.0
        step = min(max(step, config.min_step), config.max_step)
        psi, f, rg = trial, ft, rgt
        history.append(f)
    return RestartResult(f, psi, config.max_iter, "max_iterations")


def restart_seeds(seed, restarts: int) -> list[np.random.SeedSequence]:
    """Per-restart seed streams: restart ``r`` always gets the same stream."""
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return [np.random.SeedSequence(base.entropy, spawn_key=tuple(base.spawn_key) + (r,))
            for r in range(restarts)]


def random_start(dim: int, seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seq)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def min_output_entropy_estimate(ch: Channel, p: float, restarts: int = 64, seed=0,
                                config: OptimizerConfig = OptimizerConfig()) -> MinEntropyEstimate:
    """Best of ``restarts`` local minimizations of the output Renyi entropy.

    Parameters
    ----------
    ch : Channel
    p : float
        Renyi order, at least 1.
    restarts : int
        Number of Haar-random starting states.
    seed : int or numpy.random.SeedSequence
        Root of the seed schedule; restart ``r`` draws its start from the
        child stream ``spawn_key + (r,)``, so adding restarts never changes
        earlier ones.
    config : OptimizerConfig

    Returns
    -------
    MinEntropyEstimate
        ``value`` is the smallest restart value and an upper bound on the
        true minimum output entropy.
    """
    p = float(p)
    if not p >= 1 or not math.isfinite(p):
        raise InvalidArgumentError(f"estimator supports p >= 1, got {p!r}")
    if int(restarts) < 1:
        raise InvalidArgumentError(f"restarts must be >= 1, got {restarts!r}")
    results = [minimize_from(ch, p, random_start(ch.dims.s, seq), config)
               for seq in restart_seeds(seed, int(restarts))]
    best = min(range(len(results)), key=lambda i: results[i].value)
    return MinEntropyEstimate(
        value=results[best].value,
        witness=results[best].state,
        restart_values=[r.value for r in results],
        restarts=len(results),
        converged_flags=[r.converged for r in results],
        stop_reasons=[r.stop_reason for r in results],
        p=p,
    )
