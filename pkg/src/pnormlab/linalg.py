"""Dense linear algebra on composite registers.

States and operators are plain numpy arrays. Composite indices are row-major
over an ordered list of register dimensions, so for registers ``E, F, G`` the
basis vector ``|e f g>`` sits at ``(e * F + f) * G + g``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidDimensionError

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True)
class RegisterDims:
    """Dimensions of the three elementary registers ``E, F, G``.

    The channel input is ``S = F G``, the output ``A = E F`` and the traced
    environment ``B = G``; the ancilla ``R`` is ``E`` itself.
    """

    e: int
    f: int
    g: int

    def __post_init__(self):
        for name in ("e", "f", "g"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidDimensionError(f"register dimension {name}={v!r} must be a positive integer")
            object.__setattr__(self, name, int(v))

    @classmethod
    def parse(cls, text: str) -> "RegisterDims":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InvalidDimensionError(f"expected 'E,F,G', got {text!r}")
        try:
            values = [int(p) for p in parts]
        except ValueError as exc:
            raise InvalidDimensionError(f"expected integers in {text!r}") from exc
        return cls(*values)

    @property
    def r(self) -> int:
        return self.e

    @property
    def s(self) -> int:
        return self.f * self.g

    @property
    def a(self) -> int:
        return self.e * self.f

    @property
    def b(self) -> int:
        return self.g

    @property
    def total(self) -> int:
        return self.e * self.f * self.g

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.e, self.f, self.g)

    def __str__(self):
        return f"{self.e},{self.f},{self.g}"


def flatten_index(multi: Sequence[int], dims: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(multi), tuple(dims)))


def unflatten_index(k: int, dims: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(k, tuple(dims)))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a ``d x d`` unitary from the Haar measure.

    QR of a complex Ginibre matrix, with each column of ``Q`` rotated by the
    phase of the matching diagonal entry of ``R``. Without that correction the
    distribution is not Haar.
    """
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidDimensionError(f"unitary dimension must be >= 1, got {d!r}")
    d = int(d)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def maximally_entangled_state(d: int) -> np.ndarray:
    """Return ``d^{-1/2} sum_i |i>|i>`` as a vector of length ``d**2``."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d!r}")
    d = int(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1.0 / np.sqrt(d)
    return psi


def density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def _check_keep(keep, n: int) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidArgumentError("keep must name at least one register")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvalidArgumentError(f"keep {keep} out of range for {n} registers")
    return keep


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced operator on the registers listed in ``keep`` (original order)."""
    rho = np.asarray(rho)
    dims = [int(x) for x in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise InvalidArgumentError(f"operator of shape {rho.shape} does not match dims {dims}")
    n = len(dims)
    keep = _check_keep(keep, n)
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = rho.reshape(dims + dims)
    t = t.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    return np.einsum("ikjk->ij", t.reshape(dk, dd, dk, dd))


def partial_trace_pure(psi: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced state of a pure vector, without forming ``|psi><psi|``."""
    psi = np.asarray(psi)
    dims = [int(x) for x in dims]
    if psi.shape != (int(np.prod(dims)),):
        raise InvalidArgumentError(f"vector of shape {psi.shape} does not match dims {dims}")
    n = len(dims)
    keep = _check_keep(keep, n)
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    x = psi.reshape(dims).transpose(keep + drop).reshape(dk, -1)
    return x @ x.conj().T


def eigenvalues_hermitian(op: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian operator, sorted descending."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {op.shape}")
    dev = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
    if dev > HERMITIAN_TOL:
        raise InvalidArgumentError(f"operator is not Hermitian (max deviation {dev:.3g})")
    sym = 0.5 * (op + op.conj().T)
    return np.linalg.eigvalsh(sym)[::-1]


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidArgumentError(f"unitary must be square, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > tol:
        raise InvalidArgumentError(f"matrix is not unitary (max deviation {dev:.3g})")


def check_state(psi: np.ndarray, tol: float = NORM_TOL) -> None:
    dev = abs(np.vdot(psi, psi).real - 1.0)
    if dev > tol:
        raise InvalidArgumentError(f"state is not normalized (|norm^2 - 1| = {dev:.3g})")


def check_density(rho: np.ndarray) -> None:
    """Raise unless ``rho`` is Hermitian, unit trace and positive semidefinite."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidArgumentError(f"density operator must be square, got shape {rho.shape}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidArgumentError(f"trace {tr!r} differs from 1")
    lam = eigenvalues_hermitian(rho)
    if lam[-1] < -NEGATIVE_EIG_TOL:
        raise InvalidArgumentError(f"negative eigenvalue {lam[-1]:.3g}")


def purity(rho: np.ndarray) -> float:
    """``Tr rho^2`` for Hermitian ``rho``."""
    rho = np.asarray(rho)
    return float(np.vdot(rho, rho).real)


def overlap(rho: np.ndarray, psi: np.ndarray) -> float:
    """``<psi| rho |psi>``."""
    return float(np.vdot(psi, rho @ psi).real)
