"""Haar moments through the Weingarten function, and the exact average purity
of the product-channel output on the maximally entangled input.

Moment convention used throughout::

    E[ prod_k U[i_k, j_k] * prod_k conj(U[i'_k, j'_k]) ]
        = sum_{sigma, tau} prod_k delta(i_k, i'_{sigma(k)}) delta(j_k, j'_{tau(k)})
                            * Wg(sigma tau^-1, d)

``Wg`` depends only on the cycle type of its argument.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .channel import DEFAULT_MEMORY_CAP, Channel, apply_product_to_phi
from .errors import InvalidArgumentError, SingularGramError
from .linalg import RegisterDims, purity

MAX_ORDER = 4


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{0, ..., n-1}``; ``images[i]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise InvalidArgumentError(f"{imgs} is not a permutation")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        if self.n != other.n:
            raise InvalidArgumentError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.n):
            if start in seen:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    @property
    def length(self) -> int:
        """Minimal number of transpositions, ``n - #cycles``."""
        return self.n - len(self.cycles())


def all_permutations(n: int) -> list[Permutation]:
    if not 1 <= n <= MAX_ORDER:
        raise InvalidArgumentError(f"permutation order must be in [1, {MAX_ORDER}], got {n!r}")
    return [Permutation(p) for p in itertools.permutations(range(n))]


def cycle_type(perm: Permutation) -> tuple[int, ...]:
    return perm.cycle_type()


@dataclass(frozen=True)
class WeingartenTable:
    n: int
    d: int
    values: dict

    def __call__(self, arg) -> float:
        key = arg.cycle_type() if isinstance(arg, Permutation) else tuple(arg)
        return self.values[key]


def gram_matrix(perms: Sequence[Permutation], d: int) -> np.ndarray:
    """``G[s, t] = d ** #cycles(s t^-1)``."""
    return np.array([[float(d) ** len((s * t.inverse()).cycles()) for t in perms] for s in perms])


@lru_cache(maxsize=None)
def weingarten_table(n: int, d: int) -> WeingartenTable:
    """Weingarten values by inverting the Gram matrix over ``S_n``.

    ``Wg(sigma) = (G^-1)[sigma, e]``. The Gram matrix is invertible exactly
    when ``d >= n``.
    """
    perms = all_permutations(n)
    if d < n:
        raise SingularGramError(f"Gram matrix over S_{n} is singular for d={d} < n")
    # Rescale by d^-n before inverting to keep entries O(1).
    g = gram_matrix(perms, d) / float(d) ** n
    col = np.linalg.solve(g, np.eye(len(perms))[:, 0]) / float(d) ** n
    values = {}
    for perm, w in zip(perms, col):
        key = perm.cycle_type()
        if key in values and not math.isclose(values[key], w, rel_tol=1e-9):
            raise AssertionError(f"Weingarten value not constant on class {key}")
        values.setdefault(key, float(w))
    return WeingartenTable(n, d, values)


def orthogonality_residual(n: int, d: int) -> float:
    """``max_sigma |sum_tau G[sigma, tau] Wg(tau) - delta(sigma, e)|``."""
    perms = all_permutations(n)
    table = weingarten_table(n, d)
    wg = np.array([table(t) for t in perms])
    target = np.zeros(len(perms))
    target[0] = 1.0
    return float(np.max(np.abs(gram_matrix(perms, d) @ wg - target)))


def haar_moment(rows_u, cols_u, rows_ubar, cols_ubar, d: int) -> float:
    """Exact Haar average of ``prod U[rows_u[k], cols_u[k]] * prod conj(U[rows_ubar[k], cols_ubar[k]])``."""
    n = len(rows_u)
    if not (len(cols_u) == len(rows_ubar) == len(cols_ubar) == n):
        raise InvalidArgumentError("index lists must have equal length")
    table = weingarten_table(n, d)
    total = 0.0
    perms = all_permutations(n)
    for s in perms:
        if any(rows_u[k] != rows_ubar[s(k)] for k in range(n)):
            continue
        for t in perms:
            if any(cols_u[k] != cols_ubar[t(k)] for k in range(n)):
                continue
            total += table(s * t.inverse())
    return total


# --- average purity of (N (x) N-bar)(Phi) -----------------------------------
#
# Tr rho^2 = |S|^-2 sum  V[a1b1,s1] V[a2'b2,s2] V[a1'b1',s3] V[a2b2',s4]
#                      * conj(V[a2b2,s1] V[a1'b1,s2] V[a2'b2',s3] V[a1b1',s4])
# with V[x, s] = U[x, (0, s)]. Summation nodes split every index into register
# components: the four A indices into (E, F) parts, the four B indices (G),
# the four S indices into (F, G) parts, and one pinned node for the E part
# of every input index, fixed to the ancilla state 0.

_KIND_E, _KIND_F, _KIND_G = 0, 1, 2
_A = {"a1": 0, "a2": 1, "a1'": 2, "a2'": 3}
_B = {"b1": 0, "b2": 1, "b1'": 2, "b2'": 3}
_ZERO = 20
_NODE_KIND = np.array([_KIND_E] * 4 + [_KIND_F] * 4 + [_KIND_G] * 4
                      + [_KIND_F] * 4 + [_KIND_G] * 4 + [-1], dtype=np.int64)
_U_FACTORS = [("a1", "b1", 0), ("a2'", "b2", 1), ("a1'", "b1'", 2), ("a2", "b2'", 3)]
_UBAR_FACTORS = [("a2", "b2", 0), ("a1'", "b1", 1), ("a2'", "b2'", 2), ("a1", "b1'", 3)]


def _out_slot(a: str, b: str) -> list[int]:
    return [_A[a], 4 + _A[a], 8 + _B[b]]


def _in_slot(s: int) -> list[int]:
    return [_ZERO, 12 + s, 16 + s]


_OUT_U = np.array([_out_slot(a, b) for a, b, _ in _U_FACTORS], dtype=np.int64)
_OUT_UBAR = np.array([_out_slot(a, b) for a, b, _ in _UBAR_FACTORS], dtype=np.int64)
_IN_U = np.array([_in_slot(s) for _, _, s in _U_FACTORS], dtype=np.int64)
_IN_UBAR = np.array([_in_slot(s) for _, _, s in _UBAR_FACTORS], dtype=np.int64)


@dataclass(frozen=True)
class LedgerTerm:
    sigma_index: int
    tau_index: int
    sigma: Permutation
    tau: Permutation
    loop_counts: tuple[int, int, int]
    loop_weight: int
    wg_argument: tuple[int, ...]
    wg_value: float
    term_value: float


@dataclass
class MomentLedger:
    """All ``(sigma, tau)`` terms of the average purity.

    ``term_value = loop_weight * wg_value / |S|^2``, so ``total`` is the sum
    of ``term_value`` over the ledger.
    """

    dims: RegisterDims
    terms: list[LedgerTerm] = field(repr=False)
    total: float

    def resum(self) -> float:
        return math.fsum(t.term_value for t in self.terms)

    def term(self, sigma: Permutation, tau: Permutation) -> LedgerTerm:
        for t in self.terms:
            if t.sigma == sigma and t.tau == tau:
                return t
        raise KeyError((sigma, tau))

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sigma_index", "tau_index", "cycle_type", "loop_weight", "wg_value", "term_value"])
        for t in self.terms:
            w.writerow([t.sigma_index, t.tau_index, "-".join(map(str, t.wg_argument)),
                        t.loop_weight, repr(t.wg_value), repr(t.term_value)])
        return buf.getvalue() if fh is None else ""


def average_purity_exact(dims: RegisterDims, backend: str | None = None) -> tuple[float, MomentLedger]:
    """Exact Haar average of ``Tr[((N (x) N-bar)(Phi))^2]`` as a sum over ``S_4 x S_4``.

    Every one of the 576 ``(sigma, tau)`` gluings is kept; no diagram
    shortcuts or symmetry multiplicities are used. The loop weight of a term
    is ``e^nE f^nF g^nG`` where ``nX`` counts free index classes of register
    ``X`` after gluing; classes touching the pinned ancilla index count 1.
    """
    d = dims.total
    if d < MAX_ORDER:
        raise SingularGramError(f"fourth moments need e*f*g >= 4, got {d}")
    perms = all_permutations(MAX_ORDER)
    table = weingarten_table(MAX_ORDER, d)
    images = np.array([p.images for p in perms], dtype=np.int64)
    counts = _kernels.get_loop_counts(backend)(images, _OUT_U, _OUT_UBAR, _IN_U, _IN_UBAR, _NODE_KIND, 3)
    base = (dims.e, dims.f, dims.g)
    norm = dims.s**2
    terms = []
    for i, s in enumerate(perms):
        for j, t in enumerate(perms):
            c = tuple(int(x) for x in counts[i, j])
            weight = base[0] ** c[0] * base[1] ** c[1] * base[2] ** c[2]
            arg = (s * t.inverse()).cycle_type()
            wg = table(arg)
            terms.append(LedgerTerm(i, j, s, t, c, weight, arg, wg, weight * wg / norm))
    ledger = MomentLedger(dims, terms, 0.0)
    ledger.total = ledger.resum()
    return ledger.total, ledger


def dominant_term(dims: RegisterDims) -> float:
    """Leading term ``|S|^2 / (|A|^2 |B|^2) = 1 / e^2``."""
    return (dims.s / (dims.a * dims.b)) ** 2


def average_purity_monte_carlo(dims: RegisterDims, samples: int, seed=0,
                               memory_cap: int = DEFAULT_MEMORY_CAP) -> tuple[float, float]:
    """Sample mean and standard error of the product-output purity over Haar ``U``."""
    if samples < 2:
        raise InvalidArgumentError(f"need at least 2 samples, got {samples!r}")
    rng = np.random.default_rng(seed)
    values = np.empty(samples)
    for k in range(samples):
        rho = apply_product_to_phi(Channel.random(dims, rng), memory_cap)
        values[k] = purity(rho)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))
