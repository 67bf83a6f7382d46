"""Random Stinespring channels ``S -> A`` and their conjugates.

The channel is ``N(rho) = Tr_B[U (|0><0|_E (x) rho) U^dag]`` with registers
ordered ``E, F, G``. The fixed ancilla state ``|0>`` is the first computational
basis vector of ``E``, so the relevant block of ``U`` is its first ``|S|``
columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .linalg import RegisterDims, check_state, check_unitary, haar_unitary, maximally_entangled_state

DEFAULT_MEMORY_CAP = 2**22


@dataclass(frozen=True, eq=False)
class Channel:
    """A channel defined by a unitary on ``E F G``.

    ``conjugated=True`` selects the conjugate channel, which uses the
    entrywise complex conjugate of ``unitary``.
    """

    dims: RegisterDims
    unitary: np.ndarray = field(repr=False)
    conjugated: bool = False

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        if u.shape != (self.dims.total, self.dims.total):
            raise InvalidArgumentError(
                f"unitary of shape {u.shape} does not act on E F G = {self.dims.total}"
            )
        check_unitary(u)
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @classmethod
    def random(cls, dims: RegisterDims, rng: np.random.Generator) -> "Channel":
        return cls(dims, haar_unitary(dims.total, rng))

    @cached_property
    def isometry(self) -> np.ndarray:
        """``V = U (|0>_E (x) I_S)``, shape ``(|A||B|, |S|)``, conjugated if needed."""
        v = self.unitary[:, : self.dims.s]
        v = np.ascontiguousarray(v.conj() if self.conjugated else v)
        v.setflags(write=False)
        return v


def conjugate(ch: Channel) -> Channel:
    return replace(ch, conjugated=not ch.conjugated)


def apply(ch: Channel, state: np.ndarray) -> np.ndarray:
    """Output density operator on ``A`` for a pure vector or a density operator on ``S``."""
    state = np.asarray(state)
    d = ch.dims
    v = ch.isometry
    if state.ndim == 1:
        if state.shape[0] != d.s:
            raise InvalidArgumentError(f"input has dimension {state.shape[0]}, channel expects |S|={d.s}")
        check_state(state)
        m = (v @ state).reshape(d.a, d.b)
        return m @ m.conj().T
    if state.shape != (d.s, d.s):
        raise InvalidArgumentError(f"input operator has shape {state.shape}, channel expects {(d.s, d.s)}")
    big = (v @ state @ v.conj().T).reshape(d.a, d.b, d.a, d.b)
    return np.einsum("ibjb->ij", big)


def kraus_operators(ch: Channel) -> np.ndarray:
    """Kraus operators ``K_b = (I_A (x) <b|) V`` stacked as ``(|B|, |A|, |S|)``."""
    d = ch.dims
    return np.ascontiguousarray(ch.isometry.reshape(d.a, d.b, d.s).transpose(1, 0, 2))


def apply_kraus(ch: Channel, rho: np.ndarray) -> np.ndarray:
    k = kraus_operators(ch)
    return np.einsum("bij,jk,blk->il", k, np.asarray(rho), k.conj())


def _check_cap(dims: RegisterDims, memory_cap: int) -> None:
    need = dims.total**2
    if need > memory_cap:
        raise ResourceLimitError(
            f"product channel needs (efg)^2 = {need} amplitudes, above the cap of {memory_cap}"
        )


def apply_product_to_phi(ch: Channel, memory_cap: int = DEFAULT_MEMORY_CAP) -> np.ndarray:
    """``(N (x) N-bar)(Phi^{S1 S2})`` as an operator on ``A1 A2``.

    The global pure state ``(U (x) U-bar)(|0>|0> (x) |Phi>)`` has amplitudes
    ``T[x1, x2] = (V V^dag)[x1, x2] / sqrt(|S|)`` with ``x = (a, b)``; tracing
    ``B1 B2`` then leaves ``rho = M M^dag`` where ``M`` regroups ``T`` as
    ``(a1 a2) x (b1 b2)``.
    """
    d = ch.dims
    _check_cap(d, memory_cap)
    v = ch.isometry
    t = (v @ v.conj().T) / np.sqrt(d.s)
    m = t.reshape(d.a, d.b, d.a, d.b).transpose(0, 2, 1, 3).reshape(d.a * d.a, d.b * d.b)
    return m @ m.conj().T


def phi_overlap(rho: np.ndarray, dim_a: int) -> float:
    """Fidelity ``<Phi^{A1A2}| rho |Phi^{A1A2}>``."""
    phi = maximally_entangled_state(dim_a)
    return float(np.vdot(phi, rho @ phi).real)
