import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pnormlab.errors import InvalidArgumentError, InvalidDimensionError
from pnormlab.linalg import (
    RegisterDims,
    check_density,
    density,
    eigenvalues_hermitian,
    flatten_index,
    haar_unitary,
    maximally_entangled_state,
    partial_trace,
    partial_trace_pure,
    purity,
    unflatten_index,
)


def random_state(rng, d):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def test_register_dims_derived_sizes():
    d = RegisterDims(3, 8, 24)
    assert (d.r, d.s, d.a, d.b, d.total) == (3, 192, 24, 24, 576)
    assert RegisterDims.parse("3, 8,24") == d
    assert str(d) == "3,8,24"


@pytest.mark.parametrize("bad", [(0, 2, 2), (2, -1, 2), (2, 2, 1.5), (True, 2, 2)])
def test_register_dims_rejects(bad):
    with pytest.raises(InvalidDimensionError):
        RegisterDims(*bad)


@pytest.mark.parametrize("text", ["3,8", "a,b,c", ""])
def test_register_dims_parse_rejects(text):
    with pytest.raises(InvalidDimensionError):
        RegisterDims.parse(text)


def test_index_roundtrip_row_major():
    dims = (3, 8, 24)
    assert flatten_index((1, 2, 3), dims) == 1 * 192 + 2 * 24 + 3
    for k in (0, 17, 575):
        assert flatten_index(unflatten_index(k, dims), dims) == k


@pytest.mark.parametrize("d", [1, 2, 5, 24])
def test_haar_unitary_is_unitary(rng, d):
    u = haar_unitary(d, rng)
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


def test_haar_unitary_phase_fix_gives_uniform_phases(rng):
    # Without the phase correction the diagonal of R is positive and U[0,0]
    # concentrates on a half plane; with it the phase is uniform.
    phases = np.array([np.angle(haar_unitary(2, rng)[0, 0]) for _ in range(4000)])
    assert abs(np.mean(np.cos(phases))) < 0.05
    assert abs(np.mean(np.sin(phases))) < 0.05


def test_haar_second_moment(rng):
    # E|U_00|^2 = 1/d and E|U_00|^4 = 2/(d(d+1)).
    d, n = 3, 20000
    x = np.array([abs(haar_unitary(d, rng)[0, 0]) ** 2 for _ in range(n)])
    assert abs(x.mean() - 1 / d) < 4 * x.std() / np.sqrt(n)
    assert abs((x**2).mean() - 2 / (d * (d + 1))) < 4 * (x**2).std() / np.sqrt(n)


def test_haar_rejects_bad_dimension(rng):
    with pytest.raises(InvalidDimensionError):
        haar_unitary(0, rng)


def test_maximally_entangled_state_invariance(rng):
    d = 4
    phi = maximally_entangled_state(d)
    u = haar_unitary(d, rng)
    assert np.allclose(np.kron(u, u.conj()) @ phi, phi, atol=1e-12)
    assert np.isclose(np.linalg.norm(phi), 1.0)


def test_partial_trace_matches_pure_version(rng):
    dims = [2, 3, 4]
    psi = random_state(rng, 24)
    rho = density(psi)
    for keep in ([0], [1], [2], [0, 2], [1, 2], [0, 1, 2]):
        assert np.allclose(partial_trace(rho, dims, keep), partial_trace_pure(psi, dims, keep), atol=1e-13)


def test_partial_trace_of_product(rng):
    a, b = density(random_state(rng, 3)), density(random_state(rng, 4))
    assert np.allclose(partial_trace(np.kron(a, b), [3, 4], [0]), a)
    assert np.allclose(partial_trace(np.kron(a, b), [3, 4], [1]), b)


def test_partial_trace_rejects_empty_keep(rng):
    with pytest.raises(InvalidArgumentError):
        partial_trace(np.eye(4) / 4, [2, 2], [])
    with pytest.raises(InvalidArgumentError):
        partial_trace(np.eye(4) / 4, [2, 3], [0])


def test_eigenvalues_hermitian_checks():
    with pytest.raises(InvalidArgumentError):
        eigenvalues_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(InvalidArgumentError):
        eigenvalues_hermitian(np.zeros((2, 3)))
    lam = eigenvalues_hermitian(np.diag([0.2, 0.5, 0.3]))
    assert np.allclose(lam, [0.5, 0.3, 0.2])


def test_check_density():
    check_density(np.eye(3) / 3)
    with pytest.raises(InvalidArgumentError):
        check_density(np.eye(3))
    with pytest.raises(InvalidArgumentError):
        check_density(np.diag([1.5, -0.5]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_reduced_states_share_spectrum(da, db, seed):
    # Schmidt: both marginals of a pure state have the same nonzero spectrum.
    psi = random_state(np.random.default_rng(seed), da * db)
    la = eigenvalues_hermitian(partial_trace_pure(psi, [da, db], [0]))
    lb = eigenvalues_hermitian(partial_trace_pure(psi, [da, db], [1]))
    k = min(da, db)
    assert np.allclose(la[:k], lb[:k], atol=1e-12)
    assert np.isclose(la.sum(), 1.0)
    assert np.isclose(purity(partial_trace_pure(psi, [da, db], [0])), np.sum(la**2))
