import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pnormlab.entropy import (
    binary_entropy,
    entropy_from_max_p_norm,
    grouping_decomposition,
    max_p_norm_from_entropy,
    renyi_entropy,
    residual_h2_lower_bound,
    von_neumann_entropy,
)
from pnormlab.errors import DegenerateSpectrumError, InvalidArgumentError

spectra = st.lists(st.floats(0.0, 1.0), min_size=2, max_size=30).filter(lambda x: sum(x) > 1e-3).map(
    lambda x: np.array(x) / sum(x))


def test_uniform_spectrum():
    lam = np.full(8, 1 / 8)
    for p in (0.5, 1.0, 1.5, 2.0, 7.0):
        assert math.isclose(renyi_entropy(lam, p), math.log(8), rel_tol=1e-14)


def test_pure_spectrum():
    assert renyi_entropy([1, 0, 0], 1.5) == 0.0
    assert von_neumann_entropy([1, 0, 0]) == 0.0


def test_known_values():
    lam = [0.5, 0.25, 0.25]
    assert math.isclose(von_neumann_entropy(lam), 1.5 * math.log(2))
    assert math.isclose(renyi_entropy(lam, 2), -math.log(0.375))


def test_input_validation():
    with pytest.raises(InvalidArgumentError):
        renyi_entropy([0.5, 0.6], 2)
    with pytest.raises(InvalidArgumentError):
        renyi_entropy([1.1, -0.1], 2)
    with pytest.raises(InvalidArgumentError):
        renyi_entropy([1.0], 0)
    with pytest.raises(InvalidArgumentError):
        renyi_entropy([], 2)


def test_tiny_negative_rounding_tolerated():
    assert renyi_entropy([1.0 + 1e-12, -1e-12], 2) >= 0.0


def test_binary_entropy():
    assert binary_entropy(0) == binary_entropy(1) == 0.0
    assert math.isclose(binary_entropy(0.5), math.log(2))
    with pytest.raises(InvalidArgumentError):
        binary_entropy(1.5)


def test_grouping_pure_and_degenerate():
    g = grouping_decomposition([1.0, 0.0, 0.0])
    assert g.recombined == 0.0 and g.residual_entropy == 0.0
    with pytest.raises(DegenerateSpectrumError):
        residual_h2_lower_bound([1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        grouping_decomposition([1.0])


def test_p_norm_bridge_roundtrip():
    for h, p in [(0.0, 1.5), (1.3, 1.8), (3.1, 4.0)]:
        nu = max_p_norm_from_entropy(h, p)
        assert math.isclose(entropy_from_max_p_norm(nu, p), h, abs_tol=1e-12)
    lam = np.array([0.6, 0.3, 0.1])
    nu = np.sum(lam**1.5) ** (1 / 1.5)
    assert math.isclose(max_p_norm_from_entropy(renyi_entropy(lam, 1.5), 1.5), nu, rel_tol=1e-13)
    with pytest.raises(InvalidArgumentError):
        max_p_norm_from_entropy(1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(spectra)
def test_grouping_identity(lam):
    g = grouping_decomposition(lam)
    assert abs(g.recombined - von_neumann_entropy(lam)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(spectra, st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_renyi_nonincreasing_in_p(lam, p, q):
    lo, hi = sorted((p, q))
    assert renyi_entropy(lam, hi) <= renyi_entropy(lam, lo) + 1e-12


@settings(max_examples=100, deadline=None)
@given(spectra, st.floats(0.1, 5.0))
def test_renyi_range(lam, p):
    h = renyi_entropy(lam, p)
    assert 0.0 <= h <= math.log(lam.size) + 1e-12


@settings(max_examples=50, deadline=None)
@given(spectra)
def test_residual_h2_bounds_residual_entropy(lam):
    g = grouping_decomposition(lam)
    if 1 - g.lambda1 > 1e-9:
        assert residual_h2_lower_bound(lam) <= g.residual_entropy + 1e-10


def test_renyi_continuous_at_one():
    lam = np.array([0.4, 0.3, 0.2, 0.1])
    assert abs(renyi_entropy(lam, 1 + 1e-7) - von_neumann_entropy(lam)) < 1e-6
