import io
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pnormlab.errors import InvalidArgumentError, SingularGramError
from pnormlab.linalg import RegisterDims, haar_unitary
from pnormlab.weingarten import (
    Permutation,
    all_permutations,
    average_purity_exact,
    average_purity_monte_carlo,
    dominant_term,
    gram_matrix,
    haar_moment,
    orthogonality_residual,
    weingarten_table,
)


def exact_wg(n, d):
    """Oracle: Wg by exact rational Gauss-Jordan on the Gram matrix."""
    perms = list(itertools.permutations(range(n)))

    def ncycles(p):
        seen, c = set(), 0
        for s in range(n):
            if s not in seen:
                c += 1
                while s not in seen:
                    seen.add(s)
                    s = p[s]
        return c

    def comp_inv(s, t):
        tinv = [0] * n
        for i, x in enumerate(t):
            tinv[x] = i
        return tuple(s[tinv[i]] for i in range(n))

    m = len(perms)
    a = [[Fraction(d) ** ncycles(comp_inv(s, t)) for t in perms] + [Fraction(int(k == 0))]
         for k, s in enumerate(perms)]
    for c in range(m):
        piv = next(r for r in range(c, m) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(m):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = {}
    for k, p in enumerate(perms):
        out[Permutation(p).cycle_type()] = a[k][m]
    return out


def test_permutation_algebra():
    s = Permutation((1, 2, 0))
    t = Permutation((1, 0, 2))
    assert (s * t)(0) == s(t(0))
    assert s * s.inverse() == Permutation.identity(3)
    assert s.cycle_type() == (3,) and t.cycle_type() == (2, 1)
    assert s.length == 2 and t.length == 1
    with pytest.raises(InvalidArgumentError):
        Permutation((0, 0, 1))
    with pytest.raises(InvalidArgumentError):
        all_permutations(5)


def test_s4_class_census():
    counts = {}
    for p in all_permutations(4):
        counts[p.cycle_type()] = counts.get(p.cycle_type(), 0) + 1
    assert counts == {(1, 1, 1, 1): 1, (2, 1, 1): 6, (3, 1): 8, (2, 2): 3, (4,): 6}


@pytest.mark.parametrize("d", [1, 4, 24])
def test_n1_closed_form(d):
    assert math.isclose(weingarten_table(1, d)((1,)), 1 / d, rel_tol=1e-12)


@pytest.mark.parametrize("d", [2, 4, 24])
def test_n2_closed_form(d):
    t = weingarten_table(2, d)
    assert math.isclose(t((1, 1)), 1 / (d * d - 1), rel_tol=1e-12)
    assert math.isclose(t((2,)), -1 / (d * (d * d - 1)), rel_tol=1e-12)


@pytest.mark.parametrize("d", [3, 5, 24])
def test_n3_closed_form(d):
    t = weingarten_table(3, d)
    den = d * (d * d - 1) * (d * d - 4)
    assert math.isclose(t((1, 1, 1)), (d * d - 2) / den, rel_tol=1e-12)
    assert math.isclose(t((2, 1)), -d / den, rel_tol=1e-12)
    assert math.isclose(t((3,)), 2 / den, rel_tol=1e-12)


@pytest.mark.parametrize("d", [4, 5, 8])
def test_n4_against_exact_rational_oracle(d):
    exact = exact_wg(4, d)
    t = weingarten_table(4, d)
    for key, value in exact.items():
        assert math.isclose(t(key), float(value), rel_tol=1e-10)
    # identity-class closed form
    id_form = Fraction(d**4 - 8 * d * d + 6, d * d * (d * d - 1) * (d * d - 4) * (d * d - 9))
    assert exact[(1, 1, 1, 1)] == id_form


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [4, 8, 24, 576])
def test_orthogonality(n, d):
    assert orthogonality_residual(n, d) < 1e-10


def test_singular_gram():
    with pytest.raises(SingularGramError):
        weingarten_table(4, 3)
    assert np.linalg.matrix_rank(gram_matrix(all_permutations(3), 2)) < 6


@pytest.mark.parametrize("n", [2, 3, 4])
def test_large_d_scaling_exponent(n):
    # |Wg(sigma, d)| ~ d^-(n + |sigma|)
    d1, d2 = 1000, 4000
    for p in all_permutations(n):
        w1, w2 = abs(weingarten_table(n, d1)(p)), abs(weingarten_table(n, d2)(p))
        slope = math.log(w2 / w1) / math.log(d2 / d1)
        assert abs(slope + n + p.length) < 0.15


def test_haar_moment_known_values():
    d = 3
    assert math.isclose(haar_moment([0], [0], [0], [0], d), 1 / d)
    assert haar_moment([0], [0], [1], [0], d) == 0.0
    assert math.isclose(haar_moment([0, 0], [0, 0], [0, 0], [0, 0], d), 2 / (d * (d + 1)))
    # E[U00 U11 conj(U01 U10)] = -1/(d(d^2-1))
    assert math.isclose(haar_moment([0, 1], [0, 1], [0, 1], [1, 0], d), -1 / (d * (d * d - 1)))


def test_haar_moment_against_sampling(rng):
    d, n = 4, 30000
    vals = np.empty(n, dtype=complex)
    for k in range(n):
        u = haar_unitary(d, rng)
        vals[k] = u[0, 0] * u[1, 1] * u[0, 1].conj() * u[1, 0].conj() * abs(u[2, 2]) ** 2
    exact = haar_moment([0, 1, 2], [0, 1, 2], [0, 1, 2], [1, 0, 2], d)
    se = vals.real.std() / math.sqrt(n)
    assert abs(vals.real.mean() - exact) < 4 * se


def brute_force_average_purity(dims):
    """Oracle: sum Haar moments over every explicit index assignment of Tr rho^2."""
    a, b, s, d = dims.a, dims.b, dims.s, dims.total
    total = 0.0
    row = lambda x, y: x * b + y
    for a1, a2, a1p, a2p in itertools.product(range(a), repeat=4):
        for b1, b2, b1p, b2p in itertools.product(range(b), repeat=4):
            for s0, s1, s2, s3 in itertools.product(range(s), repeat=4):
                rows_u = [row(a1, b1), row(a2p, b2), row(a1p, b1p), row(a2, b2p)]
                rows_ub = [row(a2, b2), row(a1p, b1), row(a2p, b2p), row(a1, b1p)]
                cols = [s0, s1, s2, s3]
                total += haar_moment(rows_u, cols, rows_ub, cols, d)
    return total / s**2


@pytest.mark.parametrize("dims", [RegisterDims(2, 1, 2), RegisterDims(2, 2, 1)])
def test_exact_purity_against_explicit_index_oracle(dims):
    value, _ = average_purity_exact(dims)
    assert math.isclose(value, brute_force_average_purity(dims), rel_tol=1e-10)


def test_exact_purity_frozen_values():
    # Frozen from the evaluator after agreement with Monte Carlo (z = 0.12, 0.63).
    assert math.isclose(average_purity_exact(RegisterDims(2, 2, 2))[0], 36 / 77, rel_tol=1e-11)
    assert math.isclose(average_purity_exact(RegisterDims(2, 2, 4))[0], 0.33912836389616496, rel_tol=1e-11)
    assert math.isclose(average_purity_exact(RegisterDims(1, 2, 3))[0], 1.0, rel_tol=1e-12)


def test_ledger_structure(tmp_path):
    dims = RegisterDims(2, 2, 2)
    total, ledger = average_purity_exact(dims)
    assert len(ledger.terms) == 576
    assert math.isclose(ledger.resum(), total, rel_tol=0, abs_tol=1e-15)
    ident = Permutation.identity(4)
    assert ledger.term(ident, ident).wg_argument == (1, 1, 1, 1)
    text = ledger.to_csv()
    lines = text.splitlines()
    assert lines[0] == "sigma_index,tau_index,cycle_type,loop_weight,wg_value,term_value"
    assert len(lines) == 577
    buf = io.StringIO()
    ledger.to_csv(buf)
    assert buf.getvalue() == text


def test_dominant_term():
    assert math.isclose(dominant_term(RegisterDims(3, 8, 24)), 1 / 9)


def test_exact_purity_needs_four_dims():
    with pytest.raises(SingularGramError):
        average_purity_exact(RegisterDims(1, 1, 3))


def test_monte_carlo_validation():
    with pytest.raises(InvalidArgumentError):
        average_purity_monte_carlo(RegisterDims(2, 2, 2), 1)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
def test_exact_purity_in_physical_range(e, f, g):
    dims = RegisterDims(e, f, g)
    if dims.total < 4:
        return
    value, _ = average_purity_exact(dims)
    # Purity of a state on A1 A2 lies in [1/|A|^2, 1] and is at least the Phi overlap squared.
    assert 1 / dims.a**2 - 1e-12 <= value <= 1 + 1e-12
    assert value >= 1 / e**2 - 1e-12


def test_identity_weingarten_leading_order():
    d = 576
    assert abs(weingarten_table(4, d)((1, 1, 1, 1)) * d**4 - 1) < 10 / d**2


def test_group_axioms_exhaustive_s4():
    perms = all_permutations(4)
    e = Permutation.identity(4)
    for a in perms:
        assert a * e == e * a == a
        assert a * a.inverse() == e
    for a, b, c in itertools.islice(itertools.product(perms, repeat=3), 0, None, 7):
        assert (a * b) * c == a * (b * c)


def _scaling_exponents(sigma, tau, base, lam=2):
    e, f, g = base
    t0 = average_purity_exact(RegisterDims(e, f, g))[1].term(sigma, tau).term_value
    tf = average_purity_exact(RegisterDims(e, lam * f, g))[1].term(sigma, tau).term_value
    tg = average_purity_exact(RegisterDims(e, f, lam * g))[1].term(sigma, tau).term_value
    return t0, math.log(tf / t0) / math.log(lam), math.log(tg / t0) / math.log(lam)


def test_transposition_diagram_orders():
    # Scaling f moves |A| and |S| together, scaling g moves |B| and |S|.
    # |S|^2 |A|^-4 |B|^-2 -> (-2, 0); |S|^2 |A|^-2 |B|^-4 -> (0, -2); |S|^2 |A|^-4 |B|^-4 -> (-2, -2).
    ident = Permutation.identity(4)
    found = []
    for sigma in all_permutations(4):
        if sigma.cycle_type() != (2, 1, 1):
            continue
        value, xf, xg = _scaling_exponents(sigma, ident, (2, 8, 8))
        assert value < 0
        found.append((round(xf), round(xg)))
        assert abs(xf - round(xf)) <= 0.15 * max(1, abs(round(xf)))
        assert abs(xg - round(xg)) <= 0.15 * max(1, abs(round(xg)))
    assert sorted(found) == [(-2, -2), (-2, -2), (-2, 0), (-2, 0), (0, -2), (0, -2)]


def test_stack_term_matches_dominant_term():
    dims = RegisterDims(3, 8, 24)
    _, ledger = average_purity_exact(dims)
    ident = Permutation.identity(4)
    ratio = ledger.term(ident, ident).term_value / dominant_term(dims)
    assert abs(ratio - 1) < 10 / dims.total**2


def test_non_identity_terms_subleading():
    # rest / dominant * |A|^2 must stay bounded as |A| grows at fixed e.
    scaled = []
    for f, g in ((4, 12), (8, 24), (16, 48)):
        dims = RegisterDims(3, f, g)
        _, ledger = average_purity_exact(dims)
        rest = math.fsum(t.term_value for t in ledger.terms if t.wg_argument != (1, 1, 1, 1))
        scaled.append(rest / dominant_term(dims) * dims.a**2)
    assert max(scaled) - min(scaled) <= 0.15 * max(abs(x) for x in scaled)


def test_monte_carlo_standard_error_scaling():
    dims = RegisterDims(2, 2, 2)
    _, se1 = average_purity_monte_carlo(dims, 400, 5)
    _, se2 = average_purity_monte_carlo(dims, 800, 6)
    assert abs(se1 / se2 / math.sqrt(2) - 1) < 0.2
