import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from outlawldc.config import CapacityError
from outlawldc.fourier import fourier_transform, popcounts
from outlawldc.geometry import (
    FpVector,
    HomogeneousPoly,
    all_points,
    avoiding_size_bound,
    avoids_directions,
    construct_avoiding_set,
    dlsz_bound,
    fx_audit,
    fx_exact_smoothness,
    fx_function,
    fx_values,
    geometry_outlaw,
    greedy_avoiding_set,
    homogeneous_monomials,
    interpolate_homogeneous,
    level_sets,
    line_count_in_set,
    line_points,
    lines_through_max_hits,
    nullspace_mod_p,
    restrict_to_line,
    set_to_mask,
)


def test_line_points_examples():
    x = FpVector(3, (0, 0))
    assert line_points(x, FpVector(3, (0, 0))) == [x] * 3
    assert [v.coords for v in line_points(x, FpVector(3, (1, 0)))] == [(0, 0), (1, 0), (2, 0)]
    pts = line_points(FpVector(5, (1, 2)), FpVector(5, (2, 3)))
    assert [v.coords for v in pts] == oracles.line(5, (1, 2), (2, 3))


def test_field_validation():
    with pytest.raises(ValueError):
        FpVector(4, (1,))
    with pytest.raises(ValueError):
        FpVector(2, (1,))
    with pytest.raises(ValueError):
        FpVector(3, (3,))
    with pytest.raises(ValueError):
        line_points(FpVector(3, (0,)), FpVector(5, (1,)))


def test_monomial_count():
    for n in range(1, 5):
        for d in range(0, 4):
            assert len(homogeneous_monomials(n, d)) == math.comb(n + d - 1, d)


def test_interpolation_example():
    f = interpolate_homogeneous(3, 2, [(1, 1)], 1)
    assert f((1, 1)) == 0 and not f.is_zero
    # proportional to x1 - x2
    c = dict(zip(f.monomials, f.coeffs))
    assert (c[(1, 0)] + c[(0, 1)]) % 3 == 0


def test_interpolation_empty_and_limit():
    f = interpolate_homogeneous(3, 2, [], 1)
    assert not f.is_zero
    with pytest.raises(ValueError):
        interpolate_homogeneous(3, 2, [(1, 0), (0, 1)], 1)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 3), st.integers(1, 3), st.data())
def test_interpolation_vanishes_and_is_homogeneous(p, n, d, data):
    limit = math.comb(n + d - 1, d) - 1
    size = data.draw(st.integers(0, min(limit, 6)))
    pts = data.draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * n), min_size=size, max_size=size))
    if len(set(pts)) > limit:
        return
    f = interpolate_homogeneous(p, n, pts, d)
    assert all(f(pt) == 0 for pt in pts)
    lam = data.draw(st.integers(1, p - 1))
    x = data.draw(st.tuples(*[st.integers(0, p - 1)] * n))
    assert f(tuple(lam * v % p for v in x)) == pow(lam, d, p) * f(x) % p


@given(st.sampled_from([3, 5]), st.integers(1, 3), st.data())
def test_restriction_degree_and_leading_coefficient(p, n, data):
    d = data.draw(st.integers(1, p - 1))
    pts = data.draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * n), max_size=2))
    if len(set(pts)) > math.comb(n + d - 1, d) - 1:
        return
    f = interpolate_homogeneous(p, n, pts, d)
    x = data.draw(st.tuples(*[st.integers(0, p - 1)] * n))
    y = data.draw(st.tuples(*[st.integers(0, p - 1)] * n))
    g = restrict_to_line(f, x, y)
    assert all(c == 0 for c in g[d + 1:])
    assert g[d] == f(y)


def test_level_sets_linear_form():
    f = HomogeneousPoly(3, 2, 1, ((1, 0), (0, 1)), (1, 0))
    assert level_sets(f).tolist() == [3, 3, 3]
    for p, n in [(3, 3), (5, 2), (7, 2)]:
        g = HomogeneousPoly(p, n, 1, tuple(homogeneous_monomials(n, 1)), tuple([1] * n))
        z = level_sets(g)[0]
        assert z == p ** (n - 1) <= dlsz_bound(p, n, 1)


def test_level_sets_rejects_zero():
    with pytest.raises(ValueError):
        level_sets(HomogeneousPoly(3, 2, 1, ((1, 0),), (0,)))


def test_nullspace():
    m = np.array([[1, 2, 0], [0, 1, 1]])
    basis = nullspace_mod_p(m, 5)
    assert basis.shape == (1, 3)
    assert np.all(m @ basis[0] % 5 == 0)


@pytest.mark.parametrize("p,n,A", [
    (3, 4, [(1, 0, 0, 0), (0, 1, 2, 0), (2, 2, 1, 1)]),
    (5, 2, [(1, 0), (2, 3), (4, 4)]),
    (5, 2, []),
    (3, 3, [(1, 1, 1)]),
])
def test_avoiding_set_against_oracle(p, n, A):
    av = construct_avoiding_set(p, n, A)
    coords = [tuple(c) for c in all_points(p, n)[list(av.B)]]
    assert oracles.max_hits_through(p, n, A, coords) <= p - 2
    assert av.certified and av.max_hits <= p - 2
    assert av.size >= avoiding_size_bound(p, n)
    assert all(av.poly(a) == 0 for a in A)


def test_avoiding_set_size_condition():
    with pytest.raises(ValueError):
        construct_avoiding_set(3, 2, [(1, 0), (0, 1)])


def test_greedy_fallback_certifies():
    av = greedy_avoiding_set(3, 2, [0, 1, 2, 4])
    coords = [tuple(c) for c in all_points(3, 2)[list(av.B)]]
    A = [tuple(c) for c in all_points(3, 2)[[0, 1, 2, 4]]]
    assert av.certified and oracles.max_hits_through(3, 2, A, coords) <= 1


def test_line_counts():
    assert line_count_in_set(3, 2, range(9)) == 9 * 8
    assert line_count_in_set(3, 2, range(9), unordered=True) == 12
    assert line_count_in_set(3, 2, [4]) == 0
    plane = [tuple(c) for c in all_points(3, 3) if c[0] == 0]
    assert line_count_in_set(3, 3, plane) == 9 * 8 == oracles.ordered_lines_inside(3, 3, plane)


@given(st.sets(st.integers(0, 24), max_size=25))
def test_line_count_oracle(S):
    coords = [tuple(c) for c in all_points(5, 2)[sorted(S)]] if S else []
    assert line_count_in_set(5, 2, sorted(S)) == oracles.ordered_lines_inside(5, 2, coords)


def test_fx_examples():
    vals = fx_values(3, 1, 0)
    assert vals[set_to_mask(3, 1, [1, 2])] == 1.0
    assert vals[(1 << 3) - 1] == 0.0 and vals[0] == 1.0


def test_fx_against_oracle():
    rng = np.random.default_rng(0)
    p, n = 3, 2
    for x in (0, 4, 7):
        f = fx_function(FpVector.from_index(p, n, x))
        for _ in range(20):
            S = sorted(rng.choice(9, size=rng.integers(0, 10), replace=False).tolist())
            coords = [tuple(c) for c in all_points(p, n)[S]]
            origin = tuple(all_points(p, n)[x])
            assert Fraction(f.values[set_to_mask(p, n, S)]).limit_denominator(100) == oracles.f_x_value(p, n, origin, coords)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
def test_fx_smoothness_and_degree(p, n):
    audit = fx_audit(FpVector.from_index(p, n, 0))
    assert audit.degree == p - 1
    assert audit.smoothness == pytest.approx(fx_exact_smoothness(p, n))
    spec = fourier_transform(fx_function(FpVector.from_index(p, n, 1)))
    assert np.all(np.abs(spec.coeffs[popcounts(p ** n) > p - 1]) < 1e-12)


def test_fx_claimed_bound_holds_only_sometimes():
    assert fx_audit(FpVector.from_index(3, 2, 0)).within_claimed
    assert not fx_audit(FpVector.from_index(3, 1, 0)).within_claimed
    assert not fx_audit(FpVector.from_index(5, 1, 0)).within_claimed


def test_fx_capacity():
    with pytest.raises(CapacityError):
        fx_values(3, 3, 0)


def test_geometry_outlaw_example():
    rep = geometry_outlaw(3, 2, 1, origins=[0])
    assert rep.witness_values == [0.0]
    assert rep.deviation == pytest.approx(1 / 12)
    assert not rep.flagged and rep.exact_mean


def test_geometry_outlaw_rejects_k0():
    with pytest.raises(ValueError):
        geometry_outlaw(3, 2, 0)


def test_avoids_directions():
    assert avoids_directions(3, 2, [0, 1], [1])
    assert not avoids_directions(3, 2, [0, 1, 2], [1])
    assert avoids_directions(3, 2, [0, 1, 2], [3])
    with pytest.raises(ValueError):
        avoids_directions(3, 2, [0], [0])


def test_hits_through_matches_certificate():
    av = construct_avoiding_set(3, 3, [(1, 2, 0)])
    hits = lines_through_max_hits(3, 3, [(1, 2, 0)], av.B)
    assert hits.max() == av.max_hits
