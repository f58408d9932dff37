import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from outlawldc.config import CapacityError
from outlawldc.fourier import (
    BooleanFunction,
    FourierSpectrum,
    character,
    cube_points,
    degree,
    derivative_norms,
    discrete_derivative,
    fourier_transform,
    identity_checks,
    inverse_transform,
    junta_support,
    smoothness,
    spectral_norm,
    sup_norm,
    truncate_degree,
    walsh_hadamard,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def functions(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    vals = draw(arrays(np.float64, 1 << n, elements=finite))
    return BooleanFunction(n, vals)


def test_mask_convention():
    pts = cube_points(2)
    assert pts.tolist() == [[1, 1], [-1, 1], [1, -1], [-1, -1]]
    f = BooleanFunction(2, [0.0, 1.0, 2.0, 3.0])
    assert f([-1, 1]) == 1.0 and f(3) == 3.0


def test_matches_direct_summation():
    rng = np.random.default_rng(3)
    for n in range(0, 6):
        vals = rng.standard_normal(1 << n)
        ours = fourier_transform(BooleanFunction(n, vals)).coeffs
        assert np.allclose(ours, oracles.fourier(vals.tolist(), n), atol=1e-12)


@given(functions())
def test_inversion_and_parseval(f):
    spec = fourier_transform(f)
    assert inverse_transform(spec).allclose(f, 1e-9)
    assert np.isclose(np.mean(f.values ** 2), np.sum(spec.coeffs ** 2), atol=1e-8)


@given(functions())
def test_sup_bounded_by_spectral_norm(f):
    assert sup_norm(f) <= spectral_norm(fourier_transform(f)) + 1e-9


@given(functions(max_n=5), st.data())
def test_derivative_spectrum(f, data):
    if f.n == 0:
        return
    i = data.draw(st.integers(0, f.n - 1))
    d = fourier_transform(discrete_derivative(f, i)).coeffs
    c = fourier_transform(f).coeffs
    masks = np.arange(1 << f.n)
    assert np.allclose(d, np.where((masks >> i) & 1, c, 0.0), atol=1e-9)
    assert np.isclose(spectral_norm(FourierSpectrum(f.n, d)), derivative_norms(fourier_transform(f))[i])


def test_characters():
    f = character(3, [0, 2])
    spec = fourier_transform(f)
    assert spec.support() == [0b101]
    assert spectral_norm(spec) == 1.0 and sup_norm(f) == 1.0
    assert degree(f) == 2
    assert smoothness(f) == pytest.approx(3.0)
    assert junta_support(spec) == frozenset({0, 2})


def test_smoothness_against_oracle():
    rng = np.random.default_rng(5)
    for n in (1, 3, 5):
        vals = rng.standard_normal(1 << n)
        assert smoothness(BooleanFunction(n, vals)) == pytest.approx(oracles.smoothness(vals.tolist(), n))


def test_constant_function():
    f = BooleanFunction(4, np.full(16, 0.3))
    assert degree(f) == 0
    assert smoothness(f) == 0.0
    assert junta_support(fourier_transform(f)) == frozenset()
    assert degree(BooleanFunction.zero(3)) == -1


def test_dictator_smoothness_is_n():
    for n in (1, 4, 7):
        assert smoothness(character(n, [0])) == pytest.approx(n)


@given(st.integers(1, 8), st.integers(0, 8), st.integers(0, 2**32 - 1))
def test_truncation_bound_for_one_smooth(n, q, seed):
    rng = np.random.default_rng(seed)
    masks = np.arange(1 << n)
    pop = np.array([bin(int(m)).count("1") for m in masks])
    c = rng.standard_normal(1 << n) * 0.7 ** pop
    spec = FourierSpectrum(n, c)
    s = smoothness(spec)
    if s == 0 or q == 0:
        return
    f = inverse_transform(FourierSpectrum(n, c / s))
    tail = f - truncate_degree(f, q)
    assert sup_norm(tail) <= 1.0 / q + 1e-9
    assert degree(truncate_degree(f, q)) <= q


def test_errors():
    with pytest.raises(ValueError):
        BooleanFunction(2, np.zeros(3))
    with pytest.raises(IndexError):
        discrete_derivative(BooleanFunction.zero(2), 2)
    with pytest.raises(CapacityError):
        fourier_transform(BooleanFunction.zero(3), cap=2)
    with pytest.raises(ValueError):
        walsh_hadamard(np.zeros(6))
    with pytest.raises(ValueError):
        truncate_degree(BooleanFunction.zero(2), -1)


def test_values_are_read_only():
    f = BooleanFunction(1, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 5


def test_identity_checks_report():
    rep = identity_checks(5, 20, seed=1)
    assert rep["passed"] and set(rep["worst"]) == {"parseval", "inversion", "sup_vs_spectral", "derivative"}
