import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from outlawldc.codes import (
    Branch,
    CodeParams,
    DecoderSpec,
    LocalCode,
    adversarial_success,
    certify_average_smooth_code,
    certify_ldc,
    certify_smooth_code,
    decode_success,
    expected_function,
    hadamard_code,
    identity_code,
    ldc_to_smooth,
    max_flips,
    query_distribution,
    sample_decoder,
    smooth_to_ldc,
    success_table,
)
from outlawldc.config import BudgetExceeded, CapacityError, VerificationError
from outlawldc.fourier import degree, fourier_transform


def test_hadamard_matches_definition():
    for k in (1, 2, 3):
        code, dec = hadamard_code(k)
        words, _ = oracles.hadamard(k)
        assert code.codewords.tolist() == words


def test_hadamard_uncorrupted_success_is_one():
    code, dec = hadamard_code(3)
    assert np.all(success_table(code, dec) == 1.0)


@pytest.mark.parametrize("k", [2, 3])
def test_adversary_against_oracle(k):
    code, dec = hadamard_code(k)
    words, odec = oracles.hadamard(k)
    for flips, expect in [(1, 0.75), (2, 0.5)]:
        delta = flips / code.n
        for x in range(1 << k):
            for i in range(k):
                ours = adversarial_success(code, dec, i, x, delta).success
                assert ours == pytest.approx(oracles.worst_success(words, odec, i, x, flips))
                if k == 3:
                    assert ours == pytest.approx(expect)


def test_witness_reproduces_success():
    code, dec = hadamard_code(3)
    res = adversarial_success(code, dec, 1, 5, 1 / 8)
    y = code.codewords[5].copy()
    y[list(res.witness)] *= -1
    assert decode_success(code, dec, 1, 5, y) == pytest.approx(res.success)
    assert res.flips_allowed == 1 and not res.heuristic


def test_greedy_upper_bounds_exhaustive():
    code, dec = hadamard_code(3)
    for x in (0, 3, 6):
        ex = adversarial_success(code, dec, 0, x, 2 / 8).success
        gr = adversarial_success(code, dec, 0, x, 2 / 8, mode="greedy", seed=4)
        assert gr.heuristic and gr.success >= ex - 1e-12


def test_budget_exceeded():
    code, dec = hadamard_code(4)
    with pytest.raises(BudgetExceeded):
        adversarial_success(code, dec, 0, 0, 0.25, budget=100)


def test_loads():
    code, dec = hadamard_code(3)
    for i in range(3):
        assert np.allclose(query_distribution(dec, i, 8), 2 / 8)


def test_smooth_certificate():
    code, dec = hadamard_code(3)
    assert certify_smooth_code(code, dec, CodeParams(q=2, c=2.0, eta=0.5)).passed
    rep = certify_smooth_code(code, dec, CodeParams(q=2, c=1.0, eta=0.5))
    assert not rep.passed and rep.max_load == pytest.approx(0.25)


def test_average_certificate_monte_carlo_agrees():
    code, dec = hadamard_code(3)
    params = CodeParams(q=2, c=2.0, eta=0.4)
    exact = certify_average_smooth_code(code, dec, params)
    mc = certify_average_smooth_code(code, dec, params, budget=1, samples=500, seed=2)
    assert exact.exact and not mc.exact
    assert exact.passed and mc.passed


def test_ldc_roundtrip_hadamard():
    code, dec = hadamard_code(3)
    sdec, sp = ldc_to_smooth(code, dec, CodeParams(q=2, eta=0.5, delta=1 / 8))
    assert sp.c == pytest.approx(16.0)
    lp = smooth_to_ldc(code, dec, CodeParams(q=2, c=2.0, eta=0.5))
    assert (lp.q, lp.delta, lp.eta) == (2, 0.125, 0.25)
    assert certify_ldc(code, dec, lp).passed


def test_smooth_to_ldc_rejects_false_claim():
    code, dec = hadamard_code(2)
    # claiming c far below the truth makes delta too large for the decoder
    with pytest.raises(VerificationError):
        smooth_to_ldc(code, dec, CodeParams(q=2, c=0.5, eta=0.5))


def test_kt_drops_heavy_coordinates():
    # index 0 always reads coordinate 0, which is heavy for small delta
    code = LocalCode(1, 4, np.array([[1, 1, 1, 1], [-1, -1, -1, -1]]))
    heavy = Branch(1.0, (0,), [1.0, -1.0])
    dec = DecoderSpec(1, ((heavy,),))
    sdec, sp = ldc_to_smooth(code, dec, CodeParams(q=1, eta=0.5, delta=0.5))
    assert query_distribution(dec, 0, 4).max() == 1.0
    assert query_distribution(sdec, 0, 4).max() == 0.0  # load 1 > q/(delta n) = 1/2, so dropped
    assert sdec.decoders[0][0].queries == ()


def test_expected_function_degree():
    code, dec = hadamard_code(3)
    for i in range(3):
        f = expected_function(dec, i, 8)
        assert degree(f) == 2
        assert np.abs(fourier_transform(f).coeffs).sum() == pytest.approx(1.0)


def test_sampler_frequency():
    code, dec = hadamard_code(2)
    rng = np.random.default_rng(0)
    y = code.codewords[1].copy()
    y[0] *= -1
    p = decode_success(code, dec, 0, 1, y)
    draws = [sample_decoder(dec, 0, y, rng) for _ in range(4000)]
    freq = np.mean(np.array(draws) == -1)
    assert abs(freq - p) < 4 * np.sqrt(p * (1 - p) / 4000)


@given(st.integers(1, 5))
def test_identity_code_breaks_with_one_flip(k):
    code, dec = identity_code(k)
    assert np.all(success_table(code, dec) == 1.0)
    assert adversarial_success(code, dec, 0, 0, 1 / k).success == 0.0


@given(st.floats(0.0, 0.5), st.integers(1, 64))
def test_max_flips(delta, n):
    r = max_flips(delta, n)
    assert r <= delta * n + 1e-9 < r + 1


def test_validation():
    with pytest.raises(ValueError):
        Branch(0.5, (0, 0), np.zeros(4))
    with pytest.raises(ValueError):
        Branch(0.5, (0,), np.array([2.0, 0.0]))
    with pytest.raises(ValueError):
        DecoderSpec(1, ((Branch(0.5, (0,), [1, -1]),),))
    with pytest.raises(ValueError):
        CodeParams(q=0, eta=0.1)
    with pytest.raises(ValueError):
        CodeParams(q=1, eta=0.0)
    with pytest.raises(ValueError):
        LocalCode(1, 2, np.array([[1, 0], [1, 1]]))
    with pytest.raises(CapacityError):
        hadamard_code(5, cap=4)
