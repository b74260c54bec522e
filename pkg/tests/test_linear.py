from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heavyma.cadlag import StepFunction, m2_within
from heavyma.errors import DegenerateCoefficients, ParameterError
from heavyma.innovations import InnovationPath, InnovationSpec, sample_path
from heavyma.linear import (CoefficientSample, Deterministic, InfiniteGeometric, RandomBridge,
                            build_ma, check_partial_sum_condition, finite_order_approx, h_events,
                            partial_max_path, partial_sum_path, sample_coeffs, tilde_paths,
                            truncated_centered_sum)
from heavyma.tail import TailModel

TAIL = TailModel(0.8, 0.5)
SPEC = InnovationSpec(TAIL)


def fixed_path(values, start: int) -> InnovationPath:
    return InnovationPath(np.asarray(values, dtype=np.float64), start, SPEC, seed=0)


coeff_lists = st.lists(st.floats(-3, 3, allow_nan=False, allow_infinity=False), min_size=1, max_size=5)


# coefficients

def test_coefficient_summaries():
    cs = Deterministic((1.0, -1.0, 1.0)).sample()
    assert (cs.order, cs.C, cs.C_plus, cs.C_minus, cs.C_star) == (2, 1.0, 1.0, 1.0, 1.0)
    cs = CoefficientSample([0.5, 2.0, 0.25])
    assert (cs.C_plus, cs.C_minus) == (2.0, 0.0)
    assert cs.tail_sum(1) == 2.25
    with pytest.raises(ParameterError):
        CoefficientSample([])
    with pytest.raises(ParameterError):
        CoefficientSample([1.0, np.inf])


def test_partial_sum_condition_examples():
    ok, _ = check_partial_sum_condition(CoefficientSample([1.0, -1.0, 1.0]))
    assert ok
    assert np.allclose(np.cumsum([1, -1, 1]) / 1.0, [1, 0, 1])
    assert check_partial_sum_condition([1.0, 1.0])[0]
    ok, worst = check_partial_sum_condition([1.0, -2.0])
    assert not ok and worst == -1.0
    with pytest.raises(DegenerateCoefficients):
        check_partial_sum_condition([1.0, -1.0])


def test_random_bridge_equal_weights():
    q = 4
    cs = RandomBridge(q, ratios=tuple(s / q for s in range(q)), scale=1.0).sample()
    # ratios s/q for s < q and R_q = 1, so C_0 = 0 and the rest equal 1/q
    assert np.allclose(cs.coeffs, [0.0] + [1 / q] * q)
    ok, _ = check_partial_sum_condition(cs)
    assert ok


@given(st.integers(0, 6), st.integers(0, 10 ** 6))
def test_random_bridge_always_admissible(q, seed):
    cs = sample_coeffs(RandomBridge(q), seed)
    assert cs.order == q
    ratios = np.cumsum(cs.coeffs) / cs.C
    assert np.all((ratios >= -1e-12) & (ratios <= 1 + 1e-12))
    assert check_partial_sum_condition(cs)[0]
    assert cs.C_plus == max(cs.coeffs.max(), 0.0) and cs.C_minus == max(-cs.coeffs.min(), 0.0)


def test_coefficient_draws_are_keyed():
    m = RandomBridge(3)
    assert np.array_equal(m.sample(1, 2).coeffs, m.sample(1, 2).coeffs)
    assert not np.array_equal(m.sample(1, 2).coeffs, m.sample(1, 3).coeffs)


def test_infinite_geometric_truncation():
    m = InfiniteGeometric(0.5)
    assert m.order == int(np.ceil(np.log(1e-8) / np.log(0.5)))
    cs = m.sample(3)
    assert cs.C == pytest.approx(cs.coeffs[0] / 0.5, rel=1e-7)


def test_finite_order_approx_geometric():
    rho, S = 0.5, 1.7
    cs = InfiniteGeometric(rho, scale=S).sample()
    fo = finite_order_approx(cs, 2)
    assert fo.order == 2
    assert fo.coeffs[:2].tolist() == cs.coeffs[:2].tolist()
    assert fo.coeffs[2] == pytest.approx(S * rho ** 2, rel=1e-7)
    assert fo.C == pytest.approx(cs.C, rel=1e-14)
    assert check_partial_sum_condition(fo)[0]


def test_finite_order_approx_pads_short_models():
    cs = CoefficientSample([1.0, 2.0])
    assert finite_order_approx(cs, 4).coeffs.tolist() == [1.0, 2.0, 0.0, 0.0, 0.0]
    with pytest.raises(ParameterError):
        finite_order_approx(cs, 0)


# moving average

def test_build_ma_examples():
    z = fixed_path([7.0, 2.0, 5.0, 1.0, 0.0], start=-1)  # Z_-1 .. Z_3
    X = build_ma(CoefficientSample([1.0, -1.0, 1.0]), z, 3).X
    # X_i = Z_i - Z_{i-1} + Z_{i-2}
    assert X.tolist() == [5.0 - 2.0 + 7.0, 1.0 - 5.0 + 2.0, 0.0 - 1.0 + 5.0]
    ident = build_ma(CoefficientSample([1.0]), z, 3).X
    assert ident.tolist() == [5.0, 1.0, 0.0]
    delay = build_ma(CoefficientSample([0.0, 0.0, 1.0]), z, 3).X
    assert delay.tolist() == [7.0, 2.0, 5.0]


def test_build_ma_needs_prehistory():
    z = fixed_path([1.0, 2.0, 3.0], start=0)
    with pytest.raises(ParameterError):
        build_ma(CoefficientSample([1.0, 1.0, 1.0]), z)
    with pytest.raises(ParameterError):
        build_ma(CoefficientSample([1.0]), z, 10)


@given(coeff_lists, st.integers(0, 1000))
def test_build_ma_matches_convolution(coeffs, seed):
    q = len(coeffs) - 1
    z = sample_path(SPEC, 40, J=q, seed=seed)
    X = build_ma(CoefficientSample(coeffs), z).X
    ref = np.convolve(z.values, coeffs)[q:q + 40]
    assert np.allclose(X, ref, rtol=1e-12, atol=1e-9 * np.abs(z.values).max())


@given(coeff_lists, st.sampled_from([-2.0, 0.5, 3.0]), st.integers(0, 100))
def test_build_ma_linear_in_coefficients(coeffs, a, seed):
    q = len(coeffs) - 1
    z = sample_path(SPEC, 30, J=q, seed=seed)
    X = build_ma(CoefficientSample(coeffs), z).X
    Xa = build_ma(CoefficientSample(coeffs).scaled(a), z).X
    assert np.allclose(Xa, a * X, rtol=1e-12, atol=1e-9 * np.abs(z.values).max())


# paths

def test_partial_sum_and_max_examples():
    X = np.array([1.0, 2.0, -3.0])
    V = partial_sum_path(X, 1.0)
    assert V.initial_value == 0.0
    assert V.times.tolist() == pytest.approx([1 / 3, 2 / 3, 1.0])
    assert [V(t) for t in (0.0, 1 / 3, 2 / 3, 1.0)] == [0.0, 1.0, 3.0, 0.0]
    M = partial_max_path(X, 1.0)
    assert M.initial_value == 1.0
    assert [M(t) for t in (0.0, 1 / 3, 0.5, 2 / 3, 1.0)] == [1.0, 1.0, 1.0, 2.0, 2.0]
    assert M.n_jumps == 1
    one = partial_sum_path(np.array([4.0]), 2.0)
    assert one.times.tolist() == [1.0] and one(1.0) == 2.0
    assert partial_max_path(np.array([4.0]), 2.0) == StepFunction.constant(2.0)
    assert partial_sum_path(np.zeros(5), 1.0) == StepFunction.constant(0.0)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=30))
def test_partial_max_nondecreasing(x):
    assert partial_max_path(np.array(x), 1.0).is_nondecreasing()


def test_tilde_example():
    z = fixed_path([-2.0, 3.0], start=1)
    cs = CoefficientSample([1.0, 0.5, -0.5])  # C_+ = 1, C_- = 0.5, C = 1
    V, M = tilde_paths(z, cs, 1.0, 2)
    assert [M(0.0), M(0.5), M(1.0)] == [1.0, 1.0, 3.0]
    assert [V(0.0), V(0.5), V(1.0)] == [0.0, -2.0, 1.0]


def test_single_coefficient_collapse():
    z = sample_path(SPEC, 200, seed=1)
    cs = CoefficientSample([1.0])
    ma = build_ma(cs, z)
    V, M = tilde_paths(z, cs, 3.0)
    assert V == partial_sum_path(ma, 3.0)
    pos = np.maximum(z.values / 3.0, 0.0)
    assert M == StepFunction(pos[0], np.arange(1, 201) / 200, np.maximum.accumulate(pos))


def test_all_positive_innovations_scale_running_max():
    z = fixed_path([1.5, 3.0, 2.0, 4.5], start=1)
    cs = CoefficientSample([2.0, -0.5])
    _, M = tilde_paths(z, cs, 1.0)
    assert M == partial_max_path(2.0 * z.values, 1.0)


def test_truncated_centered_sum_examples():
    z = fixed_path([1.0, -1.5, 20.0, 1.2], start=1)
    a_n = 25.0
    f = truncated_centered_sum(z, a_n, 1.0)
    assert f == StepFunction.constant(0.0)
    g = truncated_centered_sum(z, a_n, 0.5)
    assert g.n_jumps == 1 and g(0.75) == 0.8
    with pytest.raises(ParameterError):
        truncated_centered_sum(z, a_n, 0.0)
    # asymmetric law: linear centering steps after the single exceedance
    zz = InnovationPath(np.array([1.0, -1.5, 20.0, 1.2]), 1, InnovationSpec(TailModel(0.8, 0.9)), 0)
    b = TailModel(0.8, 0.9).centering_b_n(4, 0.5)
    h = truncated_centered_sum(zz, a_n, 0.5)
    assert [h(k / 4) for k in range(1, 5)] == [-b, -2 * b, 0.8 - 3 * b, 0.8 - 4 * b]


# H-events

def brute_h_events(z: InnovationPath, cs: CoefficientSample, n: int, delta: float, a_n: float):
    q = cs.order
    eta = delta / (4 * (q + 1))
    big = {k for k in range(-q, n + q + 1) if cs.C_star * abs(z.window(k, k)[0]) / a_n > eta}
    h1 = any(k in big for k in range(-q, q + 1)) or any(k in big for k in range(n - q + 1, n + 1))
    h2 = any(k in big and l in big and (1 <= k <= n or 1 <= l <= n)
             for k in range(-q, n + q + 1) for l in range(k + 1, k + q + 1))
    def two_big(j):
        return sum(i in big for i in range(j - q, j + 1)) >= 2
    h3 = any(k in big and two_big(j) for k in range(1, n + 1)
             for j in range(1, n + 1) if not k <= j <= k + q)
    return h1, h2, h3


@pytest.mark.parametrize("seed", range(60))
def test_h_events_match_bruteforce(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(0, 4))
    n = 25
    # alternate sparse and dense regimes of big indices
    a_n = 3000.0 if seed % 2 else 100.0
    cs = RandomBridge(q).sample(seed)
    z = sample_path(InnovationSpec(TailModel(0.6, 0.5)), n + q, J=2 * q + 1, seed=seed)
    assert h_events(z, cs, n, 0.4, a_n) == brute_h_events(z, cs, n, 0.4, a_n)


def test_h_events_bound_m2_exceedance():
    # exceedance of the M2 distance forces one of the three events, sample by sample
    delta, n = 0.2, 200
    tail = TailModel(0.8, 0.5)
    a_n = tail.a_n(n)
    for coeffs in ([1.0, -1.0, 1.0], [0.3, 0.9, -0.2]):
        cs = CoefficientSample(coeffs)
        q = cs.order
        hits = 0
        for rep in range(300):
            z = sample_path(InnovationSpec(tail), n + q, J=2 * q + 1, seed=7, rep=rep)
            ma = build_ma(cs, z, n)
            _, Mt = tilde_paths(z, cs, a_n, n)
            exceed = not m2_within(partial_max_path(ma, a_n), Mt, delta)
            if exceed:
                hits += 1
                assert any(h_events(z, cs, n, delta, a_n))
        assert hits > 0
