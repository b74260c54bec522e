from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from heavyma.cadlag import StepFunction
from heavyma.errors import ParameterError
from heavyma.innovations import InnovationSpec, sample_path
from heavyma.limits import (PointMeasure, PointSet, empirical_measure, extremal_paths,
                            joint_limit_sample, levy_drift, sample_limit_marginals,
                            sample_point_set, stable_levy_marginals, stable_levy_path,
                            sum_max_functional)
from heavyma.linear import CoefficientSample, Deterministic, truncated_centered_sum, truncated_sum_values
from heavyma.tail import TailModel


def test_sum_max_example():
    F = sum_max_functional(PointMeasure([0.3, 0.7], [2.0, -0.5]), 1.0)
    assert F[0] == StepFunction.from_jumps(0.0, [(0.3, 2.0)])
    assert F[1] == StepFunction.from_jumps(0.0, [(0.3, 2.0)])
    assert F[2] == StepFunction.from_jumps(0.0, [(0.7, 0.5)])
    with pytest.raises(ParameterError):
        sum_max_functional(PointMeasure([0.3], [1.0]), 0.0)


def test_sum_max_empty_measure():
    F = sum_max_functional(PointMeasure([], []), 0.5)
    assert all(f == StepFunction.constant(0.0) for f in F)


def test_sum_max_merges_shared_times():
    F = sum_max_functional(PointMeasure([0.5, 0.2, 0.5], [3.0, -2.0, -4.0]), 0.1)
    assert F[0](0.5) == -3.0 and F[0].n_jumps == 2
    assert F[2](0.3) == 2.0 and F[2](0.5) == 4.0


@pytest.mark.parametrize("seed", range(20))
def test_sum_max_on_empirical_measure_is_exact(seed):
    tail = TailModel(0.8, 0.6)
    n = 300
    z = sample_path(InnovationSpec(tail), n, seed=seed)
    a_n, u = tail.a_n(n), 0.01
    F = sum_max_functional(empirical_measure(z, a_n), u)
    x = z.values / a_n
    t = np.arange(1, n + 1) / n
    assert F[0] == StepFunction(0.0, t, truncated_sum_values(x, u))
    assert F[1] == StepFunction(0.0, t, np.maximum.accumulate(np.maximum(x, 0.0)))
    assert F[2] == StepFunction(0.0, t, np.maximum.accumulate(np.maximum(-x, 0.0)))
    # sum component minus the centering is exactly the truncated centered sum
    b = tail.centering_b_n(n, u)
    centred = StepFunction(0.0, t, F[0].eval(t) - np.arange(1, n + 1) * b)
    assert centred == truncated_centered_sum(z, a_n, u)


def test_point_set_structure():
    ps = sample_point_set(TailModel(0.9, 0.3), 500, seed=1)
    assert len(ps) == 500
    assert np.all(np.diff(ps.mags) < 0)
    assert ps.u_min < ps.mags[-1]
    assert np.all((ps.times > 0) & (ps.times <= 1))
    assert set(np.unique(ps.signs)) <= {-1.0, 1.0}
    with pytest.raises(ParameterError):
        sample_point_set(TailModel(0.9), 0)


def test_poisson_mean_count():
    # atoms with P > x have Poisson count with mean x**-alpha
    m = TailModel(1.3, 0.4)
    x = 1.0
    counts = np.array([np.sum(sample_point_set(m, 40, seed=s).mags > x) for s in range(10 ** 4)])
    se = counts.std(ddof=1) / np.sqrt(counts.size)
    assert abs(counts.mean() - x ** -m.alpha) <= 3 * se
    # Poisson thinning: positive atoms above x have mean p x**-alpha
    x = 2.0
    pos = np.array([np.sum((ps.mags > x) & (ps.signs > 0))
                    for ps in (sample_point_set(m, 40, seed=s) for s in range(10 ** 4))])
    lam = m.p * x ** -m.alpha
    assert abs(pos.mean() - lam) <= 3 * np.sqrt(lam / pos.size)
    assert pos.var(ddof=1) == pytest.approx(lam, rel=0.1)


def test_sign_fraction():
    p = 0.35
    ps = sample_point_set(TailModel(0.7, p), 10 ** 5, seed=3)
    assert abs(np.mean(ps.signs > 0) - p) <= 3 * np.sqrt(p * (1 - p) / 10 ** 5)


def test_stable_levy_path_structure():
    m = TailModel(0.7, 0.8)
    ps = sample_point_set(m, 400, seed=2)
    V = stable_levy_path(ps, m)
    c = levy_drift(ps, m)
    assert c == pytest.approx(m.drift_b() - m.mu_integral(ps.u_min), rel=1e-14)
    assert V(1.0) == pytest.approx(ps.marks.sum() + c, rel=1e-10, abs=1e-10)
    # every atom is a jump of its own size (drift staircase aside)
    nodes = set((np.arange(1, 401) / 400).tolist())
    for t, x in zip(ps.times, ps.marks):
        assert V(t) - V.left_limit(t) == pytest.approx(x + (c / 400 if t in nodes else 0.0), abs=1e-9)
    # staircase error against the exact linear term
    ts = np.linspace(0, 1, 37)
    exact = stable_levy_marginals(ps, m, ts)
    assert np.max(np.abs(V.eval(ts) - exact)) <= abs(c) / 400 + 1e-9
    with pytest.raises(ParameterError):
        stable_levy_path(sample_point_set(m, 3, seed=2), m)


def test_stable_levy_path_without_drift():
    m = TailModel(0.7, 0.5)
    ps = sample_point_set(m, 300, seed=4)
    V = stable_levy_path(ps, m)
    assert V.n_jumps == 300
    assert np.allclose(np.sort(V.times), np.sort(ps.times))


def test_stable_symmetric_median_and_increments():
    m = TailModel(0.7, 0.5)
    V, _ = sample_limit_marginals(m, Deterministic((1.0,)), [0.5, 1.0], 10 ** 4, 400, seed=5)
    # the mean does not exist for alpha < 1; symmetry shows in the sign frequency
    assert abs(np.mean(V[:, 1] > 0) - 0.5) <= 3 * 0.5 / 100
    s1, s2 = np.sign(V[:, 0]), np.sign(V[:, 1] - V[:, 0])
    r = np.corrcoef(s1, s2)[0, 1]
    assert abs(r) <= 3 / np.sqrt(V.shape[0])


@pytest.mark.parametrize("alpha,p", [(0.7, 0.8), (1.2, 0.5)])
def test_stable_self_similarity(alpha, p):
    m = TailModel(alpha, p)
    V, _ = sample_limit_marginals(m, Deterministic((1.0,)), [0.5, 1.0], 5000, 2000, seed=6)
    W, _ = sample_limit_marginals(m, Deterministic((1.0,)), [0.5, 1.0], 5000, 2000, seed=7)
    assert stats.ks_2samp(V[:, 0], 0.5 ** (1 / alpha) * W[:, 1]).pvalue > 0.01


def test_extremal_paths():
    ps = sample_point_set(TailModel(0.9, 1.0), 200, seed=8)
    M1, M2 = extremal_paths(ps)
    assert M2 == StepFunction.constant(0.0)
    assert M1.is_nondecreasing() and M1.initial_value == 0.0
    assert M1(1.0) == ps.mags.max()
    # atoms below u_min could not change a maximum that already exceeds it
    extra = PointSet(np.append(ps.times, 0.5), np.append(ps.mags, ps.u_min),
                     np.append(ps.signs, 1.0), ps.u_min / 2)
    assert extremal_paths(extra)[0](1.0) == M1(1.0)


@pytest.mark.parametrize("alpha,p", [(0.7, 1.0), (1.5, 0.6)])
def test_extremal_marginal_closed_form(alpha, p):
    m = TailModel(alpha, p)
    _, M = sample_limit_marginals(m, Deterministic((1.0,)), [1.0], 10 ** 4, 200, seed=9)
    cdf = lambda x: np.exp(-p * np.maximum(x, 1e-300) ** -alpha)  # noqa: E731
    assert stats.kstest(M[:, 0], cdf).pvalue > 0.01


def test_joint_max_closed_form_bruteforce():
    # one point set per draw: C_+ M1 v C_- M2 against the thinning closed form
    m = TailModel(0.9, 0.4)
    cs = CoefficientSample([1.5, -0.8])
    Cp, Cm = cs.C_plus, cs.C_minus
    draws = np.array([joint_limit_sample(sample_point_set(m, 100, seed=s), cs, m,
                                         max_u_min=None).M_path(1.0) for s in range(3000)])
    lam = m.p * Cp ** m.alpha + m.r * Cm ** m.alpha
    assert stats.kstest(draws, lambda x: np.exp(-lam * np.maximum(x, 1e-300) ** -m.alpha)).pvalue > 0.01
    _, M = sample_limit_marginals(m, Deterministic((1.5, -0.8)), [1.0], 10 ** 4, 200, seed=10)
    assert stats.ks_2samp(draws, M[:, 0]).pvalue > 0.01


def test_joint_sample_scaling_and_collapse():
    m = TailModel(0.8, 0.7)
    ps = sample_point_set(m, 300, seed=11)
    cs = CoefficientSample([0.6, -0.9, 1.1])
    a = joint_limit_sample(ps, cs, m)
    b = joint_limit_sample(ps, cs.scaled(2.0), m)
    assert b.V_path.equals(a.V_path.scaled(2.0))
    assert b.M_path.equals(a.M_path.scaled(2.0))
    assert a.M_path.is_nondecreasing() and a.M_path(0.0) >= 0.0
    one = joint_limit_sample(ps, CoefficientSample([1.0]), m)
    assert one.V_path == stable_levy_path(ps, m)
    assert one.M_path == extremal_paths(ps)[0]


def test_limit_marginals_are_reproducible():
    m = TailModel(0.8, 0.7)
    a = sample_limit_marginals(m, Deterministic((1.0, 0.5)), [0.5, 1.0], 300, 100, seed=1, chunk=64)
    b = sample_limit_marginals(m, Deterministic((1.0, 0.5)), [0.5, 1.0], 300, 100, seed=1, chunk=64)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
