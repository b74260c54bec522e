"""Limit objects: marked Poisson atoms, stable Levy and extremal paths.

Atoms are generated by the LePage construction: ``P_i = Gamma_i**(-1/alpha)``
with ``Gamma_i`` the arrival times of a unit-rate Poisson process, uniform
times ``T_i`` and independent signs ``Q_i`` with ``P(Q = +1) = p``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heavyma.cadlag import MultiPath, StepFunction
from heavyma.errors import ParameterError
from heavyma.innovations import InnovationPath
from heavyma.linear import CoefficientSample
from heavyma.rng import Tag, stream
from heavyma.tail import TailModel


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Finite point measure ``sum_i delta_(t_i, x_i)`` on (0, 1] x R."""

    times: np.ndarray
    marks: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64).ravel()
        x = np.asarray(self.marks, dtype=np.float64).ravel()
        if t.shape != x.shape:
            raise ValueError("times and marks must have equal length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "marks", x)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Atoms ``(T_i, P_i, Q_i)`` with ``P`` strictly decreasing.

    All atoms of the Poisson process with ``P > u_min`` are present.
    """

    times: np.ndarray
    mags: np.ndarray
    signs: np.ndarray
    u_min: float

    def __len__(self):
        return self.mags.size

    @property
    def marks(self) -> np.ndarray:
        return self.mags * self.signs

    def measure(self) -> PointMeasure:
        return PointMeasure(self.times, self.marks)


def sample_point_set(model: TailModel, K: int, seed: int = 0, rep: int = 0,
                     key: tuple = ()) -> PointSet:
    """The ``K`` largest atoms; ``u_min`` is the magnitude of atom ``K + 1``."""
    if K < 1:
        raise ParameterError("K must be at least 1")
    rng = stream(seed, Tag.POINTS, rep, *key)
    gam = np.cumsum(rng.standard_exponential(K + 1))
    mags = gam ** (-1.0 / model.alpha)
    times = 1.0 - rng.random(K)
    signs = np.where(rng.random(K) < model.p, 1.0, -1.0)
    return PointSet(times, mags[:K], signs, float(mags[K]))


def empirical_measure(innovations: InnovationPath, a_n: float, n: int | None = None) -> PointMeasure:
    """``sum_{i=1}^n delta_(i/n, Z_i/a_n)``."""
    if n is None:
        n = innovations.end
    return PointMeasure(np.arange(1, n + 1) / n, innovations.window(1, n) / a_n)


def _as_measure(points) -> PointMeasure:
    if isinstance(points, PointSet):
        return points.measure()
    if isinstance(points, PointMeasure):
        return points
    t, x = points
    return PointMeasure(t, x)


def _grouped(times: np.ndarray, vals: np.ndarray, reduce):
    """Sort by time and merge atoms that share a time with ``reduce``."""
    order = np.argsort(times, kind="stable")
    t, v = times[order], vals[order]
    if t.size > 1 and np.any(t[1:] == t[:-1]):
        ut, first = np.unique(t, return_index=True)
        return ut, reduce.reduceat(v, first)
    return t, v


def sum_max_functional(points, u: float) -> MultiPath:
    """Truncated running sum and the positive and negative running maxima.

    Components, for ``t`` in [0, 1]:

    * ``sum_{t_i <= t} x_i 1{|x_i| > u}``
    * ``max_{t_i <= t} x_i 1{x_i > 0}``
    * ``max_{t_i <= t} |x_i| 1{x_i < 0}``

    with an empty maximum equal to 0.
    """
    if not u > 0:
        raise ParameterError("u must be positive")
    pm = _as_measure(points)
    x = pm.marks
    t_s, s = _grouped(pm.times, np.where(np.abs(x) > u, x, 0.0), np.add)
    t_p, mp = _grouped(pm.times, np.where(x > 0, x, 0.0), np.maximum)
    t_n, mn = _grouped(pm.times, np.where(x < 0, -x, 0.0), np.maximum)
    return MultiPath((StepFunction(0.0, t_s, np.cumsum(s)),
                      StepFunction(0.0, t_p, np.maximum.accumulate(mp)),
                      StepFunction(0.0, t_n, np.maximum.accumulate(mn))))


def levy_drift(points: PointSet, model: TailModel) -> float:
    """Slope of the linear term: drift minus the compensator above ``u_min``."""
    if points.u_min > 1.0:
        raise ParameterError("u_min exceeds 1; increase K")
    return model.drift_b() - model.mu_integral(points.u_min)


def stable_levy_path(points: PointSet, model: TailModel, grid: int | None = None,
                     max_u_min: float | None = 0.01) -> StepFunction:
    """Stable Levy path: jumps ``P_i Q_i`` at ``T_i`` plus a linear term.

    The linear term ``c t`` is laid down as a staircase on ``grid`` equal
    steps (default ``len(points)``), so its uniform error is ``|c| / grid``.
    """
    if max_u_min is not None and points.u_min > max_u_min:
        raise ParameterError(
            f"u_min = {points.u_min:.3g} exceeds {max_u_min}; increase K")
    c = levy_drift(points, model)
    G = len(points) if grid is None else int(grid)
    times, inc = points.times, points.marks
    if c != 0.0 and G > 0:
        times = np.concatenate((times, np.arange(1, G + 1) / G))
        inc = np.concatenate((inc, np.full(G, c / G)))
    t, v = _grouped(times, inc, np.add)
    return StepFunction(0.0, t, np.cumsum(v))


def stable_levy_marginals(points: PointSet, model: TailModel, ts) -> np.ndarray:
    """``V(t)`` at the given times, with the linear term evaluated exactly."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    c = levy_drift(points, model)
    x = points.marks
    return np.array([x[points.times <= t].sum() + c * t for t in ts])


def extremal_paths(points) -> tuple[StepFunction, StepFunction]:
    """Running maxima of the positive and of the negative marks, from 0."""
    mp = sum_max_functional(points, 1.0)
    return mp[1], mp[2]


@dataclass(frozen=True, eq=False)
class JointLimitSample:
    V_path: StepFunction
    M_path: StepFunction
    C0: float
    C1: float
    C2: float


def joint_limit_sample(points: PointSet, coeffs: CoefficientSample, model: TailModel,
                       grid: int | None = None, max_u_min: float | None = 0.01) -> JointLimitSample:
    """``(C V, max(C_+ M1, C_- M2))`` for a coefficient draw independent of the atoms."""
    V = stable_levy_path(points, model, grid, max_u_min)
    M1, M2 = extremal_paths(points)
    C0, C1, C2 = coeffs.C, coeffs.C_plus, coeffs.C_minus
    return JointLimitSample(V.scaled(C0), M1.scaled(C1).maximum(M2.scaled(C2)), C0, C1, C2)


def sample_limit_marginals(model: TailModel, coeff_model, ts, size: int, K: int,
                           seed: int = 0, key: tuple = (), chunk: int = 256):
    """Draws of ``(C V(t), max(C_+ M1(t), C_- M2(t)))`` at the times ``ts``.

    Atoms are generated ``chunk`` samples at a time from streams keyed by the
    chunk index; coefficient draws use a separate stream per sample.

    Returns
    -------
    V, M : ndarray, shape (size, len(ts))
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    V = np.empty((size, ts.size))
    M = np.empty((size, ts.size))
    e = -1.0 / model.alpha
    for c0 in range(0, size, chunk):
        m = min(chunk, size - c0)
        rng = stream(seed, Tag.POINTS, c0 // chunk, *key)
        gam = np.cumsum(rng.standard_exponential((m, K + 1)), axis=1)
        mags = gam ** e
        u_min = mags[:, K]
        mags = mags[:, :K]
        times = 1.0 - rng.random((m, K))
        pos = rng.random((m, K)) < model.p
        marks = np.where(pos, mags, -mags)
        if np.any(u_min > 1.0):
            raise ParameterError("u_min exceeds 1; increase K")
        slope = np.array([model.drift_b() - model.mu_integral(u) for u in u_min])
        coef = [coeff_model.sample(seed, c0 + i, key=(int(Tag.LIMIT_COEFFICIENTS), *key))
                for i in range(m)]
        C0 = np.array([c.C for c in coef])
        C1 = np.array([c.C_plus for c in coef])
        C2 = np.array([c.C_minus for c in coef])
        for k, t in enumerate(ts):
            inside = times <= t
            v = np.where(inside, marks, 0.0).sum(axis=1) + slope * t
            m1 = np.where(inside & pos, mags, 0.0).max(axis=1)
            m2 = np.where(inside & ~pos, mags, 0.0).max(axis=1)
            V[c0:c0 + m, k] = C0 * v
            M[c0:c0 + m, k] = np.maximum(C1 * m1, C2 * m2)
    return V, M
