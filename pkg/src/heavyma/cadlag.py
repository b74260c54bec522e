"""Step functions on [0, 1] and distances between their completed graphs.

A :class:`StepFunction` is stored as a starting level plus strictly
increasing jump times in (0, 1] and the values taken from each jump on.
Its completed graph is the polyline of horizontal plateaus joined by
vertical segments at the jumps; the M2 distance is the Hausdorff distance
between completed graphs in the max-norm of [0, 1] x R.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from heavyma import kernels
from heavyma.errors import DomainError, ParameterError


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous piecewise-constant function on [0, 1].

    Parameters
    ----------
    initial_value : float
        Value on ``[0, times[0])``.
    times : array_like
        Jump times, strictly increasing, each in (0, 1].
    values : array_like
        ``values[k]`` is the value on ``[times[k], times[k+1])``.

    Jumps of height zero are dropped on construction.
    """

    initial_value: float
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64).ravel()
        v = np.array(self.values, dtype=np.float64).ravel()
        x0 = float(self.initial_value)
        if t.shape != v.shape:
            raise ValueError("times and values must have the same length")
        if not np.isfinite(x0) or not np.all(np.isfinite(v)):
            raise ValueError("step function values must be finite")
        if t.size:
            if t[0] <= 0.0 or t[-1] > 1.0 or np.isnan(t).any():
                raise DomainError("jump times must lie in (0, 1]")
            if np.any(np.diff(t) <= 0.0):
                raise ValueError("jump times must be strictly increasing")
            prev = np.empty_like(v)
            prev[0] = x0
            prev[1:] = v[:-1]
            keep = v != prev
            if not keep.all():
                t, v = t[keep], v[keep]
        levels = np.empty(v.size + 1)
        levels[0] = x0
        levels[1:] = v
        object.__setattr__(self, "initial_value", x0)
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "_levels", _readonly(levels))

    # construction helpers
    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls(value)

    @classmethod
    def from_jumps(cls, initial: float, jumps: Iterable[Sequence[float]]) -> "StepFunction":
        """Build from ``[(t, new_value), ...]``."""
        arr = np.array(list(jumps), dtype=np.float64).reshape(-1, 2)
        return cls(initial, arr[:, 0], arr[:, 1])

    @classmethod
    def from_increments(cls, times, increments, initial: float = 0.0) -> "StepFunction":
        """Cumulative sum of ``increments`` placed at strictly increasing ``times``."""
        inc = np.asarray(increments, dtype=np.float64)
        return cls(initial, times, initial + np.cumsum(inc))

    # structure
    @property
    def levels(self) -> np.ndarray:
        """Plateau values ``y_0, ..., y_m``."""
        return self._levels

    @property
    def n_jumps(self) -> int:
        return int(self.times.size)

    @property
    def plateau_starts(self) -> np.ndarray:
        """Start time of every plateau (0 for the first one)."""
        return np.concatenate(([0.0], self.times))

    def is_nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self._levels) >= 0.0))

    # evaluation
    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Right-continuous value at ``t`` (scalar or array) in [0, 1]."""
        ta = np.asarray(t, dtype=np.float64)
        if np.any((ta < 0.0) | (ta > 1.0)) or np.isnan(ta).any():
            raise DomainError("evaluation time outside [0, 1]")
        out = self._levels[np.searchsorted(self.times, ta, side="right")]
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t):
        """Value of ``f(t-)`` for ``t`` in (0, 1]."""
        ta = np.asarray(t, dtype=np.float64)
        if np.any((ta <= 0.0) | (ta > 1.0)) or np.isnan(ta).any():
            raise DomainError("left limit requires t in (0, 1]")
        out = self._levels[np.searchsorted(self.times, ta, side="left")]
        return float(out) if out.ndim == 0 else out

    # algebra
    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(c * self.initial_value, self.times, c * self.values)

    def combine(self, other: "StepFunction", op: Callable) -> "StepFunction":
        """Pointwise ``op(self, other)`` on the merged jump grid."""
        grid = np.union1d(self.times, other.times)
        return StepFunction(op(self.initial_value, other.initial_value), grid,
                            op(self.eval(grid), other.eval(grid)))

    def maximum(self, other: "StepFunction") -> "StepFunction":
        return self.combine(other, np.maximum)

    def equals(self, other: "StepFunction") -> bool:
        return (self.initial_value == other.initial_value
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values))

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"StepFunction(initial={self.initial_value!r}, n_jumps={self.n_jumps})"

    # serialization
    def to_json_dict(self) -> dict:
        return {"initial": self.initial_value,
                "jumps": [[float(t), float(v)] for t, v in zip(self.times, self.values)]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "StepFunction":
        if "initial" not in d:
            raise ValueError("step function record needs an 'initial' entry")
        return cls.from_jumps(d["initial"], d.get("jumps", []))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()))

    @classmethod
    def load(cls, path) -> "StepFunction":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class CompletedGraph:
    """Ordered axis-aligned segments; row ``k`` is ``(t0, y0, t1, y1)``."""

    segments: np.ndarray

    def __len__(self):
        return self.segments.shape[0]


def completed_graph(f: StepFunction) -> CompletedGraph:
    """Plateaus alternating with vertical jump segments, in graph order."""
    y = f.levels
    starts = f.plateau_starts
    ends = np.append(f.times, 1.0)
    m = f.n_jumps
    seg = np.empty((2 * m + 1, 4))
    seg[0::2, 0] = starts
    seg[0::2, 1] = y
    seg[0::2, 2] = ends
    seg[0::2, 3] = y
    if m:
        seg[1::2, 0] = f.times
        seg[1::2, 1] = y[:-1]
        seg[1::2, 2] = f.times
        seg[1::2, 3] = y[1:]
    # a jump at t = 1 leaves a degenerate last plateau {1} x {y_m}; keep it
    # so the segment count stays 2m + 1
    seg.setflags(write=False)
    return CompletedGraph(seg)


@dataclass(frozen=True)
class MultiPath:
    """Fixed-length tuple of step functions on a common domain."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps or not all(isinstance(c, StepFunction) for c in comps):
            raise ValueError("MultiPath needs at least one StepFunction")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k):
        return self.components[k]


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ParameterError("tol must be positive")


def d_uniform(f: StepFunction, g: StepFunction) -> float:
    """Supremum distance, evaluated on the merged jump grid."""
    grid = np.union1d(f.times, g.times)
    d = abs(f.initial_value - g.initial_value)
    if grid.size:
        d = max(d, float(np.max(np.abs(f.eval(grid) - g.eval(grid)))))
    return d


def d_m2(f: StepFunction, g: StepFunction, tol: float = 1e-9) -> float:
    """Hausdorff distance between completed graphs, max-norm, within ``tol``.

    Found by bisection on the radius ``r`` with an exact test of whether each
    completed graph lies in the closed ``r``-neighbourhood of the other.  The
    returned value is an upper bound that exceeds the true distance by at
    most ``tol``.
    """
    _check_tol(tol)
    if f.equals(g):
        return 0.0
    hi = d_uniform(f, g)
    return float(kernels.hausdorff_bisect(f.times, f.levels, g.times, g.levels,
                                          hi, float(tol)))


def m2_within(f: StepFunction, g: StepFunction, r: float) -> bool:
    """Exact test of ``d_M2(f, g) <= r``."""
    if r < 0:
        raise ParameterError("r must be non-negative")
    if f.equals(g):
        return True
    return bool(kernels.covers(f.times, f.levels, g.times, g.levels, float(r))
                and kernels.covers(g.times, g.levels, f.times, f.levels, float(r)))


def d_product_m2(F: MultiPath, G: MultiPath, tol: float = 1e-9) -> float:
    """Maximum of the coordinatewise M2 distances."""
    if len(F) != len(G):
        raise ValueError(f"dimension mismatch: {len(F)} vs {len(G)}")
    return max(d_m2(f, g, tol) for f, g in zip(F.components, G.components))


@dataclass(frozen=True)
class OscillationProfile:
    """Exact profile of ``rho -> omega(x, rho)``.

    ``omega(x, rho) = values[k]`` for the largest ``k`` with
    ``spans[k] < 2 * rho``, and 0 below ``spans[0]``.  ``values`` is strictly
    increasing and ``spans`` strictly increasing.
    """

    spans: np.ndarray
    values: np.ndarray

    def __call__(self, rho: float) -> float:
        k = np.searchsorted(self.spans, 2.0 * rho, side="left")
        return float(self.values[k - 1]) if k > 0 else 0.0

    def log_breaks(self) -> np.ndarray:
        """Break points in ``z = log(rho)``."""
        return np.log(0.5 * self.spans)


def _profile_from_candidates(spans: np.ndarray, vals: np.ndarray) -> OscillationProfile:
    if spans.size == 0:
        return OscillationProfile(np.empty(0), np.empty(0))
    order = np.argsort(spans, kind="stable")
    s, v = spans[order], vals[order]
    run = np.maximum.accumulate(v)
    rec = np.ones(s.size, dtype=bool)
    rec[1:] = run[1:] > run[:-1]
    s, v = s[rec], run[rec]
    # equal spans keep the largest value only
    last = np.ones(s.size, dtype=bool)
    last[:-1] = s[1:] != s[:-1]
    return OscillationProfile(s[last], v[last])


def oscillation_profile(f: StepFunction) -> OscillationProfile:
    """Oscillation ``omega(f, rho)`` for all ``rho`` at once.

    ``omega`` is the supremum over ``t1 < t2 < t3`` with ``t3 - t1 <= 2 rho``
    of the distance from ``f(t2)`` to the segment between ``f(t1)`` and
    ``f(t3)``.  For a step function only plateau triples matter, and the
    triple ``i < k < l`` is reachable iff the plateaus strictly between ``i``
    and ``l`` have total length below ``2 rho``.  A dominance argument cuts
    the triples down to O(m) candidate pairs (next-lower and previous-lower
    plateau for peaks, mirrored for troughs).
    """
    y = np.ascontiguousarray(f.levels)
    starts = np.ascontiguousarray(f.plateau_starts)
    s1, v1 = kernels.oscillation_candidates(y, starts)
    s2, v2 = kernels.oscillation_candidates(np.ascontiguousarray(-y), starts)
    return _profile_from_candidates(np.concatenate((s1, s2)), np.concatenate((v1, v2)))


def oscillation(f: StepFunction, rho: float) -> float:
    """``omega(f, rho)``; zero for monotone functions."""
    if not rho > 0:
        raise ParameterError("rho must be positive")
    return oscillation_profile(f)(rho)


def _step_eval(breaks: np.ndarray, values: np.ndarray, z: np.ndarray) -> np.ndarray:
    k = np.searchsorted(breaks, z, side="right")
    out = np.zeros(z.shape)
    nz = k > 0
    out[nz] = values[k[nz] - 1]
    return out


def _levy_ok(b1, v1, b2, v2, eps: float) -> bool:
    # F2(z - eps) - eps <= F1(z) <= F2(z + eps) + eps for every z
    if b1.size:
        if np.any(_step_eval(b2, v2, b1 - eps) - eps > v1):
            return False
        if np.any(v1 > _step_eval(b2, v2, b1 + eps) + eps):
            return False
    if b2.size:
        if np.any(v2 - eps > _step_eval(b1, v1, b2 + eps)):
            return False
        if np.any(_step_eval(b1, v1, b2 - eps) > v2 + eps):
            return False
    return True


def levy_distance(b1, v1, b2, v2, tol: float = 1e-9) -> float:
    """Levy distance between two nondecreasing step functions of a real variable.

    Each function is zero below its first break ``b[0]`` and equals ``v[k]``
    on ``[b[k], b[k+1])``.  Bisection on ``eps`` with an exact test at the
    finitely many shifted break points.
    """
    _check_tol(tol)
    b1, v1, b2, v2 = (np.asarray(a, dtype=np.float64) for a in (b1, v1, b2, v2))
    if np.array_equal(b1, b2) and np.array_equal(v1, v2):
        return 0.0
    grid = np.union1d(b1, b2)
    hi = float(np.max(np.abs(_step_eval(b1, v1, grid) - _step_eval(b2, v2, grid))))
    if hi == 0.0:
        return 0.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_ok(b1, v1, b2, v2, mid):
            hi = mid
        else:
            lo = mid
    return hi


def oscillation_levy(f: StepFunction, g: StepFunction, tol: float = 1e-9) -> float:
    """Levy distance between ``z -> omega(f, e**z)`` and ``z -> omega(g, e**z)``."""
    _check_tol(tol)
    pf, pg = oscillation_profile(f), oscillation_profile(g)
    return levy_distance(pf.log_breaks(), pf.values, pg.log_breaks(), pg.values, tol)


def d_m1_star(f: StepFunction, g: StepFunction, tol: float = 1e-9) -> float:
    """M2 distance plus the Levy distance between log-scale oscillation profiles.

    Both terms are within ``tol`` of their exact values.
    """
    return d_m2(f, g, tol) + oscillation_levy(f, g, tol)
