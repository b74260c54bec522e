"""Random coefficients, moving averages and the pre-limit paths built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from heavyma import kernels
from heavyma.cadlag import StepFunction
from heavyma.errors import DegenerateCoefficients, ParameterError
from heavyma.innovations import InnovationPath
from heavyma.rng import Tag, stream

PARTIAL_SUM_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class CoefficientSample:
    """Realized coefficients ``C_0, ..., C_q``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ParameterError("coefficients must be a non-empty finite sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def C(self) -> float:
        return float(self.coeffs.sum())

    @property
    def C_plus(self) -> float:
        return float(max(self.coeffs.max(), 0.0))

    @property
    def C_minus(self) -> float:
        return float(max(-self.coeffs.min(), 0.0))

    @property
    def C_star(self) -> float:
        return max(self.C_plus, self.C_minus)

    def tail_sum(self, q: int) -> float:
        """``C^q = sum_{j >= q} C_j`` over the stored support."""
        return float(self.coeffs[q:].sum())

    def scaled(self, a: float) -> "CoefficientSample":
        return CoefficientSample(a * self.coeffs)


def check_partial_sum_condition(coeffs) -> tuple[bool, float]:
    """Whether every ``(C_0 + ... + C_s) / C`` lies in [0, 1].

    Returns the verdict and the ratio farthest outside (or closest to the
    edge of) the unit interval.
    """
    c = coeffs.coeffs if isinstance(coeffs, CoefficientSample) else np.asarray(coeffs, dtype=np.float64)
    total = c.sum()
    if total == 0.0:
        raise DegenerateCoefficients("coefficient sum is zero")
    ratios = np.cumsum(c) / total
    excess = np.maximum(-ratios, ratios - 1.0)
    worst = float(ratios[int(np.argmax(excess))])
    return bool(np.all(excess <= PARTIAL_SUM_SLACK)), worst


# coefficient models

def _scale(rng: np.random.Generator) -> float:
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return sign * float(rng.lognormal(0.0, 1.0))


@dataclass(frozen=True)
class Deterministic:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ParameterError("Deterministic needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def sample(self, seed: int = 0, rep: int = 0, key: tuple = ()) -> CoefficientSample:
        return CoefficientSample(np.array(self.coeffs))


@dataclass(frozen=True)
class RandomBridge:
    """``C_s = S (R_s - R_{s-1})`` with ``R_q = 1`` and ``R_0..R_{q-1}`` uniform.

    By construction ``(C_0 + ... + C_s) / C = R_s`` lies in [0, 1].
    ``ratios`` and ``scale`` fix the corresponding draws when given.
    """

    q: int
    ratios: tuple | None = None
    scale: float | None = None

    def __post_init__(self):
        if self.q < 0:
            raise ParameterError("q must be non-negative")
        if self.ratios is not None:
            r = tuple(float(x) for x in self.ratios)
            if len(r) != self.q or any(not 0.0 <= x <= 1.0 for x in r):
                raise ParameterError("ratios must be q values in [0, 1]")
            object.__setattr__(self, "ratios", r)
        if self.scale is not None and float(self.scale) == 0.0:
            raise ParameterError("scale must be nonzero")

    @property
    def order(self) -> int:
        return self.q

    def sample(self, seed: int = 0, rep: int = 0, key: tuple = ()) -> CoefficientSample:
        rng = stream(seed, Tag.COEFFICIENTS, rep, *key)
        S = _scale(rng) if self.scale is None else float(self.scale)
        R = np.empty(self.q + 1)
        R[:-1] = rng.random(self.q) if self.ratios is None else self.ratios
        R[-1] = 1.0
        return CoefficientSample(S * np.diff(R, prepend=0.0))


@dataclass(frozen=True)
class InfiniteGeometric:
    """``C_j = S (1 - rho) rho**j``, truncated at ``j = J``.

    The default ``J = ceil(log(1e-8) / log(rho))`` leaves a neglected tail
    of relative size below 1e-8.
    """

    rho: float
    truncation: int | None = None
    scale: float | None = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ParameterError("rho must lie in (0, 1)")
        if self.truncation is None:
            J = math.ceil(math.log(1e-8) / math.log(self.rho))
            object.__setattr__(self, "truncation", J)
        elif self.truncation < 0:
            raise ParameterError("truncation must be non-negative")

    @property
    def order(self) -> int:
        return int(self.truncation)

    def sample(self, seed: int = 0, rep: int = 0, key: tuple = ()) -> CoefficientSample:
        rng = stream(seed, Tag.COEFFICIENTS, rep, *key)
        S = _scale(rng) if self.scale is None else float(self.scale)
        j = np.arange(self.truncation + 1)
        return CoefficientSample(S * (1.0 - self.rho) * self.rho ** j)


def sample_coeffs(model, seed: int = 0, rep: int = 0, key: tuple = ()) -> CoefficientSample:
    return model.sample(seed, rep, key)


def finite_order_approx(sample: CoefficientSample, q: int) -> CoefficientSample:
    """Coefficients ``(C_0, ..., C_{q-1}, C^q)`` of the order-``q`` approximation."""
    if q < 1:
        raise ParameterError("q must be at least 1")
    c = sample.coeffs
    if q > sample.order:
        return CoefficientSample(np.concatenate((c, np.zeros(q - sample.order))))
    return CoefficientSample(np.append(c[:q], sample.tail_sum(q)))


# moving average and paths

@dataclass(frozen=True, eq=False)
class MAPath:
    """``X_1, ..., X_n`` with the inputs that produced them."""

    X: np.ndarray
    coeffs: CoefficientSample
    innovations: InnovationPath

    @property
    def n(self) -> int:
        return self.X.size


def build_ma(coeffs: CoefficientSample, innovations: InnovationPath, n: int | None = None) -> MAPath:
    """Exact convolution ``X_i = sum_j C_j Z_{i-j}`` for ``i = 1..n``."""
    q = coeffs.order
    if innovations.start > 1 - q:
        raise ParameterError(
            f"innovation pre-history too short: need Z from index {1 - q}, have {innovations.start}")
    if n is None:
        n = innovations.end
    if n < 1 or n > innovations.end:
        raise ParameterError("n must lie in [1, last innovation index]")
    z = np.ascontiguousarray(innovations.values)
    X = kernels.ma_filter(np.ascontiguousarray(coeffs.coeffs), z, 1 - innovations.start, n)
    X.setflags(write=False)
    return MAPath(X, coeffs, innovations)


def _values(x) -> np.ndarray:
    return x.X if isinstance(x, MAPath) else np.asarray(x, dtype=np.float64)


def step_times(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / n


def partial_sum_path(ma, a_n: float) -> StepFunction:
    """``V_n(t) = sum_{i <= nt} X_i / a_n``."""
    x = _values(ma)
    return StepFunction(0.0, step_times(x.size), np.cumsum(x / a_n))


def partial_max_path(ma, a_n: float) -> StepFunction:
    """``M_n(t) = max_{i <= nt} X_i / a_n``, equal to ``X_1 / a_n`` on [0, 1/n)."""
    x = _values(ma) / a_n
    return StepFunction(x[0], step_times(x.size), np.maximum.accumulate(x))


def tilde_paths(innovations: InnovationPath, coeffs: CoefficientSample, a_n: float,
                n: int | None = None) -> tuple[StepFunction, StepFunction]:
    """Paths driven by ``Z_1..Z_n`` alone, with all coefficients collapsed.

    The sum path uses ``C Z_i``; the max path uses ``|Z_i|`` weighted by
    ``C_+`` or ``C_-`` according to the sign of ``Z_i``, starting from the
    ``i = 1`` value as :func:`partial_max_path` does.
    """
    if n is None:
        n = innovations.end
    z = innovations.window(1, n) / a_n
    w = np.where(z > 0, coeffs.C_plus * z, np.where(z < 0, -coeffs.C_minus * z, 0.0))
    t = step_times(n)
    V = StepFunction(0.0, t, np.cumsum(coeffs.C * z))
    M = StepFunction(w[0], t, np.maximum.accumulate(w))
    return V, M


def truncated_sum_values(z_scaled: np.ndarray, u: float) -> np.ndarray:
    """Running sum of the entries of ``z_scaled`` whose modulus exceeds ``u``."""
    return np.cumsum(np.where(np.abs(z_scaled) > u, z_scaled, 0.0))


def truncated_centered_sum(innovations: InnovationPath, a_n: float, u: float,
                           n: int | None = None) -> StepFunction:
    """``sum_{i <= nt} (Z_i/a_n) 1{|Z_i|/a_n > u} - floor(nt) b_n(u)``."""
    if not 0.0 < u <= 1.0:
        raise ParameterError("u must lie in (0, 1]")
    if n is None:
        n = innovations.end
    z = innovations.window(1, n) / a_n
    b = innovations.spec.tail.centering_b_n(n, u)
    k = np.arange(1, n + 1)
    return StepFunction(0.0, step_times(n), truncated_sum_values(z, u) - k * b)


def h_events(innovations: InnovationPath, coeffs: CoefficientSample, n: int,
             delta: float, a_n: float) -> tuple[bool, bool, bool]:
    """Indicators of the three events that control ``d_M2(M~_n, M_n) > delta``.

    With ``eta = delta / (4 (q + 1))`` call index ``k`` big when
    ``C_* |Z_k| / a_n > eta``.

    1. some big index in ``{-q, ..., q}`` or ``{n - q + 1, ..., n}``;
    2. two big indices at distance at most ``q`` with at least one in ``1..n``;
    3. a big ``k`` in ``1..n`` and some ``j`` in ``1..n`` outside
       ``[k, k + q]`` whose window ``{j - q, ..., j}`` holds two big indices.

    The innovation path must cover indices ``-q`` to ``n + q``.
    """
    q = coeffs.order
    eta = delta / (4.0 * (q + 1))
    z = innovations.window(-q, n + q)
    big_idx = np.flatnonzero(coeffs.C_star * np.abs(z) / a_n > eta) - q
    if big_idx.size == 0:
        return False, False, False
    h1 = bool(np.any(((big_idx >= -q) & (big_idx <= q)) | ((big_idx >= n - q + 1) & (big_idx <= n))))
    gaps = np.diff(big_idx)
    close = gaps <= q
    in_range = ((big_idx[:-1] >= 1) & (big_idx[:-1] <= n)) | ((big_idx[1:] >= 1) & (big_idx[1:] <= n))
    h2 = bool(np.any(close & in_range))
    h3 = False
    if close.any():
        # windows {j-q..j} with two big indices: j in [b_{l+1}, b_l + q]
        lo = big_idx[1:][close]
        hi = big_idx[:-1][close] + q
        lo = np.maximum(lo, 1)
        hi = np.minimum(hi, n)
        ok = lo <= hi
        lo, hi = lo[ok], hi[ok]
        if lo.size:
            ks = big_idx[(big_idx >= 1) & (big_idx <= n)]
            for k in ks:
                # j outside [k, k+q]
                if np.any((lo < k) | (hi > k + q)):
                    h3 = True
                    break
    return h1, h2, h3
