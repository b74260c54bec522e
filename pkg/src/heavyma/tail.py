"""Exact two-sided Pareto law and its regular-variation constants.

``P(|Z| > x) = x**-alpha`` for ``x >= 1``, with a fraction ``p`` of the tail
mass on the positive side and ``r = 1 - p`` on the negative side.  Under this
law the normalizing sequence is exactly ``a_n = n**(1/alpha)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from heavyma.errors import DomainError, ParameterError, UnsupportedConfiguration


@dataclass(frozen=True)
class TailModel:
    """Tail index ``alpha`` in (0, 2) and positive-tail weight ``p`` in [0, 1]."""

    alpha: float
    p: float = 0.5

    def __post_init__(self):
        a, p = float(self.alpha), float(self.p)
        if not 0.0 < a < 2.0:
            raise ParameterError(f"alpha must lie in (0, 2), got {a}")
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {p}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "p", p)

    @property
    def r(self) -> float:
        return 1.0 - self.p

    @property
    def symmetric(self) -> bool:
        return self.p == self.r

    # law
    def tail_prob(self, x):
        """``P(|Z| > x)``."""
        x = np.asarray(x, dtype=np.float64)
        out = np.where(x >= 1.0, np.maximum(x, 1.0) ** -self.alpha, 1.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        ax = np.maximum(np.abs(x), 1.0)
        tail = ax ** -self.alpha
        out = np.where(x <= -1.0, self.r * tail,
                       np.where(x < 1.0, self.r, 1.0 - self.p * tail))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        """Inverse CDF; negative for ``u < r``, positive for ``u >= r``."""
        u = np.asarray(u, dtype=np.float64)
        if np.any((u <= 0.0) | (u >= 1.0)) or np.isnan(u).any():
            raise DomainError("quantile level must lie in (0, 1)")
        out = self.quantile_pair(u, 1.0 - u)
        return float(out[0]) if u.ndim == 0 else out

    def quantile_pair(self, u: np.ndarray, s: np.ndarray) -> np.ndarray:
        """Inverse CDF from a level ``u`` and its complement ``s = 1 - u``.

        Passing the complement separately keeps full relative precision in the
        upper tail, where ``1 - u`` would cancel.
        """
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        neg = u < self.r
        out = np.empty(u.shape)
        e = -1.0 / self.alpha
        if neg.any():
            out[neg] = -np.minimum(u[neg] / self.r, 1.0) ** e
        pos = ~neg
        if pos.any():
            out[pos] = np.minimum(s[pos] / self.p, 1.0) ** e
        return out

    def from_normals(self, g: np.ndarray) -> np.ndarray:
        """Map standard normal draws to the Pareto law through the normal CDF."""
        g = np.asarray(g, dtype=np.float64)
        return self.quantile_pair(ndtr(g), ndtr(-g))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.from_normals(rng.standard_normal(size))

    # normalization and centering
    def a_n(self, n: int) -> float:
        if n < 1:
            raise DomainError("n must be at least 1")
        return float(n) ** (1.0 / self.alpha)

    def drift_b(self) -> float:
        """``(p - r) alpha / (1 - alpha)``, and 0 for ``alpha = 1``."""
        if self.alpha == 1.0:
            return 0.0
        return (self.p - self.r) * self.alpha / (1.0 - self.alpha)

    def _check_u(self, u: float) -> None:
        if not 0.0 < u <= 1.0:
            raise DomainError("u must lie in (0, 1]")

    def _alpha_one_guard(self) -> None:
        if self.alpha == 1.0 and not self.symmetric:
            raise UnsupportedConfiguration("alpha = 1 requires p = r")

    def mu_integral(self, u: float) -> float:
        """Integral of ``x`` against the limit measure over ``u < |x| <= 1``."""
        self._check_u(u)
        self._alpha_one_guard()
        if self.symmetric or u == 1.0:
            return 0.0
        a = self.alpha
        return (self.p - self.r) * a / (1.0 - a) * (1.0 - u ** (1.0 - a))

    def centering_b_n(self, n: int, u: float) -> float:
        """``E[(Z/a_n) 1{u < |Z|/a_n <= 1}]`` in closed form."""
        self._check_u(u)
        self._alpha_one_guard()
        if self.symmetric:
            return 0.0
        an = self.a_n(n)
        lower = max(u * an, 1.0)
        if lower >= an:
            return 0.0
        a = self.alpha
        return (self.p - self.r) * a / (1.0 - a) * (an ** (1.0 - a) - lower ** (1.0 - a)) / an

    def karamata_ratio(self, y: float) -> float:
        """``E[|Z| 1{|Z| <= y}] / (y P(|Z| > y))`` for ``alpha < 1``, ``y >= 1``.

        With the unit support floor the truncated mean is
        ``int_1^y x alpha x**(-alpha-1) dx``.
        """
        if self.alpha >= 1.0:
            raise UnsupportedConfiguration("karamata_ratio needs alpha < 1")
        if y < 1.0:
            raise DomainError("y must be at least 1")
        a = self.alpha
        return a / (1.0 - a) * (1.0 - y ** (a - 1.0))
