"""Innovation sequences: i.i.d. Pareto and a Gaussian-copula AR(1).

Both kinds start from the same standard normal draws.  The i.i.d. kind maps
them straight through the Pareto quantile; the copula kind first runs them
through a stationary AR(1) filter, so ``phi = 0`` reproduces the i.i.d.
path exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heavyma import kernels
from heavyma.errors import DomainError, ParameterError
from heavyma.rng import Tag, stream
from heavyma.tail import TailModel

KINDS = ("iid", "gauss_ar1")


@dataclass(frozen=True)
class InnovationSpec:
    """Innovation law.

    Parameters
    ----------
    tail : TailModel
        Marginal law of every ``Z_i``.
    kind : {"iid", "gauss_ar1"}
    phi : float
        AR(1) coefficient of the latent Gaussian sequence, in [0, 1).
    """

    tail: TailModel
    kind: str = "iid"
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        phi = float(self.phi)
        if not 0.0 <= phi < 1.0:
            raise ParameterError(f"phi must lie in [0, 1), got {phi}")
        if self.kind == "iid" and phi != 0.0:
            raise ParameterError("phi is only meaningful for kind 'gauss_ar1'")
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True, eq=False)
class InnovationPath:
    """Values ``Z_i`` for ``i = start, ..., start + len(values) - 1``."""

    values: np.ndarray
    start: int
    spec: InnovationSpec
    seed: int
    rep: int = 0

    @property
    def end(self) -> int:
        return self.start + self.values.size - 1

    def window(self, lo: int, hi: int) -> np.ndarray:
        """``Z_lo, ..., Z_hi`` inclusive."""
        if lo < self.start or hi > self.end:
            raise DomainError(f"indices [{lo}, {hi}] outside [{self.start}, {self.end}]")
        return self.values[lo - self.start:hi - self.start + 1]


def latent_gaussian(spec: InnovationSpec, e: np.ndarray) -> np.ndarray:
    """Stationary N(0, 1) sequence driven by standard normal draws ``e``."""
    if spec.kind == "iid" or spec.phi == 0.0:
        return e
    x = np.sqrt(1.0 - spec.phi ** 2) * e
    x[0] = e[0]
    return kernels.ar1_filter(spec.phi, x)


def sample_path(spec: InnovationSpec, n: int, J: int = 0, seed: int = 0,
                rep: int = 0, key: tuple = ()) -> InnovationPath:
    """Draw ``Z_{1-J}, ..., Z_n``.

    The stream is keyed by ``(seed, rep, *key)``, so the path does not depend
    on which worker generates it.
    """
    if n < 1 or J < 0:
        raise ParameterError("need n >= 1 and J >= 0")
    e = stream(seed, Tag.INNOVATIONS, rep, *key).standard_normal(n + J)
    g = latent_gaussian(spec, e)
    z = spec.tail.from_normals(g)
    z.setflags(write=False)
    return InnovationPath(z, 1 - J, spec, seed, rep)


def dprime_estimate(spec: InnovationSpec, n: int, k: int, x: float, reps: int,
                    seed: int = 0, window: int | None = None) -> tuple[float, float]:
    """Monte Carlo estimate of ``n sum_{i<=n/k} P(|Z_0| > x a_n, |Z_i| > x a_n)``.

    Each replication draws a stationary path of length ``window + n // k`` and
    averages the exceedance-pair count over ``window`` start positions
    (default ``n``).  Returns ``(mean, standard error)`` across replications.
    """
    if k < 1 or reps < 1 or n < 1:
        raise ParameterError("need n, k, reps >= 1")
    if not x > 0:
        raise ParameterError("x must be positive")
    m = n // k
    S = n if window is None else int(window)
    thr = x * spec.tail.a_n(n)
    est = np.empty(reps)
    for rep in range(reps):
        z = sample_path(spec, S + m, 0, seed, rep, key=(n, k)).values
        pos = np.flatnonzero(np.abs(z) > thr)
        if pos.size < 2 or m == 0:
            est[rep] = 0.0
            continue
        first = pos[pos < S]
        pairs = np.searchsorted(pos, first + m, side="right") - np.searchsorted(pos, first, side="right")
        est[rep] = n * pairs.sum() / S
    se = est.std(ddof=1) / np.sqrt(reps) if reps > 1 else float("nan")
    return float(est.mean()), float(se)


def dprime_statistic(spec: InnovationSpec, n: int, k: int, x: float, reps: int,
                     seed: int = 0, window: int | None = None) -> float:
    """Point estimate from :func:`dprime_estimate`."""
    return dprime_estimate(spec, n, k, x, reps, seed, window)[0]


def dprime_iid_exact(tail: TailModel, n: int, k: int, x: float) -> float:
    """Closed form of the statistic for i.i.d. innovations."""
    q = float(tail.tail_prob(x * tail.a_n(n)))
    return n * (n // k) * q * q
