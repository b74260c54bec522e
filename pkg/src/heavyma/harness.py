"""Config-driven Monte Carlo experiments and their reports.

Four experiments are available:

``marginal_convergence``
    Two-sample KS distance between ``(V_n(t), M_n(t))`` and draws of the
    limit marginals, over an n-grid.
``negligibility``
    How often the tilde paths sit more than ``delta`` away from the
    pre-limit paths in the M2 distance, together with the three events that
    must occur whenever the max paths are that far apart.
``m1_counterexample``
    Median M2 and M1* distances between ``V_n`` and its tilde counterpart.
``infinite_order``
    How often the order-``q`` approximation moves ``(V_n, M_n)`` by more than
    ``epsilon`` in the product M2 distance, over a q-grid.

Replications are mapped over a thread pool in replication order, so results
do not depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
from scipy import stats

from heavyma.cadlag import d_m2, m2_within, oscillation_levy
from heavyma.errors import ConfigError, HeavyMAError
from heavyma.innovations import InnovationSpec, sample_path
from heavyma.limits import sample_limit_marginals
from heavyma.linear import (Deterministic, InfiniteGeometric, RandomBridge, build_ma,
                            finite_order_approx, h_events, partial_max_path,
                            partial_sum_path, tilde_paths)
from heavyma.rng import Tag, stream
from heavyma.tail import TailModel

EXPERIMENTS = ("marginal_convergence", "negligibility", "m1_counterexample", "infinite_order")

# standard deviation of the Kolmogorov distribution; sd(KS) ~ KS_SD / sqrt(n_eff)
KS_SD = 0.2605

CSV_COLUMNS = ("experiment", "innovations", "n", "q", "t", "coordinate", "statistic",
               "value", "se", "p_value", "reps", "seed")


# configuration

def _get(d: dict, key: str, path: str, default=..., kind=None):
    if key not in d:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required entry")
        return default
    v = d[key]
    if kind is not None:
        ok = isinstance(v, kind) and not (kind in (int, float, (int, float)) and isinstance(v, bool))
        if not ok:
            raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind}, got {type(v).__name__}")
    return v


def _tail_from(d: Any) -> TailModel:
    if not isinstance(d, dict):
        raise ConfigError("tail", "must be an object with alpha and p")
    alpha = _get(d, "alpha", "tail", kind=(int, float))
    p = _get(d, "p", "tail", 0.5, kind=(int, float))
    if not 0.0 < alpha < 2.0:
        raise ConfigError("tail.alpha", f"must lie in (0, 2), got {alpha}")
    if not 0.0 <= p <= 1.0:
        raise ConfigError("tail.p", f"must lie in [0, 1], got {p}")
    if alpha >= 1.0 and p != 0.5:
        raise ConfigError("tail.p", "alpha >= 1 requires the symmetric case p = 0.5")
    return TailModel(float(alpha), float(p))


def _innov_from(d: Any, tail: TailModel, path: str) -> InnovationSpec:
    if not isinstance(d, dict):
        raise ConfigError(path, "must be an object")
    kind = _get(d, "kind", path, "iid", kind=str)
    if kind not in ("iid", "gauss_ar1"):
        raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}")
    phi = _get(d, "phi", path, 0.0, kind=(int, float))
    if not 0.0 <= phi < 1.0:
        raise ConfigError(f"{path}.phi", f"must lie in [0, 1), got {phi}")
    if kind == "iid" and phi != 0.0:
        raise ConfigError(f"{path}.phi", "only allowed for kind 'gauss_ar1'")
    return InnovationSpec(tail, kind, float(phi))


def _coeff_from(d: Any):
    if not isinstance(d, dict):
        raise ConfigError("coefficients", "must be an object")
    kind = _get(d, "kind", "coefficients", kind=str)
    try:
        if kind == "deterministic":
            c = _get(d, "coeffs", "coefficients", kind=list)
            if not c or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in c):
                raise ConfigError("coefficients.coeffs", "must be a non-empty list of numbers")
            return Deterministic(tuple(c))
        if kind == "random_bridge":
            q = _get(d, "q", "coefficients", kind=int)
            if q < 0:
                raise ConfigError("coefficients.q", "must be non-negative")
            return RandomBridge(q, d.get("ratios"), d.get("scale"))
        if kind == "infinite_geometric":
            rho = _get(d, "rho", "coefficients", kind=(int, float))
            if not 0.0 < rho < 1.0:
                raise ConfigError("coefficients.rho", f"must lie in (0, 1), got {rho}")
            return InfiniteGeometric(float(rho), d.get("truncation"), d.get("scale"))
    except HeavyMAError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("coefficients", str(exc)) from exc
    raise ConfigError("coefficients.kind", f"unknown kind {kind!r}")


def _pos_list(d: dict, key: str, default, kind, strictly_increasing=False):
    v = d.get(key, default)
    if not isinstance(v, list) or not v:
        raise ConfigError(key, "must be a non-empty list")
    for x in v:
        if not isinstance(x, kind) or isinstance(x, bool) or not x > 0:
            raise ConfigError(key, f"entries must be positive {kind.__name__ if isinstance(kind, type) else 'numbers'}")
    if strictly_increasing and any(b <= a for a, b in zip(v, v[1:])):
        raise ConfigError(key, "must be strictly increasing")
    return list(v)


@dataclass
class ExperimentConfig:
    """Validated experiment configuration (see :func:`load_config` for the schema)."""

    experiment: str
    tail: TailModel
    innovations: list
    coefficients: Any
    n_grid: list
    reps: int = 1000
    seed: int = 0
    t_grid: list = field(default_factory=lambda: [0.25, 0.5, 1.0])
    limit_samples: int = 20000
    limit_atoms: int = 2000
    deltas: list = field(default_factory=lambda: [0.2])
    epsilon: float = 0.1
    q_grid: list = field(default_factory=lambda: [1, 2, 4, 8])
    tol: float = 1e-6
    control_coefficients: Any = None
    factor_n: int | None = None
    factor: float = 2.0
    small_jump_u: list | None = None
    out_dir: str | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        exp = _get(d, "experiment", "", kind=str)
        if exp not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}, got {exp!r}")
        tail = _tail_from(_get(d, "tail", ""))
        inn = d.get("innovations", {"kind": "iid"})
        if isinstance(inn, dict):
            inn = [inn]
        if not isinstance(inn, list) or not inn:
            raise ConfigError("innovations", "must be an object or a non-empty list")
        specs = [_innov_from(x, tail, f"innovations[{i}]") for i, x in enumerate(inn)]
        coeffs = _coeff_from(_get(d, "coefficients", ""))
        n_grid = _pos_list(d, "n_grid", None, int, strictly_increasing=True)
        reps = _get(d, "reps", "", 1000, kind=int)
        if reps < 2:
            raise ConfigError("reps", "must be at least 2")
        seed = _get(d, "seed", "", 0, kind=int)
        if seed < 0:
            raise ConfigError("seed", "must be non-negative")
        t_grid = _pos_list(d, "t_grid", [0.25, 0.5, 1.0], (int, float))
        if any(t > 1 for t in t_grid):
            raise ConfigError("t_grid", "times must lie in (0, 1]")
        lim = d.get("limit", {})
        if not isinstance(lim, dict):
            raise ConfigError("limit", "must be an object")
        ls = _get(lim, "samples", "limit", 20000, kind=int)
        la = _get(lim, "atoms", "limit", 2000, kind=int)
        if ls < 2 or la < 1:
            raise ConfigError("limit", "samples >= 2 and atoms >= 1 required")
        deltas = _pos_list(d, "deltas", [0.2], (int, float))
        eps = _get(d, "epsilon", "", 0.1, kind=(int, float))
        if not eps > 0:
            raise ConfigError("epsilon", "must be positive")
        q_grid = _pos_list(d, "q_grid", [1, 2, 4, 8], int, strictly_increasing=True)
        tol = _get(d, "tol", "", 1e-6, kind=(int, float))
        if not tol > 0:
            raise ConfigError("tol", "must be positive")
        control = d.get("control_coefficients")
        if control is not None:
            if not isinstance(control, list) or not control:
                raise ConfigError("control_coefficients", "must be a non-empty list of numbers")
            control = Deterministic(tuple(control))
        if exp == "m1_counterexample" and not isinstance(coeffs, Deterministic):
            raise ConfigError("coefficients.kind", "m1_counterexample needs deterministic coefficients")
        if exp == "infinite_order" and not isinstance(coeffs, InfiniteGeometric):
            raise ConfigError("coefficients.kind", "infinite_order needs infinite_geometric coefficients")
        factor_n = d.get("factor_n")
        if factor_n is not None and factor_n not in n_grid:
            raise ConfigError("factor_n", "must be one of n_grid")
        factor = _get(d, "factor", "", 2.0, kind=(int, float))
        sj = d.get("small_jump_u")
        if sj is not None:
            sj = _pos_list(d, "small_jump_u", None, (int, float), strictly_increasing=True)
            if any(u > 1 for u in sj):
                raise ConfigError("small_jump_u", "entries must lie in (0, 1]")
        out = d.get("output", {})
        out_dir = out.get("dir") if isinstance(out, dict) else None
        return cls(exp, tail, specs, coeffs, n_grid, reps, seed, [float(t) for t in t_grid],
                   ls, la, [float(x) for x in deltas], float(eps), q_grid, float(tol), control,
                   factor_n, float(factor), sj, out_dir, d)


def load_config(path) -> ExperimentConfig:
    """Read a JSON config.

    Schema (all keys except ``experiment``, ``tail``, ``coefficients`` and
    ``n_grid`` are optional)::

        {
          "experiment": "marginal_convergence" | "negligibility"
                        | "m1_counterexample" | "infinite_order",
          "tail": {"alpha": 0.8, "p": 0.7},
          "innovations": {"kind": "iid"} | [{"kind": "gauss_ar1", "phi": 0.5}, ...],
          "coefficients": {"kind": "deterministic", "coeffs": [1, -1, 1]}
                        | {"kind": "random_bridge", "q": 2}
                        | {"kind": "infinite_geometric", "rho": 0.5},
          "n_grid": [1000, 10000, 100000],
          "reps": 1000, "seed": 0, "tol": 1e-6,
          "t_grid": [0.25, 0.5, 1.0],
          "limit": {"samples": 20000, "atoms": 2000},
          "deltas": [0.2], "epsilon": 0.1, "q_grid": [1, 2, 4, 8],
          "control_coefficients": [1, 1, 1], "factor_n": 10000, "factor": 2.0,
          "small_jump_u": [0.05, 0.1, 0.2],
          "output": {"dir": "results"}
        }
    """
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(d)


# report

@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str
    gating: bool = True


@dataclass
class ExperimentReport:
    experiment: str
    seed: int
    rows: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, **kw) -> None:
        row = {c: "" for c in CSV_COLUMNS}
        row.update(experiment=self.experiment, seed=self.seed)
        row.update(kw)
        self.rows.append(row)

    def select(self, **kw) -> list:
        return [r for r in self.rows if all(r.get(k) == v for k, v in kw.items())]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if v.gating)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                        for k, v in r.items() if k in CSV_COLUMNS})
        return buf.getvalue()

    def summary(self) -> dict:
        return {"experiment": self.experiment, "seed": self.seed, "passed": self.passed,
                "verdicts": [vars(v) for v in self.verdicts], "meta": self.meta}

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"csv": out / f"{self.experiment}.csv",
                 "summary": out / f"{self.experiment}_summary.json"}
        paths["csv"].write_text(self.to_csv())
        paths["summary"].write_text(json.dumps(self.summary(), indent=2, default=float))
        if self.raw:
            paths["raw"] = out / f"{self.experiment}_raw.npz"
            np.savez(paths["raw"], **self.raw)
        return paths


# statistics helpers

def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float]:
    """KS distance, asymptotic p-value and an approximate standard error."""
    res = stats.ks_2samp(a, b, method="asymp")
    n_eff = a.size * b.size / (a.size + b.size)
    return float(res.statistic), float(res.pvalue), KS_SD / math.sqrt(n_eff)


def binomial_se(freq: float, reps: int) -> float:
    return math.sqrt(max(freq * (1.0 - freq), 0.0) / reps)


def median_se(x: np.ndarray, seed: int, key: tuple, boots: int = 400) -> float:
    """Bootstrap standard error of the median (deterministic given the key)."""
    rng = stream(seed, Tag.BOOTSTRAP, *key)
    idx = rng.integers(0, x.size, size=(boots, x.size))
    return float(np.median(x[idx], axis=1).std(ddof=1))


def non_increasing(values, ses, k_se: float = 2.0) -> bool:
    """Each step up is within ``k_se`` combined standard errors."""
    return all(b <= a + k_se * math.hypot(sa, sb)
               for a, b, sa, sb in zip(values, values[1:], ses, ses[1:]))


def _map(fn: Callable, items, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# per-replication path construction

def _prelimit(cfg: ExperimentConfig, spec: InnovationSpec, n: int, rep: int, extra: int = 0,
              coeff_model=None):
    """Innovations covering ``-q - extra + 1 .. n + extra`` and the coefficient draw."""
    model = cfg.coefficients if coeff_model is None else coeff_model
    cs = model.sample(cfg.seed, rep, key=(n,))
    q = cs.order
    path = sample_path(spec, n + extra, J=q + extra, seed=cfg.seed, rep=rep, key=(n,))
    return cs, path


def _marginals(x: np.ndarray, a_n: float, ts) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    s = np.cumsum(x) / a_n
    m = np.maximum.accumulate(x) / a_n
    idx = np.floor(np.asarray(ts) * n + 1e-9).astype(np.int64)
    v = np.where(idx > 0, s[np.maximum(idx - 1, 0)], 0.0)
    mm = np.where(idx > 0, m[np.maximum(idx - 1, 0)], x[0] / a_n)
    return v, mm


# experiments

def run_marginal_convergence(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    rep_ = ExperimentReport("marginal_convergence", cfg.seed)
    ts = cfg.t_grid
    limV, limM = sample_limit_marginals(cfg.tail, cfg.coefficients, ts, cfg.limit_samples,
                                        cfg.limit_atoms, cfg.seed, key=(1,))
    rep_.raw["limit_V"] = limV
    rep_.raw["limit_M"] = limM
    bonf = 0.01 / (len(ts) * 2)
    for s, spec in enumerate(cfg.innovations):
        label = spec.kind if spec.kind == "iid" else f"{spec.kind}(phi={spec.phi:g})"
        for n in cfg.n_grid:
            a_n = cfg.tail.a_n(n)

            def one(r, spec=spec, n=n, a_n=a_n):
                cs, path = _prelimit(cfg, spec, n, r)
                return _marginals(build_ma(cs, path, n).X, a_n, ts)

            out = _map(one, range(cfg.reps), threads)
            V = np.array([o[0] for o in out])
            M = np.array([o[1] for o in out])
            rep_.raw[f"V_{s}_{n}"] = V
            rep_.raw[f"M_{s}_{n}"] = M
            for k, t in enumerate(ts):
                for coord, pre, lim in (("V", V[:, k], limV[:, k]), ("M", M[:, k], limM[:, k])):
                    D, pv, se = ks_two_sample(pre, lim)
                    rep_.add(innovations=label, n=n, t=t, coordinate=coord, statistic="ks",
                             value=D, se=se, p_value=pv, reps=cfg.reps)
        for k, t in enumerate(ts):
            for coord in ("V", "M"):
                rows = [rep_.select(innovations=label, n=n, t=t, coordinate=coord)[0]
                        for n in cfg.n_grid]
                vals = [r["value"] for r in rows]
                ok = non_increasing(vals, [r["se"] for r in rows])
                rep_.verdicts.append(Verdict(
                    f"ks_non_increasing[{label},{coord},t={t:g}]", ok,
                    "KS over n-grid: " + ", ".join(f"{v:.4f}" for v in vals),
                    gating=(t == 1.0)))
            for coord in ("V", "M"):
                last = rep_.select(innovations=label, n=cfg.n_grid[-1], t=t, coordinate=coord)[0]
                rep_.verdicts.append(Verdict(
                    f"ks_pvalue_largest_n[{label},{coord},t={t:g}]", last["p_value"] > bonf,
                    f"p = {last['p_value']:.4g} vs Bonferroni level {bonf:.4g}", gating=False))
    rep_.meta.update(limit_samples=cfg.limit_samples, limit_atoms=cfg.limit_atoms,
                     ks_se="Kolmogorov sd / sqrt(n_eff)")
    return rep_


def run_negligibility(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    rep_ = ExperimentReport("negligibility", cfg.seed)
    spec = cfg.innovations[0]
    for n in cfg.n_grid:
        a_n = cfg.tail.a_n(n)

        def one(r, n=n, a_n=a_n):
            cs, path = _prelimit(cfg, spec, n, r, extra=cfg.coefficients.order + 1)
            ma = build_ma(cs, path, n)
            V, M = partial_sum_path(ma, a_n), partial_max_path(ma, a_n)
            Vt, Mt = tilde_paths(path, cs, a_n, n)
            dM = d_m2(M, Mt, cfg.tol)
            dV = d_m2(V, Vt, cfg.tol)
            ev = [h_events(path, cs, n, delta, a_n) for delta in cfg.deltas]
            exV = [not m2_within(V, Vt, delta) for delta in cfg.deltas]
            exM = [not m2_within(M, Mt, delta) for delta in cfg.deltas]
            return dM, dV, ev, exV, exM

        out = _map(one, range(cfg.reps), threads)
        dM = np.array([o[0] for o in out])
        dV = np.array([o[1] for o in out])
        rep_.raw[f"dM_{n}"] = dM
        rep_.raw[f"dV_{n}"] = dV
        N = cfg.reps
        rep_.add(n=n, coordinate="M", statistic="mean_d_m2", value=float(dM.mean()),
                 se=float(dM.std(ddof=1) / math.sqrt(N)), reps=N)
        rep_.add(n=n, coordinate="V", statistic="mean_d_m2", value=float(dV.mean()),
                 se=float(dV.std(ddof=1) / math.sqrt(N)), reps=N)
        for j, delta in enumerate(cfg.deltas):
            exM = np.array([o[4][j] for o in out])
            exV = np.array([o[3][j] for o in out])
            H = np.array([o[2][j] for o in out])
            Hany = H.any(axis=1)
            rep_.raw[f"H_{n}_{j}"] = H
            rep_.raw[f"exceed_M_{n}_{j}"] = exM
            rep_.raw[f"exceed_V_{n}_{j}"] = exV
            tag = f"delta={delta:g}"
            for name, arr, coord in (("freq_exceed", exM, "M"), ("freq_exceed", exV, "V"),
                                     ("freq_H", Hany, "H"), ("freq_H1", H[:, 0], "H"),
                                     ("freq_H2", H[:, 1], "H"), ("freq_H3", H[:, 2], "H")):
                f = float(arr.mean())
                rep_.add(n=n, coordinate=coord, statistic=f"{name}[{tag}]", value=f,
                         se=binomial_se(f, N), reps=N)
            viol = int(np.sum(exM & ~Hany))
            rep_.add(n=n, coordinate="M", statistic=f"inclusion_violations[{tag}]",
                     value=float(viol), reps=N)
    for delta in cfg.deltas:
        tag = f"delta={delta:g}"
        for coord in ("M", "V"):
            rows = [rep_.select(n=n, coordinate=coord, statistic=f"freq_exceed[{tag}]")[0]
                    for n in cfg.n_grid]
            vals = [r["value"] for r in rows]
            ok = non_increasing(vals, [r["se"] for r in rows]) and vals[-1] < vals[0]
            rep_.verdicts.append(Verdict(
                f"exceedance_decreasing[{coord},{tag}]", ok,
                "P(d_m2 > delta) over n-grid: " + ", ".join(f"{v:.4f}" for v in vals),
                gating=(coord == "M")))
        viol = [rep_.select(n=n, statistic=f"inclusion_violations[{tag}]")[0]["value"]
                for n in cfg.n_grid]
        rep_.verdicts.append(Verdict(f"h_event_inclusion[{tag}]", sum(viol) == 0,
                                     f"replications with exceedance outside H: {viol}"))
    return rep_


def _m1_table(cfg: ExperimentConfig, model, label: str, rep_: ExperimentReport, threads: int):
    spec = cfg.innovations[0]
    meds = {}
    for n in cfg.n_grid:
        a_n = cfg.tail.a_n(n)

        def one(r, n=n, a_n=a_n):
            cs, path = _prelimit(cfg, spec, n, r, coeff_model=model)
            ma = build_ma(cs, path, n)
            V = partial_sum_path(ma, a_n)
            Vt, _ = tilde_paths(path, cs, a_n, n)
            d2 = d_m2(V, Vt, cfg.tol)
            # d_m1_star = d_m2 + Levy term; reuse the M2 value
            return d2, d2 + oscillation_levy(V, Vt, cfg.tol)

        out = np.array(_map(one, range(cfg.reps), threads))
        rep_.raw[f"{label}_d_m2_{n}"] = out[:, 0]
        rep_.raw[f"{label}_d_m1_star_{n}"] = out[:, 1]
        for j, name in enumerate(("d_m2", "d_m1_star")):
            med = float(np.median(out[:, j]))
            se = median_se(out[:, j], cfg.seed, (n, j, len(label)))
            meds[(name, n)] = (med, se)
            rep_.add(innovations=label, n=n, coordinate="V", statistic=f"median_{name}",
                     value=med, se=se, reps=cfg.reps)
        rep_.add(innovations=label, n=n, coordinate="V", statistic="min_m1_star_minus_m2",
                 value=float(np.min(out[:, 1] - out[:, 0])), reps=cfg.reps)
    return meds


def run_m1_counterexample(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    rep_ = ExperimentReport("m1_counterexample", cfg.seed)
    meds = _m1_table(cfg, cfg.coefficients, "main", rep_, threads)
    m2 = [meds[("d_m2", n)] for n in cfg.n_grid]
    m1 = [meds[("d_m1_star", n)] for n in cfg.n_grid]
    ok2 = all(b[0] < a[0] for a, b in zip(m2, m2[1:]))
    rep_.verdicts.append(Verdict("median_d_m2_decreasing", ok2,
                                 "medians: " + ", ".join(f"{m:.4g}" for m, _ in m2)))
    ok1 = all(b[0] >= a[0] - 2.0 * math.hypot(a[1], b[1]) for a, b in zip(m1, m1[1:]))
    rep_.verdicts.append(Verdict("median_d_m1_star_not_decreasing", ok1,
                                 "medians: " + ", ".join(f"{m:.4g} (se {s:.2g})" for m, s in m1)))
    gaps = [r["value"] for r in rep_.select(innovations="main", statistic="min_m1_star_minus_m2")]
    rep_.verdicts.append(Verdict("d_m1_star_dominates_d_m2", min(gaps) >= 0.0,
                                 f"smallest d_m1_star - d_m2 per n: {gaps}"))
    if cfg.factor_n is not None:
        a, b = meds[("d_m2", cfg.factor_n)][0], meds[("d_m1_star", cfg.factor_n)][0]
        rep_.verdicts.append(Verdict(
            f"median_ratio_at_n={cfg.factor_n}", b >= cfg.factor * a,
            f"median d_m1_star / median d_m2 = {b / a if a > 0 else float('inf'):.3g} "
            f"(threshold {cfg.factor:g})"))
    if cfg.control_coefficients is not None:
        cm = _m1_table(cfg, cfg.control_coefficients, "control", rep_, threads)
        c2 = [cm[("d_m2", n)][0] for n in cfg.n_grid]
        c1 = [cm[("d_m1_star", n)][0] for n in cfg.n_grid]
        ok = all(b < a for a, b in zip(c2, c2[1:])) and all(b < a for a, b in zip(c1, c1[1:]))
        rep_.verdicts.append(Verdict(
            "control_medians_decreasing", ok,
            f"d_m2: {', '.join(f'{v:.4g}' for v in c2)}; d_m1_star: {', '.join(f'{v:.4g}' for v in c1)}",
            gating=False))
    return rep_


def small_jump_statistic(z: np.ndarray, tail: TailModel, n: int, u: float) -> float:
    """``max_k |sum_{i<=k} (Z_i/a_n) 1{|Z_i|/a_n <= u} - k E[...]|``."""
    a_n = tail.a_n(n)
    x = z / a_n
    small = np.where(np.abs(x) <= u, x, 0.0)
    if tail.symmetric:
        mean = 0.0
    else:
        a = tail.alpha
        hi = max(u * a_n, 1.0)
        mean = (tail.p - tail.r) * a / (1.0 - a) * (hi ** (1.0 - a) - 1.0) / a_n
    k = np.arange(1, n + 1)
    return float(np.max(np.abs(np.cumsum(small) - k * mean)))


def run_infinite_order(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    rep_ = ExperimentReport("infinite_order", cfg.seed)
    spec = cfg.innovations[0]
    eps = cfg.epsilon
    for n in cfg.n_grid:
        a_n = cfg.tail.a_n(n)

        def one(r, n=n, a_n=a_n):
            cs, path = _prelimit(cfg, spec, n, r)
            ma = build_ma(cs, path, n)
            V, M = partial_sum_path(ma, a_n), partial_max_path(ma, a_n)
            res = []
            for q in cfg.q_grid:
                maq = build_ma(finite_order_approx(cs, q), path, n)
                Vq, Mq = partial_sum_path(maq, a_n), partial_max_path(maq, a_n)
                res.append(not (m2_within(V, Vq, eps) and m2_within(M, Mq, eps)))
            sj = []
            if cfg.small_jump_u:
                z = path.window(1, n)
                sj = [small_jump_statistic(z, cfg.tail, n, u) for u in cfg.small_jump_u]
            return res, sj

        out = _map(one, range(cfg.reps), threads)
        ex = np.array([o[0] for o in out])
        rep_.raw[f"exceed_{n}"] = ex
        for j, q in enumerate(cfg.q_grid):
            f = float(ex[:, j].mean())
            rep_.add(n=n, q=q, coordinate="V,M", statistic=f"freq_exceed[eps={eps:g}]",
                     value=f, se=binomial_se(f, cfg.reps), reps=cfg.reps)
        if cfg.small_jump_u:
            sj = np.array([o[1] for o in out])
            rep_.raw[f"small_jump_{n}"] = sj
            for j, u in enumerate(cfg.small_jump_u):
                rep_.add(n=n, t="", coordinate=f"u={u:g}", statistic="mean_small_jump_max",
                         value=float(sj[:, j].mean()),
                         se=float(sj[:, j].std(ddof=1) / math.sqrt(cfg.reps)), reps=cfg.reps)
    for n in cfg.n_grid:
        rows = [rep_.select(n=n, q=q, statistic=f"freq_exceed[eps={eps:g}]")[0] for q in cfg.q_grid]
        vals = [r["value"] for r in rows]
        ok = non_increasing(vals, [r["se"] for r in rows])
        rep_.verdicts.append(Verdict(f"exceedance_non_increasing_in_q[n={n}]", ok,
                                     "P(d > eps) over q-grid: " + ", ".join(f"{v:.4f}" for v in vals)))
        if cfg.small_jump_u:
            rows = [rep_.select(n=n, coordinate=f"u={u:g}", statistic="mean_small_jump_max")[0]
                    for u in cfg.small_jump_u]
            vals = [r["value"] for r in rows]
            # as u shrinks the statistic shrinks: reversed order is non-increasing
            ok = non_increasing(vals[::-1], [r["se"] for r in rows][::-1])
            rep_.verdicts.append(Verdict(f"small_jump_increasing_in_u[n={n}]", ok,
                                         "means over u-grid: " + ", ".join(f"{v:.4g}" for v in vals),
                                         gating=False))
    return rep_


RUNNERS = {
    "marginal_convergence": run_marginal_convergence,
    "negligibility": run_negligibility,
    "m1_counterexample": run_m1_counterexample,
    "infinite_order": run_infinite_order,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    report = RUNNERS[cfg.experiment](cfg, threads)
    report.meta.setdefault("config", cfg.raw)
    report.meta.setdefault("assumptions", _assumptions(cfg))
    return report


def _assumptions(cfg: ExperimentConfig) -> list:
    # conditions the theory needs but no finite simulation can certify
    out = []
    if cfg.tail.alpha >= 1.0:
        out.append("small-jump negligibility of truncated partial-sum maxima "
                   "(assumed; only the small_jump_u diagnostic is reported)")
    if any(s.kind != "iid" for s in cfg.innovations):
        out.append("strong mixing and local dependence condition for the innovations "
                   "(assumed; the dprime command gives a Monte Carlo diagnostic)")
    if cfg.experiment == "infinite_order":
        out.append("uniform maximal-moment bound over all coefficient lags (assumed)")
    return out
