"""Command line entry point.

Exit codes: 0 success, 1 invalid input, 2 a gating check failed under
``--check``.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from heavyma.cadlag import StepFunction, d_m1_star, d_m2, d_uniform, oscillation
from heavyma.errors import ConfigError, HeavyMAError
from heavyma.harness import ExperimentConfig, run_experiment
from heavyma.innovations import InnovationSpec, dprime_estimate, dprime_iid_exact, sample_path
from heavyma.linear import Deterministic, build_ma, partial_max_path, partial_sum_path, tilde_paths
from heavyma.tail import TailModel

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 1, 2


def _fmt(value: float, tol: float) -> str:
    digits = max(0, int(math.floor(-math.log10(tol))) - 1)
    return repr(round(value, digits))


def _floats(s: str) -> list:
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s: str) -> list:
    return [int(x) for x in s.split(",") if x.strip()]


def _cmd_metric(args) -> int:
    tol = args.tol
    if args.osc is not None:
        f = StepFunction.load(args.osc[0])
        print(_fmt(oscillation(f, float(args.osc[1])), 1e-12))
        return EXIT_OK
    for flag, fn in (("m2", d_m2), ("m1star", d_m1_star), ("uniform", None)):
        files = getattr(args, flag)
        if files:
            f, g = StepFunction.load(files[0]), StepFunction.load(files[1])
            val = d_uniform(f, g) if fn is None else fn(f, g, tol)
            print(_fmt(val, tol if fn is not None else 1e-12))
            return EXIT_OK
    raise ConfigError("metric", "choose one of --m2, --m1star, --uniform, --osc")


def _cmd_simulate(args) -> int:
    tail = TailModel(args.alpha, args.p)
    spec = InnovationSpec(tail, args.kind, args.phi)
    cs = Deterministic(tuple(_floats(args.coeffs))).sample()
    path = sample_path(spec, args.n, J=cs.order, seed=args.seed)
    ma = build_ma(cs, path, args.n)
    a_n = tail.a_n(args.n)
    Vt, Mt = tilde_paths(path, cs, a_n, args.n)
    paths = {"V": partial_sum_path(ma, a_n), "M": partial_max_path(ma, a_n),
             "V_tilde": Vt, "M_tilde": Mt}
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, f in paths.items():
        f.dump(out / f"{name}.json")
    summary = {name: {"n_jumps": f.n_jumps, "value_at_1": f(1.0)} for name, f in paths.items()}
    summary["d_m2_V"] = d_m2(paths["V"], Vt, 1e-6)
    summary["d_m2_M"] = d_m2(paths["M"], Mt, 1e-6)
    (out / "simulate_summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_dprime(args) -> int:
    tail = TailModel(args.alpha, args.p)
    spec = InnovationSpec(tail, args.kind, args.phi)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "k", "x", "estimate", "se", "iid_exact"])
    for n in _ints(args.n_grid):
        est, se = dprime_estimate(spec, n, args.k, args.x, args.reps, args.seed, args.window)
        exact = dprime_iid_exact(tail, n, args.k, args.x) if args.kind == "iid" else ""
        w.writerow([n, args.k, args.x, repr(est), repr(se), exact if exact == "" else repr(exact)])
    return EXIT_OK


def _cmd_experiment(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.reps is not None:
        raw["reps"] = args.reps
    cfg = ExperimentConfig.from_dict(raw)
    report = run_experiment(cfg, threads=args.threads)
    out_dir = args.out_dir or cfg.out_dir or "results"
    paths = report.write(out_dir)
    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        info = "" if v.gating else " (informational)"
        print(f"{mark} {v.name}{info}: {v.detail}")
    print(f"wrote {paths['csv']} and {paths['summary']}")
    if args.check and not report.passed:
        return EXIT_CHECK
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are validation failures, not check failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="heavyma", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("metric", help="distances between JSON step-function fixtures")
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--m2", nargs=2, metavar=("A", "B"))
    g.add_argument("--m1star", nargs=2, metavar=("A", "B"))
    g.add_argument("--uniform", nargs=2, metavar=("A", "B"))
    g.add_argument("--osc", nargs=2, metavar=("A", "RHO"))
    m.add_argument("--tol", type=float, default=1e-9)
    m.set_defaults(func=_cmd_metric)

    s = sub.add_parser("simulate", help="emit V_n, M_n and tilde paths as JSON")
    s.add_argument("--alpha", type=float, default=0.8)
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--kind", choices=("iid", "gauss_ar1"), default="iid")
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--coeffs", default="1,-1,1")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", default="paths")
    s.set_defaults(func=_cmd_simulate)

    d = sub.add_parser("dprime", help="Monte Carlo table of the local dependence statistic")
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--p", type=float, default=0.5)
    d.add_argument("--kind", choices=("iid", "gauss_ar1"), default="iid")
    d.add_argument("--phi", type=float, default=0.0)
    d.add_argument("--n-grid", default="1000,10000")
    d.add_argument("--k", type=int, default=10)
    d.add_argument("--x", type=float, default=1.0)
    d.add_argument("--reps", type=int, default=200)
    d.add_argument("--window", type=int, default=None)
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=_cmd_dprime)

    e = sub.add_parser("experiment", help="run a JSON-configured experiment")
    e.add_argument("config")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--reps", type=int, default=None)
    e.add_argument("--check", action="store_true", help="exit 2 if a gating check fails")
    e.add_argument("--out-dir", default=None)
    e.add_argument("--threads", type=int, default=1)
    e.set_defaults(func=_cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (HeavyMAError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
