"""Command-line front end.

Subcommands: solve, roots, classify, thresholds, scan, simulate, errata.
Exit codes: 0 success, 1 invalid arguments, 2 numerical failure.

Defaults for any flag may come from a ``key=value`` file named by the
``FHC_CONFIG`` environment variable (e.g. ``graph=rod``, ``k=3``,
``seed=7``); command-line flags override the file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .boundary import lambda_cr, solve_all_ti, solve_symmetric
from .closedform import QuarticProblem, positive_root
from .errata import run_errata
from .errors import FHCError, InvalidParameter
from .extremality import classify, kernel_of, thresholds
from .finitevol import RNG_ALGORITHM, broadcast_sample, root_marginal
from .model import ModelParams, graph_from_flat, preset
from .scan import ERROR_VERDICT, run_scan, write_csv

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    return str(o)


def _emit(obj, as_json: bool) -> None:
    if as_json:
        print(json.dumps(obj, indent=2, default=_json_default, allow_nan=True))
        return
    for key, val in obj.items():
        if isinstance(val, float):
            val = format(val, ".17g")
        print(f"{key} = {val}")


def load_config(path: str | os.PathLike | None) -> dict[str, str]:
    if not path:
        return {}
    cfg = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"bad config line {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = val
    return cfg


def _graph_of(args):
    if getattr(args, "adjacency", None):
        return graph_from_flat(args.adjacency)
    return preset(args.graph)


def cmd_solve(args) -> int:
    params = ModelParams.of(_graph_of(args), args.k, args.lam)
    if args.all:
        sols = solve_all_ti(params)
        points = [p.as_dict() for p in sols]
        out = {"count": sols.count, "solutions": points, "notes": list(sols.notes)}
    else:
        points = [solve_symmetric(params).as_dict()]
        out = dict(points[0])
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "z1", "z2", "residual", "symmetric"])
            for p in points:
                w.writerow([format(p["lambda"], ".17g"), format(p["z1"], ".17g"),
                            format(p["z2"], ".17g"), format(p["residual"], ".3e"), p["symmetric"]])
    if args.json or args.all:
        _emit(out, True)
    else:
        _emit(out, False)
    return EXIT_OK


def cmd_roots(args) -> int:
    graph = _graph_of(args)
    a = args.lam ** (1.0 / 3.0)
    prob = QuarticProblem(graph.name, a)
    pr = positive_root(graph.name, a)
    out = {
        "graph": graph.name,
        "lambda": args.lam,
        "a": a,
        "quartic": list(prob.coefficients),
        "t0": pr.t0,
        "branches": [
            {"label": b.label, "signs": list(b.signs), "value": b.value, "residual": b.residual,
             "valid": b.valid}
            for b in pr.branches
        ],
        "root": pr.x,
        "z": pr.z,
        "branch": pr.branch,
        "residual": pr.residual,
        "validated": pr.validated,
    }
    if args.json:
        _emit(out, True)
    else:
        c = prob.coefficients
        print(f"quartic: x^4 + ({c[1]:.12g})x^3 + ({c[2]:.12g})x^2 + ({c[3]:.12g})x + ({c[4]:.12g}) = 0")
        print(f"a = {a:.17g}   t0 = {pr.t0:.17g}")
        for b in pr.branches:
            val = "complex" if b.value is None else f"{b.value:.15g}  residual {b.residual:.3e}"
            print(f"  {b.label:<18} {val}{'  <- valid' if b.valid else ''}")
        print(f"root x = {pr.x:.17g}  (z = x^3 = {pr.z:.17g}) via {pr.branch}; "
              f"residual {pr.residual:.3e}; validated={pr.validated}")
    return EXIT_OK if pr.validated else EXIT_NUMERIC


def cmd_classify(args) -> int:
    rep = classify(ModelParams.of(_graph_of(args), args.k, args.lam))
    d = rep.as_dict()
    if args.json:
        _emit(d, True)
    else:
        print(f"verdict: {rep.verdict.value}")
        _emit({k: v for k, v in d.items() if k != "verdict"}, False)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    graph = _graph_of(args)
    th = thresholds(graph, args.k)
    out = {"graph": graph.name, "k": args.k, "thresholds": [t.as_dict() for t in th]}
    try:
        out["lambda_cr"] = str(lambda_cr(graph, args.k))
    except InvalidParameter:
        pass
    if args.json:
        _emit(out, True)
    else:
        for t in th:
            cf = "" if t.closed_form_lam is None else f"   closed form {t.closed_form_lam:.12g} (agree={t.routes_agree})"
            print(f"{t.lam:.12g}   z = {t.z:.12g}   {t.condition}{cf}")
        if not th:
            print("no threshold in [1e-4, 1e4]")
    return EXIT_OK


def cmd_scan(args) -> int:
    graph = _graph_of(args)
    recs = run_scan(graph, args.k, args.lam_min, args.lam_max, args.steps,
                    "log" if args.log else "linear", workers=args.workers)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(recs, fh)
    if args.json:
        _emit({"graph": graph.name, "k": args.k, "records": [r.as_dict() for r in recs]}, True)
    elif not args.csv:
        write_csv(recs, sys.stdout)
    failed = any(r.verdict == ERROR_VERDICT for r in recs)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_simulate(args) -> int:
    graph = _graph_of(args)
    fp = solve_symmetric(ModelParams.of(graph, args.k, args.lam))
    K = kernel_of(fp)
    pi = root_marginal(graph, args.k, args.lam, fp)
    st = broadcast_sample(K, pi, args.k, args.depth, args.samples, args.seed, workers=args.workers)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "p0", "p1", "p2", "correlation", "ratio"])
            for m in range(st.depth + 1):
                ratio = st.ratios[m - 1] if m else float("nan")
                w.writerow([m, *(format(v, ".17g") for v in st.level_marginals[m]),
                            format(st.correlation[m], ".17g"), format(ratio, ".17g")])
    out = {"graph": graph.name, "k": args.k, "lambda": args.lam, "z": fp.z1, "pi": pi.tolist(),
           "seed": args.seed, "rng": RNG_ALGORITHM, **st.as_dict()}
    if args.json:
        _emit(out, True)
    else:
        print(f"z = {fp.z1:.17g}  pi = {pi.tolist()}")
        print(f"samples = {st.samples}  depth = {st.depth}  violations = {st.violations}")
        for m in range(st.depth + 1):
            ratio = "" if m == 0 else f"  ratio {st.ratios[m - 1]:.5f}"
            marg = " ".join(f"{v:.5f}" for v in st.level_marginals[m])
            print(f"level {m:2d}: {marg}  corr {st.correlation[m]:.6g}{ratio}")
    return EXIT_OK if st.violations == 0 else EXIT_NUMERIC


def cmd_errata(args) -> int:
    rep = run_errata()
    if args.json:
        _emit(rep.as_dict(), True)
    else:
        print(rep.text())
    return EXIT_OK


def build_parser(defaults: dict[str, str] | None = None) -> argparse.ArgumentParser:
    defaults = defaults or {}

    def d(key, cast=str, fallback=None):
        return cast(defaults[key]) if key in defaults else fallback

    common = _Parser(add_help=False)
    common.add_argument("--graph", choices=["loop", "rod"], default=d("graph", str, "loop"))
    common.add_argument("--adjacency", default=d("adjacency"), help="row-major a00,a01,...,a22 (overrides --graph)")
    common.add_argument("--json", action="store_true", help="emit JSON")

    def k_opt(p):
        p.add_argument("--k", type=int, default=d("k", int, 3))

    def lam_opt(p, required=True):
        fallback = d("lambda", float)
        p.add_argument("--lambda", dest="lam", type=float, default=fallback,
                       required=required and fallback is None)

    workers = d("workers", int, 1)

    parser = _Parser(prog="fhc", description="Translation-invariant Gibbs measures of fertile "
                                              "three-state hard-core models on Cayley trees.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="fixed points of the tree recursion")
    k_opt(p)
    lam_opt(p)
    p.add_argument("--all", action="store_true", help="all translation-invariant solutions")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("roots", parents=[common], help="closed-form quartic roots (k = 3)")
    lam_opt(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("classify", parents=[common], help="extremality of the symmetric measure")
    k_opt(p)
    lam_opt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("thresholds", parents=[common], help="Kesten-Stigum thresholds in lambda")
    k_opt(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("scan", parents=[common], help="sweep lambda and write CSV")
    k_opt(p)
    p.add_argument("--lambda-min", dest="lam_min", type=float, default=d("lambda_min", float, 0.1))
    p.add_argument("--lambda-max", dest="lam_max", type=float, default=d("lambda_max", float, 10.0))
    p.add_argument("--steps", type=int, default=d("steps", int, 100))
    p.add_argument("--log", action="store_true", default=d("log", lambda s: s.lower() in ("1", "true", "yes"), False))
    p.add_argument("--csv", default=None)
    p.add_argument("--workers", type=int, default=workers)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo broadcast on the tree")
    k_opt(p)
    lam_opt(p)
    p.add_argument("--depth", type=int, default=d("depth", int, 10))
    p.add_argument("--samples", type=int, default=d("samples", int, 100_000))
    p.add_argument("--seed", type=int, default=d("seed", int, 20240601))
    p.add_argument("--csv", default=None)
    p.add_argument("--workers", type=int, default=workers)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("errata", parents=[common], help="computed versus published closed forms")
    p.set_defaults(func=cmd_errata)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = load_config(os.environ.get("FHC_CONFIG"))
    except (OSError, InvalidParameter) as exc:
        print(f"fhc: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser(cfg)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidParameter as exc:
        parser.print_usage(sys.stderr)
        print(f"fhc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FHCError as exc:
        print(f"fhc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"fhc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
