"""Command line interface: fit, test, autok, simulate and tunnel commands.

Every randomized command takes an explicit --seed and produces byte
identical output files when repeated with the same arguments.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import io as cgio
from .equality_test import BootstrapConfig, estimate_curves, test_h0k
from .errors import CurveGroupsError, ParseError
from .selection import select_k
from .simulation import ScenarioSpec, run_monte_carlo
from .types import CurveCollection, EvaluationGrid, Kernel, Norm


def _kernel(name: str) -> Kernel:
    return Kernel.GAUSSIAN if name == "gaussian" else Kernel.EPANECHNIKOV


def _norm(name: str) -> Norm:
    return Norm.KS if name == "ks" else Norm.CM


def _add_common_test_args(p, with_k_max=False):
    p.add_argument("--norm", choices=["cm", "ks"], default="cm")
    p.add_argument("--boot", type=int, default=500,
                   help="bootstrap replicates B")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--kernel", choices=["epanechnikov", "gaussian"],
                   default="epanechnikov")
    if with_k_max:
        p.add_argument("--kmax", type=int, default=None,
                       help="largest K to try (default: number of curves)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvegroups",
        description="Group nonparametric regression curves by bootstrap "
                    "equality testing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="per-curve estimates and CV bandwidths")
    p.add_argument("--input", required=True)
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--kernel", choices=["epanechnikov", "gaussian"],
                   default="epanechnikov")
    p.add_argument("--output", required=True)

    p = sub.add_parser("test", help="single H0(K) wild-bootstrap test")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common_test_args(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("autok", help="sequential selection of the number "
                                     "of groups")
    p.add_argument("--input", required=True)
    _add_common_test_args(p, with_k_max=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo experiments")
    p.add_argument("--scenario", required=True,
                   help="three:R#:V#, thirty or onetwenty")
    p.add_argument("--a", type=float, default=0.0,
                   help="block-5 shift of the thirty-curve scenario")
    p.add_argument("--n", required=True,
                   help="comma-separated per-curve sizes, or a single total "
                        "(thirty) / per-curve size (onetwenty)")
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--metric", choices=["reject", "select_k"],
                   default="reject")
    p.add_argument("--k", type=int, default=1, help="K for metric=reject")
    p.add_argument("--variance-mode",
                   choices=["homoscedastic", "heteroscedastic"],
                   default="homoscedastic")
    _add_common_test_args(p, with_k_max=True)
    p.add_argument("--output", required=True)
    p.add_argument("--csv", default=None, help="optional per-run CSV path")

    p = sub.add_parser("tunnel", help="polar transform + automatic grouping "
                                      "of cross-sections")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["cartesian", "polar"],
                   default="cartesian")
    _add_common_test_args(p, with_k_max=True)
    p.add_argument("--output", required=True, help="JSON result path")
    p.add_argument("--profile", default=None,
                   help="plot-ready angle,radius,group CSV path")
    return parser


def _read_sections(path) -> list:
    sections = []
    order = []
    pts = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 3:
            raise ParseError(1, "expected header 'section_id,x,y'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 3:
                raise ParseError(lineno, f"expected 3 fields, got {len(row)}")
            sid = row[0].strip()
            try:
                x, y = float(row[1]), float(row[2])
            except ValueError:
                raise ParseError(lineno,
                                 f"malformed real in {row[1:3]!r}") from None
            if sid not in pts:
                order.append(sid)
                pts[sid] = ([], [])
            pts[sid][0].append(x)
            pts[sid][1].append(y)
    for sid in order:
        sections.append(cgio.PointCloudSection(sid, pts[sid][0], pts[sid][1]))
    return sections


def _parse_sizes(text: str, family: str):
    parts = [p for p in text.split(",") if p.strip()]
    values = [int(p) for p in parts]
    if family == "three":
        if len(values) != 3:
            raise ValueError("three-curve scenario needs --n n1,n2,n3")
        return tuple(values), None
    if family == "thirty":
        if len(values) == 1:
            return None, values[0]
        if len(values) == 30:
            return tuple(values), None
        raise ValueError("thirty scenario needs a single total or 30 sizes")
    if len(values) == 1:
        return tuple(values * 120), None
    if len(values) == 120:
        return tuple(values), None
    raise ValueError("onetwenty scenario needs one size or 120 sizes")


def _scenario_from_args(args) -> ScenarioSpec:
    parts = args.scenario.split(":")
    family = parts[0]
    if family == "three":
        if len(parts) != 3:
            raise ValueError("use --scenario three:R#:V#")
        sizes, _ = _parse_sizes(args.n, "three")
        return ScenarioSpec(family="three", mean_id=parts[1],
                            var_id=parts[2], sample_sizes=sizes)
    if family == "thirty":
        sizes, total = _parse_sizes(args.n, "thirty")
        return ScenarioSpec(family="thirty", a=args.a,
                            variance_mode=args.variance_mode,
                            sample_sizes=sizes, n_total=total)
    if family == "onetwenty":
        sizes, _ = _parse_sizes(args.n, "onetwenty")
        return ScenarioSpec(family="onetwenty", sample_sizes=sizes)
    raise ValueError(f"unknown scenario {args.scenario!r}")


def _cmd_fit(args) -> None:
    collection = cgio.read_curves_csv(args.input)
    grid = EvaluationGrid.for_collection(collection, size=args.grid_size)
    est = estimate_curves(collection, grid, kernel=_kernel(args.kernel))
    cgio.write_result_json(est, args.output)


def _cmd_test(args) -> None:
    collection = cgio.read_curves_csv(args.input)
    grid = EvaluationGrid.for_collection(collection, size=args.grid_size)
    cfg = BootstrapConfig(n_boot=args.boot, alpha=args.alpha, seed=args.seed)
    res = test_h0k(collection, args.k, _norm(args.norm), cfg,
                   kernel=_kernel(args.kernel), grid=grid)
    cgio.write_result_json(res, args.output)


def _cmd_autok(args) -> None:
    collection = cgio.read_curves_csv(args.input)
    grid = EvaluationGrid.for_collection(collection, size=args.grid_size)
    cfg = BootstrapConfig(n_boot=args.boot, alpha=args.alpha, seed=args.seed)
    trace = select_k(collection, _norm(args.norm), cfg,
                     kernel=_kernel(args.kernel), grid=grid, k_max=args.kmax)
    cgio.write_result_json(trace, args.output)


def _cmd_simulate(args) -> None:
    spec = _scenario_from_args(args)
    report = run_monte_carlo(
        spec, args.runs, metric=args.metric, n_groups=args.k,
        norm=_norm(args.norm), n_boot=args.boot, alpha=args.alpha,
        seed=args.seed, k_max=args.kmax, kernel=_kernel(args.kernel),
        grid_size=args.grid_size)
    report.to_json(args.output)
    if args.csv:
        report.to_csv(args.csv)


def _cmd_tunnel(args) -> None:
    if args.format == "cartesian":
        sections = _read_sections(args.input)
        samples = tuple(cgio.to_polar(s) for s in sections)
        collection = CurveCollection(samples)
    else:
        collection = cgio.read_curves_csv(args.input)
    # full-circle profiles: no trim of the common angle range
    grid = EvaluationGrid.for_collection(collection, size=args.grid_size,
                                         trim=0.0)
    cfg = BootstrapConfig(n_boot=args.boot, alpha=args.alpha, seed=args.seed)
    kernel = _kernel(args.kernel)
    trace = select_k(collection, _norm(args.norm), cfg, kernel=kernel,
                     grid=grid, k_max=args.kmax)
    cgio.write_result_json(trace, args.output)
    if args.profile:
        est = estimate_curves(collection, grid, kernel=kernel)
        labels = trace.final_partition.assignment
        rows = []
        for j, cid in enumerate(est.curve_ids):
            for angle, radius in zip(grid.points, est.values[j]):
                rows.append((cid, angle, radius, int(labels[j])))
        cgio.write_profile_csv(rows, args.profile)


_COMMANDS = {
    "fit": _cmd_fit,
    "test": _cmd_test,
    "autok": _cmd_autok,
    "simulate": _cmd_simulate,
    "tunnel": _cmd_tunnel,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (CurveGroupsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
