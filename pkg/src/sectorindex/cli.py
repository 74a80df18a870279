"""Command-line front end: generate, query, verify, bench, sweep, stats.

stdout carries machine-parseable output only (JSON or CSV); logs and the
resolved configuration echo go to stderr. Exit codes: 0 success, 1 I/O or
data errors, 2 usage errors, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import kernels
from .baselines import LinearScan, RegularIndex
from .bench import (
    DEFAULT_BRANCHING,
    DEFAULT_REGION,
    DEFAULT_TRUNCATION,
    METHODS,
    AngleTable,
    FixedAngle,
    GenConfig,
    TruncatedExponential,
    default_query_region,
    generate,
    run_bench,
    sweep,
    write_report_csv,
    write_report_json,
)
from .errors import (
    DegenerateInput,
    EmptyTree,
    InvalidConfig,
    InvalidRect,
    ParseError,
    RangeError,
)
from .geometry import NormalLine, Rect
from .indexes import AffineDualIndex, PolarDualIndex
from .sectors import SectorSet, load_sectors, save_sectors

log = logging.getLogger("sectorindex")

INDEX_CHOICES = ("dual-polar", "dual-affine", "regular", "linear")


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise InvalidConfig(f"{what} needs {count} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InvalidConfig(f"bad number in {what}: {text!r}") from None


def _parse_region(text: str) -> Rect:
    return Rect(*_parse_floats(text, 4, "--region"))


def _echo_config(command: str, args: argparse.Namespace) -> None:
    cfg = {
        k: v
        for k, v in vars(args).items()
        if k != "func" and not k.startswith("_")
    }
    log.info("%s config: %s", command, json.dumps(cfg, default=str, sort_keys=True))


def _angle_dist(args):
    if getattr(args, "angle_table", None):
        return AngleTable.from_csv(args.angle_table)
    if getattr(args, "angle_fixed", None) is not None:
        return FixedAngle(args.angle_fixed)
    return TruncatedExponential(args.angle_mean, args.angle_max)


def _sectors_from_args(args) -> SectorSet:
    if getattr(args, "data", None):
        return load_sectors(args.data)
    if getattr(args, "n", None) is None:
        raise InvalidConfig("provide --data FILE or --n COUNT")
    cfg = GenConfig(
        n=args.n,
        region=_parse_region(args.region),
        angle_dist=_angle_dist(args),
        seed=args.seed,
    )
    return generate(cfg)


def _build_index(name: str, sectors: SectorSet, branching: int, radius: float):
    if name == "dual-polar":
        return PolarDualIndex.build(sectors, branching)
    if name == "dual-affine":
        return AffineDualIndex.build(sectors, branching)
    if name == "regular":
        return RegularIndex.build(sectors, radius, branching)
    if name == "linear":
        return LinearScan(sectors)
    raise InvalidConfig(f"unknown index {name!r}")


def _add_gen_flags(p: argparse.ArgumentParser, n_required: bool = False) -> None:
    p.add_argument("--n", type=int, required=n_required, help="number of sectors")
    p.add_argument("--region", default="0,0,10000,10000",
                   help="generation region minx,miny,maxx,maxy (meters)")
    p.add_argument("--angle-mean", type=float, default=0.952,
                   help="mean of the truncated-exponential angle law (degrees)")
    p.add_argument("--angle-max", type=float, default=10.0,
                   help="truncation of the angle law (degrees)")
    p.add_argument("--angle-fixed", type=float, default=None,
                   help="use one fixed angle (degrees) instead")
    p.add_argument("--angle-table", default=None,
                   help="CSV angle_deg,weight discrete distribution instead")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")


def _add_tree_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING,
                   help="R-tree branching factor")
    p.add_argument("--radius", type=float, default=DEFAULT_TRUNCATION,
                   help="truncation radius for the regular index (meters)")
    p.add_argument("--backend", default="auto",
                   choices=("auto", "compiled", "python"),
                   help="query kernel backend")


def cmd_generate(args) -> int:
    _echo_config("generate", args)
    cfg = GenConfig(
        n=args.n,
        region=_parse_region(args.region),
        angle_dist=_angle_dist(args),
        seed=args.seed,
    )
    sectors = generate(cfg)
    save_sectors(args.out, sectors)
    log.info("wrote %d sectors to %s", len(sectors), args.out)
    return 0


def _query_result_json(res, sectors: SectorSet) -> dict:
    return {
        "hits": [int(i) for i in sectors.ids[res.hits]],
        "candidate_count": int(res.candidate_count),
        "node_visits": int(res.node_visits),
    }


def cmd_query(args) -> int:
    _echo_config("query", args)
    if args.point is None and args.line is None:
        raise InvalidConfig("provide --point x,y and/or --line theta,rho")
    sectors = load_sectors(args.data)
    index = _build_index(args.index, sectors, args.branching, args.radius)
    kernel = kernels.get(args.backend)
    out = {"index": args.index, "n": len(sectors)}
    if args.point is not None:
        x, y = _parse_floats(args.point, 2, "--point")
        out["point"] = [x, y]
        out["point_result"] = _query_result_json(
            index.query_point(x, y, kernel=kernel), sectors
        )
    if args.line is not None:
        theta, rho = _parse_floats(args.line, 2, "--line")
        line = NormalLine(theta, rho)
        out["line"] = [line.theta, line.rho]
        out["line_result"] = _query_result_json(
            index.query_direction(line, kernel=kernel), sectors
        )
    print(json.dumps(out))
    return 0


def cmd_verify(args) -> int:
    _echo_config("verify", args)
    cfg = GenConfig(n=args.n, seed=args.seed)
    sectors = generate(cfg)
    kernel = kernels.get(args.backend)
    linear = LinearScan(sectors)
    indexes = {
        "dual-polar": PolarDualIndex.build(sectors, args.branching),
        "dual-affine": AffineDualIndex.build(sectors, args.branching),
        "regular": RegularIndex.build(sectors, DEFAULT_TRUNCATION, args.branching),
    }
    if args.inject_fault and len(sectors):
        # negative control: push every polar leaf rectangle out of place
        flat = indexes["dual-polar"].tree.flat()
        flat.ent_bounds[:, 1] += 1e6
        flat.ent_bounds[:, 3] += 1e6

    region = default_query_region(sectors)
    rng = np.random.default_rng(args.seed)
    qx = rng.uniform(region.min_x, region.max_x, args.queries)
    qy = rng.uniform(region.min_y, region.max_y, args.queries)
    for i in range(args.queries):
        expected = linear.query_point(float(qx[i]), float(qy[i]), kernel=kernel).hits
        for name, idx in indexes.items():
            got = idx.query_point(float(qx[i]), float(qy[i]), kernel=kernel).hits
            if not np.array_equal(expected, got):
                print(
                    json.dumps(
                        {
                            "status": "mismatch",
                            "method": name,
                            "query": [float(qx[i]), float(qy[i])],
                            "expected": [int(v) for v in expected],
                            "got": [int(v) for v in got],
                        }
                    )
                )
                return 3
    print(
        json.dumps(
            {
                "status": "ok",
                "n": args.n,
                "queries": args.queries,
                "seed": args.seed,
                "discrepancies": 0,
            }
        )
    )
    return 0


def _emit_reports(reports, out_prefix: str | None) -> None:
    write_report_csv(reports, sys.stdout)
    if out_prefix:
        with open(out_prefix + ".csv", "w", newline="", encoding="utf-8") as fh:
            write_report_csv(reports, fh)
        with open(out_prefix + ".json", "w", encoding="utf-8") as fh:
            write_report_json(reports, fh)
        log.info("wrote %s.csv and %s.json", out_prefix, out_prefix)


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    for m in methods:
        if m not in METHODS:
            raise InvalidConfig(f"unknown method {m!r}; choose from {METHODS}")
    if not methods:
        raise InvalidConfig("no methods given")
    return methods


def cmd_bench(args) -> int:
    _echo_config("bench", args)
    sectors = _sectors_from_args(args)
    methods = _parse_methods(args.methods)
    backends = ("compiled", "python") if args.backend == "both" else (args.backend,)
    reports = []
    for backend in backends:
        reports.extend(
            run_bench(
                sectors,
                methods,
                queries=args.queries,
                branching=args.branching,
                truncation_radius=args.radius,
                seed=args.seed,
                repeats=args.repeats,
                backend=backend,
            )
        )
    _emit_reports(reports, args.out)
    return 0


def cmd_sweep(args) -> int:
    _echo_config("sweep", args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    methods = _parse_methods(args.methods)
    base = GenConfig(
        n=args.n if args.n is not None else 0,
        region=_parse_region(args.region),
        angle_dist=_angle_dist(args),
        seed=args.seed,
    )
    reports = sweep(
        args.axis,
        values,
        base,
        methods,
        queries=args.queries,
        branching=args.branching,
        seed=args.seed,
        repeats=args.repeats,
        backend=args.backend,
        truncation_radius=args.radius,
    )
    _emit_reports(reports, args.out)
    return 0


def cmd_stats(args) -> int:
    _echo_config("stats", args)
    sectors = _sectors_from_args(args)
    index = _build_index(args.index, sectors, args.branching, args.radius)
    if args.index == "dual-affine":
        trees = [("H", index.tree_h), ("V", index.tree_v)]
    else:
        trees = [(args.index, index.tree)]
    out = {"index": args.index, "n": len(sectors), "trees": []}
    for label, tree in trees:
        entry = {"tree": label, "entries": len(tree)}
        if len(tree):
            for variant in ("sum", "union"):
                s = tree.stats(variant)
                entry[variant] = {
                    "mean_coverage": s.mean_coverage,
                    "mean_overlap": s.mean_overlap,
                    "node_count": s.node_count,
                    "height": s.height,
                }
        out["trees"].append(entry)
    print(json.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorindex",
        description="Dual-space R-tree indexing and benchmarks for angular sectors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic sector CSV")
    _add_gen_flags(p, n_required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("query", help="run one point and/or directional query")
    p.add_argument("--index", required=True, choices=INDEX_CHOICES)
    p.add_argument("--data", required=True, help="sector CSV path")
    p.add_argument("--point", default=None, help="query point x,y (meters)")
    p.add_argument("--line", default=None, help="query line theta,rho (radians, meters)")
    _add_tree_flags(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="cross-method equality gate")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING)
    p.add_argument("--backend", default="auto",
                   choices=("auto", "compiled", "python"))
    p.add_argument("--inject-fault", action="store_true",
                   help="corrupt the polar tree first (negative control)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="benchmark methods on one dataset")
    p.add_argument("--data", default=None, help="sector CSV path (else generate)")
    _add_gen_flags(p)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING)
    p.add_argument("--radius", type=float, default=DEFAULT_TRUNCATION)
    p.add_argument("--backend", default="auto",
                   choices=("auto", "compiled", "python", "both"))
    p.add_argument("--out", default=None, help="report file prefix")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="benchmark along n or truncation radius")
    p.add_argument("--axis", required=True, choices=("n", "radius"))
    p.add_argument("--values", required=True, help="ascending comma-separated values")
    _add_gen_flags(p)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING)
    p.add_argument("--radius", type=float, default=DEFAULT_TRUNCATION)
    p.add_argument("--backend", default="auto",
                   choices=("auto", "compiled", "python"))
    p.add_argument("--out", default=None, help="report file prefix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="coverage/overlap statistics of one index")
    p.add_argument("--index", required=True,
                   choices=("dual-polar", "dual-affine", "regular"))
    p.add_argument("--data", default=None, help="sector CSV path (else generate)")
    _add_gen_flags(p)
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING)
    p.add_argument("--radius", type=float, default=DEFAULT_TRUNCATION)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("SECTORINDEX_LOG", "INFO").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, InvalidRect) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, RangeError, DegenerateInput, EmptyTree, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
