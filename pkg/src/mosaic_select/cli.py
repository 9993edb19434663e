"""Command line interface.

Exit codes: 0 success (including a PARTIAL front under budget), 2 invalid
input or usage, 3 proven infeasible, 4 internal error.  File arguments
accept "-" for stdin/stdout.  Each subcommand takes --config pointing at a
JSON object whose keys are flag names (dashes or underscores); explicit
flags win over config values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import frontier, instance, render, solver
from .export import OBJECTIVE_CHOICES, export_lp
from .geometry import SimplePolygon
from .instance import SchemaError
from .objectives import OBJECTIVE_NAMES
from .preprocess import assign_clouds, discretize
from .preprocess import preprocess as preprocess_problem

_ALGORITHMS = ("gavanelli", "saugmencon", "brute")


def _parse_pair(text: str, flag: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise ValueError(f"{flag} expects LO:HI, got {text!r}") from None


def _parse_vector(text: str, flag: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"{flag} expects four comma-separated integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ValueError(f"{flag} expects four comma-separated integers, got {text!r}") from None


def _budget(args) -> solver.Budget:
    return solver.Budget(max_ms=args.budget_ms, max_nodes=args.budget_nodes)


def _objective_index(name: str) -> int:
    return OBJECTIVE_NAMES.index(name)


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_generate(args) -> int:
    problem = instance.generate_synthetic(
        args.width, args.height, args.images, args.seed,
        cost_range=_parse_pair(args.cost_range, "--cost-range"),
        resolution_range=_parse_pair(args.resolution_range, "--resolution-range"),
        angle_range=_parse_pair(args.angle_range, "--angle-range"),
        cloud_range=_parse_pair(args.cloud_range, "--cloud-range"),
    )
    instance.save_raw(problem, args.output)
    return 0


def _load_aoi(args) -> SimplePolygon:
    if (args.aoi is None) == (args.aoi_bounds is None):
        raise ValueError("exactly one of --aoi and --aoi-bounds is required")
    if args.aoi_bounds is not None:
        try:
            minx, miny, maxx, maxy = (float(v) for v in args.aoi_bounds.split(","))
        except ValueError:
            raise ValueError(f"--aoi-bounds expects minx,miny,maxx,maxy, got {args.aoi_bounds!r}") from None
        return SimplePolygon([(minx, miny), (maxx, miny), (maxx, maxy), (minx, maxy)])
    doc = instance._read_json(args.aoi)
    if isinstance(doc, dict) and doc.get("type") == "Feature":
        doc = doc.get("geometry")
    try:
        return SimplePolygon.from_geojson(doc)
    except (ValueError, TypeError) as exc:
        raise SchemaError(str(args.aoi), str(exc)) from exc


def _cmd_ingest(args) -> int:
    aoi = _load_aoi(args)
    result = instance.ingest_catalog(args.catalog, price_field=args.price_field)
    aoi_shp = aoi.to_shapely()
    kept = []
    skipped = list(result.skipped)
    for rec in result.records:
        if rec.footprint.to_shapely().intersection(aoi_shp).area <= 0.0:
            skipped.append((rec.id, "footprint does not intersect the AOI"))
        else:
            kept.append(rec)
    for item_id, reason in skipped:
        print(f"skipped {item_id}: {reason}", file=sys.stderr)
    if not kept:
        raise SchemaError("", "no usable items intersect the AOI")
    problem = instance.RawProblem(aoi=aoi, images=tuple(kept))
    instance.save_raw(problem, args.output)
    return 0


def _cmd_preprocess(args) -> int:
    raw = instance.load_raw(args.input)
    inst, report = preprocess_problem(raw, args.cloud_seed)
    if args.no_provenance:
        inst = replace(inst, provenance=None)
    instance.save_discrete(inst, args.output)
    if args.report == "text":
        sys.stderr.write(report.to_text())
    if args.report_json:
        instance.write_text(args.report_json, json.dumps(report.to_json(), indent=2) + "\n")
    return 0


def _cmd_solve(args) -> int:
    inst = instance.load_discrete(args.input)
    budget = _budget(args)
    if args.algorithm == "gavanelli":
        front = frontier.pareto_gavanelli(inst, budget)
    elif args.algorithm == "saugmencon":
        front = frontier.saugmencon(inst, _objective_index(args.main_objective), budget)
    else:
        front = frontier.brute_force_front(inst)
    if budget.max_ms is not None or budget.max_nodes is not None:
        front.meta["budget"] = {"max_ms": budget.max_ms, "max_nodes": budget.max_nodes}
    frontier.save_front(front, args.output)
    if front.status == frontier.COMPLETE and not front.points:
        print("error: no cover exists under the given constraints", file=sys.stderr)
        return 3
    return 0


def _cmd_export_lp(args) -> int:
    inst = instance.load_discrete(args.input)
    weights = _parse_vector(args.weights, "--weights") if args.weights else None
    bounds = {}
    for entry in args.bound or ():
        name, _, value = entry.partition("=")
        if not value:
            raise ValueError(f"--bound expects NAME=VALUE, got {entry!r}")
        try:
            bounds[name] = int(value)
        except ValueError:
            raise ValueError(f"--bound value must be an integer, got {entry!r}") from None
    text = export_lp(inst, objective=args.objective, weights=weights, bounds=bounds or None)
    instance.write_text(args.output, text)
    return 0


def _cmd_hypervolume(args) -> int:
    front = frontier.load_front(args.front)
    if args.reference == "auto":
        reference = front.reference
    else:
        reference = _parse_vector(args.reference, "--reference")
    print(frontier.hypervolume(front, reference))
    return 0


def _cmd_score(args) -> int:
    fronts = [(path, frontier.load_front(path)) for path in args.fronts]
    if args.reference is not None:
        reference = _parse_vector(args.reference, "--reference")
    else:
        references = {tuple(f.reference) for _, f in fronts}
        if len(references) > 1:
            raise ValueError("fronts disagree on the reference point; pass --reference")
        reference = fronts[0][1].reference
    values = {path: frontier.hypervolume(front, reference) for path, front in fronts}
    for path, value in frontier.score(values).items():
        print(f"{path}: {value}")
    return 0


def _cmd_render(args) -> int:
    raw = instance.load_raw(args.raw)
    inst = assign_clouds(discretize(raw), raw, args.cloud_seed)
    taken = None
    if args.images and args.front:
        raise ValueError("pass either --images or --front, not both")
    if args.images:
        wanted = [s for s in args.images.split(",") if s]
        index = {img_id: i for i, img_id in enumerate(inst.ids)}
        taken = set()
        for img_id in wanted:
            if img_id not in index:
                raise ValueError(f"unknown image id {img_id!r}")
            taken.add(index[img_id])
    elif args.front:
        front = frontier.load_front(args.front)
        if not front.points:
            raise ValueError("front has no points to render")
        if not 0 <= args.point < len(front.points):
            raise ValueError(f"--point {args.point} outside 0..{len(front.points) - 1}")
        index = {img_id: i for i, img_id in enumerate(inst.ids)}
        taken = set()
        for img_id in front.points[args.point].images:
            if img_id not in index:
                raise ValueError(f"front references unknown image id {img_id!r}")
            taken.add(index[img_id])
    instance.write_text(args.output, render.render_svg(raw, inst, taken))
    return 0


def _bench_one(seed: int, args):
    problem = instance.generate_synthetic(args.width, args.height, args.images, seed)
    inst, _ = preprocess_problem(problem, args.cloud_seed)
    budget = _budget(args)
    rows = []
    hv = {}
    for algorithm in args.algorithm_list:
        if algorithm == "gavanelli":
            front = frontier.pareto_gavanelli(inst, budget)
        elif algorithm == "saugmencon":
            front = frontier.saugmencon(inst, budget=budget)
        else:
            front = frontier.brute_force_front(inst)
        stats = front.meta.get("stats", {})
        hv[algorithm] = frontier.hypervolume(front, front.reference)
        rows.append({
            "seed": seed,
            "images": inst.m,
            "parts": inst.n,
            "algorithm": algorithm,
            "status": front.status,
            "points": len(front.points),
            "hypervolume": hv[algorithm],
            "score": 0.0,
            "nodes": stats.get("nodes", 0),
            "elapsed_ms": stats.get("elapsed_ms", 0.0),
        })
    scores = frontier.score(hv)
    for row in rows:
        row["score"] = round(scores[row["algorithm"]], 6)
    return rows


def _cmd_bench(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",") if s]
    if not seeds:
        raise ValueError("--seeds must name at least one seed")
    args.algorithm_list = [a for a in args.algorithms.split(",") if a]
    for a in args.algorithm_list:
        if a not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    threads = max(1, int(os.environ.get("MOSAIC_SELECT_THREADS", "1")))
    if threads == 1 or len(seeds) == 1:
        results = [_bench_one(seed, args) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, len(seeds))) as pool:
            results = list(pool.map(lambda s: _bench_one(s, args), seeds))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=[
        "seed", "images", "parts", "algorithm", "status", "points",
        "hypervolume", "score", "nodes", "elapsed_ms",
    ])
    writer.writeheader()
    for rows in results:
        for row in rows:
            writer.writerow(row)
    instance.write_text(args.output, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mosaic-select",
        description="Exact multi-objective selection of satellite image mosaics.",
    )
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    registry = {}

    def sub(name, func, help_text):
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON file with default flag values")
        p.set_defaults(func=func)
        registry[name] = p
        return p

    p = sub("generate", _cmd_generate, "generate a seeded synthetic raw problem")
    p.add_argument("--width", type=float, default=1000.0, help="AOI width in meters")
    p.add_argument("--height", type=float, default=1000.0, help="AOI height in meters")
    p.add_argument("--images", type=int, default=30, help="number of candidate images")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost-range", default="50000:500000", metavar="LO:HI")
    p.add_argument("--resolution-range", default="900:6400", metavar="LO:HI")
    p.add_argument("--angle-range", default="50:400", metavar="LO:HI")
    p.add_argument("--cloud-range", default="0:60", metavar="LO:HI")
    p.add_argument("-o", "--output", default="-")

    p = sub("ingest", _cmd_ingest, "read a STAC-style item collection into a raw problem")
    p.add_argument("catalog", help="item collection JSON (or - for stdin)")
    p.add_argument("--aoi", default=None, help="GeoJSON file with the AOI polygon")
    p.add_argument("--aoi-bounds", default=None, metavar="MINX,MINY,MAXX,MAXY")
    p.add_argument("--price-field", default="price", help="dot-path of the price inside item properties")
    p.add_argument("-o", "--output", default="-")

    p = sub("preprocess", _cmd_preprocess, "discretize a raw problem and allocate clouds")
    p.add_argument("input", help="raw problem JSON (or -)")
    p.add_argument("--cloud-seed", type=int, default=0)
    p.add_argument("--report", choices=("text", "none"), default="text", help="progress report on stderr")
    p.add_argument("--report-json", default=None, metavar="PATH")
    p.add_argument("--no-provenance", action="store_true", help="drop part geometry from the output")
    p.add_argument("-o", "--output", default="-")

    p = sub("solve", _cmd_solve, "enumerate the Pareto front of a discrete instance")
    p.add_argument("input", help="discrete instance JSON (or -)")
    p.add_argument("--algorithm", choices=_ALGORITHMS, default="gavanelli")
    p.add_argument("--main-objective", choices=OBJECTIVE_NAMES, default="cost",
                   help="main objective for saugmencon")
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("-o", "--output", default="-")

    p = sub("export-lp", _cmd_export_lp, "write the instance as a CPLEX-style LP model")
    p.add_argument("input", help="discrete instance JSON (or -)")
    p.add_argument("--objective", choices=OBJECTIVE_CHOICES, default="cost")
    p.add_argument("--weights", default=None, metavar="C,CL,R,I",
                   help="weights for --objective weighted")
    p.add_argument("--bound", action="append", metavar="NAME=VALUE",
                   help="epsilon upper bound row (repeatable)")
    p.add_argument("-o", "--output", default="-")

    p = sub("hypervolume", _cmd_hypervolume, "exact hypervolume of a front file")
    p.add_argument("front", help="front JSON (or -)")
    p.add_argument("--reference", default="auto", metavar="C,CL,R,I",
                   help='reference point, or "auto" for the one stored in the front')

    p = sub("score", _cmd_score, "normalized hypervolume scores across front files")
    p.add_argument("fronts", nargs="+", help="front JSON files")
    p.add_argument("--reference", default=None, metavar="C,CL,R,I")

    p = sub("render", _cmd_render, "render the partition (and optionally a cover) as SVG")
    p.add_argument("--raw", required=True, help="raw problem JSON")
    p.add_argument("--cloud-seed", type=int, default=0)
    p.add_argument("--front", default=None, help="front JSON supplying the cover")
    p.add_argument("--point", type=int, default=0, help="front point index to render")
    p.add_argument("--images", default=None, metavar="ID,ID,...", help="explicit cover image ids")
    p.add_argument("-o", "--output", default="-")

    p = sub("bench", _cmd_bench, "seeded benchmark sweep, CSV output")
    p.add_argument("--seeds", default="1,2,3,4,5", metavar="S1,S2,...")
    p.add_argument("--images", type=int, default=30)
    p.add_argument("--width", type=float, default=1000.0)
    p.add_argument("--height", type=float, default=1000.0)
    p.add_argument("--cloud-seed", type=int, default=0)
    p.add_argument("--algorithms", default="gavanelli,saugmencon")
    p.add_argument("--budget-ms", type=float, default=10000.0)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("-o", "--output", default="-")

    return parser, registry


def _apply_config(argv, registry) -> None:
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            return  # argparse will report the missing value
        path = argv[idx + 1]
    else:
        path = next((a.split("=", 1)[1] for a in argv if a.startswith("--config=")), None)
        if path is None:
            return
    command = next((a for a in argv if not a.startswith("-")), None)
    if command not in registry:
        return
    doc = instance._read_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(str(path), "config must be a JSON object of flag values")
    registry[command].set_defaults(**{k.replace("-", "_"): v for k, v in doc.items()})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        _apply_config(argv, registry)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args) or 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
