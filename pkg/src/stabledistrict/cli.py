"""Command-line interface: solve, verify, bench, render, generate.

Exit codes are part of the contract: 0 success, 1 unreadable input
(parse errors, id mismatches), 2 infeasible instance (quota sum, bad
centers, disconnected graph without --largest-component), 3 memory-cap
refusal, 4 verification found the assignment unstable. Given fixed seeds,
every invocation writes byte-identical TSV/CSV/SVG/GeoJSON files; wall
times go to stderr or, in bench CSV, to the one column documented as
nondeterministic.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench as bench_mod
from .gale_shapley import DEFAULT_MEMORY_CAP_BYTES
from .graph import GraphError, ParseError, RoadGraph, largest_component, parse_dimacs, parse_tsv, write_tsv
from .model import (
    BlockingPair,
    Instance,
    InstanceError,
    MemoryCapExceeded,
    QuotaViolation,
    assignment_summary_json,
    assignment_to_tsv,
    compute_center_distances,
    equal_quotas,
    parse_assignment_tsv,
    verify_stable,
)
from .render import render_geojson, render_svg


def _load_graph(args) -> RoadGraph:
    with open(args.graph, "r", encoding="utf-8") as fh:
        if args.graph.endswith(".gr"):
            if args.co:
                with open(args.co, "r", encoding="utf-8") as co_fh:
                    g = parse_dimacs(fh, co_fh)
            else:
                g = parse_dimacs(fh)
        else:
            g = parse_tsv(fh)
    if getattr(args, "largest_component", False):
        trimmed = largest_component(g)
        if trimmed.node_count != g.node_count:
            print(
                f"largest-component: kept {trimmed.node_count} of {g.node_count} nodes,"
                f" {trimmed.edge_count} of {g.edge_count} edges",
                file=sys.stderr,
            )
        g = trimmed
    return g


def _read_int_lines(path: str) -> list[int]:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values.append(int(line))
    return values


def _resolve_centers(args, g: RoadGraph) -> list[int]:
    if args.random_centers is not None:
        return bench_mod.sample_centers(g.node_count, args.random_centers, args.seed)
    original = _read_int_lines(args.centers)
    dense = []
    for oid in original:
        if not g.has_original_id(oid):
            raise InstanceError(f"center id {oid} not present in the graph")
        dense.append(g.dense_id(oid))
    return dense


def _resolve_quotas(args, g: RoadGraph, k: int) -> list[int]:
    if args.quotas == "equal":
        return equal_quotas(g.node_count, k)
    quotas = _read_int_lines(args.quotas)
    if len(quotas) != k:
        raise InstanceError(f"quota file has {len(quotas)} entries for {k} centers")
    return quotas


def _memory_cap(args) -> int | None:
    if args.no_memory_cap:
        return None
    return args.memory_cap


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_solve(args) -> int:
    g = _load_graph(args)
    centers = _resolve_centers(args, g)
    quotas = _resolve_quotas(args, g, len(centers))
    inst = Instance(g, centers, quotas)
    trace_fh = open(args.trace, "w", encoding="utf-8", newline="") if args.trace else None
    try:
        start = time.perf_counter()
        assignment, _ = bench_mod.run_algorithm(
            args.algo, inst, _memory_cap(args), trace=trace_fh
        )
        elapsed_ms = (time.perf_counter() - start) * 1000.0
    finally:
        if trace_fh:
            trace_fh.close()
    print(
        f"n={g.node_count} m={g.edge_count} k={inst.k}"
        f" algorithm={args.algo} time_ms={elapsed_ms:.1f}",
        file=sys.stderr,
    )
    _write_text(args.output, assignment_to_tsv(inst, assignment))
    if args.summary:
        _write_text(args.summary, assignment_summary_json(inst, assignment))
    return 0


def cmd_verify(args) -> int:
    g = _load_graph(args)
    centers = _resolve_centers(args, g)
    quotas = _resolve_quotas(args, g, len(centers))
    inst = Instance(g, centers, quotas)
    with open(args.assignment, "r", encoding="utf-8") as fh:
        assignment = parse_assignment_tsv(fh.read(), g, centers)
    verdict = verify_stable(inst, assignment, compute_center_distances(inst))
    if verdict is None:
        print("STABLE")
        return 0
    if isinstance(verdict, QuotaViolation):
        center_id = g.original_ids[centers[verdict.center]]
        print(
            f"UNSTABLE quota violation: center {center_id}"
            f" expected {verdict.expected} nodes, got {verdict.actual}"
        )
        return 4
    assert isinstance(verdict, BlockingPair)
    node_id = g.original_ids[verdict.node]
    center_id = g.original_ids[centers[verdict.center]]
    print(
        f"UNSTABLE blocking pair: node {node_id} and center {center_id}"
        f" are at distance {verdict.pair_dist!r}, but node {node_id} is assigned"
        f" at distance {verdict.current_dist!r} and center {center_id}'s worst"
        f" member (node {g.original_ids[verdict.worst_node]}) sits at"
        f" distance {verdict.worst_dist!r}"
    )
    return 4


def cmd_bench(args) -> int:
    if args.grid:
        source = f"grid:{args.grid}"
        if args.jitter_seed is not None:
            source += f":jitter:{args.jitter_seed}"
    else:
        source = args.graph
    cfg = bench_mod.BenchConfig(
        source=source,
        k_values=tuple(int(x) for x in args.k.split(",")),
        runs=args.runs,
        seed=args.seed,
        algorithms=tuple(args.algos.split(",")),
        memory_cap_bytes=_memory_cap(args),
        use_largest_component=args.largest_component,
        parallel=args.parallel,
    )
    records = bench_mod.run_bench(cfg)
    note = "parallel run: wall times not comparable" if args.parallel > 1 else None
    if args.output is None or args.output == "-":
        bench_mod.write_csv(records, sys.stdout, note=note)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            bench_mod.write_csv(records, fh, note=note)
    return 0


def cmd_render(args) -> int:
    g = _load_graph(args)
    with open(args.assignment, "r", encoding="utf-8") as fh:
        rows = fh.read()
    # Reconstruct the instance from the assignment itself: centers are the
    # distinct assigned center ids (ascending), quotas their member counts.
    center_ids: dict[int, int] = {}
    for raw in rows.splitlines():
        line = raw.strip()
        if not line or line.startswith("node_original_id"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError("malformed assignment row")
        center_ids[int(parts[1])] = center_ids.get(int(parts[1]), 0) + 1
    centers = []
    for oid in sorted(center_ids):
        if not g.has_original_id(oid):
            raise ValueError(f"assignment center id {oid} not present in the graph")
        centers.append(g.dense_id(oid))
    quotas = [center_ids[oid] for oid in sorted(center_ids)]
    inst = Instance(g, centers, quotas)
    assignment = parse_assignment_tsv(rows, g, centers)
    if args.output.endswith(".geojson") or args.output.endswith(".json"):
        _write_text(args.output, render_geojson(inst, assignment))
    else:
        _write_text(args.output, render_svg(inst, assignment))
    return 0


def cmd_generate(args) -> int:
    dims = args.grid.lower().split("x")
    if len(dims) != 2:
        raise ValueError(f"bad grid spec {args.grid!r} (expected WxH)")
    g = bench_mod.generate_grid(int(dims[0]), int(dims[1]), args.jitter_seed)
    _write_text(args.output, write_tsv(g))
    return 0


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph", help="graph file (.gr DIMACS, otherwise TSV edge list)")
    p.add_argument("co", nargs="?", default=None, help="DIMACS coordinate file")
    p.add_argument(
        "--largest-component", action="store_true",
        help="solve on the largest connected component (prints the trim to stderr)",
    )


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--centers", help="file of center node ids, one per line")
    group.add_argument("--random-centers", type=int, metavar="K", help="draw K random centers")
    p.add_argument("--seed", type=int, default=0, help="seed for --random-centers")
    p.add_argument(
        "--quotas", default="equal",
        help="'equal' or a file of per-center quotas (default: equal)",
    )


def _add_memory_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--memory-cap", type=int, default=DEFAULT_MEMORY_CAP_BYTES, metavar="BYTES",
        help="refuse solvers whose scratch estimate exceeds this many bytes",
    )
    p.add_argument("--no-memory-cap", action="store_true", help="disable the memory cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabledistrict",
        description="Stable quota districting of weighted graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute a stable assignment")
    _add_graph_args(p_solve)
    _add_instance_args(p_solve)
    _add_memory_args(p_solve)
    p_solve.add_argument(
        "--algo", required=True, choices=bench_mod.ALGORITHM_NAMES, help="solver to run"
    )
    p_solve.add_argument("--trace", help="write circle-growing event trace to this file")
    p_solve.add_argument("-o", "--output", default=None, help="assignment TSV (default stdout)")
    p_solve.add_argument("--summary", default=None, help="write a JSON summary here")
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="check an assignment for stability")
    _add_graph_args(p_verify)
    _add_instance_args(p_verify)
    p_verify.add_argument("--assignment", required=True, help="assignment TSV to check")
    p_verify.set_defaults(handler=cmd_verify)

    p_bench = sub.add_parser("bench", help="run the seeded benchmark sweep")
    p_bench.add_argument("graph", nargs="?", default=None, help="graph file")
    p_bench.add_argument("--grid", default=None, metavar="WxH", help="use a generated grid instead")
    p_bench.add_argument("--jitter-seed", type=int, default=None, help="jitter grid weights")
    p_bench.add_argument("--k", required=True, help="comma-separated center counts")
    p_bench.add_argument("--runs", type=int, default=10, help="center sets per k (default 10)")
    p_bench.add_argument(
        "--algos", default=",".join(bench_mod.ALGORITHM_NAMES),
        help="comma-separated algorithms (default: all)",
    )
    p_bench.add_argument("--seed", type=int, default=0, help="master seed")
    p_bench.add_argument("--parallel", type=int, default=1, help="concurrent center-set runs")
    p_bench.add_argument("--largest-component", action="store_true")
    _add_memory_args(p_bench)
    p_bench.add_argument("-o", "--output", default=None, help="CSV output (default stdout)")
    p_bench.set_defaults(handler=cmd_bench)

    p_render = sub.add_parser("render", help="draw an assignment as SVG or GeoJSON")
    _add_graph_args(p_render)
    p_render.add_argument("--assignment", required=True, help="assignment TSV to draw")
    p_render.add_argument(
        "-o", "--output", required=True,
        help="output path; .geojson/.json selects GeoJSON, anything else SVG",
    )
    p_render.set_defaults(handler=cmd_render)

    p_gen = sub.add_parser("generate", help="emit a grid graph as TSV")
    p_gen.add_argument("--grid", required=True, metavar="WxH")
    p_gen.add_argument("--jitter-seed", type=int, default=None)
    p_gen.add_argument("-o", "--output", default=None, help="TSV output (default stdout)")
    p_gen.set_defaults(handler=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and (args.graph is None) == (args.grid is None):
        parser.error("bench needs exactly one of a graph file or --grid")
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InstanceError as exc:
        print(f"error: infeasible instance: {exc}", file=sys.stderr)
        return 2
    except MemoryCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
