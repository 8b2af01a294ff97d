"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Three criteria (4, 5, 6) encode targets that the
implemented algorithms measurably cannot meet; they are kept as honest
failures, each accompanied by a passing `*_phenomenon` test that
demonstrates the behavior the criterion is about. The analysis lives in
the failure messages.
"""

from __future__ import annotations

import time

import pytest

from stabledistrict import (
    Assignment,
    BenchConfig,
    Instance,
    compute_center_distances,
    equal_quotas,
    generate_grid,
    run_bench,
    solve_circle_growing,
    solve_gs_centers,
    solve_gs_nodes,
    solve_nnc,
    verify_stable,
)
from stabledistrict.bench import SplitMix64, derive_seed, sample_centers
from stabledistrict.circle import circle_growing_run
from stabledistrict.gale_shapley import PAIR_ENTRY_BYTES, build_preferences
from stabledistrict.nnc import mutual_closest_run
from stabledistrict.cli import main as cli_main

from helpers import (
    acceptance_grid_instance,
    least_squares_slope,
    random_sparse_instance,
    spearman,
)

N_EQUIVALENCE_CASES = 200
SWEEP_K = (2, 4, 8, 16, 32, 64, 128, 256, 512)


def _report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def equivalence_suite():
    """All five solvers on the 200 seeded instances, plus stability data."""
    started = time.perf_counter()
    results = []
    for i in range(N_EQUIVALENCE_CASES):
        inst = acceptance_grid_instance(i)
        prefs = build_preferences(inst, memory_cap_bytes=None)
        assignments = {
            "gs-centers": solve_gs_centers(inst, prefs),
            "gs-nodes": solve_gs_nodes(inst, prefs),
            "circle": solve_circle_growing(inst),
            "nnc": solve_nnc(inst),
            "mutual": mutual_closest_run(inst).assignment,
        }
        results.append((i, inst, assignments))
    elapsed = time.perf_counter() - started
    return results, elapsed


@pytest.fixture(scope="module")
def scaling_sweep():
    """Shared 100x100 sweep for the GS-scaling and NNC-flatness criteria."""
    cfg = BenchConfig(
        source="grid:100x100",
        k_values=SWEEP_K,
        runs=5,
        seed=1,
        algorithms=("gs-centers", "nnc"),
    )
    started = time.perf_counter()
    records = run_bench(cfg)
    elapsed = time.perf_counter() - started
    means: dict[tuple[str, int], float] = {}
    for algo in ("gs-centers", "nnc"):
        for k in SWEEP_K:
            times = [
                r.time_ms for r in records if r.algorithm == algo and r.k == k
            ]
            assert len(times) == 5 and all(t is not None for t in times)
            means[(algo, k)] = sum(times) / len(times)
    return means, elapsed


def test_criterion_1_all_solvers_agree(equivalence_suite):
    results, elapsed = equivalence_suite
    mismatches = []
    for i, inst, assignments in results:
        reference = assignments["mutual"]
        for name, a in assignments.items():
            if a.match != reference.match or a.dist != reference.dist:
                mismatches.append((i, name))
    ok = not mismatches and len(results) == N_EQUIVALENCE_CASES
    _report(
        1,
        ok,
        f"{len(results)} instances x 5 solvers element-wise identical"
        f" ({elapsed:.1f}s)" if ok else f"mismatches: {mismatches[:5]}",
    )
    assert ok, f"solver outputs diverge: {mismatches[:5]}"


def test_criterion_2_stability_and_perturbations(equivalence_suite):
    results, _ = equivalence_suite
    perturbed = 0
    detected = 0
    for i, inst, assignments in results:
        dists = compute_center_distances(inst)
        verdict = verify_stable(inst, assignments["circle"], dists)
        assert verdict is None, f"instance {i}: solver output not stable: {verdict}"
        if inst.k < 2:
            continue
        rng = SplitMix64(derive_seed(i, 0x77))
        n = inst.graph.node_count
        base = assignments["circle"]
        for _ in range(3):
            u = rng.next_below(n)
            v = rng.next_below(n)
            while base.match[v] == base.match[u]:
                v = rng.next_below(n)
            match = list(base.match)
            match[u], match[v] = match[v], match[u]
            mutated = Assignment(
                match=match, dist=[dists[c].dist[x] for x, c in enumerate(match)]
            )
            perturbed += 1
            if verify_stable(inst, mutated, dists) is not None:
                detected += 1
    rate = detected / perturbed
    ok = rate >= 0.95 and detected == perturbed  # every swap changes the matching
    _report(2, ok, f"solver outputs stable; {detected}/{perturbed} perturbations rejected")
    assert rate >= 0.95
    assert detected == perturbed


def test_criterion_3_gs_scales_with_k(scaling_sweep):
    means, elapsed = scaling_sweep
    xs = [float(k) for k in SWEEP_K]
    ys = [means[("gs-centers", k)] for k in SWEEP_K]
    slope = least_squares_slope(xs, ys)
    ratio = means[("gs-centers", 512)] / means[("gs-centers", 2)]
    ok = slope > 0 and ratio >= 10.0
    _report(
        3,
        ok,
        f"GS_C slope {slope:.3f} ms/center, time(512)/time(2) = {ratio:.0f}x"
        f" (sweep {elapsed:.0f}s)",
    )
    assert slope > 0
    assert ratio >= 10.0


def test_criterion_4_nnc_flatness(scaling_sweep):
    means, _ = scaling_sweep
    times = [means[("nnc", k)] for k in SWEEP_K]
    ratio = max(times) / min(times)
    ok = ratio <= 2.5
    _report(4, ok, f"NNC max/min mean-time ratio {ratio:.1f} (target <= 2.5)")
    assert ok, (
        f"NNC mean-time ratio {ratio:.1f} exceeds 2.5. True k-independence needs"
        " a sublinear-per-operation dynamic nearest-neighbor structure, which is"
        " deliberately not part of this package; with search-based oracles the"
        " nodes-side work is bounded below by the sum over centers of the ball"
        " reaching their farthest member, which on this sweep grows from ~1.8n"
        " (k=2) to ~25n (k=512). See the companion contrast test for the"
        " qualitative phenomenon this check is after."
    )


def test_criterion_4_phenomenon_nnc_grows_far_slower_than_gs(scaling_sweep):
    means, _ = scaling_sweep
    gs_growth = means[("gs-centers", 512)] / means[("gs-centers", 2)]
    nnc_growth = means[("nnc", 512)] / means[("nnc", 2)]
    ok = nnc_growth * 10 <= gs_growth
    _report(
        4,
        ok,
        f"supplementary contrast: NNC grows {nnc_growth:.1f}x vs GS {gs_growth:.0f}x"
        " over the same sweep",
    )
    assert ok


@pytest.fixture(scope="module")
def circle_work_by_k():
    g = generate_grid(100, 100)
    n = g.node_count
    totals = {}
    for k in (2, 8, 32, 128):
        runs = []
        for s in range(10):
            centers = sample_centers(n, k, derive_seed(2, k, s))
            inst = Instance(g, centers, equal_quotas(n, k))
            runs.append(circle_growing_run(inst).settled_total)
        totals[k] = sum(runs) / len(runs)
    return totals


def test_criterion_5_circle_settled_total_trend(circle_work_by_k):
    ks = [2, 8, 32, 128]
    means = [circle_work_by_k[k] for k in ks]
    rho = spearman(means, [float(k) for k in ks])
    ok = rho <= 0.0
    _report(
        5,
        ok,
        f"mean settled_total {[f'{m:.0f}' for m in means]} for k={ks},"
        f" Spearman {rho:+.2f} (target <= 0)",
    )
    assert ok, (
        f"total settle events increase with k (Spearman {rho:+.2f}):"
        f" {dict(zip(ks, means))}. What decreases as k grows is the exploration"
        " per Dijkstra instance, not the sum over all k instances: every added"
        " instance explores past other districts before its quota fills, so the"
        " total grows on every fixed graph measured. The per-instance version"
        " passes; see the companion test."
    )


def test_criterion_5_phenomenon_per_instance_work_decreases(circle_work_by_k):
    ks = [2, 8, 32, 128]
    per_instance = [circle_work_by_k[k] / k for k in ks]
    rho = spearman(per_instance, [float(k) for k in ks])
    ok = rho <= 0.0
    _report(
        5,
        ok,
        f"supplementary: per-instance settles {[f'{m:.0f}' for m in per_instance]}"
        f" decrease with k (Spearman {rho:+.2f})",
    )
    assert ok


def test_criterion_6_path_worst_case():
    n = 1000
    g = generate_grid(n, 1)
    inst = Instance(g, [0, 1], [500, 500])
    run = circle_growing_run(inst)
    ok = run.settled_total >= 1.8 * n
    _report(
        6,
        ok,
        f"P1000 centers (0,1) quotas (500,500): settled_total = {run.settled_total}"
        f" (target >= {int(1.8 * n)})",
    )
    assert ok, (
        f"settled_total = {run.settled_total} = {run.settled_total / n:.2f}n."
        " With equal quotas the blocking center matches exactly half the path"
        " and halts, so the settle count is (k+1)/2 * n = 1.5n, not 2n; the"
        " degenerate 2n regime needs the blocking center to stay unfillable"
        " while the trailing one sweeps the path (e.g. quotas {2, n-2}),"
        " which the companion test demonstrates."
    )


def test_criterion_6_phenomenon_degenerate_regime():
    n = 1000
    g = generate_grid(n, 1)
    run = circle_growing_run(Instance(g, [0, 1], [2, n - 2]))
    ok = run.settled_total >= 1.8 * n
    _report(
        6,
        ok,
        f"supplementary: quotas (2, {n - 2}) drive settled_total to"
        f" {run.settled_total} >= 1.8n",
    )
    assert ok


def test_criterion_7_memory_refusal_is_a_clean_outcome():
    cap = 10**6 * PAIR_ENTRY_BYTES  # one million materialized pair entries
    cfg = BenchConfig(
        source="grid:100x100",
        k_values=(512,),
        runs=1,
        seed=4,
        algorithms=("gs-centers", "circle", "nnc"),
        memory_cap_bytes=cap,
    )
    records = run_bench(cfg)
    outcomes = {r.algorithm: r.outcome for r in records}
    gs = next(r for r in records if r.algorithm == "gs-centers")
    ok = (
        outcomes["gs-centers"] == "refused-memory"
        and outcomes["circle"] == "ok"
        and outcomes["nnc"] == "ok"
        and gs.digest == ""
        and records[1].digest == records[2].digest != ""
    )
    _report(7, ok, f"n=10^4, k=512, cap 10^6 pair entries: {outcomes}")
    assert ok, outcomes


def test_criterion_8_cli_byte_determinism(tmp_path, capsys):
    graph = tmp_path / "g.tsv"
    assert cli_main(["generate", "--grid", "20x20", "--jitter-seed", "8", "-o", str(graph)]) == 0
    graph2 = tmp_path / "g2.tsv"
    assert cli_main(["generate", "--grid", "20x20", "--jitter-seed", "8", "-o", str(graph2)]) == 0

    pairs = []
    for run_id in ("x", "y"):
        tsv = tmp_path / f"a_{run_id}.tsv"
        svg = tmp_path / f"m_{run_id}.svg"
        csv = tmp_path / f"b_{run_id}.csv"
        assert cli_main([
            "solve", "--algo", "circle", "--random-centers", "7", "--seed", "13",
            "-o", str(tsv), str(graph),
        ]) == 0
        assert cli_main([
            "render", "--assignment", str(tsv), "-o", str(svg), str(graph),
        ]) == 0
        assert cli_main([
            "bench", "--k", "2,4", "--runs", "2", "--algos", "circle,nnc",
            "--seed", "3", "-o", str(csv), "--grid", "20x20",
        ]) == 0
        pairs.append((tsv.read_bytes(), svg.read_bytes(), csv.read_text()))
    (tsv1, svg1, csv1), (tsv2, svg2, csv2) = pairs

    def strip_times(csv_text: str) -> list[str]:
        rows = []
        for line in csv_text.splitlines()[1:]:
            fields = line.split(",")
            fields[7] = ""  # time_ms: the one measured, nondeterministic field
            rows.append(",".join(fields))
        return rows

    ok = (
        graph.read_bytes() == graph2.read_bytes()
        and tsv1 == tsv2
        and svg1 == svg2
        and strip_times(csv1) == strip_times(csv2)
    )
    _report(
        8,
        ok,
        "generate/solve/render byte-identical; bench CSV identical apart from"
        " the wall-clock time_ms field",
    )
    assert ok


def test_criterion_9_selected_pairs_are_mutual_closest():
    checked_instances = 0
    checked_steps = 0
    for seed in range(1000):
        inst = random_sparse_instance(seed, max_n=40)
        run = mutual_closest_run(inst, check_steps=True)  # raises on any violation
        checked_instances += 1
        checked_steps += len(run.order)
    ok = checked_instances == 1000
    _report(
        9,
        ok,
        f"{checked_instances} instances, {checked_steps} matches verified"
        " mutual-closest by exhaustive scan",
    )
    assert ok
