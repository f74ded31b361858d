"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import json
import math
import random
import time

import pytest

from qroute.harness import ALGORITHMS, ExperimentConfig, read_results, run_algorithm, run_experiment
from qroute.lp import build_step1_lp, build_step2_lp, solve_lp
from qroute.model import ChannelAssignment, check_capacity
from qroute.montecarlo import simulate_throughput
from qroute.oracle import InstanceTooLarge, brute_force_step1, brute_force_step2
from qroute.paths import selective_paths, yen_k_shortest
from qroute.step1 import solve_step1
from qroute.step2 import solve_throughput_direct
from qroute.topology import TopologyConfig, generate_topology

from conftest import build_graph, outside_decision_space, small_instances, step2_decision_space_optimum
from test_paths import networkx_paths, random_graph

# every plan any criterion produces, as (label, graph, assignments), for criterion 7
EMITTED: list = []


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")


# -- shared runs -------------------------------------------------------------


def step1_run():
    rows = []
    for _, g, cat in small_instances(200, seed=1001):
        plan = solve_step1(g.copy(), catalog=cat)
        oracle = brute_force_step1(cat, g)
        rows.append((g, cat, plan, oracle))
    return rows


def step2_run():
    rows, skipped = [], 0
    for _, g, cat in small_instances(260, seed=2002, qubits=(2, 4, 6)):
        try:
            oracle = brute_force_step2(cat, g)
        except InstanceTooLarge:
            skipped += 1
            continue
        plan = solve_throughput_direct(g.copy(), catalog=cat)
        rows.append((g, cat, plan, oracle))
    return rows, skipped


def mc_paths():
    """Twenty random chains of 1 to 4 hops, each with its own link probabilities and q."""
    rng = random.Random(3003)
    for k in range(20):
        hops = 1 + k % 4
        probs = [rng.uniform(0.2, 1.0) for _ in range(hops)]
        q = rng.uniform(0.5, 1.0)
        nodes = [f"s{i}" for i in range(hops + 1)]
        g = build_graph({n: 2 for n in nodes}, [], list(zip(nodes, nodes[1:], probs)), swap_prob=q)
        yield k, g, g.make_path(k, nodes)


def mc_run():
    return [
        (g, path, simulate_throughput(g, [ChannelAssignment(path, 1)], 1_000_000, seed=k))
        for k, g, path in mc_paths()
    ]


def trend_run():
    cfg = ExperimentConfig(seeds=[0, 1, 2, 3, 4])
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def c1():
    t0 = time.perf_counter()
    rows = step1_run()
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def c2():
    return step2_run()


@pytest.fixture(scope="module")
def c3():
    t0 = time.perf_counter()
    cases = mc_run()
    return cases, time.perf_counter() - t0


@pytest.fixture(scope="module")
def c6():
    t0 = time.perf_counter()
    text = trend_run()
    return text, time.perf_counter() - t0


# -- criteria ----------------------------------------------------------------


def test_criterion_1_step1_approximation(c1, capsys):
    rows, elapsed = c1
    bad = 0
    for g, cat, plan, oracle in rows:
        assert len(g.switches) <= 10 and len(g.pairs) <= 4 and len(cat) <= 12
        EMITTED.append(("step1", g, [ChannelAssignment(p, 1) for p in plan.selected.values()]))
        if not plan.served_count <= oracle.optimum <= 2 * plan.served_count:
            bad += 1
    optimal = sum(plan.served_count == oracle.optimum for _, _, plan, oracle in rows)
    ok = len(rows) >= 200 and bad == 0 and elapsed < 120
    report(capsys, 1, "Step I within factor 2 of the optimum", ok,
           f"{len(rows)} instances, {bad} violations, {optimal} exactly optimal, {elapsed:.1f}s")
    assert ok


def test_criterion_2_step2_optimality(c2, capsys):
    rows, skipped = c2
    gaps, unexplained = [], []
    for g, cat, plan, oracle in rows:
        EMITTED.append(("step2", g, plan.assignments()))
        if abs(plan.additional_throughput - oracle.optimum) <= 1e-9:
            continue
        gaps.append(oracle.optimum - plan.additional_throughput)
        # a gap is explained when the search was exact over the floor-plus-one rounding
        # space and the oracle's plan lies outside that space
        exact_in_space = math.isclose(step2_decision_space_optimum(plan, g),
                                      plan.additional_throughput, abs_tol=1e-9)
        if not (exact_in_space and outside_decision_space(plan, oracle.channels)):
            unexplained.append(g)
    ok = len(rows) >= 200 and not unexplained
    worst = max(gaps, default=0.0)
    report(capsys, 2, "Step II equals the integer optimum", ok,
           f"{len(rows)} instances ({skipped} over the oracle guard skipped), {len(gaps)} gaps "
           f"as findings, worst {worst:.3g}, {len(unexplained)} unexplained")
    assert ok


def test_criterion_3_monte_carlo(c3, capsys):
    cases, elapsed = c3
    within = sum(abs(r.mean_throughput - p.success_prob) <= 4 * r.std_error for _, p, r in cases)
    ok = len(cases) == 20 and within >= 19 and elapsed < 60
    report(capsys, 3, "Monte Carlo agrees with the analytic path value", ok,
           f"{within}/20 within 4 SE at 1e6 trials, {elapsed:.1f}s")
    assert ok


def test_criterion_4_lp_relaxation(c1, c2, capsys):
    rows1, _ = c1
    rows2, _ = c2
    bad, checked, worst = 0, 0, 0.0
    for g, cat, _, oracle in rows1:
        problem, _ = build_step1_lp(cat, g)
        sol = solve_lp(problem)
        worst = max(worst, float(-problem.residuals(sol.values).min(initial=0.0)))
        bad += sol.objective_value < oracle.optimum - 1e-9
        checked += 1
    for g, cat, _, oracle in rows2:
        problem, _ = build_step2_lp(cat, g)
        sol = solve_lp(problem)
        worst = max(worst, float(-problem.residuals(sol.values).min(initial=0.0)))
        bad += sol.objective_value < oracle.optimum - 1e-9
        checked += 1
    ok = bad == 0 and worst <= 1e-9
    report(capsys, 4, "LP bounds the integer optimum", ok,
           f"{checked} LPs, {bad} violations, worst row violation {worst:.2g}")
    assert ok


def test_criterion_5_yen(capsys):
    rng = random.Random(5005)
    mismatches, graphs, total = 0, 0, 0
    while graphs < 50:
        g = random_graph(rng, rng.randint(3, 8))
        expected = networkx_paths(g, "u0", "u1")
        if not expected:
            continue
        graphs += 1
        total += len(expected)
        got = yen_k_shortest(g, "u0", "u1", len(expected))
        mismatches += [p.nodes for p in got] != expected
    ok = mismatches == 0
    report(capsys, 5, "Yen matches exhaustive enumeration", ok,
           f"50 graphs, {total} paths, {mismatches} mismatches")
    assert ok


def _means(text):
    out = {}
    for r in read_results(text):
        if r["seed"] == "mean":
            out[r["algorithm"]] = (float(r["served_pairs"]), float(r["throughput"]), r["error"])
    return out


def test_criterion_6_trends(c6, capsys):
    text, elapsed = c6
    m = _means(text)
    served = {a: v[0] for a, v in m.items()}
    thr = {a: v[1] for a, v in m.items()}
    errors = [r for r in read_results(text) if r["error"]]
    a = all(served["multi_r"] >= served[b] for b in ("fer", "qpass", "b1"))
    b = all(thr["alg4_direct"] >= thr[x] for x in ("fer", "qpass", "b1"))
    c = thr["qpass"] <= thr["fer"] and thr["b1"] <= thr["fer"]
    ok = a and b and c and not errors and elapsed < 600
    detail = ", ".join(f"{k} {served[k]:.1f}/{thr[k]:.3f}" for k in ALGORITHMS)
    report(capsys, 6, "default-scale orderings (served/throughput means)", ok,
           f"{detail}; a={a} b={b} c={c}, {elapsed:.1f}s")
    assert ok


def test_criterion_7_capacity(c1, c2, c6, capsys):
    for seed in range(5):
        g = generate_topology(TopologyConfig(rng_seed=seed))
        cat = selective_paths(g)
        for name in ALGORITHMS:
            EMITTED.append((name, g, run_algorithm(name, g, cat).assignments))
    for _, g, path in mc_paths():
        EMITTED.append(("mc", g, [ChannelAssignment(path, 1)]))
    bad = [(label, check_capacity(g, plan).violations) for label, g, plan in EMITTED
           if not check_capacity(g, plan).ok]
    ok = not bad and len(EMITTED) >= 400
    report(capsys, 7, "every emitted plan respects switch capacity", ok,
           f"{len(EMITTED)} plans checked, {len(bad)} violations")
    assert ok


def _plans_json(rows):
    return json.dumps([plan.to_dict() for _, _, plan, _ in rows])


def _mc_json(cases):
    return json.dumps([vars(r) | {"per_pair_means": list(r.per_pair_means.items())}
                       for *_, r in cases])


def test_criterion_8_determinism(c1, c2, c3, c6, capsys):
    same = {
        "step1": _plans_json(c1[0]) == _plans_json(step1_run()),
        "step2": _plans_json(c2[0]) == _plans_json(step2_run()[0]),
        "mc": _mc_json(c3[0]) == _mc_json(mc_run()),
        "experiment": c6[0] == trend_run(),
        "topology": all(
            generate_topology(TopologyConfig(rng_seed=s)).to_json()
            == generate_topology(TopologyConfig(rng_seed=s)).to_json() for s in range(5)),
    }
    ok = all(same.values())
    report(capsys, 8, "repeated runs are byte-identical", ok,
           ", ".join(f"{k}={'same' if v else 'DIFFERENT'}" for k, v in same.items()))
    assert ok
