"""Seeded parameter sweeps over all routing algorithms, written out as CSV."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .baselines import B1, FER, QPASS, greedy_route
from .model import ChannelAssignment, NetworkGraph, check_capacity, plan_throughput
from .montecarlo import simulate_throughput
from .paths import PathSetCatalog, selective_paths
from .step1 import solve_step1
from .step2 import multi_r_assignments, solve_step2, solve_throughput_direct
from .topology import TopologyConfig, generate_topology

ALGORITHMS = ("multi_r", "alg4_direct", "fer", "qpass", "b1")
CSV_HEADER = [
    "sweep_param", "sweep_value", "algorithm", "seed", "served_pairs",
    "throughput", "mc_throughput", "mc_stderr", "runtime_ms", "error",
]
# sweep axis name -> TopologyConfig field
SWEEP_FIELDS = {
    "num_switches": "num_switches",
    "num_pairs": "num_pairs",
    "qubits": "qubits_per_switch",
    "swap_prob": "swap_prob",
    "avg_degree": "avg_degree",
}


@dataclass
class RoutingResult:
    algorithm: str
    assignments: list[ChannelAssignment]
    served_pairs: int
    throughput: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "served_pairs": self.served_pairs,
            "throughput": self.throughput,
            **self.detail,
            "channels": [a.to_dict() for a in self.assignments],
        }


def run_algorithm(name: str, graph: NetworkGraph, catalog: PathSetCatalog) -> RoutingResult:
    """Route one instance; ``graph`` is left untouched."""
    if name == "multi_r":
        work = graph.copy()
        p1 = solve_step1(work, catalog=catalog)
        p2 = solve_step2(work, p1, catalog)
        assignments = multi_r_assignments(p1, p2)
        return RoutingResult(name, assignments, p1.served_count, plan_throughput(assignments), {
            "lp_optimum_step1": p1.lp_optimum,
            "lp_optimum_step2": p2.lp_optimum,
            "additional_throughput": p2.additional_throughput,
            "main_paths": {str(m): list(p.nodes) for m, p in p1.selected.items()},
        })
    if name == "alg4_direct":
        plan = solve_throughput_direct(graph.copy(), catalog=catalog)
        assignments = plan.assignments()
        served = len({a.path.pair_id for a in assignments})
        return RoutingResult(name, assignments, served, plan_throughput(assignments),
                             {"lp_optimum": plan.lp_optimum})
    metric = {"fer": FER, "qpass": QPASS, "b1": B1}.get(name)
    if metric is None:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    plan = greedy_route(graph, None, catalog, metric)
    assignments = plan.assignments()
    return RoutingResult(name, assignments, plan.served_pairs, plan_throughput(assignments))


@dataclass
class ExperimentConfig:
    base: TopologyConfig = field(default_factory=TopologyConfig)
    sweep_param: str | None = None
    sweep_values: list = field(default_factory=list)
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    mc_trials: int = 0
    record_runtime: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.sweep_param is not None and self.sweep_param not in SWEEP_FIELDS:
            raise ValueError(f"unknown sweep axis {self.sweep_param!r}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}")
        if self.mc_trials < 0:
            raise ValueError("mc_trials must be non-negative")
        for v in self.points():
            self.config_for(v, self.seeds[0])

    def points(self) -> list:
        if self.sweep_param is None:
            return [None]
        return sorted(self.sweep_values)

    def config_for(self, value, seed: int) -> TopologyConfig:
        cfg = replace(self.base, rng_seed=seed)
        if self.sweep_param is not None:
            fname = SWEEP_FIELDS[self.sweep_param]
            kind = type(getattr(self.base, fname))
            cfg = replace(cfg, **{fname: kind(value)})
        return cfg

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        base = TopologyConfig.from_dict(data.pop("base", {}))
        sweep = data.pop("sweep", None)
        if sweep:
            ((param, values),) = sweep.items()
            data["sweep_param"], data["sweep_values"] = param, list(values)
        return cls(base=base, **data)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _run_instance(args) -> list[dict]:
    cfg, value, seed, algorithms, mc_trials, record_runtime = args
    rows = []
    try:
        graph = generate_topology(cfg)
        catalog = selective_paths(graph)
    except Exception as exc:  # noqa: BLE001 - recorded in the error column
        return [
            {"algorithm": a, "seed": seed, "value": value, "error": f"{type(exc).__name__}: {exc}"}
            for a in algorithms
        ]
    for name in algorithms:
        row = {"algorithm": name, "seed": seed, "value": value, "error": ""}
        t0 = time.perf_counter()
        try:
            result = run_algorithm(name, graph, catalog)
            elapsed = (time.perf_counter() - t0) * 1000.0
            report = check_capacity(graph, result.assignments)
            if not report.ok:
                raise RuntimeError("capacity violation: " + "; ".join(report.violations))
            row["served_pairs"] = result.served_pairs
            row["throughput"] = result.throughput
            if record_runtime:
                row["runtime_ms"] = round(elapsed, 3)
            if mc_trials:
                mc = simulate_throughput(graph, result.assignments, mc_trials, seed)
                row["mc_throughput"] = mc.mean_throughput
                row["mc_stderr"] = mc.std_error
        except Exception as exc:  # noqa: BLE001 - recorded in the error column
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else None


def run_experiment(config: ExperimentConfig) -> str:
    """Run every (sweep point, seed) instance and return the CSV text.

    Without ``record_runtime`` the runtime column stays blank so that repeated runs
    produce byte-identical output.
    """
    jobs = [
        (config.config_for(v, s), v, s, list(config.algorithms), config.mc_trials,
         config.record_runtime)
        for v in config.points()
        for s in config.seeds
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_instance, jobs))
    else:
        results = [_run_instance(j) for j in jobs]

    by_key: dict[tuple, list[dict]] = {}
    for rows in results:
        for r in rows:
            by_key.setdefault((r["value"], r["algorithm"]), []).append(r)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    param = config.sweep_param or ""
    for v in config.points():
        for name in config.algorithms:
            rows = sorted(by_key.get((v, name), []), key=lambda r: config.seeds.index(r["seed"]))
            for r in rows:
                writer.writerow([
                    param, _fmt(v), name, r["seed"], _fmt(r.get("served_pairs")),
                    _fmt(r.get("throughput")), _fmt(r.get("mc_throughput")),
                    _fmt(r.get("mc_stderr")), _fmt(r.get("runtime_ms")), r["error"],
                ])
            ok = [r for r in rows if not r["error"]]
            failed = len(rows) - len(ok)
            writer.writerow([
                param, _fmt(v), name, "mean",
                _fmt(_mean(r.get("served_pairs") for r in ok)),
                _fmt(_mean(r.get("throughput") for r in ok)),
                _fmt(_mean(r.get("mc_throughput") for r in ok)),
                _fmt(_mean(r.get("mc_stderr") for r in ok)),
                _fmt(_mean(r.get("runtime_ms") for r in ok)),
                f"{failed} of {len(rows)} instances failed" if failed else "",
            ])
    return out.getvalue()


def read_results(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
