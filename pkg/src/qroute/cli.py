"""Command line entry point: ``qroute generate|route|experiment|validate``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from .harness import ALGORITHMS, SWEEP_FIELDS, ExperimentConfig, run_algorithm, run_experiment
from .model import ChannelAssignment, NetworkGraph, check_capacity, plan_throughput
from .montecarlo import simulate_throughput
from .paths import selective_paths
from .topology import TopologyConfig, generate_topology


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str | None) -> dict:
    return json.loads(Path(path).read_text()) if path else {}


def _add_topology_flags(p: argparse.ArgumentParser) -> None:
    for f in fields(TopologyConfig):
        p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=type(f.default), default=None)


def _topology_overrides(args) -> dict:
    return {
        f.name: getattr(args, f.name)
        for f in fields(TopologyConfig)
        if getattr(args, f.name, None) is not None
    }


def cmd_generate(args) -> None:
    data = _load_json(args.config)
    data.update(_topology_overrides(args))
    graph = generate_topology(TopologyConfig.from_dict(data))
    _emit(graph.to_json() + "\n", args.output)


def cmd_route(args) -> None:
    graph = NetworkGraph.load(args.graph)
    catalog = selective_paths(graph)
    result = run_algorithm(args.algorithm, graph, catalog)
    report = check_capacity(graph, result.assignments)
    if not report.ok:
        raise RuntimeError("capacity violation: " + "; ".join(report.violations))
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", args.output)


def cmd_experiment(args) -> None:
    data = _load_json(args.config)
    base = dict(data.pop("base", {}))
    base.update(_topology_overrides(args))
    data["base"] = base
    if args.sweep:
        name, _, values = args.sweep.partition("=")
        data["sweep"] = {name: [float(v) if "." in v else int(v) for v in values.split(",")]}
    if args.seeds:
        data["seeds"] = [int(s) for s in args.seeds.split(",")]
    if args.algorithms:
        data["algorithms"] = args.algorithms.split(",")
    if args.mc_trials is not None:
        data["mc_trials"] = args.mc_trials
    if args.workers is not None:
        data["workers"] = args.workers
    if args.record_runtime:
        data["record_runtime"] = True
    _emit(run_experiment(ExperimentConfig.from_dict(data)), args.output)


def cmd_validate(args) -> None:
    graph = NetworkGraph.load(args.graph)
    plan = json.loads(Path(args.plan).read_text())
    assignments = [
        ChannelAssignment(graph.make_path(int(c["pair_id"]), c["path"]), int(c["channels"]))
        for c in plan["channels"]
    ]
    report = check_capacity(graph, assignments)
    mc = simulate_throughput(graph, assignments, args.trials, args.seed)
    out = {
        "capacity_ok": report.ok,
        "violations": report.violations,
        "analytic_throughput": plan_throughput(assignments),
        "mc_throughput": mc.mean_throughput,
        "mc_stderr": mc.std_error,
        "trials": mc.trials,
        "per_pair_means": {str(k): v for k, v in mc.per_pair_means.items()},
    }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    if not report.ok:
        raise RuntimeError("plan violates switch capacity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qroute", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a random topology as JSON")
    p.add_argument("--config", help="JSON file with topology settings")
    p.add_argument("-o", "--output")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("route", help="route one instance with one algorithm")
    p.add_argument("graph")
    p.add_argument("-a", "--algorithm", choices=ALGORITHMS, default="multi_r")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("experiment", help="run a seeded sweep and write CSV")
    p.add_argument("--config", help="JSON experiment file")
    p.add_argument("--sweep", help=f"axis=v1,v2,... with axis in {sorted(SWEEP_FIELDS)}")
    p.add_argument("--seeds", help="comma separated seeds")
    p.add_argument("--algorithms", help=f"comma separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--mc-trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--record-runtime", action="store_true")
    p.add_argument("-o", "--output")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", help="Monte Carlo check of a routed plan")
    p.add_argument("graph")
    p.add_argument("plan")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one JSON line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
