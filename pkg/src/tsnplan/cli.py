"""Command line front end.

Exit codes: 0 success, 2 configuration error, 3 plan-validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .harness import (
    ConfigError,
    ExperimentConfig,
    PlanValidationError,
    build_scenario,
    build_topology,
    load_plan,
    run_experiment,
)
from .model import Network
from .solver import validate_plan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVALID_PLAN = 3


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        raise ConfigError("--config is required")
    for name in ("seed", "strategy", "scheme", "cps", "alpha", "out"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, "out_dir" if name == "out" else name, val)
    cfg.expansion_params()  # fail fast on bad values
    return cfg


def _cmd_gen_topology(args) -> int:
    cfg = _load_config(args)
    net = build_topology(cfg)
    out = cfg.out_dir or "."
    os.makedirs(out, exist_ok=True)
    net.save(os.path.join(out, "topology.json"))
    print(f"wrote {os.path.join(out, 'topology.json')}")
    return EXIT_OK


def _cmd_gen_scenario(args) -> int:
    cfg = _load_config(args)
    net = build_topology(cfg)
    batches = build_scenario(cfg, net)
    doc = [
        {
            "iteration": b.iteration,
            "add": [
                {"id": s.id, "src": s.src, "dst": s.dst, "period": s.period, "size": s.size}
                for s in b.add
            ],
            "delete": b.delete,
        }
        for b in batches
    ]
    out = cfg.out_dir or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "scenario.json")
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    metrics, planner = run_experiment(cfg)
    last = metrics[-1]
    total_rej = sum(m.rejected for m in metrics)
    print(
        f"{len(metrics)} iteration(s), {total_rej} rejected stream(s) total, "
        f"final graph {last.vertices} vertices / {last.edges} edges"
    )
    if cfg.out_dir:
        print(f"outputs in {cfg.out_dir}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    net = Network.load(args.topology)
    plan = load_plan(args.plan, net)
    problems = validate_plan(net, plan)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return EXIT_INVALID_PLAN
    print(f"plan ok ({len(plan.assignments)} streams)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tsnplan",
        description="Conflict-graph based no-wait traffic planning for TSN",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--strategy", choices=["homogeneous", "traffic-volume", "avg-degree", "page-rank"])
        p.add_argument("--scheme", choices=["deterministic", "randomized"])
        p.add_argument("--cps", type=int)
        p.add_argument("--alpha", type=int)

    p = sub.add_parser("gen-topology", help="generate and write topology.json")
    common(p)
    p.set_defaults(func=_cmd_gen_topology)

    p = sub.add_parser("gen-scenario", help="generate and write scenario.json")
    common(p)
    p.set_defaults(func=_cmd_gen_scenario)

    p = sub.add_parser("run", help="run the configured experiment")
    common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("validate", help="validate a plan file against a topology file")
    p.add_argument("plan", help="plan.json")
    p.add_argument("topology", help="topology.json")
    p.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PlanValidationError as e:
        print(f"plan validation failed: {e}", file=sys.stderr)
        return EXIT_INVALID_PLAN


if __name__ == "__main__":
    sys.exit(main())
