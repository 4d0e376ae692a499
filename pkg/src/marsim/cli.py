"""Command line front end.

    marsim simulate --scenario table1.yaml --algos mars,ub --out results.csv
    marsim oracle-compare --trials 200
    marsim validate --scenario table1.yaml --allocation alloc.json

Exit code 0 on success, 2 on any validation violation or error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .allocators import MarsOptions, mars_allocate, upper_bound
from .channel import generate_grid
from .core import Allocation, Assignment, UserId, validate
from .harness import (
    ALGO_MARS,
    ALGO_UPPER_BOUND,
    ValidationTrap,
    canonical_algorithms,
    run_scenario,
    write_csv,
)
from .oracle import OracleLimits, solve_exact
from .random_instances import random_tiny_instance
from .scenario import ScenarioError, build_instance, load_scenario
from .slicing import build_slicing_list


def _parse_seed_overrides(args) -> tuple[int, ...] | None:
    if args.seed_list:
        return tuple(int(s) for s in args.seed_list.split(","))
    if args.seeds is not None:
        return tuple(range(args.seeds))
    return None


def _cmd_simulate(args) -> int:
    configs = load_scenario(args.scenario)
    algos = canonical_algorithms(args.algos.split(","))
    seeds = _parse_seed_overrides(args)
    rows = []
    for config in configs:
        if seeds is not None:
            config = replace(config, seeds=seeds)
        if args.list_mode:
            config = replace(config, list_mode=args.list_mode)
        opts = config.mars_options
        if args.trim_last_bundle:
            opts = MarsOptions(True, opts.mcs_floor)
        if args.mcs_floor is not None:
            opts = MarsOptions(opts.trim_last_bundle, args.mcs_floor)
        config = replace(config, mars_options=opts)
        rows.extend(run_scenario(config, algos, measure_runtime=args.measure_runtime))
        if args.save_allocations:
            _save_allocations(config, args.save_allocations)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _save_allocations(config, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for seed in config.seeds:
        instance = build_instance(config, seed)
        grid = generate_grid(config.channel.reseeded(seed), instance)
        slist = build_slicing_list(instance, config.list_mode)
        alloc = mars_allocate(instance, grid, slist, config.mars_options)
        doc = {
            "scenario_id": config.scenario_id,
            "seed": seed,
            "assignments": [[a.rb, a.tti, a.user.mvno, a.user.sched_pos, a.mcs]
                            for a in alloc.assignments],
            "served": sorted([u.mvno, u.sched_pos] for u in alloc.served),
        }
        path = os.path.join(out_dir, f"{config.scenario_id}-seed{seed}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)


def _cmd_validate(args) -> int:
    with open(args.allocation, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    configs = load_scenario(args.scenario)
    matches = [c for c in configs if c.scenario_id == doc.get("scenario_id")]
    if len(configs) == 1 and not matches:
        matches = configs
    if not matches:
        print(f"error: allocation names scenario {doc.get('scenario_id')!r} which the "
              f"file does not define", file=sys.stderr)
        return 2
    config = matches[0]
    seed = int(doc["seed"])
    instance = build_instance(config, seed)
    grid = generate_grid(config.channel.reseeded(seed), instance)
    assignments = [Assignment(rb, tti, UserId(m, pos), mcs)
                   for rb, tti, m, pos, mcs in doc["assignments"]]
    served = [UserId(m, pos) for m, pos in doc["served"]]
    alloc = Allocation.build(instance, grid, assignments, served)
    violations = validate(instance, grid, alloc)
    if violations:
        for v in violations:
            print(str(v))
        print(f"{len(violations)} violation(s)")
        return 2
    print("allocation is valid")
    return 0


def _cmd_oracle_compare(args) -> int:
    limits = OracleLimits(max_cells=args.max_cells, max_users=args.max_users)
    rng = np.random.default_rng(args.seed)
    failures = 0
    for trial in range(args.trials):
        instance, grid = random_tiny_instance(rng, limits.max_cells, limits.max_users)
        slist = build_slicing_list(instance)
        result = solve_exact(instance, grid,
                             OracleLimits(limits.max_cells, limits.max_users,
                                          max_mcs_levels=29),
                             prune=not args.no_prune)
        mars = mars_allocate(instance, grid, slist)
        bound = upper_bound(instance, grid, slist)
        problems = []
        if len(mars.served) > result.optimum:
            problems.append(f"greedy served {len(mars.served)} > optimum {result.optimum}")
        if result.optimum > bound.users_served:
            problems.append(f"optimum {result.optimum} > bound {bound.users_served}")
        problems += [f"greedy: {v}" for v in validate(instance, grid, mars)]
        problems += [f"witness: {v}" for v in validate(instance, grid, result.witness)]
        if problems:
            failures += 1
            print(f"trial {trial}: " + "; ".join(str(p) for p in problems))
    print(f"{args.trials} trials, {failures} failures")
    return 0 if failures == 0 else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="marsim",
                                     description="MCS-aware RAN slicing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario file and write a CSV")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--seeds", type=int, default=None,
                     help="use seeds 0..N-1 instead of the scenario's list")
    sim.add_argument("--seed-list", default=None, help="comma-separated seeds")
    sim.add_argument("--algos", default="mars,ub",
                     help="comma-separated: mars,ub,exact,max,avg,low")
    sim.add_argument("--baseline", choices=["max", "avg", "low"], default=None,
                     help="shorthand to add one static baseline to --algos")
    sim.add_argument("--out", default="results.csv")
    sim.add_argument("--list-mode", choices=["lambda_global", "literal_two_stage"],
                     default=None)
    sim.add_argument("--trim-last-bundle", action="store_true")
    sim.add_argument("--mcs-floor", type=int, default=None)
    sim.add_argument("--measure-runtime", action="store_true",
                     help="record wall time per run (makes CSVs non-reproducible)")
    sim.add_argument("--save-allocations", default=None, metavar="DIR",
                     help="dump each greedy allocation as JSON into DIR")

    val = sub.add_parser("validate", help="validate a saved allocation")
    val.add_argument("--scenario", required=True)
    val.add_argument("--allocation", required=True)

    cmp_ = sub.add_parser("oracle-compare",
                          help="random tiny instances: exact optimum vs greedy vs bound")
    cmp_.add_argument("--max-cells", type=int, default=8)
    cmp_.add_argument("--max-users", type=int, default=4)
    cmp_.add_argument("--trials", type=int, default=200)
    cmp_.add_argument("--seed", type=int, default=0)
    cmp_.add_argument("--no-prune", action="store_true",
                      help="disable branch-and-bound pruning (audit mode)")

    args = parser.parse_args(argv)
    if getattr(args, "baseline", None):
        args.algos += "," + args.baseline
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "oracle-compare":
            return _cmd_oracle_compare(args)
    except (ScenarioError, ValidationTrap, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
