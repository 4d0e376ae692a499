"""Experiment execution and CSV persistence.

One run = (scenario, seed): generate the channel grid, build the slicing
list, execute the requested algorithms, validate every allocation and emit
one result row per algorithm. Runs are deterministic per (scenario, seed);
wall-time measurement is opt-in so that repeated simulations produce
byte-identical CSV files.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, fields
from fractions import Fraction

from .allocators import (
    BASELINE_AVERAGE,
    BASELINE_LOWEST,
    BASELINE_MAXIMUM,
    mars_allocate,
    static_baseline,
    upper_bound,
)
from .channel import generate_grid
from .core import validate
from .oracle import OracleLimits, solve_exact
from .scenario import ScenarioConfig, build_instance
from .slicing import build_slicing_list

CSV_HEADER = ("scenario_id", "seed", "algorithm", "K", "T", "M",
              "users_total", "users_served", "rbs_used", "bits_served",
              "runtime_ms")

ALGO_MARS = "mars"
ALGO_UPPER_BOUND = "upper_bound"
ALGO_EXACT = "exact"
ALGO_MAX = "max_mcs"
ALGO_AVG = "avg_mcs"
ALGO_LOW = "low_mcs"
ALGORITHMS = (ALGO_MARS, ALGO_UPPER_BOUND, ALGO_EXACT, ALGO_MAX, ALGO_AVG, ALGO_LOW)

ALGO_ALIASES = {
    "mars": ALGO_MARS,
    "ub": ALGO_UPPER_BOUND,
    "upper_bound": ALGO_UPPER_BOUND,
    "exact": ALGO_EXACT,
    "max": ALGO_MAX,
    "max_mcs": ALGO_MAX,
    "avg": ALGO_AVG,
    "avg_mcs": ALGO_AVG,
    "low": ALGO_LOW,
    "low_mcs": ALGO_LOW,
}

_BASELINE_OF = {ALGO_MAX: BASELINE_MAXIMUM, ALGO_AVG: BASELINE_AVERAGE,
                ALGO_LOW: BASELINE_LOWEST}


class ValidationTrap(RuntimeError):
    """An allocator emitted an allocation that fails validation; this is a
    bug trap, not a user error."""


@dataclass(frozen=True)
class ResultRow:
    scenario_id: str
    seed: int
    algorithm: str
    K: float | None
    T: int
    M: int
    users_total: int
    users_served: int
    rbs_used: int
    bits_served: float
    runtime_ms: float


def canonical_algorithms(names) -> tuple[str, ...]:
    out = []
    for name in names:
        key = name.strip().lower()
        if key not in ALGO_ALIASES:
            raise ValueError(f"unknown algorithm {name!r}; choose from "
                             f"{sorted(set(ALGO_ALIASES))}")
        algo = ALGO_ALIASES[key]
        if algo not in out:
            out.append(algo)
    return tuple(out)


def run_scenario(config: ScenarioConfig, algorithms=(ALGO_MARS, ALGO_UPPER_BOUND),
                 measure_runtime: bool = False) -> list[ResultRow]:
    """Execute every requested algorithm for every seed of one scenario."""
    algorithms = canonical_algorithms(algorithms)
    rows: list[ResultRow] = []
    for seed in config.seeds:
        instance = build_instance(config, seed)
        grid = generate_grid(config.channel.reseeded(seed), instance)
        slist = build_slicing_list(instance, config.list_mode)
        for algo in algorithms:
            start = time.perf_counter()
            if algo == ALGO_MARS:
                alloc = mars_allocate(instance, grid, slist, config.mars_options)
                elapsed = time.perf_counter() - start
                violations = validate(instance, grid, alloc)
                if violations:
                    raise ValidationTrap(
                        f"{config.scenario_id} seed {seed}: allocation failed "
                        "validation: " + "; ".join(str(v) for v in violations))
                served = len(alloc.served)
                rbs = alloc.rbs_used
                bits = sum(alloc.per_mvno_rate.values(), Fraction(0))
            elif algo == ALGO_UPPER_BOUND:
                report = upper_bound(instance, grid, slist)
                elapsed = time.perf_counter() - start
                served, rbs, bits = report.users_served, report.rbs_used, report.bits_served
            elif algo == ALGO_EXACT:
                limits = OracleLimits(max_mcs_levels=29)
                result = solve_exact(instance, grid, limits)
                elapsed = time.perf_counter() - start
                violations = validate(instance, grid, result.witness)
                if violations:
                    raise ValidationTrap(
                        f"{config.scenario_id} seed {seed}: oracle witness failed "
                        "validation: " + "; ".join(str(v) for v in violations))
                served = result.optimum
                rbs = result.witness.rbs_used
                bits = sum(result.witness.per_mvno_rate.values(), Fraction(0))
            else:
                report = static_baseline(instance, grid, slist, _BASELINE_OF[algo])
                elapsed = time.perf_counter() - start
                served, rbs, bits = report.users_served, report.rbs_used, report.bits_served
            rows.append(ResultRow(
                scenario_id=config.scenario_id,
                seed=seed,
                algorithm=algo,
                K=config.k_factor(),
                T=config.ttis,
                M=config.num_mvnos,
                users_total=config.users_total,
                users_served=served,
                rbs_used=rbs,
                bits_served=float(bits),
                runtime_ms=elapsed * 1000.0 if measure_runtime else 0.0,
            ))
    rows.sort(key=lambda r: (r.scenario_id, r.seed, r.algorithm))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, path) -> None:
    """Write rows under the pinned header, in (scenario_id, seed, algorithm)
    order, with locale-independent number formatting."""
    ordered = sorted(rows, key=lambda r: (r.scenario_id, r.seed, r.algorithm))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in ordered:
            writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])


def read_csv(path) -> list[ResultRow]:
    """Parse a results file back into rows (inverse of write_csv)."""
    rows: list[ResultRow] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for rec in reader:
            vals = dict(zip(CSV_HEADER, rec))
            rows.append(ResultRow(
                scenario_id=vals["scenario_id"],
                seed=int(vals["seed"]),
                algorithm=vals["algorithm"],
                K=float(vals["K"]) if vals["K"] else None,
                T=int(vals["T"]),
                M=int(vals["M"]),
                users_total=int(vals["users_total"]),
                users_served=int(vals["users_served"]),
                rbs_used=int(vals["rbs_used"]),
                bits_served=float(vals["bits_served"]),
                runtime_ms=float(vals["runtime_ms"]),
            ))
    return rows
