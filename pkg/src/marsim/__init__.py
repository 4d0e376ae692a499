"""MCS-aware RAN slicing simulator.

Greedy multi-tenant resource-block allocation under per-user minimum rates
and per-slice throughput caps, with a certified serving-count upper bound,
an exhaustive tiny-instance optimum, static MCS baselines, seeded fading
channels and a CSV evaluation harness.
"""

from .core import (
    MAX_MCS,
    NUM_MCS_LEVELS,
    Allocation,
    Assignment,
    ChannelGrid,
    McsTable,
    SlicingInstance,
    StructuralError,
    UserId,
    Violation,
    achievable_rate,
    validate,
)
from .channel import (
    ChannelModel,
    default_snr_thresholds,
    generate_grid,
    q_max_per_user,
    rician_power_gains,
    snr_to_mcs,
)
from .slicing import SlicingList, build_slicing_list
from .allocators import (
    BoundReport,
    MarsOptions,
    TtiBundle,
    allocate_user,
    best_bundle_at_tti,
    mars_allocate,
    static_baseline,
    upper_bound,
)
from .oracle import OracleLimits, OracleResult, OracleSizeError, solve_exact
from .scenario import ScenarioConfig, ScenarioError, build_instance, load_scenario
from .harness import ResultRow, run_scenario, write_csv, read_csv

__version__ = "0.1.0"

__all__ = [
    "MAX_MCS", "NUM_MCS_LEVELS",
    "Allocation", "Assignment", "ChannelGrid", "McsTable", "SlicingInstance",
    "StructuralError", "UserId", "Violation", "achievable_rate", "validate",
    "ChannelModel", "default_snr_thresholds", "generate_grid", "q_max_per_user",
    "rician_power_gains", "snr_to_mcs",
    "SlicingList", "build_slicing_list",
    "BoundReport", "MarsOptions", "TtiBundle", "allocate_user",
    "best_bundle_at_tti", "mars_allocate", "static_baseline", "upper_bound",
    "OracleLimits", "OracleResult", "OracleSizeError", "solve_exact",
    "ScenarioConfig", "ScenarioError", "build_instance", "load_scenario",
    "ResultRow", "run_scenario", "write_csv", "read_csv",
]
