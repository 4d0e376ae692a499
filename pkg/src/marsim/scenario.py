"""Scenario files: a YAML schema describing one evaluation setup.

A scenario pins the grid dimensions, tenant layout, per-user demand, slice
caps, channel model, MCS table and seeds. ``ttis`` and ``channel.k_factor``
may be lists, in which case the file expands into one scenario per
combination with a suffixed id.

Demands and caps are given in bits per slicing window, either directly
(``lambda_min_bits``/``slice_cap_bits``) or in megabits
(``lambda_min_mb``/``slice_cap_mb``, 1 Mb = 10**6 bits). ``lambda_min`` may
be a two-element [low, high] range, in which case each user draws its
demand uniformly per seed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import yaml

from .core import MAX_MCS, McsTable, SlicingInstance, UserId
from .channel import ChannelModel, load_snr_thresholds
from .slicing import LIST_MODES, LAMBDA_GLOBAL
from .allocators import MarsOptions

ENV_MCS_TABLE = "MARSIM_MCS_TABLE"
DEFAULT_SEEDS = tuple(range(30))
_MB = Fraction(10 ** 6)
_LAMBDA_STREAM_TAG = 0x4C414D  # distinguishes demand draws from channel draws

_TOP_KEYS = {
    "scenario_id", "ttis", "num_mvnos", "users_per_mvno",
    "lambda_min_bits", "lambda_min_mb", "slice_cap_bits", "slice_cap_mb",
    "num_rbs", "channel", "mcs_table_path", "mcs_table_scale",
    "list_mode", "trim_last_bundle", "mcs_floor", "seeds",
}
_CHANNEL_KEYS = {
    "kind", "k_factor", "time_correlation", "mean_snr_range_db",
    "snr_thresholds_path",
}


class ScenarioError(ValueError):
    """Scenario file rejected; ``problems`` lists every issue found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid scenario: " + "; ".join(self.problems))


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully-expanded evaluation scenario."""

    scenario_id: str
    ttis: int
    num_mvnos: int
    users_per_mvno: int
    lambda_min: Fraction | tuple[Fraction, Fraction]
    slice_cap: Fraction
    num_rbs: int
    channel: ChannelModel
    mcs_table: McsTable
    list_mode: str = LAMBDA_GLOBAL
    mars_options: MarsOptions = field(default_factory=MarsOptions)
    seeds: tuple[int, ...] = DEFAULT_SEEDS

    @property
    def users_total(self) -> int:
        return self.num_mvnos * self.users_per_mvno

    def k_factor(self) -> float | None:
        return self.channel.k_factor if self.channel.kind == "rician" else None


def _as_bits(raw: dict, name: str, problems: list[str], required: bool):
    bits_key, mb_key = f"{name}_bits", f"{name}_mb"
    if bits_key in raw and mb_key in raw:
        problems.append(f"give only one of {bits_key} and {mb_key}")
        return None
    key = bits_key if bits_key in raw else mb_key if mb_key in raw else None
    if key is None:
        if required:
            problems.append(f"missing {bits_key} or {mb_key}")
        return None
    unit = Fraction(1) if key == bits_key else _MB
    val = raw[key]
    try:
        if isinstance(val, (list, tuple)):
            if len(val) != 2:
                raise ValueError("range needs exactly [low, high]")
            lo, hi = (Fraction(str(v)) * unit for v in val)
            if lo > hi:
                raise ValueError("range low > high")
            if lo <= 0:
                raise ValueError("range must be positive")
            return (lo, hi)
        out = Fraction(str(val)) * unit
        if out <= 0:
            raise ValueError("must be positive")
        return out
    except (ValueError, TypeError) as exc:
        problems.append(f"{key}: {exc}")
        return None


def _positive_int(raw: dict, key: str, default, problems: list[str]):
    val = raw.get(key, default)
    if val is None:
        problems.append(f"missing {key}")
        return None
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        problems.append(f"{key} must be a positive integer, got {val!r}")
        return None
    return val


def resolve_mcs_table(path=None, scale=1) -> McsTable:
    """Scenario path beats the MARSIM_MCS_TABLE env var beats the packaged
    default."""
    if path is None:
        path = os.environ.get(ENV_MCS_TABLE) or None
    if path is None:
        return McsTable.default(scale=scale)
    return McsTable.from_file(path, scale=scale)


def _parse_channel(raw, base_dir, problems: list[str]) -> list[ChannelModel]:
    raw = raw or {}
    if not isinstance(raw, dict):
        problems.append("channel must be a mapping")
        return []
    unknown = set(raw) - _CHANNEL_KEYS
    if unknown:
        problems.append(f"unknown channel keys: {sorted(unknown)}")
    kind = raw.get("kind", "rician")
    corr = raw.get("time_correlation", "block_constant")
    ks = raw.get("k_factor", 0.0)
    k_list = list(ks) if isinstance(ks, (list, tuple)) else [ks]
    kwargs = {}
    if "mean_snr_range_db" in raw:
        rng = raw["mean_snr_range_db"]
        if not (isinstance(rng, (list, tuple)) and len(rng) == 2):
            problems.append("mean_snr_range_db must be [low, high]")
        else:
            kwargs["mean_snr_range_db"] = (float(rng[0]), float(rng[1]))
    if raw.get("snr_thresholds_path"):
        try:
            p = os.path.join(base_dir, raw["snr_thresholds_path"])
            kwargs["snr_thresholds_db"] = load_snr_thresholds(p)
        except (OSError, ValueError) as exc:
            problems.append(f"snr_thresholds_path: {exc}")
    models = []
    for k in k_list:
        try:
            models.append(ChannelModel(kind=kind, k_factor=float(k),
                                       time_correlation=corr, **kwargs))
        except (ValueError, TypeError) as exc:
            problems.append(f"channel: {exc}")
    return models


def load_scenario(path) -> list[ScenarioConfig]:
    """Parse, default and validate a scenario file.

    Returns the expanded scenario list (one entry per ttis x k_factor
    combination), ordered by scenario_id. Unknown keys and every invariant
    violation are reported together in a single ScenarioError.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ScenarioError([f"YAML parse error: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ScenarioError(["scenario file must hold a mapping"])

    problems: list[str] = []
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        problems.append(f"unknown keys: {sorted(unknown)}")

    scenario_id = raw.get("scenario_id")
    if not isinstance(scenario_id, str) or not scenario_id:
        problems.append("scenario_id must be a non-empty string")
        scenario_id = "scenario"

    ttis_raw = raw.get("ttis")
    ttis_list = ttis_raw if isinstance(ttis_raw, (list, tuple)) else [ttis_raw]
    ttis_vals: list[int] = []
    for t in ttis_list:
        if not isinstance(t, int) or isinstance(t, bool) or t < 1:
            problems.append(f"ttis must be positive integers, got {t!r}")
        else:
            ttis_vals.append(t)

    num_mvnos = _positive_int(raw, "num_mvnos", None, problems)
    users_per_mvno = _positive_int(raw, "users_per_mvno", None, problems)
    num_rbs = _positive_int(raw, "num_rbs", 100, problems)

    lambda_min = _as_bits(raw, "lambda_min", problems, required=True)
    slice_cap = _as_bits(raw, "slice_cap", problems, required=True)
    if isinstance(slice_cap, tuple):
        problems.append("slice_cap cannot be a range")
        slice_cap = None

    list_mode = raw.get("list_mode", LAMBDA_GLOBAL)
    if list_mode not in LIST_MODES:
        problems.append(f"list_mode must be one of {LIST_MODES}, got {list_mode!r}")

    trim = raw.get("trim_last_bundle", False)
    if not isinstance(trim, bool):
        problems.append("trim_last_bundle must be a boolean")
        trim = False
    mcs_floor = raw.get("mcs_floor", 1)
    if not isinstance(mcs_floor, int) or isinstance(mcs_floor, bool) \
            or not (0 <= mcs_floor <= MAX_MCS):
        problems.append(f"mcs_floor must be an integer in [0, {MAX_MCS}]")
        mcs_floor = 1

    seeds_raw = raw.get("seeds", list(DEFAULT_SEEDS))
    seeds: list[int] = []
    if not isinstance(seeds_raw, (list, tuple)) or not seeds_raw:
        problems.append("seeds must be a non-empty list of integers")
    else:
        for s in seeds_raw:
            if not isinstance(s, int) or isinstance(s, bool):
                problems.append(f"seed {s!r} is not an integer")
            else:
                seeds.append(s)

    base_dir = os.path.dirname(os.path.abspath(path))
    models = _parse_channel(raw.get("channel"), base_dir, problems)

    scale = raw.get("mcs_table_scale", 1)
    table = None
    try:
        table_path = raw.get("mcs_table_path")
        if table_path is not None:
            table_path = os.path.join(base_dir, table_path)
        table = resolve_mcs_table(table_path, scale=scale)
    except (OSError, ValueError) as exc:
        problems.append(f"mcs_table: {exc}")

    if problems:
        raise ScenarioError(problems)

    expand_t = isinstance(ttis_raw, (list, tuple))
    expand_k = len(models) > 1
    configs = []
    for t in ttis_vals:
        for model in models:
            sid = scenario_id
            if expand_t:
                sid += f"-T{t}"
            if expand_k:
                sid += f"-K{model.k_factor:g}"
            configs.append(ScenarioConfig(
                scenario_id=sid,
                ttis=t,
                num_mvnos=num_mvnos,
                users_per_mvno=users_per_mvno,
                lambda_min=lambda_min,
                slice_cap=slice_cap,
                num_rbs=num_rbs,
                channel=model,
                mcs_table=table,
                list_mode=list_mode,
                mars_options=MarsOptions(trim_last_bundle=trim, mcs_floor=mcs_floor),
                seeds=tuple(seeds),
            ))
    configs.sort(key=lambda c: c.scenario_id)
    return configs


def build_instance(config: ScenarioConfig, seed: int) -> SlicingInstance:
    """The slicing instance for one run; per-user demands are drawn here
    when the scenario gives a demand range."""
    lam = config.lambda_min
    if isinstance(lam, tuple):
        lo, hi = lam
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), _LAMBDA_STREAM_TAG)))
        draws = rng.uniform(float(lo), float(hi),
                            size=(config.num_mvnos, config.users_per_mvno))
        schedules = tuple(
            tuple((UserId(m, i + 1), Fraction(int(round(draws[m, i]))))
                  for i in range(config.users_per_mvno))
            for m in range(config.num_mvnos)
        )
        caps = tuple(config.slice_cap for _ in range(config.num_mvnos))
        return SlicingInstance(config.num_mvnos, schedules, caps,
                               config.num_rbs, config.ttis, config.mcs_table)
    return SlicingInstance.uniform(
        config.num_mvnos, config.users_per_mvno, lam, config.slice_cap,
        config.num_rbs, config.ttis, config.mcs_table)
