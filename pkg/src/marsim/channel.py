"""Seeded stochastic channel models that fill the per-user MCS grid.

Fading is modelled per cell as a Rician power gain (K=0 degenerates to
Rayleigh) on top of a per-user mean SNR drawn once, then quantised to an MCS
level through a threshold table. Each user owns an independent RNG substream
derived from (seed, mvno, sched_pos), so adding or removing users never
perturbs the draws of other users.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import MAX_MCS, NUM_MCS_LEVELS, ChannelGrid, SlicingInstance, UserId

KIND_RICIAN = "rician"
KIND_IID_UNIFORM = "iid_uniform_mcs"
BLOCK_CONSTANT = "block_constant"
PER_TTI = "per_tti"


def default_snr_thresholds() -> tuple[float, ...]:
    """29 thresholds, 1 dB apart from -6 dB to +22 dB."""
    return tuple(-6.0 + c for c in range(NUM_MCS_LEVELS))


def load_snr_thresholds(path) -> tuple[float, ...]:
    """Read one threshold (dB) per line; '#' comments and blanks ignored."""
    vals: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                vals.append(float(line))
    if len(vals) != NUM_MCS_LEVELS:
        raise ValueError(f"threshold file must hold {NUM_MCS_LEVELS} values, got {len(vals)}")
    return tuple(vals)


@dataclass(frozen=True)
class ChannelModel:
    """Configuration of the grid generator.

    kind:               "rician" (fading, K >= 0) or "iid_uniform_mcs"
                        (uniform levels, for channel-agnostic tests).
    time_correlation:   "block_constant" reuses the TTI-0 draw for the whole
                        window; "per_tti" redraws every TTI. RBs are always
                        independent (no frequency correlation).
    """

    kind: str = KIND_RICIAN
    k_factor: float = 0.0
    time_correlation: str = BLOCK_CONSTANT
    snr_thresholds_db: tuple[float, ...] = field(default_factory=default_snr_thresholds)
    mean_snr_range_db: tuple[float, float] = (0.0, 25.0)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (KIND_RICIAN, KIND_IID_UNIFORM):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.time_correlation not in (BLOCK_CONSTANT, PER_TTI):
            raise ValueError(f"unknown time correlation {self.time_correlation!r}")
        if self.k_factor < 0:
            raise ValueError("Rician K factor must be >= 0")
        thr = tuple(float(t) for t in self.snr_thresholds_db)
        if len(thr) != NUM_MCS_LEVELS:
            raise ValueError(f"need {NUM_MCS_LEVELS} SNR thresholds, got {len(thr)}")
        if any(b <= a for a, b in zip(thr, thr[1:])):
            raise ValueError("SNR thresholds must be strictly increasing")
        lo, hi = self.mean_snr_range_db
        if lo > hi:
            raise ValueError("mean SNR range must satisfy low <= high")
        object.__setattr__(self, "snr_thresholds_db", thr)
        object.__setattr__(self, "mean_snr_range_db", (float(lo), float(hi)))

    def reseeded(self, seed: int) -> "ChannelModel":
        return ChannelModel(self.kind, self.k_factor, self.time_correlation,
                            self.snr_thresholds_db, self.mean_snr_range_db, int(seed))


def user_rng(seed: int, user: UserId) -> np.random.Generator:
    """Independent, reproducible substream for one user."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), user.mvno, user.sched_pos)))


def rician_power_gains(k_factor: float, shape, rng: np.random.Generator) -> np.ndarray:
    """Unit-mean Rician power gains: |sqrt(K/(K+1)) + scatter|^2 with
    circularly-symmetric scatter of power 1/(K+1). K=0 gives Exponential(1)
    (Rayleigh fading)."""
    k = float(k_factor)
    g = rng.standard_normal(size=(2,) + tuple(shape))
    scatter_scale = np.sqrt(1.0 / (2.0 * (k + 1.0)))
    los = np.sqrt(k / (k + 1.0))
    re = los + scatter_scale * g[0]
    im = scatter_scale * g[1]
    return re * re + im * im


def snr_to_mcs(snr_db: np.ndarray, thresholds: tuple[float, ...]) -> np.ndarray:
    """Largest level whose threshold is <= SNR; below the lowest -> level 0."""
    idx = np.searchsorted(np.asarray(thresholds), np.asarray(snr_db), side="right") - 1
    return np.clip(idx, 0, MAX_MCS).astype(np.int16)


def generate_grid(model: ChannelModel, instance: SlicingInstance) -> ChannelGrid:
    """Deterministic function of (model, instance dimensions, seed)."""
    num_rbs, num_ttis = instance.num_rbs, instance.num_ttis
    draw_ttis = 1 if model.time_correlation == BLOCK_CONSTANT else num_ttis
    per_user: dict[UserId, np.ndarray] = {}
    for user in instance.users():
        rng = user_rng(model.seed, user)
        if model.kind == KIND_IID_UNIFORM:
            q = rng.integers(0, NUM_MCS_LEVELS, size=(num_rbs, draw_ttis)).astype(np.int16)
        else:
            lo, hi = model.mean_snr_range_db
            mean_snr = rng.uniform(lo, hi)
            gains = rician_power_gains(model.k_factor, (num_rbs, draw_ttis), rng)
            snr_db = mean_snr + 10.0 * np.log10(gains)
            q = snr_to_mcs(snr_db, model.snr_thresholds_db)
        if draw_ttis == 1 and num_ttis > 1:
            q = np.repeat(q, num_ttis, axis=1)
        per_user[user] = q
    return ChannelGrid.from_cells(instance, per_user)


def q_max_per_user(grid: ChannelGrid, user: UserId) -> int:
    """Best MCS level the user sees anywhere in the window."""
    return int(grid.cells(user).max())
