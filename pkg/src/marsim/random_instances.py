"""Seeded random instance generators for cross-checking the allocators.

Tiny instances stay within the exact solver's enumeration limits; the
larger generator stresses the allocator and validator across the full
supported dimension range.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .channel import ChannelModel, generate_grid
from .core import ChannelGrid, McsTable, SlicingInstance, UserId


def _random_schedules(rng: np.random.Generator, num_mvnos: int, total_users: int,
                      lam_of) -> tuple:
    counts = np.ones(num_mvnos, dtype=int)
    for _ in range(total_users - num_mvnos):
        counts[rng.integers(num_mvnos)] += 1
    schedules = []
    for m in range(num_mvnos):
        schedules.append(tuple(
            (UserId(m, i), Fraction(lam_of())) for i in range(1, counts[m] + 1)))
    return tuple(schedules)


def random_tiny_instance(rng: np.random.Generator, max_cells: int = 8,
                         max_users: int = 4, max_levels: int = 4
                         ) -> tuple[SlicingInstance, ChannelGrid]:
    """Instance small enough for the exhaustive solver, on the toy linear
    MCS table (bits per RB = level index)."""
    num_ttis = int(rng.integers(1, 3))
    num_rbs = int(rng.integers(1, max_cells // num_ttis + 1))
    total_users = int(rng.integers(1, max_users + 1))
    num_mvnos = int(rng.integers(1, min(3, total_users) + 1))

    schedules = _random_schedules(rng, num_mvnos, total_users,
                                  lambda: int(rng.integers(1, 13)))
    caps = []
    for sched in schedules:
        lam_sum = sum(lam for _, lam in sched)
        if rng.random() < 0.5:
            caps.append(lam_sum * 2)
        else:
            caps.append(Fraction(max(1, int(float(lam_sum) * rng.uniform(0.5, 1.2)))))
    instance = SlicingInstance(num_mvnos, schedules, tuple(caps),
                               num_rbs, num_ttis, McsTable.linear())

    n_levels = int(rng.integers(2, max_levels + 1))
    pool = sorted(rng.choice(np.arange(0, 9), size=n_levels, replace=False).tolist())
    if max(pool) == 0:
        pool[-1] = 1
    q = rng.choice(np.asarray(pool, dtype=np.int16),
                   size=(total_users, num_rbs, num_ttis))
    users = list(instance.users())
    grid = ChannelGrid(q, {u: i for i, u in enumerate(users)})
    return instance, grid


def random_instance(rng: np.random.Generator, max_rbs: int = 100,
                    max_ttis: int = 100, max_mvnos: int = 3,
                    max_users_per_mvno: int = 15
                    ) -> tuple[SlicingInstance, ChannelGrid]:
    """Instance across the full supported dimension range, with demands and
    caps spanning loose to infeasible, for allocator/validator stress tests."""
    num_rbs = int(rng.integers(1, max_rbs + 1))
    num_ttis = int(round(math.exp(rng.uniform(0.0, math.log(max_ttis)))))
    num_mvnos = int(rng.integers(1, max_mvnos + 1))
    total_users = int(rng.integers(num_mvnos, num_mvnos * max_users_per_mvno + 1))

    table = McsTable.linear() if rng.random() < 0.3 else McsTable.default()
    pool_bits = float(table[28]) * num_rbs * num_ttis
    target = pool_bits * rng.uniform(0.005, 0.2)

    def lam_of():
        return max(1, int(target * rng.uniform(0.3, 1.5)))

    schedules = _random_schedules(rng, num_mvnos, total_users, lam_of)
    caps = []
    for sched in schedules:
        lam_sum = float(sum(lam for _, lam in sched))
        caps.append(Fraction(max(1, int(lam_sum * rng.uniform(0.3, 2.0)))))
    instance = SlicingInstance(num_mvnos, schedules, tuple(caps),
                               num_rbs, num_ttis, table)

    if rng.random() < 0.5:
        model = ChannelModel(kind="iid_uniform_mcs",
                             time_correlation=str(rng.choice(["block_constant", "per_tti"])),
                             seed=int(rng.integers(0, 2 ** 32)))
    else:
        model = ChannelModel(kind="rician", k_factor=float(rng.choice([0.0, 2.0, 8.0])),
                             time_correlation=str(rng.choice(["block_constant", "per_tti"])),
                             seed=int(rng.integers(0, 2 ** 32)))
    grid = generate_grid(model, instance)
    return instance, grid
