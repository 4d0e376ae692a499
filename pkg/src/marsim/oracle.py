"""Exhaustive optimal solver for tiny slicing instances.

Serves as ground truth for optimality-gap and bound-sandwich tests. The
search enumerates every assignment of each RB-TTI cell to (free | one user).
Given an assignment, the best legal MCS for a (user, TTI) group is the
minimum supportable level over the group's cells (any higher level is
illegal on some cell, any lower level is dominated because bits per RB are
non-decreasing), so per-group MCS choices never need explicit enumeration;
a literal mode that does enumerate them exists for auditing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    Allocation,
    Assignment,
    ChannelGrid,
    McsTable,
    SlicingInstance,
    UserId,
)

HARD_STATE_CEILING = 10 ** 8


@dataclass(frozen=True)
class OracleLimits:
    """Scale guard for the exponential search."""

    max_cells: int = 8
    max_users: int = 4
    max_mcs_levels: int = 6

    def __post_init__(self):
        if min(self.max_cells, self.max_users, self.max_mcs_levels) < 1:
            raise ValueError("limits must be positive")


class OracleSizeError(ValueError):
    """Instance exceeds the enumeration limits."""


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    witness: Allocation


def _check_limits(instance: SlicingInstance, grid: ChannelGrid, limits: OracleLimits):
    cells = instance.num_cells
    users = instance.num_users
    levels = len(np.unique(grid.q))
    states = (users + 1) ** cells
    problems = []
    if cells > limits.max_cells:
        problems.append(f"{cells} cells > max_cells={limits.max_cells}")
    if users > limits.max_users:
        problems.append(f"{users} users > max_users={limits.max_users}")
    if levels > limits.max_mcs_levels:
        problems.append(f"{levels} distinct MCS levels > max_mcs_levels={limits.max_mcs_levels}")
    if states > HARD_STATE_CEILING:
        problems.append(f"{states} assignment states > ceiling {HARD_STATE_CEILING}")
    if problems:
        raise OracleSizeError("instance too large to enumerate: " + "; ".join(problems))


def _served_prefixes(instance: SlicingInstance, rate_of) -> list[UserId]:
    """Longest valid scheduling prefix per MVNO given each user's rate."""
    served: list[UserId] = []
    for m, sched in enumerate(instance.schedules):
        total = Fraction(0)
        for user, lam in sched:
            rate = rate_of(user)
            if rate < lam or total + rate > instance.slice_caps[m]:
                break
            total += rate
            served.append(user)
    return served


def solve_exact(instance: SlicingInstance, grid: ChannelGrid,
                limits: OracleLimits = OracleLimits(), prune: bool = True) -> OracleResult:
    """Maximum number of servable users plus one optimal witness allocation.

    The witness assigns cells only to served users, uses the per-(user, TTI)
    minimum supportable level as MCS, and always passes validation. Among
    optimal assignments the lexicographically smallest owner vector (cells
    in (rb, tti) order, owners in instance order, free last) is returned.
    With ``prune`` the search cuts subtrees whose optimistic served count
    cannot beat the incumbent; the result is identical to the pure
    enumeration.
    """
    _check_limits(instance, grid, limits)
    users = list(instance.users())
    n_users = len(users)
    cells = [(rb, tti) for rb in range(instance.num_rbs) for tti in range(instance.num_ttis)]
    n_cells = len(cells)
    table = instance.mcs_table

    # hot loops run on exact integers: all bit quantities scaled by the
    # table's common denominator
    den = table.denominator
    nums = table.numerators
    qv = [[grid.level(u, rb, tti) for (rb, tti) in cells] for u in users]
    gain = [[nums[q] for q in row] for row in qv]
    future = [[0] * (n_cells + 1) for _ in range(n_users)]
    for ui in range(n_users):
        for idx in range(n_cells - 1, -1, -1):
            future[ui][idx] = future[ui][idx + 1] + gain[ui][idx]

    def scaled(x: Fraction):
        y = Fraction(x) * den
        return int(y) if y.denominator == 1 else y

    # per MVNO: [(ui, scaled lambda)] in scheduling order, plus scaled cap
    groups = []
    index_of = {u: i for i, u in enumerate(users)}
    for m, sched in enumerate(instance.schedules):
        members = [(index_of[u], scaled(lam)) for u, lam in sched]
        groups.append((members, scaled(instance.slice_caps[m])))

    owner = [-1] * n_cells          # -1 = free
    own_bits = [0] * n_users
    best_count = -1
    best_owner: list[int] | None = None

    def evaluate() -> int:
        # rate of a (user, tti) group = group size x bits at the group's
        # minimum supportable level
        rates = [0] * n_users
        minq = {}
        size = {}
        for idx, own in enumerate(owner):
            if own >= 0:
                key = (own, cells[idx][1])
                q = qv[own][idx]
                size[key] = size.get(key, 0) + 1
                if q < minq.get(key, 99):
                    minq[key] = q
        for key, n in size.items():
            rates[key[0]] += n * nums[minq[key]]
        count = 0
        for members, cap in groups:
            total = 0
            for ui, need in members:
                r = rates[ui]
                if r < need or total + r > cap:
                    break
                total += r
                count += 1
        return count

    def bound(depth: int) -> int:
        # user may still be servable if all its own plus all undecided cells
        # at their individual best levels could cover its demand
        count = 0
        for members, _cap in groups:
            for ui, need in members:
                if own_bits[ui] + future[ui][depth] < need:
                    break
                count += 1
        return count

    def rec(depth: int):
        nonlocal best_count, best_owner
        if depth == n_cells:
            count = evaluate()
            if count > best_count:
                best_count = count
                best_owner = owner.copy()
            return
        if best_count == n_users:
            return
        if prune and bound(depth) <= best_count:
            return
        for ui in range(n_users):
            owner[depth] = ui
            own_bits[ui] += gain[ui][depth]
            rec(depth + 1)
            own_bits[ui] -= gain[ui][depth]
        owner[depth] = -1
        rec(depth + 1)

    rec(0)
    assert best_owner is not None

    # rebuild the witness: rates, served prefix, strip unserved users
    per_user_cells: dict[UserId, list[int]] = {u: [] for u in users}
    for idx, own in enumerate(best_owner):
        if own >= 0:
            per_user_cells[users[own]].append(idx)
    rates: dict[UserId, Fraction] = {}
    group_mcs: dict[tuple[UserId, int], int] = {}
    for u in users:
        ui = users.index(u)
        per_tti: dict[int, list[int]] = {}
        for idx in per_user_cells[u]:
            per_tti.setdefault(cells[idx][1], []).append(idx)
        rate = Fraction(0)
        for tti, idxs in per_tti.items():
            level = min(qv[ui][i] for i in idxs)
            group_mcs[(u, tti)] = level
            rate += len(idxs) * table[level]
        rates[u] = rate
    served = _served_prefixes(instance, lambda u: rates[u])
    served_set = set(served)
    assignments = [
        Assignment(cells[idx][0], cells[idx][1], u, group_mcs[(u, cells[idx][1])])
        for u in served for idx in per_user_cells[u]
    ]
    witness = Allocation.build(instance, grid, assignments, served)
    return OracleResult(best_count, witness)


def solve_exact_literal(instance: SlicingInstance, grid: ChannelGrid,
                        limits: OracleLimits = OracleLimits()) -> int:
    """Audit-grade solver that also enumerates the per-(user, TTI) MCS choice
    over the levels present in the grid plus level 0. Exponentially slower;
    for cross-checking the closed-form MCS rule on micro instances."""
    _check_limits(instance, grid, limits)
    users = list(instance.users())
    cells = [(rb, tti) for rb in range(instance.num_rbs) for tti in range(instance.num_ttis)]
    levels = sorted(set(int(v) for v in np.unique(grid.q)) | {0})
    table = instance.mcs_table
    n_groups = len(users) * instance.num_ttis
    states = (len(users) + 1) ** len(cells) * len(levels) ** n_groups
    if states > HARD_STATE_CEILING:
        raise OracleSizeError(f"literal search needs {states} states > {HARD_STATE_CEILING}")

    best = 0
    for owners in itertools.product(range(-1, len(users)), repeat=len(cells)):
        groups: dict[tuple[int, int], list[int]] = {}
        for idx, own in enumerate(owners):
            if own >= 0:
                groups.setdefault((own, cells[idx][1]), []).append(idx)
        group_keys = sorted(groups)
        for choice in itertools.product(levels, repeat=len(group_keys)):
            rates = {u: Fraction(0) for u in users}
            legal = True
            for key, level in zip(group_keys, choice):
                ui, tti = key
                qs = [grid.level(users[ui], cells[i][0], cells[i][1]) for i in groups[key]]
                if level > min(qs):
                    legal = False
                    break
                rates[users[ui]] += len(qs) * table[level]
            if not legal:
                continue
            served = _served_prefixes(instance, lambda u: rates[u])
            best = max(best, len(served))
    return best


def closed_form_constant_grid(instance: SlicingInstance, level: int) -> int:
    """Independent optimum for a constant grid with identical per-user
    demand: every served user needs the same cell count, so the optimum is
    what the pool and the caps admit."""
    table = instance.mcs_table
    v = table[level]
    lams = {lam for sched in instance.schedules for _, lam in sched}
    if len(lams) != 1:
        raise ValueError("closed form needs identical demands")
    lam = lams.pop()
    if v <= 0:
        return 0
    n = math.ceil(lam / v)
    achieved = n * v
    by_caps = sum(
        min(len(sched), int(instance.slice_caps[m] // achieved))
        for m, sched in enumerate(instance.schedules)
    )
    return min(instance.num_cells // n, by_caps)
