"""Greedy slot allocation, a certified serving-count upper bound and the
static per-user MCS baselines.

The greedy allocator walks the slicing list. For each user it searches, per
TTI, for the single-MCS resource-block bundle with the highest deliverable
rate, preferring the highest MCS window that still satisfies the user's
minimum rate, then commits bundles in decreasing-MCS order until the demand
is met. A user that cannot be served keeps nothing (all-or-nothing), and an
unserved user closes its MVNO so served users always form a scheduling-order
prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    MAX_MCS,
    NUM_MCS_LEVELS,
    Allocation,
    Assignment,
    ChannelGrid,
    McsTable,
    SlicingInstance,
    UserId,
)
from .slicing import SlicingList

_INT64_GUARD = 1 << 62


@dataclass(frozen=True)
class TtiBundle:
    """Largest-rate single-MCS bundle of free RBs at one TTI."""

    tti: int
    mcs: int
    rbs: tuple[int, ...]
    rate: Fraction

    def __post_init__(self):
        if len(self.rbs) != len(set(self.rbs)):
            raise ValueError("bundle lists an RB twice")


@dataclass(frozen=True)
class MarsOptions:
    """Greedy allocator knobs.

    trim_last_bundle: drop surplus RBs from the final bundle so the user
    barely clears its minimum rate. mcs_floor: lowest MCS window the
    allocator falls back to before giving up on a user.
    """

    trim_last_bundle: bool = False
    mcs_floor: int = 1

    def __post_init__(self):
        if not (0 <= self.mcs_floor <= MAX_MCS):
            raise ValueError(f"mcs_floor must be in [0, {MAX_MCS}]")


@dataclass(frozen=True)
class BoundReport:
    """Served-count report of the upper bound or a static baseline."""

    algorithm: str
    served: tuple[UserId, ...]
    rb_need: Mapping[UserId, int]
    rbs_used: int
    bits_served: Fraction

    @property
    def users_served(self) -> int:
        return len(self.served)


def _free_mask(num_rbs: int, num_ttis: int, allocated) -> np.ndarray:
    """True where a cell is still free. ``allocated`` is a set of (rb, tti)
    pairs or a boolean (rbs, ttis) mask of taken cells."""
    if isinstance(allocated, np.ndarray):
        if allocated.shape != (num_rbs, num_ttis):
            raise ValueError("allocated mask has wrong shape")
        return ~allocated.astype(bool)
    free = np.ones((num_rbs, num_ttis), dtype=bool)
    for rb, tti in allocated:
        free[rb, tti] = False
    return free


def _rate_rows(q_user: np.ndarray, free: np.ndarray, numerators: np.ndarray) -> np.ndarray:
    """(ttis, 29) int64 matrix: deliverable rate numerator per (tti, level),
    i.e. count of free RBs supporting the level times the level's bits."""
    num_rbs, num_ttis = q_user.shape
    flat = (q_user + NUM_MCS_LEVELS * np.arange(num_ttis)[None, :])[free.nonzero()]
    counts = np.bincount(flat, minlength=NUM_MCS_LEVELS * num_ttis)
    counts = counts.reshape(num_ttis, NUM_MCS_LEVELS)
    # counts[t, c] currently holds cells exactly at level c; suffix-sum to
    # get cells supporting at least c
    suffix = np.cumsum(counts[:, ::-1], axis=1)[:, ::-1]
    return suffix.astype(np.int64) * numerators[None, :]


def _best_level(rates_row: np.ndarray, c_low: int, c_high: int) -> tuple[int, int]:
    """Highest level of maximal rate within [c_low, c_high]; (level, rate)."""
    if c_low > c_high:
        return 0, 0
    window = rates_row[c_low:c_high + 1][::-1]
    i = int(np.argmax(window))
    return c_high - i, int(window[i])


def best_bundle_at_tti(grid: ChannelGrid, user: UserId, tti: int, allocated,
                       c_low: int, table: McsTable) -> TtiBundle:
    """Best single-MCS bundle of free RBs for one user at one TTI.

    Scans levels from the user's best supportable level down to ``c_low``
    and returns the (level, RB set) maximising RBs x bits-per-RB, breaking
    rate ties toward the higher level (fewer RBs). Empty bundle if nothing
    is deliverable.
    """
    q_user = grid.cells(user)
    if not (0 <= tti < q_user.shape[1]):
        raise ValueError(f"tti {tti} out of range")
    free = _free_mask(q_user.shape[0], q_user.shape[1], allocated)
    c_high = int(q_user.max())
    numerators = table.numerator_array()
    if int(numerators.max(initial=0)) * q_user.size >= _INT64_GUARD:
        raise OverflowError("MCS table bit counts too large for fast path")
    rates = _rate_rows(q_user, free, numerators)
    level, rate_num = _best_level(rates[tti], c_low, c_high)
    if rate_num <= 0:
        return TtiBundle(tti, 0, (), Fraction(0))
    rbs = tuple(int(r) for r in np.flatnonzero(free[:, tti] & (q_user[:, tti] >= level)))
    return TtiBundle(tti, level, rbs, Fraction(rate_num, table.denominator))


def _ceil_div(lam: Fraction, v: Fraction) -> int:
    return math.ceil(lam / v)


def allocate_user(user: UserId, lambda_min, grid: ChannelGrid, allocated,
                  table: McsTable, opts: MarsOptions = MarsOptions()
                  ) -> tuple[bool, tuple[Assignment, ...], Fraction]:
    """Try to serve one user from the currently free cells.

    Searches for the highest MCS window [c, best-supported-level] whose
    per-TTI best bundles can jointly cover ``lambda_min``; if even the
    window down at ``opts.mcs_floor`` falls short, the user is rejected and
    nothing is assigned. Bundles are committed in decreasing bundle-MCS
    order (ties: higher rate first, then lower TTI) until the demand is met.

    Returns (served, assignments, achieved_rate); ``allocated`` is not
    modified.
    """
    lam = Fraction(lambda_min)
    if lam <= 0:
        return True, (), Fraction(0)
    q_user = grid.cells(user)
    num_rbs, num_ttis = q_user.shape
    free = _free_mask(num_rbs, num_ttis, allocated)
    c_high = int(q_user.max())
    floor = opts.mcs_floor
    if c_high < floor:
        return False, (), Fraction(0)

    numerators = table.numerator_array()
    den = table.denominator
    if int(numerators.max(initial=0)) * (q_user.size + 1) >= _INT64_GUARD:
        raise OverflowError("MCS table bit counts too large for fast path")
    rates = _rate_rows(q_user, free, numerators)
    # window_best[t, c] = best rate in levels [c, c_high] at tti t
    window_best = np.maximum.accumulate(rates[:, ::-1], axis=1)[:, ::-1]
    totals = window_best.sum(axis=0, dtype=np.int64)

    def reaches(c: int) -> bool:
        return Fraction(int(totals[c]), den) >= lam

    if not reaches(floor):
        return False, (), Fraction(0)
    c_star = floor
    for c in range(c_high, floor - 1, -1):
        if reaches(c):
            c_star = c
            break

    order = []
    for t in range(num_ttis):
        level, rate_num = _best_level(rates[t], c_star, c_high)
        if rate_num > 0:
            order.append((-level, -rate_num, t))
    order.sort()

    chosen: list[tuple[int, int, int]] = []  # (tti, level, rate_num)
    total = Fraction(0)
    for neg_level, neg_rate, t in order:
        chosen.append((t, -neg_level, -neg_rate))
        total += Fraction(-neg_rate, den)
        if total >= lam:
            break
    if total < lam:  # only possible through rounding bugs; be safe
        return False, (), Fraction(0)

    assignments: list[Assignment] = []
    for idx, (t, level, rate_num) in enumerate(chosen):
        rbs = [int(r) for r in np.flatnonzero(free[:, t] & (q_user[:, t] >= level))]
        if opts.trim_last_bundle and idx == len(chosen) - 1:
            before = total - Fraction(rate_num, den)
            v = table[level]
            keep = _ceil_div(lam - before, v)
            rbs = rbs[:keep]
            total = before + keep * v
        assignments.extend(Assignment(rb, t, user, level) for rb in rbs)
    return True, tuple(assignments), total


def mars_allocate(instance: SlicingInstance, grid: ChannelGrid,
                  slicing_list: SlicingList, opts: MarsOptions = MarsOptions()
                  ) -> Allocation:
    """Serve users in slicing-list order until demands, caps or cells run out.

    A user is skipped when its MVNO's achieved bits plus the user's minimum
    rate would break the slice cap, when the cells cannot cover its demand,
    or when the bits actually achieved would break the cap; any skip closes
    the MVNO (later users of that MVNO stay unserved) so that served users
    always form a scheduling-order prefix. The partial allocation is always
    returned and always validates cleanly.
    """
    num_rbs, num_ttis = instance.num_rbs, instance.num_ttis
    taken = np.zeros((num_rbs, num_ttis), dtype=bool)
    assignments: list[Assignment] = []
    served: list[UserId] = []
    mvno_bits = [Fraction(0)] * instance.num_mvnos
    closed = [False] * instance.num_mvnos
    cells_left = num_rbs * num_ttis

    for m, pos, lam in slicing_list:
        user = UserId(m, pos)
        if closed[m]:
            continue
        if cells_left == 0:
            closed[m] = True
            continue
        if mvno_bits[m] + lam > instance.slice_caps[m]:
            closed[m] = True
            continue
        ok, assigns, rate = allocate_user(user, lam, grid, taken, instance.mcs_table, opts)
        if not ok or mvno_bits[m] + rate > instance.slice_caps[m]:
            closed[m] = True
            continue
        for a in assigns:
            taken[a.rb, a.tti] = True
        cells_left -= len(assigns)
        assignments.extend(assigns)
        served.append(user)
        mvno_bits[m] += rate

    return Allocation.build(instance, grid, assignments, served)


def _prefix_menu(instance: SlicingInstance, level_of, label: str
                 ) -> list[list[tuple[int, int, Fraction]]]:
    """Per MVNO: feasible prefixes as (length, total RB need, total bits).

    ``level_of(user)`` gives the scalar MCS the user is assumed to use on
    every RB; a prefix stops growing once a user is undeliverable at that
    level or the requested bits would break the slice cap.
    """
    table = instance.mcs_table
    menu: list[list[tuple[int, int, Fraction]]] = []
    for m, sched in enumerate(instance.schedules):
        options = [(0, 0, Fraction(0))]
        need_rbs, bits, lam_sum = 0, Fraction(0), Fraction(0)
        for user, lam in sched:
            v = table[level_of(user)]
            if v <= 0:
                break
            if lam_sum + lam > instance.slice_caps[m]:
                break
            n = _ceil_div(lam, v)
            need_rbs += n
            bits += n * v
            lam_sum += lam
            options.append((len(options), need_rbs, bits))
        menu.append(options)
    return menu


def upper_bound(instance: SlicingInstance, grid: ChannelGrid,
                slicing_list: SlicingList) -> BoundReport:
    """Certified upper bound on the number of servable users.

    Fictitious best-channel relaxation: every cell carries each user's
    best-anywhere MCS, so user u needs at least ceil(lambda_u / v[q_max_u])
    cells, and a feasible served set is a per-MVNO scheduling prefix whose
    requested bits respect each slice cap. The bound maximises the served
    count over all prefix combinations that fit the cell pool, which
    dominates every allocation satisfying the slicing rules.
    """
    pool = instance.num_cells
    q_max = {u: int(grid.cells(u).max()) for u in instance.users()}
    menu = _prefix_menu(instance, lambda u: q_max[u], "upper_bound")

    # dp[k] = least cells needed to serve k users; backtrack for the combo
    total_users = instance.num_users
    INF = pool + 1
    dp = [0] + [INF] * total_users
    picks: list[list[int]] = []
    for options in menu:
        choice = [-1] * (total_users + 1)
        ndp = [INF] * (total_users + 1)
        for k in range(total_users + 1):
            if dp[k] > pool:
                continue
            for length, cost, _bits in options:
                nk = k + length
                if dp[k] + cost < ndp[nk]:
                    ndp[nk] = dp[k] + cost
                    choice[nk] = length
        dp = ndp
        picks.append(choice)

    best_k = max(k for k in range(total_users + 1) if dp[k] <= pool)
    lengths = [0] * instance.num_mvnos
    k = best_k
    for m in range(instance.num_mvnos - 1, -1, -1):
        lengths[m] = picks[m][k]
        k -= lengths[m]

    served: list[UserId] = []
    rb_need: dict[UserId, int] = {}
    rbs_used = 0
    bits = Fraction(0)
    for m, sched in enumerate(instance.schedules):
        for user, lam in sched[:lengths[m]]:
            n = _ceil_div(lam, instance.mcs_table[q_max[user]])
            served.append(user)
            rb_need[user] = n
            rbs_used += n
            bits += n * instance.mcs_table[q_max[user]]
    return BoundReport("upper_bound", tuple(served), rb_need, rbs_used, bits)


BASELINE_MAXIMUM = "maximum_mcs"
BASELINE_AVERAGE = "average_mcs"
BASELINE_LOWEST = "lowest_mcs"
BASELINE_CRITERIA = (BASELINE_MAXIMUM, BASELINE_AVERAGE, BASELINE_LOWEST)


def _scalar_level(cells: np.ndarray, criterion: str) -> int:
    if criterion == BASELINE_MAXIMUM:
        return int(cells.max())
    if criterion == BASELINE_LOWEST:
        return int(cells.min())
    if criterion == BASELINE_AVERAGE:
        return int(math.floor(float(cells.mean())))
    raise ValueError(f"unknown baseline criterion {criterion!r}")


def static_baseline(instance: SlicingInstance, grid: ChannelGrid,
                    slicing_list: SlicingList, criterion: str) -> BoundReport:
    """Static MCS selection: collapse each user's channel to one scalar level
    (its max, floored mean or min over all cells) and allocate by ceiling
    arithmetic from the pool, greedily in slicing-list order with the same
    cap and prefix rules as the greedy allocator."""
    if criterion not in BASELINE_CRITERIA:
        raise ValueError(f"unknown baseline criterion {criterion!r}")
    table = instance.mcs_table
    pool = instance.num_cells
    levels = {u: _scalar_level(grid.cells(u), criterion) for u in instance.users()}

    served: list[UserId] = []
    rb_need: dict[UserId, int] = {}
    rbs_used = 0
    bits_total = Fraction(0)
    mvno_bits = [Fraction(0)] * instance.num_mvnos
    closed = [False] * instance.num_mvnos
    for m, pos, lam in slicing_list:
        if closed[m]:
            continue
        user = UserId(m, pos)
        v = table[levels[user]]
        if v <= 0:
            closed[m] = True
            continue
        if mvno_bits[m] + lam > instance.slice_caps[m]:
            closed[m] = True
            continue
        n = _ceil_div(lam, v)
        if rbs_used + n > pool:
            closed[m] = True
            continue
        achieved = n * v
        if mvno_bits[m] + achieved > instance.slice_caps[m]:
            closed[m] = True
            continue
        served.append(user)
        rb_need[user] = n
        rbs_used += n
        bits_total += achieved
        mvno_bits[m] += achieved
    return BoundReport(criterion, tuple(served), rb_need, rbs_used, bits_total)
