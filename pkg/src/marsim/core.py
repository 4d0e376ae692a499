"""Domain types shared by the simulator, the per-RB rate function and the
allocation constraint validator.

All rate bookkeeping uses exact rationals (``fractions.Fraction``) so that
minimum-rate and slice-cap checks are bit-exact and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

NUM_MCS_LEVELS = 29
MAX_MCS = NUM_MCS_LEVELS - 1

# One resource block spans 12 subcarriers x 14 symbols in one TTI.
RE_PER_RB = 168

DEFAULT_EFFICIENCY_RESOURCE = "mcs_efficiency.txt"


class StructuralError(ValueError):
    """An object references users, RBs, TTIs or MCS levels that do not exist."""


def _check_mcs(c: int, what: str = "MCS level") -> int:
    if not (0 <= int(c) <= MAX_MCS):
        raise ValueError(f"{what} must be in [0, {MAX_MCS}], got {c}")
    return int(c)


@dataclass(frozen=True)
class McsTable:
    """Bits carried by one RB in one TTI for each MCS index 0..28.

    Entries must be non-negative and non-decreasing: a higher MCS never
    carries fewer bits.
    """

    bits_per_rb: tuple[Fraction, ...]

    def __post_init__(self):
        bits = tuple(Fraction(b) for b in self.bits_per_rb)
        if len(bits) != NUM_MCS_LEVELS:
            raise ValueError(f"table must have {NUM_MCS_LEVELS} entries, got {len(bits)}")
        if any(b < 0 for b in bits):
            raise ValueError("bits per RB must be non-negative")
        for c in range(1, NUM_MCS_LEVELS):
            if bits[c] < bits[c - 1]:
                raise ValueError(f"bits per RB must be non-decreasing (dips at index {c})")
        object.__setattr__(self, "bits_per_rb", bits)
        # Integer numerators over a common denominator let hot loops compare
        # bundle rates with exact int64 arithmetic instead of Fractions.
        den = math.lcm(*(b.denominator for b in bits))
        nums = tuple(int(b * den) for b in bits)
        object.__setattr__(self, "_denominator", den)
        object.__setattr__(self, "_numerators", nums)

    @property
    def denominator(self) -> int:
        return self._denominator

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._numerators

    def numerator_array(self) -> np.ndarray:
        return np.asarray(self._numerators, dtype=np.int64)

    def __getitem__(self, c: int) -> Fraction:
        return self.bits_per_rb[_check_mcs(c)]

    def scaled(self, factor) -> "McsTable":
        f = Fraction(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        return McsTable(tuple(b * f for b in self.bits_per_rb))

    @classmethod
    def linear(cls) -> "McsTable":
        """Toy table with v[c] = c, handy for hand-checkable unit tests."""
        return cls(tuple(Fraction(c) for c in range(NUM_MCS_LEVELS)))

    @classmethod
    def from_efficiency_lines(cls, lines: Iterable[str], scale=1) -> "McsTable":
        """Parse "index efficiency" pairs; bits per RB = efficiency * 168."""
        eff: dict[int, Fraction] = {}
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'index efficiency', got {raw!r}")
            try:
                idx = int(parts[0])
                val = Fraction(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            _check_mcs(idx, f"line {lineno}: MCS index")
            if idx in eff:
                raise ValueError(f"line {lineno}: duplicate index {idx}")
            eff[idx] = val
        missing = sorted(set(range(NUM_MCS_LEVELS)) - set(eff))
        if missing:
            raise ValueError(f"missing MCS indices: {missing}")
        bits = tuple(eff[c] * RE_PER_RB * Fraction(scale) for c in range(NUM_MCS_LEVELS))
        return cls(bits)

    @classmethod
    def from_file(cls, path, scale=1) -> "McsTable":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_efficiency_lines(fh, scale=scale)

    @classmethod
    def default(cls, scale=1) -> "McsTable":
        """The packaged efficiency table (3GPP NR table 1, monotonised)."""
        text = resources.files("marsim.data").joinpath(DEFAULT_EFFICIENCY_RESOURCE).read_text()
        return cls.from_efficiency_lines(text.splitlines(), scale=scale)


@dataclass(frozen=True, order=True)
class UserId:
    """A user is addressed by its operator index and 1-based scheduling position."""

    mvno: int
    sched_pos: int

    def __post_init__(self):
        if self.mvno < 0:
            raise ValueError("mvno index must be >= 0")
        if self.sched_pos < 1:
            raise ValueError("scheduling position is 1-based")


@dataclass(frozen=True)
class SlicingInstance:
    """One slicing problem: operators, their user schedules and demands,
    per-slice throughput caps and the RB grid dimensions.

    ``schedules[m]`` lists MVNO m's users in scheduling order as
    ``(UserId, min_rate_bits)`` pairs; positions must be consecutive from 1.
    Rates are bits per slicing window (the window spans ``num_ttis`` TTIs).
    """

    num_mvnos: int
    schedules: tuple[tuple[tuple[UserId, Fraction], ...], ...]
    slice_caps: tuple[Fraction, ...]
    num_rbs: int
    num_ttis: int
    mcs_table: McsTable

    def __post_init__(self):
        if self.num_mvnos < 1:
            raise ValueError("need at least one MVNO")
        if self.num_rbs < 1 or self.num_ttis < 1:
            raise ValueError("grid dimensions must be positive")
        if len(self.schedules) != self.num_mvnos or len(self.slice_caps) != self.num_mvnos:
            raise ValueError("schedules and slice_caps must have one entry per MVNO")
        norm = []
        lam: dict[UserId, Fraction] = {}
        for m, sched in enumerate(self.schedules):
            entries = []
            for pos, (user, rate) in enumerate(sched, start=1):
                if user.mvno != m or user.sched_pos != pos:
                    raise ValueError(
                        f"schedule of MVNO {m} must hold positions 1..{len(sched)} in order, "
                        f"got {user} at slot {pos}"
                    )
                rate = Fraction(rate)
                if rate <= 0:
                    raise ValueError(f"minimum rate of {user} must be positive")
                entries.append((user, rate))
                lam[user] = rate
            norm.append(tuple(entries))
        caps = tuple(Fraction(c) for c in self.slice_caps)
        if any(c <= 0 for c in caps):
            raise ValueError("slice caps must be positive")
        object.__setattr__(self, "schedules", tuple(norm))
        object.__setattr__(self, "slice_caps", caps)
        object.__setattr__(self, "_lambda", lam)

    def users(self) -> Iterator[UserId]:
        for sched in self.schedules:
            for user, _ in sched:
                yield user

    @property
    def num_users(self) -> int:
        return sum(len(s) for s in self.schedules)

    @property
    def num_cells(self) -> int:
        return self.num_rbs * self.num_ttis

    def min_rate(self, user: UserId) -> Fraction:
        try:
            return self._lambda[user]
        except KeyError:
            raise StructuralError(f"unknown user {user}") from None

    def has_user(self, user: UserId) -> bool:
        return user in self._lambda

    @classmethod
    def uniform(cls, num_mvnos, users_per_mvno, min_rate, slice_cap,
                num_rbs, num_ttis, mcs_table) -> "SlicingInstance":
        """All MVNOs identical: same user count, demand and cap."""
        scheds = tuple(
            tuple((UserId(m, i), Fraction(min_rate)) for i in range(1, users_per_mvno + 1))
            for m in range(num_mvnos)
        )
        caps = tuple(Fraction(slice_cap) for _ in range(num_mvnos))
        return cls(num_mvnos, scheds, caps, num_rbs, num_ttis, mcs_table)


@dataclass(frozen=True)
class ChannelGrid:
    """Per-(user, rb, tti) maximum supportable MCS level.

    ``q`` has shape (num_users, num_rbs, num_ttis); ``user_rows`` maps each
    UserId to its row. The array is frozen after construction.
    """

    q: np.ndarray
    user_rows: Mapping[UserId, int]

    def __post_init__(self):
        arr = np.asarray(self.q)
        if arr.ndim != 3:
            raise ValueError("q must be a (users, rbs, ttis) array")
        if not np.issubdtype(arr.dtype, np.integer):
            arr = arr.astype(np.int16)
        if arr.size and (arr.min() < 0 or arr.max() > MAX_MCS):
            raise ValueError(f"MCS levels must lie in [0, {MAX_MCS}]")
        if len(self.user_rows) != arr.shape[0]:
            raise ValueError("one row per user required")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "q", arr)
        object.__setattr__(self, "user_rows", dict(self.user_rows))

    @property
    def num_rbs(self) -> int:
        return self.q.shape[1]

    @property
    def num_ttis(self) -> int:
        return self.q.shape[2]

    def row(self, user: UserId) -> int:
        try:
            return self.user_rows[user]
        except KeyError:
            raise StructuralError(f"user {user} not present in grid") from None

    def level(self, user: UserId, rb: int, tti: int) -> int:
        return int(self.q[self.row(user), rb, tti])

    def cells(self, user: UserId) -> np.ndarray:
        """(num_rbs, num_ttis) view of one user's supportable MCS levels."""
        return self.q[self.row(user)]

    @classmethod
    def from_cells(cls, instance: SlicingInstance, per_user: Mapping[UserId, np.ndarray]) -> "ChannelGrid":
        users = list(instance.users())
        arr = np.zeros((len(users), instance.num_rbs, instance.num_ttis), dtype=np.int16)
        for i, u in enumerate(users):
            arr[i] = np.asarray(per_user[u], dtype=np.int16)
        return cls(arr, {u: i for i, u in enumerate(users)})

    @classmethod
    def constant(cls, instance: SlicingInstance, level: int) -> "ChannelGrid":
        _check_mcs(level)
        users = list(instance.users())
        arr = np.full((len(users), instance.num_rbs, instance.num_ttis), level, dtype=np.int16)
        return cls(arr, {u: i for i, u in enumerate(users)})


def achievable_rate(c: int, q_max: int, table: McsTable) -> Fraction:
    """Bits one RB delivers when sent at MCS ``c`` on a channel supporting
    at most ``q_max``: the table entry if c <= q_max, else 0 (lost)."""
    _check_mcs(c)
    _check_mcs(q_max)
    if c <= q_max:
        return table[c]
    return Fraction(0)


@dataclass(frozen=True)
class Assignment:
    """One RB-TTI cell handed to one user, transmitted at one MCS level."""

    rb: int
    tti: int
    user: UserId
    mcs: int


@dataclass(frozen=True)
class Allocation:
    """A slicing decision: cell assignments, the served-user set and the
    derived rate totals."""

    assignments: tuple[Assignment, ...]
    served: frozenset[UserId]
    rbs_used: int
    per_user_rate: Mapping[UserId, Fraction]
    per_mvno_rate: Mapping[int, Fraction]

    @classmethod
    def build(cls, instance: SlicingInstance, grid: ChannelGrid,
              assignments: Iterable[Assignment], served: Iterable[UserId]) -> "Allocation":
        """Derive the rate totals from the assignments via the rate function."""
        assignments = tuple(sorted(assignments, key=lambda a: (a.tti, a.rb)))
        user_rate: dict[UserId, Fraction] = {}
        mvno_rate: dict[int, Fraction] = {m: Fraction(0) for m in range(instance.num_mvnos)}
        for a in assignments:
            q = grid.level(a.user, a.rb, a.tti)
            r = achievable_rate(a.mcs, q, instance.mcs_table)
            user_rate[a.user] = user_rate.get(a.user, Fraction(0)) + r
            mvno_rate[a.user.mvno] = mvno_rate.get(a.user.mvno, Fraction(0)) + r
        return cls(
            assignments=assignments,
            served=frozenset(served),
            rbs_used=len(assignments),
            per_user_rate=user_rate,
            per_mvno_rate=mvno_rate,
        )

    @classmethod
    def empty(cls, instance: SlicingInstance) -> "Allocation":
        return cls((), frozenset(), 0, {},
                   {m: Fraction(0) for m in range(instance.num_mvnos)})


@dataclass(frozen=True)
class Violation:
    """One broken rule. ``constraint`` is the rule number (3..8) or None for
    structural mismatches (references to unknown users/RBs/TTIs or
    inconsistent derived fields)."""

    constraint: int | None
    message: str

    @property
    def structural(self) -> bool:
        return self.constraint is None

    def __str__(self):
        tag = "structural" if self.structural else f"constraint ({self.constraint})"
        return f"{tag}: {self.message}"


def validate(instance: SlicingInstance, grid: ChannelGrid, alloc: Allocation) -> list[Violation]:
    """Check an allocation against the slicing rules; empty list = valid.

    Rules checked, by number:
      3: each RB-TTI cell owned by at most one user;
      4: the MCS of an assignment never exceeds the cell's supportable level;
      5: one MCS per (user, TTI);
      6: within an MVNO, served users form a scheduling-order prefix;
      7: every served user's achieved rate meets its minimum (unserved users
         are not checked);
      8: each MVNO's total achieved rate stays within its slice cap.

    References to unknown users/RBs/TTIs and derived fields that disagree
    with the assignments are reported as structural mismatches, not as
    numbered violations.
    """
    out: list[Violation] = []
    ok_assignments: list[Assignment] = []
    for a in alloc.assignments:
        bad = None
        if not instance.has_user(a.user):
            bad = f"assignment references unknown user {a.user}"
        elif a.user not in grid.user_rows:
            bad = f"assignment references user {a.user} missing from grid"
        elif not (0 <= a.rb < instance.num_rbs):
            bad = f"assignment references RB {a.rb} outside [0, {instance.num_rbs})"
        elif not (0 <= a.tti < instance.num_ttis):
            bad = f"assignment references TTI {a.tti} outside [0, {instance.num_ttis})"
        elif not (0 <= a.mcs <= MAX_MCS):
            bad = f"assignment uses MCS {a.mcs} outside [0, {MAX_MCS}]"
        if bad:
            out.append(Violation(None, bad))
        else:
            ok_assignments.append(a)
    for u in alloc.served:
        if not instance.has_user(u):
            out.append(Violation(None, f"served set references unknown user {u}"))

    # (3) cell ownership
    owners: dict[tuple[int, int], UserId] = {}
    for a in ok_assignments:
        cell = (a.rb, a.tti)
        if cell in owners:
            out.append(Violation(3, f"cell rb={a.rb} tti={a.tti} assigned to both "
                                    f"{owners[cell]} and {a.user}"))
        else:
            owners[cell] = a.user

    # (4) per-cell MCS ceiling
    for a in ok_assignments:
        q = grid.level(a.user, a.rb, a.tti)
        if a.mcs > q:
            out.append(Violation(4, f"{a.user} uses MCS {a.mcs} on rb={a.rb} tti={a.tti} "
                                    f"which supports at most {q}"))

    # (5) single MCS per user per TTI
    per_ut: dict[tuple[UserId, int], set[int]] = {}
    for a in ok_assignments:
        per_ut.setdefault((a.user, a.tti), set()).add(a.mcs)
    for (u, t), levels in sorted(per_ut.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if len(levels) > 1:
            out.append(Violation(5, f"{u} mixes MCS levels {sorted(levels)} at tti={t}"))

    # (6) served users form a per-MVNO scheduling prefix
    for m, sched in enumerate(instance.schedules):
        served_pos = [user.sched_pos for user, _ in sched if user in alloc.served]
        for pos in served_pos:
            missing = [i for i in range(1, pos) if UserId(m, i) not in alloc.served]
            for i in missing:
                out.append(Violation(6, f"MVNO {m}: position {pos} served while "
                                        f"position {i} is not"))
            if missing:
                break

    # recompute achieved rates from the assignments
    user_rate: dict[UserId, Fraction] = {}
    mvno_rate: dict[int, Fraction] = {m: Fraction(0) for m in range(instance.num_mvnos)}
    for a in ok_assignments:
        q = grid.level(a.user, a.rb, a.tti)
        r = achievable_rate(a.mcs, q, instance.mcs_table)
        user_rate[a.user] = user_rate.get(a.user, Fraction(0)) + r
        mvno_rate[a.user.mvno] += r

    # (7) minimum rate for served users
    for u in sorted(alloc.served):
        if not instance.has_user(u):
            continue
        got = user_rate.get(u, Fraction(0))
        need = instance.min_rate(u)
        if got < need:
            out.append(Violation(7, f"served user {u} achieves {got} < minimum {need}"))

    # (8) slice caps
    for m in range(instance.num_mvnos):
        if mvno_rate[m] > instance.slice_caps[m]:
            out.append(Violation(8, f"MVNO {m} achieves {mvno_rate[m]} above its "
                                    f"cap {instance.slice_caps[m]}"))

    # derived-field consistency
    if alloc.rbs_used != len(alloc.assignments):
        out.append(Violation(None, f"rbs_used={alloc.rbs_used} but allocation holds "
                                   f"{len(alloc.assignments)} assignments"))
    if not out or all(v.constraint is not None for v in out):
        for u, r in user_rate.items():
            stored = alloc.per_user_rate.get(u)
            if stored is not None and Fraction(stored) != r:
                out.append(Violation(None, f"stored rate {stored} for {u} differs from "
                                           f"recomputed {r}"))
    return out
