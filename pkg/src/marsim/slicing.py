"""Cross-MVNO slicing list: the user order the allocator follows.

Users are ordered by ascending minimum rate across MVNOs while each MVNO's
own scheduling order is preserved (a later scheduling position never jumps
ahead of an earlier one).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import SlicingInstance, UserId

LAMBDA_GLOBAL = "lambda_global"
LITERAL_TWO_STAGE = "literal_two_stage"
LIST_MODES = (LAMBDA_GLOBAL, LITERAL_TWO_STAGE)


@dataclass(frozen=True)
class SlicingList:
    """Ordered (mvno, sched_pos, min_rate) tuples covering every user once."""

    entries: tuple[tuple[int, int, Fraction], ...]

    def users(self):
        return [UserId(m, i) for m, i, _ in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def build_slicing_list(instance: SlicingInstance, mode: str = LAMBDA_GLOBAL) -> SlicingList:
    """Order all users for allocation.

    lambda_global (default): sort users by min rate ascending, then give each
    MVNO's users back their scheduling order within the slots that MVNO
    occupies in the sorted sequence. The slot demands stay globally sorted
    while the per-MVNO subsequence is the scheduling order.

    literal_two_stage: a stable sort by min rate followed by a stable sort by
    scheduling position, which groups users by position instead.

    Ties in min rate break by (mvno, sched_pos) ascending; all sorts stable.
    """
    if mode not in LIST_MODES:
        raise ValueError(f"unknown slicing list mode {mode!r}")
    flat = [(user.mvno, user.sched_pos, rate)
            for sched in instance.schedules for user, rate in sched]
    by_lambda = sorted(flat, key=lambda e: (e[2], e[0], e[1]))
    if mode == LITERAL_TWO_STAGE:
        return SlicingList(tuple(sorted(by_lambda, key=lambda e: e[1])))

    slots: dict[int, list[int]] = {}
    for slot, (m, _, _) in enumerate(by_lambda):
        slots.setdefault(m, []).append(slot)
    entries: list[tuple[int, int, Fraction]] = [None] * len(flat)
    for m, sched in enumerate(instance.schedules):
        for slot, (user, rate) in zip(slots.get(m, []), sched):
            entries[slot] = (user.mvno, user.sched_pos, rate)
    return SlicingList(tuple(entries))
