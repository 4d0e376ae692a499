import numpy as np
import pytest

from marsim import ChannelGrid, McsTable, SlicingInstance, UserId


@pytest.fixture
def toy_table():
    return McsTable.linear()


def make_instance(schedules, caps, num_rbs, num_ttis, table=None):
    """schedules: list per MVNO of min-rate lists, e.g. [[10, 20], [15]]."""
    table = table or McsTable.linear()
    scheds = tuple(
        tuple((UserId(m, i + 1), lam) for i, lam in enumerate(lams))
        for m, lams in enumerate(schedules)
    )
    return SlicingInstance(len(schedules), scheds, tuple(caps), num_rbs, num_ttis, table)


def grid_from(instance, per_user_levels):
    """per_user_levels: {UserId: array-like (num_rbs, num_ttis)}."""
    users = list(instance.users())
    arr = np.zeros((len(users), instance.num_rbs, instance.num_ttis), dtype=np.int16)
    for i, u in enumerate(users):
        arr[i] = np.asarray(per_user_levels[u], dtype=np.int16)
    return ChannelGrid(arr, {u: i for i, u in enumerate(users)})
