import numpy as np

from marsim import UserId, build_slicing_list
from marsim.random_instances import random_instance
from conftest import make_instance


def test_interleaves_across_mvnos_by_demand():
    inst = make_instance([[30, 40], [50]], [1000, 1000], 4, 1)
    out = build_slicing_list(inst, "lambda_global")
    assert [(m, i) for m, i, _ in out] == [(0, 1), (0, 2), (1, 1)]


def test_literal_two_stage_groups_by_position():
    inst = make_instance([[30, 40], [50]], [1000, 1000], 4, 1)
    out = build_slicing_list(inst, "literal_two_stage")
    assert [(m, i) for m, i, _ in out] == [(0, 1), (1, 1), (0, 2)]


def test_single_mvno_keeps_schedule_order():
    # one tenant: any demand pattern must come out in scheduling order
    inst = make_instance([[90, 10, 50]], [1000], 4, 1)
    for mode in ("lambda_global", "literal_two_stage"):
        out = build_slicing_list(inst, mode)
        assert [i for _, i, _ in out] == [1, 2, 3]


def test_demand_slots_are_globally_sorted():
    inst = make_instance([[90, 10], [40, 70]], [1000, 1000], 4, 1)
    out = build_slicing_list(inst, "lambda_global")
    # per-MVNO users keep schedule order while the per-slot demands of the
    # sorted pool stay in the sorted slot positions
    assert [(m, i) for m, i, _ in out] == [(0, 1), (1, 1), (1, 2), (0, 2)]


def test_ties_break_by_mvno_then_position():
    inst = make_instance([[5, 5], [5]], [100, 100], 4, 1)
    out = build_slicing_list(inst)
    assert [(m, i) for m, i, _ in out] == [(0, 1), (0, 2), (1, 1)]


def test_one_user_per_mvno_sorts_globally():
    inst = make_instance([[42], [7], [19]], [100, 100, 100], 4, 1)
    out = build_slicing_list(inst)
    assert [lam for _, _, lam in out] == [7, 19, 42]


def test_random_property_schedule_order_and_permutation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        inst, _ = random_instance(rng, max_rbs=4, max_ttis=2)
        for mode in ("lambda_global", "literal_two_stage"):
            out = build_slicing_list(inst, mode)
            assert sorted(out.users()) == sorted(inst.users())
            for m, sched in enumerate(inst.schedules):
                subseq = [i for mm, i, _ in out if mm == m]
                assert subseq == [u.sched_pos for u, _ in sched]
        # the slot positions each MVNO occupies follow the demand-sorted pool
        flat = sorted(((lam, m, i) for m, i, lam in
                       ((u.mvno, u.sched_pos, lam)
                        for sched in inst.schedules for u, lam in sched)))
        expected_mvno_per_slot = [m for _, m, _ in flat]
        got = [m for m, _, _ in build_slicing_list(inst, "lambda_global")]
        assert got == expected_mvno_per_slot
