import numpy as np
import pytest

from marsim import (
    ChannelModel,
    McsTable,
    SlicingInstance,
    StructuralError,
    UserId,
    default_snr_thresholds,
    generate_grid,
    q_max_per_user,
    rician_power_gains,
    snr_to_mcs,
)
from marsim.channel import load_snr_thresholds
from conftest import make_instance, grid_from


def small_instance(num_rbs=20, num_ttis=4, users=6):
    return SlicingInstance.uniform(2, users // 2, 10, 1000, num_rbs, num_ttis,
                                   McsTable.linear())


def test_same_seed_same_grid():
    inst = small_instance()
    model = ChannelModel(kind="rician", k_factor=2.0, seed=123)
    g1 = generate_grid(model, inst)
    g2 = generate_grid(model, inst)
    assert np.array_equal(g1.q, g2.q)


def test_different_seed_differs():
    inst = small_instance()
    g1 = generate_grid(ChannelModel(seed=1), inst)
    g2 = generate_grid(ChannelModel(seed=2), inst)
    assert not np.array_equal(g1.q, g2.q)


def test_adding_users_keeps_other_draws():
    # per-user substreams: growing the tenant does not perturb existing users
    base = SlicingInstance.uniform(2, 3, 10, 1000, 15, 3, McsTable.linear())
    bigger = SlicingInstance.uniform(2, 5, 10, 1000, 15, 3, McsTable.linear())
    model = ChannelModel(kind="rician", k_factor=0.0, seed=77)
    g1 = generate_grid(model, base)
    g2 = generate_grid(model, bigger)
    for u in base.users():
        assert np.array_equal(g1.cells(u), g2.cells(u))


def test_block_constant_repeats_tti0():
    inst = small_instance(num_ttis=5)
    g = generate_grid(ChannelModel(time_correlation="block_constant", seed=9), inst)
    assert np.all(g.q == g.q[:, :, :1])


def test_per_tti_redraws():
    inst = small_instance(num_rbs=50, num_ttis=6)
    g = generate_grid(ChannelModel(time_correlation="per_tti", seed=9), inst)
    assert not np.all(g.q == g.q[:, :, :1])


def test_rayleigh_power_is_unit_mean_exponential():
    rng = np.random.default_rng(7)
    g = np.sort(rician_power_gains(0.0, (100_000,), rng))
    n = g.size
    cdf = 1.0 - np.exp(-g)
    ks = max(np.abs(np.arange(1, n + 1) / n - cdf).max(),
             np.abs(np.arange(0, n) / n - cdf).max())
    assert ks < 0.02
    assert abs(g.mean() - 1.0) < 0.02


def test_huge_k_freezes_channel():
    inst = small_instance(num_rbs=40, num_ttis=2, users=4)
    g = generate_grid(ChannelModel(k_factor=1e6, seed=3), inst)
    for u in inst.users():
        assert np.var(g.cells(u)) <= 0.05


def test_mapping_monotone_in_snr():
    thr = default_snr_thresholds()
    snrs = np.linspace(-20, 40, 500)
    levels = snr_to_mcs(snrs, thr)
    assert np.all(np.diff(levels) >= 0)
    assert snr_to_mcs(np.array([-100.0]), thr)[0] == 0
    assert snr_to_mcs(np.array([100.0]), thr)[0] == 28
    # exact boundary joins the level it names
    assert snr_to_mcs(np.array([thr[5]]), thr)[0] == 5


def test_thresholds_must_increase():
    thr = list(default_snr_thresholds())
    thr[4] = thr[5]
    with pytest.raises(ValueError):
        ChannelModel(snr_thresholds_db=tuple(thr))


def test_threshold_file_roundtrip(tmp_path):
    p = tmp_path / "thr.txt"
    p.write_text("# custom\n" + "\n".join(str(-3.0 + c) for c in range(29)))
    thr = load_snr_thresholds(p)
    assert thr[0] == -3.0 and len(thr) == 29
    with pytest.raises(ValueError):
        p2 = tmp_path / "short.txt"
        p2.write_text("1.0\n2.0\n")
        load_snr_thresholds(p2)


def test_q_max_small_cases():
    inst = make_instance([[10]], [100], 3, 1)
    u = UserId(0, 1)
    g = grid_from(inst, {u: [[3], [5], [2]]})
    assert q_max_per_user(g, u) == 5
    g7 = grid_from(inst, {u: [[7], [7], [7]]})
    assert q_max_per_user(g7, u) == 7
    with pytest.raises(StructuralError):
        q_max_per_user(g, UserId(1, 1))


def test_q_max_matches_exhaustive_scan():
    inst = small_instance()
    g = generate_grid(ChannelModel(kind="iid_uniform_mcs", seed=5), inst)
    for u in inst.users():
        brute = max(int(g.q[g.row(u), rb, tti])
                    for rb in range(inst.num_rbs) for tti in range(inst.num_ttis))
        assert q_max_per_user(g, u) == brute


def test_iid_uniform_covers_levels():
    inst = SlicingInstance.uniform(1, 2, 10, 1000, 60, 30, McsTable.linear())
    g = generate_grid(ChannelModel(kind="iid_uniform_mcs", seed=0), inst)
    assert g.q.min() == 0 and g.q.max() == 28
