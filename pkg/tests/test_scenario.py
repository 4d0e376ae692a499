import os
from fractions import Fraction

import pytest

from marsim import ScenarioError, build_instance, load_scenario
from marsim.scenario import resolve_mcs_table

SCEN = os.path.join(os.path.dirname(__file__), "..", "scenarios")

MB = 10 ** 6


def write(tmp_path, text):
    p = tmp_path / "s.yaml"
    p.write_text(text)
    return p


BASE = """\
scenario_id: demo
ttis: 5
num_mvnos: 2
users_per_mvno: 10
lambda_min_mb: 50
slice_cap_mb: 500
"""


def test_table1_file_echoes_parameters():
    cfgs = load_scenario(os.path.join(SCEN, "table1_rician.yaml"))
    assert [c.scenario_id for c in cfgs] == [
        "table1-rician-K0", "table1-rician-K4", "table1-rician-K8"]
    for c, k in zip(cfgs, (0.0, 4.0, 8.0)):
        assert c.ttis == 5 and c.num_mvnos == 2 and c.users_per_mvno == 10
        assert c.lambda_min == 50 * MB
        assert c.slice_cap == 500 * MB
        assert c.num_rbs == 100
        assert c.channel.k_factor == k
        assert c.seeds == tuple(range(30))


def test_table5_file_expands_over_ttis():
    cfgs = load_scenario(os.path.join(SCEN, "table5_fast_channel.yaml"))
    assert sorted(c.ttis for c in cfgs) == [20, 50, 100]
    # expansion order is lexicographic on the suffixed id
    assert [c.scenario_id for c in cfgs] == sorted(c.scenario_id for c in cfgs)
    for c in cfgs:
        assert c.users_per_mvno == 30
        assert c.lambda_min == 10 * MB and c.slice_cap == 250 * MB
        assert c.channel.time_correlation == "per_tti"


def test_defaults(tmp_path):
    cfgs = load_scenario(write(tmp_path, BASE))
    (c,) = cfgs
    assert c.num_rbs == 100
    assert c.seeds == tuple(range(30))
    assert c.list_mode == "lambda_global"
    assert not c.mars_options.trim_last_bundle
    assert c.channel.kind == "rician" and c.channel.k_factor == 0.0


def test_zero_users_rejected(tmp_path):
    p = write(tmp_path, BASE.replace("users_per_mvno: 10", "users_per_mvno: 0"))
    with pytest.raises(ScenarioError, match="users_per_mvno"):
        load_scenario(p)


def test_unknown_keys_rejected(tmp_path):
    p = write(tmp_path, BASE + "surprise: 1\n")
    with pytest.raises(ScenarioError, match="unknown keys"):
        load_scenario(p)


def test_all_problems_reported_together(tmp_path):
    text = BASE.replace("users_per_mvno: 10", "users_per_mvno: 0") \
               .replace("ttis: 5", "ttis: -1") + "mystery: true\n"
    with pytest.raises(ScenarioError) as err:
        load_scenario(write(tmp_path, text))
    msgs = err.value.problems
    assert len(msgs) >= 3


def test_parse_error_diagnostics(tmp_path):
    p = write(tmp_path, "scenario_id: [unclosed\n")
    with pytest.raises(ScenarioError, match="parse error"):
        load_scenario(p)


def test_conflicting_units_rejected(tmp_path):
    p = write(tmp_path, BASE + "lambda_min_bits: 100\n")
    with pytest.raises(ScenarioError, match="only one of"):
        load_scenario(p)


def test_lambda_range_draw_is_deterministic(tmp_path):
    p = write(tmp_path, BASE.replace("lambda_min_mb: 50", "lambda_min_mb: [10, 150]"))
    (c,) = load_scenario(p)
    i1 = build_instance(c, seed=4)
    i2 = build_instance(c, seed=4)
    i3 = build_instance(c, seed=5)
    lams1 = [lam for s in i1.schedules for _, lam in s]
    lams2 = [lam for s in i2.schedules for _, lam in s]
    lams3 = [lam for s in i3.schedules for _, lam in s]
    assert lams1 == lams2
    assert lams1 != lams3
    assert all(10 * MB <= lam <= 150 * MB for lam in lams1)
    assert len(set(lams1)) > 1


def test_mcs_table_scale_applied(tmp_path):
    p = write(tmp_path, BASE + "mcs_table_scale: 7\n")
    (c,) = load_scenario(p)
    assert c.mcs_table[28] == resolve_mcs_table()[28] * 7


def test_env_var_table_override(tmp_path, monkeypatch):
    table_file = tmp_path / "eff.txt"
    table_file.write_text("\n".join(f"{i} {i}.0" for i in range(29)))
    monkeypatch.setenv("MARSIM_MCS_TABLE", str(table_file))
    (c,) = load_scenario(write(tmp_path, BASE))
    assert c.mcs_table[1] == Fraction(168)
    monkeypatch.delenv("MARSIM_MCS_TABLE")
    (c,) = load_scenario(write(tmp_path, BASE))
    assert c.mcs_table[1] != Fraction(168)


def test_custom_threshold_file(tmp_path):
    thr = tmp_path / "thr.txt"
    thr.write_text("\n".join(str(float(c)) for c in range(29)))
    p = write(tmp_path, BASE + "channel:\n  snr_thresholds_path: thr.txt\n")
    (c,) = load_scenario(p)
    assert c.channel.snr_thresholds_db[0] == 0.0
