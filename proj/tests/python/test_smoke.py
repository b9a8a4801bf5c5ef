import math

import pytest

import slimegate


def test_version_and_calibration_text():
    assert slimegate.__version__ == "0.3.0"
    text = slimegate.default_calibration()
    assert "phobia_568" in text
    assert len(slimegate.calibration_digest(text)) == 16
    with pytest.raises(slimegate.ConfigError):
        slimegate.calibration_digest("nonsense = 1")


def test_lit_pnot_reads_low_and_replays():
    outcome, record = slimegate.run("pnot", {"A": 1}, seed=3, budget=1500)
    assert outcome["logic_output"] == 0
    again = slimegate.run("pnot", {"A": 1}, seed=3, budget=1500)[1]
    assert again == record
    assert slimegate.replay(record)
    rows = slimegate.parse_record(record)
    assert rows[0]["record"] == "header"
    assert rows[-1]["record"] == "summary"


def test_bad_inputs_raise():
    with pytest.raises(ValueError):
        slimegate.run("xor", {"A": 1})
    with pytest.raises(slimegate.GateError):
        slimegate.run("pnot", {"B": 1})


def test_custom_scene_and_script():
    scene = slimegate.gate_scene("pnot", gap=12.0)
    outcome, record = slimegate.run("pnot", {"A": 0}, seed=2, budget=600, scene=scene, script="0 A=0\n300 A=1\n")
    assert outcome["logic_output"] in (0, 1)
    assert slimegate.replay(record)


def test_cascade_half_adder():
    e = slimegate.cascade()
    assert e["gates"] == 7
    assert e["depth"] == 3
    assert e["area_m2"] == pytest.approx(7 * 0.27 ** 2)


def test_network_resistance_series_parallel():
    series = slimegate.network_resistance(3, [(0, 1, 1e-3), (1, 2, 1e-3)], 0, 2)
    assert series == pytest.approx(2000.0, rel=1e-12)
    both = slimegate.network_resistance(3, [(0, 1, 1e-3), (1, 2, 1e-3), (0, 2, 5e-4)], 0, 2)
    assert both == pytest.approx(1000.0, rel=1e-12)
    assert slimegate.network_resistance(3, [(0, 1, 1e-3)], 0, 2) is None


def test_z_test_matches_hand_value():
    p1, p2, pooled = 30 / 40, 15 / 40, 45 / 80
    z_expected = (p1 - p2) / math.sqrt(pooled * (1 - pooled) * (2 / 40))
    z, p = slimegate.z_test(30, 40, 15, 40)
    assert z == pytest.approx(z_expected)
    assert p == pytest.approx(math.erfc(z_expected / math.sqrt(2)))


def test_downsample_bounds_side():
    w, h, cells = slimegate.downsample([1.0] * (300 * 10), 300, 10)
    assert w <= 128 and h <= 128
    assert len(cells) == w * h
    assert all(c == pytest.approx(1.0) for c in cells)


def test_truth_campaign_summary():
    summary, record = slimegate.campaign("truth", trials=1, seed=4, gate="pnot", budget=400)
    assert summary["record"] == "summary"
    assert len(summary["rows"]) == 2
    assert slimegate.replay(record)
