import numpy as np
import pytest

import evdenoise as ev


def small_scene():
    scene = ev.benchmark_scene(2)
    scene["width"], scene["height"] = 40, 30
    scene["duration_us"] = 200_000
    return scene


def test_synthesize_and_round_trip(tmp_path):
    s = ev.synthesize(small_scene())
    assert len(s) > 0
    assert (s.width, s.height) == (40, 30)
    assert s.fully_labeled()
    assert np.all(np.diff(s.t.astype(np.int64)) >= 0)
    for name in ("a.csv", "a.evd"):
        ev.write_events(s, tmp_path / name)
        assert ev.read_events(tmp_path / name) == s
    again = ev.EventStream(s.width, s.height, s.x, s.y, s.t, s.p, s.label)
    assert again == s


def test_filters_and_auc():
    s = ev.synthesize(small_scene())
    baf = ev.run_filter("baf", s, 10_000)
    stcf1 = ev.run_filter("stcf", s, 10_000, k=1)
    assert baf.shape == (len(s),)
    assert np.array_equal(baf, stcf1)
    roc = ev.baseline_roc("stcf", s, taus=[1000, 10_000, 100_000])
    assert 0.0 <= roc["auc"] <= 1.0
    assert len(roc["points"]) == 5
    assert ev.roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0


def test_hardware_report():
    r = ev.hw_report()
    assert r["memory_bits"] == 539760
    assert r["latency_cycles"] == 9
    assert ev.memory_bits(346, 260, 2) == 539760


def test_errors():
    with pytest.raises(ev.OrderingError):
        ev.EventStream(4, 4, [0, 0], [0, 0], [5, 1], [1, 1])
    with pytest.raises(ev.ValidationError):
        ev.EventStream(4, 4, [9], [0], [0], [1])
    with pytest.raises(ev.IoError):
        ev.read_events("/nonexistent/file.csv")
    with pytest.raises(ev.ConfigError):
        ev.run_filter("knn", ev.synthesize(small_scene()), 10)
