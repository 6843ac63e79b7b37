import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwarp.reports import (FlowTrace, ProbeReport, ResidualReport, TrialRecord, combine_refinement, config_hash,
                           dumps, order_estimate, write_csv)


@given(st.floats(1e-4, 1.0), st.floats(0.0, 10.0), st.floats(0.1, 100.0))
def test_residual_report_pass_rule(h, mx, c):
    r = ResidualReport("x", mx, mx, h, c)
    assert r.passed == (mx <= c * h * h)
    assert r.bound == pytest.approx(c * h * h)


def test_passed_needs_every_grid():
    hist = [(0.1, 1.0, 1.0), (0.05, 1e-4, 1e-4)]
    r = ResidualReport("x", 1e-4, 1e-4, 0.05, 1.0, history=hist)
    assert not r.passed


def test_passed_cannot_be_forced():
    assert not ResidualReport("x", 1.0, 1.0, 0.1, 1.0, passed=True).passed


@given(st.floats(0.5, 4.0), st.floats(1e-3, 1e3))
def test_order_of_power_law(p, c):
    h = np.array([0.1, 0.05, 0.025])
    assert order_estimate(h, c * h**p) == pytest.approx(p, abs=1e-9)


def test_order_none_cases():
    assert order_estimate([0.1], [1.0]) is None
    assert order_estimate([0.1, 0.05], [1.0, 0.0]) is None
    assert order_estimate([0.1, 0.05], [3e-16, 2e-16]) is None
    assert order_estimate([0.1, 0.05], [4e-12, 1e-12]) == pytest.approx(2.0)


def test_combine_refinement_sorts_coarse_to_fine():
    reps = [ResidualReport("d", 1e-4 * (h / 0.1) ** 2, 0.0, h, 1.0) for h in (0.025, 0.1, 0.05)]
    out = combine_refinement(reps)
    assert [row[0] for row in out.history] == [0.1, 0.05, 0.025]
    assert out.spacing == 0.025 and out.order_estimate == pytest.approx(2.0) and out.passed


def test_probe_report_validation():
    with pytest.raises(ValueError):
        ProbeReport("t", 3, 4, 0.0, True)
    rep = ProbeReport("t", 2, 1, -0.1, False, [TrialRecord(1, -0.1, (0, 3), 0.1, 0.01, True)])
    d = rep.to_dict()
    assert d["details"][0]["argmin_node"] == (0, 3)


def test_dumps_is_stable_and_cleans_numbers():
    obj = {"b": np.float64(1 / 3), "a": [np.int64(2), np.bool_(True)], "n": float("nan"), "i": math.inf}
    text = dumps(obj)
    back = json.loads(text)
    assert list(back) == ["a", "b", "i", "n"]
    assert back["b"] == 0.333333333333 and back["a"] == [2, True]
    assert back["n"] == "nan" and back["i"] == "inf"
    assert text == dumps(dict(reversed(list(obj.items()))))
    assert config_hash(obj) == config_hash(dict(obj))


def test_flow_trace_dict():
    d = FlowTrace([0.0, 1.0], [1.0, 0.5], [0.1, 0.05]).to_dict()
    assert d["final_oscillation"] == 0.5 and d["passed"]


def test_write_csv(tmp_path):
    p = write_csv(tmp_path / "x.csv", ["a", "b"], [[1, 2.5]], "note")
    assert p.read_text().splitlines() == ["# note", "a,b", "1,2.5"]
