import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwarp.counterexample import (CylinderPoint, KillingParameter, circle_orthogonality_defect, cylinder_report,
                                  helix_checks, killing_field, killing_norm, killing_residual, sample_points,
                                  write_cylinder_outputs)
from dwarp.errors import DomainError

PTS = sample_points(64, seed=0)


def test_product_field_is_killing():
    assert killing_residual(0.0, PTS) <= 1e-10


@pytest.mark.parametrize("a", [-0.5, 0.5, 0.9])
def test_rotating_field_is_killing(a):
    assert killing_residual(a, PTS) <= 1e-6


def test_killing_residual_accepts_cylinder_points():
    pts = [CylinderPoint(th, t) for th, t in PTS[:8]]
    assert killing_residual(0.5, pts) == pytest.approx(killing_residual(0.5, PTS[:8]))


@pytest.mark.parametrize("a", [1.0, -1.0, 1.5])
def test_non_timelike_parameter_rejected(a):
    with pytest.raises(DomainError):
        KillingParameter(a)
    with pytest.raises(DomainError):
        killing_residual(a, PTS)


def test_intrinsic_killing_components():
    V = killing_field(0.5, PTS)
    assert np.allclose(V[:, 0], 0.5) and np.allclose(V[:, 1], 1.0)


@pytest.mark.parametrize("a", [-0.9, 0.0, 0.3, 0.99])
def test_killing_norm(a):
    assert np.allclose(killing_norm(a, PTS), a * a - 1, atol=1e-15)


@pytest.mark.parametrize("a", [0.5, -0.3])
def test_circle_defect_known_values(a):
    assert circle_orthogonality_defect(a, 0.0) == pytest.approx(a, abs=1e-12)


@given(st.floats(-0.99, 0.99), st.floats(-5.0, 5.0))
def test_circle_defect_equals_parameter(a, t0):
    assert abs(circle_orthogonality_defect(a, t0) - a) <= 1e-12


@pytest.mark.parametrize("a,char", [(0.5, 0.75), (0.99, 0.0199), (0.0, 1.0)])
def test_helix(a, char):
    rep = helix_checks(a, 0.2)
    assert rep.geodesic_residual <= 1e-10
    assert rep.orthogonality_residual <= 1e-10
    assert rep.causal_character == pytest.approx(char, abs=1e-12)


@given(st.floats(-0.95, 0.95), st.floats(-3.0, 3.0))
def test_helix_is_spacelike_geodesic(a, t0):
    rep = helix_checks(a, t0)
    assert rep.causal_character > 0
    assert rep.geodesic_residual <= 1e-10 and rep.orthogonality_residual <= 1e-10


def test_cylinder_point_reduces_angle():
    p = CylinderPoint(2 * math.pi + 0.5, 1.0)
    assert p.theta == pytest.approx(0.5)
    assert CylinderPoint(-0.5, 0.0).theta == pytest.approx(2 * math.pi - 0.5)


def test_cylinder_report_passes():
    rep = cylinder_report()
    assert rep["passed"]
    assert [r["a"] for r in rep["per_a"]] == [-0.5, 0.0, 0.5, 0.9]


def test_cylinder_outputs(tmp_path):
    rep = cylinder_report((0.0, 0.5))
    write_cylinder_outputs(rep, tmp_path / "c.json", tmp_path / "c.csv", "tag")
    assert json.loads((tmp_path / "c.json").read_text())["passed"] is True
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "# tag" and lines[1].startswith("a,killing_residual") and len(lines) == 4
