import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwarp import base
from dwarp.base import (Circle, EuclideanPlane, FlatTorus2, RoundSphere2, ScalarField, VectorField,
                        boundary_sphere_integral, div_sigma, grad_sigma, integrate)
from dwarp.errors import DomainError, GridError, NonCompactBase


def sine(grid):
    return ScalarField.from_function(grid, lambda x: np.sin(x[..., 0]))


def test_gradient_of_constant_vanishes():
    g = Circle().make_grid(32)
    assert np.all(grad_sigma(ScalarField.constant(g, 3.0)).values == 0)


@pytest.mark.parametrize("n", [32, 64, 128])
def test_gradient_of_sine_on_circle(n):
    g = Circle().make_grid(n)
    err = np.max(np.abs(grad_sigma(sine(g)).values[..., 0] - np.cos(g.coords[..., 0])))
    assert err <= g.h**2


def test_gradient_on_torus():
    g = FlatTorus2().make_grid(48)
    grad = grad_sigma(sine(g)).values
    assert np.max(np.abs(grad[..., 0] - np.cos(g.coords[..., 0]))) <= g.h**2
    assert np.max(np.abs(grad[..., 1])) == 0.0


def test_gradient_order_is_two():
    errs = []
    for n in (32, 64, 128):
        g = Circle().make_grid(n)
        errs.append(np.max(np.abs(grad_sigma(sine(g)).values[..., 0] - np.cos(g.coords[..., 0]))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.5 <= r <= 4.5 for r in ratios)


def test_circle_radius_scales_gradient():
    g = Circle(2.0).make_grid(64)
    grad = grad_sigma(sine(g)).values[..., 0]
    assert np.max(np.abs(grad - np.cos(g.coords[..., 0]) / 4.0)) <= g.h**2


def test_small_grid_rejected():
    g = Circle().make_grid(3)
    with pytest.raises(GridError):
        grad_sigma(sine(g))


def test_divergence_of_zero_field():
    g = Circle().make_grid(16)
    assert np.all(div_sigma(VectorField(g, np.zeros(g.shape + (1,)))).values == 0)


def test_laplacian_of_sine():
    errs = []
    for n in (32, 64, 128):
        g = Circle().make_grid(n)
        lap = div_sigma(grad_sigma(sine(g))).values
        errs.append(np.max(np.abs(lap + np.sin(g.coords[..., 0]))))
        assert errs[-1] <= g.h**2
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_radial_field_divergence_polar_plane():
    model = EuclideanPlane(half_width=4.0, chart="polar", r_min=0.5)
    for n in ((33, 32), (65, 64)):
        g = model.make_grid(n)
        V = VectorField(g, np.stack([g.coords[..., 0], np.zeros(g.shape)], axis=-1))
        div = div_sigma(V).values
        # exact to roundoff: sqrt(det) r^1 times r is quadratic in r
        assert np.max(np.abs(div - 2.0)) <= 1e-9


def test_integrate_constants():
    assert integrate(ScalarField.constant(Circle().make_grid(64), 1.0)) == pytest.approx(2 * math.pi, abs=1e-12)
    assert integrate(ScalarField.constant(FlatTorus2().make_grid(32), 1.0)) == pytest.approx(4 * math.pi**2)
    assert integrate(sine(Circle().make_grid(64))) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [32, 64])
def test_sphere_area(n):
    g = RoundSphere2().make_grid(n)
    assert abs(integrate(ScalarField.constant(g, 1.0)) - 4 * math.pi) <= 40 * g.h**2


def test_sphere_integral_of_height_vanishes():
    model = RoundSphere2()
    g = model.make_grid(48)
    z = ScalarField.from_function(g, lambda x: model.embed(x, 0)[..., 2])
    assert abs(integrate(z)) <= 1e-3


def test_plane_integration_needs_decay():
    g = EuclideanPlane().make_grid(41)
    with pytest.raises(NonCompactBase):
        integrate(ScalarField.constant(g, 1.0))
    gauss = ScalarField.from_function(g, lambda x: np.exp(-np.sum(x**2, axis=-1)))
    assert integrate(gauss) == pytest.approx(math.pi, rel=1e-3)


def test_discrete_divergence_theorem_torus():
    g = FlatTorus2().make_grid(32)
    V = VectorField.from_function(g, lambda x: np.stack([np.sin(x[..., 0]) * np.cos(x[..., 1]),
                                                         np.exp(np.sin(x[..., 1]))], axis=-1))
    assert abs(integrate(div_sigma(V))) <= 1e-12


def test_discrete_divergence_theorem_sphere():
    model = RoundSphere2()
    for n in (32, 64):
        g = model.make_grid(n)
        f = ScalarField.from_function(g, lambda x: model.embed(x, 0)[..., 0] ** 2)
        lap = div_sigma(grad_sigma(f))
        assert abs(integrate(lap)) <= 40 * g.h**2


def test_boundary_sphere_integrals():
    plane = EuclideanPlane()
    assert boundary_sphere_integral(plane, lambda x: 1.0, 1.0) == pytest.approx(2 * math.pi)
    assert boundary_sphere_integral(plane, lambda x: 1.0, 3.0) == pytest.approx(6 * math.pi)
    val = boundary_sphere_integral(plane, lambda x: np.exp(2 * np.linalg.norm(x, axis=-1)), 1.0)
    assert val == pytest.approx(2 * math.pi * math.e**2, rel=1e-12)


def test_boundary_sphere_integral_polar_chart_agrees():
    cart = EuclideanPlane()
    polar = EuclideanPlane(chart="polar")

    def fn_cart(x):
        return 1.0 + x[..., 0] ** 2

    def fn_polar(x):
        return 1.0 + (x[..., 0] * np.cos(x[..., 1])) ** 2

    o_c = cart.point(1.0, 0.5)
    o_p = polar.point(math.hypot(1.0, 0.5), math.atan2(0.5, 1.0))
    a = boundary_sphere_integral(cart, fn_cart, 2.0, o_c)
    b = boundary_sphere_integral(polar, fn_polar, 2.0, o_p)
    assert a == pytest.approx(b, rel=1e-12)


def test_boundary_sphere_integral_field_interpolation():
    plane = EuclideanPlane()
    g = plane.make_grid(161)
    f = ScalarField.from_function(g, lambda x: 1.0 + 0.1 * x[..., 0] ** 2)
    exact = 2 * math.pi * 2.0 * (1.0 + 0.1 * 2.0)
    assert boundary_sphere_integral(plane, f, 2.0) == pytest.approx(exact, rel=1e-5)


def test_boundary_sphere_integral_injectivity():
    with pytest.raises(DomainError):
        boundary_sphere_integral(Circle(), lambda x: 1.0, 4.0)
    with pytest.raises(DomainError):
        boundary_sphere_integral(RoundSphere2(), lambda x: 1.0, 3.2)
    with pytest.raises(DomainError):
        boundary_sphere_integral(EuclideanPlane(), lambda x: 1.0, 0.0)


def test_sphere_geodesic_circle_length():
    model = RoundSphere2()
    r = 1.0
    assert boundary_sphere_integral(model, lambda x: 1.0, r) == pytest.approx(2 * math.pi * math.sin(r), rel=1e-12)


def test_eigen_floors():
    s = RoundSphere2()
    g = s.make_grid(32)
    lam = np.linalg.eigvalsh(g.sigma)
    assert lam.min() >= s.eigen_floor() * (1 - 1e-12)
    assert Circle(3.0).eigen_floor() == 9.0
    assert EuclideanPlane(chart="polar", r_min=0.5).eigen_floor() == 0.25


def test_sphere_chart_transition_roundtrip(rng):
    s = RoundSphere2()
    w = rng.uniform(-2, 2, (50, 2))
    xyz = s.embed(w, 0)
    w1 = s.chart_from_embedding(xyz, 1)
    assert np.allclose(s.to_primary(w1, 1), w, atol=1e-12)
    assert np.allclose(s.embed(w1, 1), xyz, atol=1e-12)


def test_sphere_partition_of_unity(rng):
    s = RoundSphere2()
    w = rng.uniform(-2, 2, (50, 2))
    w1 = s.chart_from_embedding(s.embed(w, 0), 1)
    assert np.allclose(s.blend(w) + s.blend(w1), 1.0, atol=1e-12)


def test_point_reduces_periodic_coordinates():
    p = Circle().point(7.0)
    assert p.coords[0] == pytest.approx(7.0 - 2 * math.pi)
    with pytest.raises(DomainError):
        Circle().point(1.0, 2.0)


def test_invalid_models():
    with pytest.raises(DomainError):
        Circle(-1.0)
    with pytest.raises(DomainError):
        RoundSphere2(half_width=0.9)
    with pytest.raises(DomainError):
        EuclideanPlane(chart="hex")


def test_plane_trust_region_excludes_boundary_strip():
    g = EuclideanPlane().make_grid(41)
    k = EuclideanPlane.trust_nodes
    assert not g.trust[0, :k].any() and not g.trust[0, -k:].any()
    assert g.trust[0, k:-k, k:-k].all()


def test_refine_halves_spacing():
    for model, n in ((Circle(), 32), (FlatTorus2(), 16), (RoundSphere2(), 16), (EuclideanPlane(), 21)):
        g = model.make_grid(n)
        assert g.refine().h == pytest.approx(g.h / 2)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.1, 3.0))
def test_circle_partial_of_shifted_sine(shift, radius):
    g = Circle(radius).make_grid(64)
    f = np.sin(g.coords[..., 0] + shift)
    df = base.partial(f, g, 0)
    assert np.max(np.abs(df - np.cos(g.coords[..., 0] + shift))) <= g.h**2


@given(st.integers(1, 4), st.integers(0, 3))
def test_torus_divergence_theorem_modes(k1, k2):
    g = FlatTorus2().make_grid(24)
    V = VectorField.from_function(g, lambda x: np.stack([np.cos(k1 * x[..., 0] + k2 * x[..., 1]),
                                                         np.sin(k2 * x[..., 1])], axis=-1))
    assert abs(integrate(div_sigma(V))) <= 1e-11
