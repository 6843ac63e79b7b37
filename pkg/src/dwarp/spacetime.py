"""Doubly warped product spacetimes ``-h(x)^2 dt^2 + rho(t)^2 sigma``.

Index convention: coordinate 0 is ``t`` and ``1..m`` are base chart
coordinates.  Christoffel arrays are ``G[..., mu, nu, lam] = Gamma^mu_{nu lam}``.
All evaluators are vectorized over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from dwarp.base import BaseGrid, BaseManifoldModel, BasePoint, Circle, EuclideanPlane, RoundSphere2, ScalarField
from dwarp.errors import DomainError
from dwarp.lie import lie_derivative_metric

# --------------------------------------------------------------------------
# warp functions


class WarpFunction:
    """Positive warp ``rho`` on an open interval with ``rho'`` and an antiderivative.

    The antiderivative is normalised by ``R(t_ref) = 0`` with ``t_ref`` the
    interval midpoint (or the finite end / 0 for unbounded intervals).
    """

    name = "tabulated"

    def __init__(self, interval, rho: Callable, drho: Callable | None = None, antideriv: Callable | None = None,
                 params: dict | None = None):
        t_min, t_max = (float(v) for v in interval)
        if not t_min < t_max:
            raise DomainError("interval must satisfy t_min < t_max")
        self.interval = (t_min, t_max)
        self._rho = rho
        self._drho = drho
        self._antideriv = antideriv
        self.params = dict(params or {})
        if math.isfinite(t_min) and math.isfinite(t_max):
            self.t_ref = 0.5 * (t_min + t_max)
        elif math.isfinite(t_min):
            self.t_ref = t_min + 1.0
        elif math.isfinite(t_max):
            self.t_ref = t_max - 1.0
        else:
            self.t_ref = 0.0

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (t > self.interval[0]) & (t < self.interval[1])

    def __call__(self, t):
        return np.asarray(self._rho(np.asarray(t, dtype=float)), dtype=float) * np.ones(np.shape(t))

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self._drho is not None:
            return np.asarray(self._drho(t), dtype=float) * np.ones(np.shape(t))
        e = 1e-3 * np.maximum(1.0, np.abs(t))
        return (8 * (self(t + e) - self(t - e)) - (self(t + 2 * e) - self(t - 2 * e))) / (12 * e)

    def antideriv(self, t):
        t = np.asarray(t, dtype=float)
        if self._antideriv is not None:
            return np.asarray(self._antideriv(t) - self._antideriv(self.t_ref), dtype=float) * np.ones(t.shape)
        flat = [quad(lambda s: float(self(s)), self.t_ref, float(ti), epsabs=1e-13, epsrel=1e-12)[0]
                for ti in t.ravel()]
        return np.reshape(flat, t.shape)

    def describe(self) -> dict:
        return {"name": self.name, "interval": list(self.interval), **self.params}


def _warp(name, interval, rho, drho, antideriv, **params):
    w = WarpFunction(interval, rho, drho, antideriv, params)
    w.name = name
    return w


def warp_constant(c=1.0, interval=(-1.0, 1.0)):
    return _warp("constant", interval, lambda t: c + 0 * t, lambda t: 0 * t, lambda t: c * t, c=c)


def warp_exp(a=1.0, k=1.0, interval=(0.0, 2.0)):
    return _warp("exp", interval, lambda t: a * np.exp(k * t), lambda t: a * k * np.exp(k * t),
                 lambda t: a / k * np.exp(k * t), a=a, k=k)


def warp_cosh(a=1.0, k=1.0, interval=(-1.0, 1.0)):
    return _warp("cosh", interval, lambda t: a * np.cosh(k * t), lambda t: a * k * np.sinh(k * t),
                 lambda t: a / k * np.sinh(k * t), a=a, k=k)


def warp_poly(coeffs=(1.0, 0.0, 1.0), interval=(0.0, 2.0)):
    """``rho(t) = sum c_k t^k`` (default ``1 + t**2``); caller ensures positivity on the interval."""
    p = np.polynomial.Polynomial(coeffs)
    dp, ip = p.deriv(), p.integ()
    return _warp("poly", interval, p, dp, ip, coeffs=list(map(float, coeffs)))


WARP_PRESETS = {
    "constant": (warp_constant, {"c": "float > 0"}),
    "exp": (warp_exp, {"a": "float > 0", "k": "float != 0"}),
    "cosh": (warp_cosh, {"a": "float > 0", "k": "float != 0"}),
    "poly": (warp_poly, {"coeffs": "list of float, positive on I"}),
}


# --------------------------------------------------------------------------
# static potentials


class StaticPotential:
    """Positive function ``h`` on the base with its chart gradient.

    ``value(coords, chart)`` and ``grad(coords, chart)`` take chart
    coordinates; without a closed-form gradient a fourth-order finite
    difference is used.
    """

    def __init__(self, name, value: Callable, grad: Callable | None = None, params: dict | None = None):
        self.name = name
        self._value = value
        self._grad = grad
        self.params = dict(params or {})

    def value(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        return np.asarray(self._value(coords, chart), dtype=float) * np.ones(coords.shape[:-1])

    def grad(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        if self._grad is not None:
            return np.asarray(self._grad(coords, chart), dtype=float) * np.ones(coords.shape)
        out = np.empty(coords.shape)
        e = 1e-3
        for k in range(coords.shape[-1]):
            d = np.zeros(coords.shape[-1])
            d[k] = e
            out[..., k] = (8 * (self.value(coords + d, chart) - self.value(coords - d, chart))
                           - (self.value(coords + 2 * d, chart) - self.value(coords - 2 * d, chart))) / (12 * e)
        return out

    def describe(self) -> dict:
        return {"name": self.name, **self.params}


def potential_constant(c=1.0):
    return StaticPotential("constant", lambda x, ch: c + 0 * x[..., 0], lambda x, ch: 0 * x, {"c": c})


def potential_cos(a=2.0, b=1.0, axis=0):
    """``h = a + b cos(x^axis)``, the ``2+cos`` preset on angle charts."""
    if a <= abs(b):
        raise DomainError("a + b cos must stay positive: need a > |b|")

    def grad(x, ch):
        g = np.zeros(x.shape)
        g[..., axis] = -b * np.sin(x[..., axis])
        return g

    return StaticPotential("2+cos", lambda x, ch: a + b * np.cos(x[..., axis]), grad, {"a": a, "b": b, "axis": axis})


def _radius(model, x):
    if isinstance(model, EuclideanPlane) and model.chart == "polar":
        return x[..., 0], None
    return np.hypot(x[..., 0], x[..., 1]), x


def _radial_grad(model, x, dfdr):
    r, xy = _radius(model, x)
    g = np.zeros(x.shape)
    if xy is None:
        g[..., 0] = dfdr(r)
    else:
        safe = np.where(r > 0, r, 1.0)
        g[..., 0] = np.where(r > 0, dfdr(r) * x[..., 0] / safe, 0.0)
        g[..., 1] = np.where(r > 0, dfdr(r) * x[..., 1] / safe, 0.0)
    return g


def potential_radial_exp(model, k=1.0):
    """``h = exp(k |x|)`` on the plane."""
    return StaticPotential(
        "radial-exp",
        lambda x, ch: np.exp(k * _radius(model, x)[0]),
        lambda x, ch: _radial_grad(model, x, lambda r: k * np.exp(k * r)),
        {"k": k},
    )


def potential_radial_power(model, p=0.25):
    """``h = (1 + |x|^2)^p`` on the plane."""
    return StaticPotential(
        "radial-power",
        lambda x, ch: (1.0 + _radius(model, x)[0] ** 2) ** p,
        lambda x, ch: _radial_grad(model, x, lambda r: 2 * p * r * (1.0 + r**2) ** (p - 1)),
        {"p": p},
    )


def potential_sphere_height(model: RoundSphere2, a=2.0, b=1.0):
    """``h = a + b z`` with ``z`` the height coordinate of the embedded sphere."""
    if a <= abs(b):
        raise DomainError("need a > |b| for a positive potential")

    def value(x, ch):
        r2 = np.sum(x**2, axis=-1)
        z = (r2 - 1.0) / (r2 + 1.0)
        return a + b * (z if ch == 0 else -z)

    def grad(x, ch):
        r2 = np.sum(x**2, axis=-1, keepdims=True)
        dz = 4.0 * x / (1.0 + r2) ** 2
        return b * (dz if ch == 0 else -dz)

    return StaticPotential("sphere-height", value, grad, {"a": a, "b": b})


POTENTIAL_PRESETS = {
    "constant": ({"c": "float > 0"}, "any base"),
    "2+cos": ({"a": "float > |b|", "b": "float", "axis": "int"}, "angle charts"),
    "radial-exp": ({"k": "float"}, "EuclideanPlane"),
    "radial-power": ({"p": "float"}, "EuclideanPlane"),
    "sphere-height": ({"a": "float > |b|", "b": "float"}, "RoundSphere2"),
}


_POTENTIAL_BASES = {
    "2+cos": ("Circle", "FlatTorus2"),
    "radial-exp": ("EuclideanPlane",),
    "radial-power": ("EuclideanPlane",),
    "sphere-height": ("RoundSphere2",),
}


def make_potential(name: str, model: BaseManifoldModel, **params) -> StaticPotential:
    if name in _POTENTIAL_BASES and model.kind not in _POTENTIAL_BASES[name]:
        raise DomainError(f"potential {name!r} needs a base in {_POTENTIAL_BASES[name]}, got {model.kind}")
    if name == "constant":
        return potential_constant(**params)
    if name == "2+cos":
        return potential_cos(**params)
    if name == "radial-exp":
        return potential_radial_exp(model, **params)
    if name == "radial-power":
        return potential_radial_power(model, **params)
    if name == "sphere-height":
        return potential_sphere_height(model, **params)
    raise DomainError(f"unknown potential preset {name!r}")


def make_warp(name: str, **params) -> WarpFunction:
    if name not in WARP_PRESETS:
        raise DomainError(f"unknown warp preset {name!r}")
    return WARP_PRESETS[name][0](**params)


# --------------------------------------------------------------------------
# the spacetime


@dataclass(frozen=True)
class AmbientPoint:
    t: float
    x: BasePoint


@dataclass(frozen=True)
class ConformalData:
    alpha: float
    eta: float
    script_H: float


class DoublyWarpedSpacetime:
    """``I x P`` with metric ``-h(x)^2 dt^2 + rho(t)^2 sigma``."""

    def __init__(self, base: BaseManifoldModel, warp: WarpFunction, potential: StaticPotential,
                 monotone_flag: bool = False):
        self.base = base
        self.warp = warp
        self.potential = potential
        self.monotone_flag = bool(monotone_flag)
        if self.monotone_flag:
            lo, hi = warp.interval
            lo = lo if math.isfinite(lo) else -50.0
            hi = hi if math.isfinite(hi) else 50.0
            ts = np.linspace(lo, hi, 4001)[1:-1]
            worst = float(np.min(warp.deriv(ts)))
            if worst < -1e-12:
                raise DomainError(f"monotone flag set but rho' reaches {worst:.3e} on I")

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    def describe(self) -> dict:
        return {
            "base": {"kind": self.base.kind, **self.base.params()},
            "rho": self.warp.describe(),
            "h": self.potential.describe(),
            "monotone": self.monotone_flag,
        }

    def _check(self, t):
        if not np.all(self.warp.contains(t)):
            raise DomainError(f"time outside I = {self.warp.interval}")

    # vectorized evaluators ------------------------------------------------

    def metric(self, t, x, chart=0):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        m = self.base.dim
        rho = self.warp(t)
        h = self.potential.value(x, chart)
        sig = self.base.metric(x, chart)
        out = np.zeros(np.broadcast_shapes(t.shape, x.shape[:-1]) + (m + 1, m + 1))
        out[..., 0, 0] = -(h**2)
        out[..., 1:, 1:] = rho[..., None, None] ** 2 * sig
        return out

    def christoffel(self, t, x, chart=0):
        """Closed-form Christoffel symbols from ``rho'``, ``d h`` and ``d sigma``."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        m = self.base.dim
        rho, drho = self.warp(t), self.warp.deriv(t)
        h = self.potential.value(x, chart)
        dh = self.potential.grad(x, chart)
        sig = self.base.metric(x, chart)
        sig_inv = np.linalg.inv(sig)
        dsig = self.base.metric_deriv(x, chart)
        shape = np.broadcast_shapes(t.shape, x.shape[:-1])
        G = np.zeros(shape + (m + 1, m + 1, m + 1))
        # Gamma^t_{ti} = Gamma^t_{it} = d_i h / h
        G[..., 0, 0, 1:] = dh / h[..., None]
        G[..., 0, 1:, 0] = dh / h[..., None]
        # Gamma^t_{ij} = rho rho' sigma_ij / h^2
        G[..., 0, 1:, 1:] = (rho * drho / h**2)[..., None, None] * sig
        # Gamma^i_{tt} = h sigma^{ij} d_j h / rho^2
        G[..., 1:, 0, 0] = (h / rho**2)[..., None] * np.einsum("...ij,...j->...i", sig_inv, dh)
        # Gamma^i_{tj} = Gamma^i_{jt} = (rho'/rho) delta^i_j
        eye = np.eye(m)
        G[..., 1:, 0, 1:] = (drho / rho)[..., None, None] * eye
        G[..., 1:, 1:, 0] = (drho / rho)[..., None, None] * eye
        # Gamma^i_{jk} of sigma
        G[..., 1:, 1:, 1:] = 0.5 * (
            np.einsum("...il,...jkl->...ijk", sig_inv, dsig)
            + np.einsum("...il,...kjl->...ijk", sig_inv, dsig)
            - np.einsum("...il,...ljk->...ijk", sig_inv, dsig)
        )
        return G

    def conformal_vector(self, t, x, chart=0):
        """Components of ``X = rho d_t``."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(t.shape, x.shape[:-1])
        out = np.zeros(shape + (self.dim,))
        out[..., 0] = self.warp(t)
        return out

    def alpha(self, t, x, chart=0):
        return self.potential.value(x, chart) * self.warp(t)

    def eta(self, t):
        return self.warp.deriv(t)

    def script_H(self, t, x, chart=0):
        return self.warp.deriv(t) / (self.warp(t) * self.potential.value(x, chart))

    # point API ------------------------------------------------------------

    def ambient_metric_at(self, p: AmbientPoint) -> np.ndarray:
        self._check(p.t)
        return self.metric(p.t, p.x.array, p.x.chart)

    def christoffels_at(self, p: AmbientPoint) -> np.ndarray:
        self._check(p.t)
        return self.christoffel(p.t, p.x.array, p.x.chart)

    def conformal_field_at(self, p: AmbientPoint):
        self._check(p.t)
        x = p.x.array
        alpha = float(self.alpha(p.t, x, p.x.chart))
        eta = float(self.eta(p.t))
        return self.conformal_vector(p.t, x, p.x.chart), ConformalData(alpha, eta, eta / alpha)

    def lie_derivative(self, points: np.ndarray, chart: int = 0, step: float = 1e-3) -> np.ndarray:
        """``L_X g`` at ambient coordinate rows ``(t, x...)`` via flow transport."""
        points = np.asarray(points, dtype=float)
        rho = self.warp(points[:, 0])
        drho = np.abs(self.warp.deriv(points[:, 0]))
        steps = step / np.maximum(1.0, np.maximum(rho, drho))

        def metric_fn(P):
            return self.metric(P[:, 0], P[:, 1:], chart)

        def vector_fn(P):
            return self.conformal_vector(P[:, 0], P[:, 1:], chart)

        return lie_derivative_metric(metric_fn, vector_fn, points, steps)

    def lie_derivative_residuals(self, points: np.ndarray, chart: int = 0, step: float = 1e-3) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self._check(points[:, 0])
        L = self.lie_derivative(points, chart, step)
        target = 2.0 * self.warp.deriv(points[:, 0])[:, None, None] * self.metric(points[:, 0], points[:, 1:], chart)
        return np.max(np.abs(L - target), axis=(1, 2))

    def lie_derivative_residual(self, p: AmbientPoint, step: float = 1e-3) -> float:
        """Max-norm of ``L_X g - 2 rho' g`` at ``p``."""
        row = np.concatenate([[p.t], p.x.array])[None, :]
        return float(self.lie_derivative_residuals(row, p.x.chart, step)[0])

    def slice_geometry(self, t0: float, grid: BaseGrid):
        """Second fundamental form of the slice ``{t0} x P`` from the Christoffel symbols.

        Returns the max-norm umbilicity defect ``|II - H g (x) N|`` over the nodes
        and the mean curvature field.
        """
        self._check(t0)
        m = self.base.dim
        defects = []
        Hs = []
        for p in range(grid.n_patches):
            x = grid.coords[p]
            t = np.full(x.shape[:-1], float(t0))
            G = self.christoffel(t, x, p)
            gbar = self.metric(t, x, p)
            h = self.potential.value(x, p)
            N = np.zeros(x.shape[:-1] + (m + 1,))
            N[..., 0] = 1.0 / h
            # normal part of nabla_{d_i} d_j; the tangent frame is d_1..d_m
            nab = G[..., :, 1:, 1:]
            proj = np.einsum("...mij,...mn,...n->...ij", nab, gbar, N)
            II = -proj[..., None] * N[..., None, None, :]
            g = gbar[..., 1:, 1:]
            ginv = np.linalg.inv(g)
            Hvec = np.einsum("...ij,...ijm->...m", ginv, II) / m
            H = -np.einsum("...m,...mn,...n->...", Hvec, gbar, N)
            calH = self.script_H(t, x, p)
            model = calH[..., None, None, None] * g[..., None] * N[..., None, None, :]
            defects.append(np.max(np.abs(II - model)))
            Hs.append(H)
        return float(max(defects)), ScalarField(grid, np.stack(Hs))


def minkowski_cylinder(radius: float = 1.0, interval=(-1.0, 1.0)) -> DoublyWarpedSpacetime:
    return DoublyWarpedSpacetime(Circle(radius), warp_constant(1.0, interval), potential_constant(1.0), True)
