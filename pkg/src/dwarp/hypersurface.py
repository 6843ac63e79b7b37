"""Spacelike graphs ``x -> (u(x), x)`` and their extrinsic geometry.

Two independent routes to the mean curvature are provided:

* :func:`geometry_field` follows the Weingarten route: tangent frame, future
  unit normal, ``nabla-bar`` of the frame with analytic Christoffel symbols,
  shape operator and its trace.
* :func:`mean_curvature_via_divergence` solves the divergence identity for
  ``rho h^2 grad u`` on the induced metric for ``H``; it uses only the base
  module's gradient/divergence stencils and never touches Christoffels.

The Weingarten route carries its own difference stencils so that the two
routes share no differentiation code.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from dwarp import base
from dwarp.base import BaseGrid, ScalarField, SymTensorField
from dwarp.errors import DomainError, SpacelikeViolation
from dwarp.spacetime import DoublyWarpedSpacetime

EPS_MARGIN = 1e-6


# --------------------------------------------------------------------------
# stencils of the Weingarten route (deliberately separate from dwarp.base)


def _d1(f, d, ax, periodic):
    if periodic:
        return (np.roll(f, -1, ax) - np.roll(f, 1, ax)) / (2 * d)
    f = np.moveaxis(f, ax, 0)
    out = np.empty_like(f)
    out[1:-1] = 0.5 * (f[2:] - f[:-2]) / d
    out[0] = (-1.5 * f[0] + 2 * f[1] - 0.5 * f[2]) / d
    out[-1] = (1.5 * f[-1] - 2 * f[-2] + 0.5 * f[-3]) / d
    return np.moveaxis(out, 0, ax)


def _d2(f, d, ax, periodic):
    if periodic:
        return (np.roll(f, -1, ax) - 2 * f + np.roll(f, 1, ax)) / d**2
    f = np.moveaxis(f, ax, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / d**2
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / d**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / d**2
    return np.moveaxis(out, 0, ax)


def jet(u: np.ndarray, grid: BaseGrid):
    """First and second chart derivatives of ``u`` (second order)."""
    m = grid.dim
    du = np.empty(grid.shape + (m,))
    ddu = np.empty(grid.shape + (m, m))
    for i in range(m):
        du[..., i] = _d1(u, grid.spacing[i], i + 1, grid.periodic[i])
        ddu[..., i, i] = _d2(u, grid.spacing[i], i + 1, grid.periodic[i])
    for i in range(m):
        for j in range(i + 1, m):
            mixed = _d1(du[..., i], grid.spacing[j], j + 1, grid.periodic[j])
            ddu[..., i, j] = ddu[..., j, i] = mixed
    return du, ddu


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometryAtPoint:
    g: np.ndarray
    ginv: np.ndarray
    N: np.ndarray
    A: np.ndarray
    H: float
    cosh_theta: float
    X_tan: np.ndarray


@dataclass(frozen=True, eq=False)
class GraphGeometry:
    """Weingarten-route geometry at every node (arrays over ``grid.shape``).

    ``b`` is the scalar second fundamental form ``gbar(nabla-bar_{E_i} E_j, N)``
    so that ``g(A V, W) = b(V, W)``; ``H = -trace(A)/m``.
    """

    g: np.ndarray
    ginv: np.ndarray
    E: np.ndarray
    N: np.ndarray
    b: np.ndarray
    A: np.ndarray
    H: np.ndarray
    cosh_theta: np.ndarray
    X_tan: np.ndarray
    gbar: np.ndarray
    Gamma: np.ndarray
    Xbar: np.ndarray
    du: np.ndarray
    ddu: np.ndarray


class GraphHypersurface:
    """Graph of a height field ``u`` over a base grid inside a spacetime.

    Parameters
    ----------
    spacetime : DoublyWarpedSpacetime
    u : ScalarField
        Height in time units; every value must lie in the interval ``I``.
    """

    def __init__(self, spacetime: DoublyWarpedSpacetime, u: ScalarField):
        if u.grid.model is not spacetime.base and type(u.grid.model) is not type(spacetime.base):
            raise DomainError("height field lives on a different base")
        if not np.all(spacetime.warp.contains(u.values)):
            raise DomainError(f"height leaves I = {spacetime.warp.interval}")
        self.spacetime = spacetime
        self.u = u
        self.grid = u.grid
        g = self._induced(base.chart_gradient(u.values, u.grid))
        self._g = g
        self.margin = ScalarField(self.grid, np.linalg.eigvalsh(g)[..., 0])

    @classmethod
    def from_function(cls, spacetime, grid, fn):
        return cls(spacetime, ScalarField.from_function(grid, fn))

    def _fields(self, p):
        x = self.grid.coords[p]
        u = self.u.values[p]
        st = self.spacetime
        return x, u, st.warp(u), st.potential.value(x, p)

    def _induced(self, du):
        out = np.empty(self.grid.shape + (self.grid.dim, self.grid.dim))
        for p in range(self.grid.n_patches):
            x, u, rho, h = self._fields(p)
            out[p] = rho[..., None, None] ** 2 * self.grid.sigma[p] - (h**2)[..., None, None] * (
                du[p][..., :, None] * du[p][..., None, :])
        return out

    def is_spacelike(self) -> bool:
        return bool(np.min(self.margin.values) > 0)

    def require_spacelike(self):
        vals = self.margin.values
        if np.min(vals) <= 0:
            idx = np.unravel_index(np.argmin(vals), vals.shape)
            raise SpacelikeViolation(vals[idx], idx)

    def rho(self):
        return self.spacetime.warp(self.u.values)

    def drho(self):
        return self.spacetime.warp.deriv(self.u.values)

    def h(self):
        return np.stack([self.spacetime.potential.value(self.grid.coords[p], p) for p in range(self.grid.n_patches)])

    def script_H(self):
        return self.drho() / (self.rho() * self.h())

    def with_height(self, values) -> "GraphHypersurface":
        return GraphHypersurface(self.spacetime, ScalarField(self.grid, values))


def induced_metric(S: GraphHypersurface) -> SymTensorField:
    """``g_ij = rho(u)^2 sigma_ij - h^2 d_i u d_j u``; raises when not spacelike."""
    S.require_spacelike()
    return SymTensorField(S.grid, S._g)


def geometry_field(S: GraphHypersurface) -> GraphGeometry:
    """Weingarten-route geometry at every node."""
    S.require_spacelike()
    st = S.spacetime
    grid = S.grid
    m = grid.dim
    du, ddu = jet(S.u.values, grid)
    parts = {k: [] for k in ("g", "E", "N", "b", "gbar", "G", "X", "ct")}
    for p in range(grid.n_patches):
        x = grid.coords[p]
        u = S.u.values[p]
        gbar = st.metric(u, x, p)
        G = st.christoffel(u, x, p)
        Xbar = st.conformal_vector(u, x, p)
        alpha = st.alpha(u, x, p)
        E = np.zeros(x.shape[:-1] + (m, m + 1))
        E[..., :, 0] = du[p]
        E[..., :, 1:] = np.eye(m)
        # N solves gbar(N, E_i) = 0: raise the conormal dt - du
        n = np.concatenate([np.ones(x.shape[:-1] + (1,)), -du[p]], axis=-1)
        N = np.einsum("...ab,...b->...a", np.linalg.inv(gbar), n)
        nn = np.einsum("...a,...ab,...b->...", N, gbar, N)
        N = N / np.sqrt(-nn)[..., None]
        sign = np.sign(-np.einsum("...a,...ab,...b->...", N, gbar, Xbar))
        N = N * sign[..., None]
        # nabla-bar_{E_i} E_j = d_i E_j + Gamma(E_i, E_j); d_i E_j = (u_ij, 0, ...)
        nab = np.einsum("...mab,...ia,...jb->...ijm", G, E, E)
        nab[..., 0] += ddu[p]
        b = np.einsum("...ijm,...mn,...n->...ij", nab, gbar, N)
        g = np.einsum("...ia,...ab,...jb->...ij", E, gbar, E)
        ct = -np.einsum("...a,...ab,...b->...", N, gbar, Xbar) / alpha
        parts["g"].append(g)
        parts["E"].append(E)
        parts["N"].append(N)
        parts["b"].append(b)
        parts["gbar"].append(gbar)
        parts["G"].append(G)
        parts["X"].append(Xbar)
        parts["ct"].append(ct)
    g = np.stack(parts["g"])
    ginv = np.linalg.inv(g)
    b = np.stack(parts["b"])
    A = np.einsum("...ik,...kj->...ij", ginv, b)
    H = -np.trace(A, axis1=-2, axis2=-1) / m
    E = np.stack(parts["E"])
    gbar = np.stack(parts["gbar"])
    Xbar = np.stack(parts["X"])
    # tangential part of Xbar: X^i = g^{ij} gbar(Xbar, E_j)
    X_tan = np.einsum("...ij,...ja,...ab,...b->...i", ginv, E, gbar, Xbar)
    return GraphGeometry(
        g=g, ginv=ginv, E=E, N=np.stack(parts["N"]), b=b, A=A, H=H,
        cosh_theta=np.stack(parts["ct"]), X_tan=X_tan, gbar=gbar, Gamma=np.stack(parts["G"]),
        Xbar=Xbar, du=du, ddu=ddu,
    )


def geometry_at(S: GraphHypersurface, node) -> GeometryAtPoint:
    """Geometry at one node, ``node`` a grid index tuple ``(patch, i[, j])``."""
    node = tuple(node)
    if S.margin.values[node] <= 0:
        raise SpacelikeViolation(S.margin.values[node], node)
    geo = geometry_field(S)
    return GeometryAtPoint(
        g=geo.g[node], ginv=geo.ginv[node], N=geo.N[node], A=geo.A[node], H=float(geo.H[node]),
        cosh_theta=float(geo.cosh_theta[node]), X_tan=geo.X_tan[node],
    )


# --------------------------------------------------------------------------
# divergence route


@dataclass(frozen=True, eq=False)
class DivergenceData:
    g: np.ndarray
    ginv: np.ndarray
    sqrt_det: np.ndarray
    grad_u: np.ndarray
    cosh_theta: np.ndarray
    div_flux: np.ndarray


def divergence_data(S: GraphHypersurface, order: int = 2) -> DivergenceData:
    """``div_g(rho h^2 grad_g u)`` and the closed-form hyperbolic angle.

    ``cosh theta = (1 - h^2 |du|_sigma^2 / rho^2)^(-1/2)`` depends on first
    derivatives only, so this route needs no normal vector.
    """
    S.require_spacelike()
    grid = S.grid
    du = base.chart_gradient(S.u.values, grid, order)
    g = S._induced(du)
    ginv = np.linalg.inv(g)
    sqrt_det = np.sqrt(np.linalg.det(g))
    grad_u = base.grad_metric(S.u.values, grid, ginv, order)
    rho, h = S.rho(), S.h()
    flux = (rho * h**2)[..., None] * grad_u
    div_flux = base.div_metric(flux, grid, sqrt_det, order)
    du_sig2 = np.einsum("...i,...ij,...j->...", du, grid.sigma_inv(), du)
    cosh_theta = 1.0 / np.sqrt(1.0 - h**2 * du_sig2 / rho**2)
    return DivergenceData(g, ginv, sqrt_det, grad_u, cosh_theta, div_flux)


def mean_curvature_via_divergence(S: GraphHypersurface, order: int = 2) -> ScalarField:
    """``H = [div(rho h^2 grad u)/(m h rho) + calH] / cosh theta``."""
    d = divergence_data(S, order)
    m = S.grid.dim
    rho, h = S.rho(), S.h()
    H = (d.div_flux / (m * h * rho) + S.script_H()) / d.cosh_theta
    return ScalarField(S.grid, H)


def laplacian(f: np.ndarray, grid: BaseGrid, ginv, sqrt_det):
    return base.div_metric(base.grad_metric(f, grid, ginv), grid, sqrt_det)


def weighted_laplacian_forms(S: GraphHypersurface):
    """``Delta_{-log(rho h^2)} u`` and ``Delta_{-log h^2}(R(u))`` from ``Delta_f = Delta - g(grad f, grad .)``."""
    d = divergence_data(S)
    grid = S.grid
    rho, h = S.rho(), S.h()
    u = S.u.values
    Ru = S.spacetime.warp.antideriv(u)
    grad_log_w1 = base.chart_gradient(np.log(rho * h**2), grid)
    grad_log_w2 = base.chart_gradient(np.log(h**2), grid)
    du = base.chart_gradient(u, grid)
    dR = base.chart_gradient(Ru, grid)
    cross1 = np.einsum("...i,...ij,...j->...", grad_log_w1, d.ginv, du)
    cross2 = np.einsum("...i,...ij,...j->...", grad_log_w2, d.ginv, dR)
    first = laplacian(u, grid, d.ginv, d.sqrt_det) + cross1
    second = laplacian(Ru, grid, d.ginv, d.sqrt_det) + cross2
    return ScalarField(grid, first), ScalarField(grid, second)


def implied_H_from_forms(S: GraphHypersurface, forms=None):
    """Mean curvature implied by each weighted-Laplacian form."""
    first, second = forms if forms is not None else weighted_laplacian_forms(S)
    m = S.grid.dim
    rho, h = S.rho(), S.h()
    ct = divergence_data(S).cosh_theta
    calH = S.script_H()
    H1 = (h / m * first.values + calH) / ct
    H2 = (h / (m * rho) * second.values + calH) / ct
    return ScalarField(S.grid, H1), ScalarField(S.grid, H2)


def projection_metric_comparison(S: GraphHypersurface) -> float:
    """Min over nodes and unit chart vectors of ``rho^2 sigma(v, v) - g(v, v)``."""
    S.require_spacelike()
    rho = S.rho()
    diff = rho[..., None, None] ** 2 * S.grid.sigma - S._g
    return float(np.min(np.linalg.eigvalsh(diff)[..., 0]))


def write_field_csv(path, S: GraphHypersurface, geo: GraphGeometry | None = None, header_comment: str | None = None):
    """Dump ``coords..., u, H, H_alt, cosh_theta, margin, residual`` per node."""
    geo = geo if geo is not None else geometry_field(S)
    H_alt = mean_curvature_via_divergence(S).values
    m = S.grid.dim
    path = Path(path)
    with path.open("w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        cols = ["patch"] + [f"x{i + 1}" for i in range(m)] + ["u", "H", "H_alt", "cosh_theta", "margin", "residual"]
        w.writerow(cols)
        for idx in np.ndindex(*S.grid.shape):
            row = [idx[0]] + [f"{c:.12g}" for c in S.grid.coords[idx]]
            row += [f"{v:.12g}" for v in (S.u.values[idx], geo.H[idx], H_alt[idx], geo.cosh_theta[idx],
                                          S.margin.values[idx], geo.H[idx] - H_alt[idx])]
            w.writerow(row)
    return path
