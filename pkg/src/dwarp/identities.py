"""Residual checks of the hypersurface identities.

Each check evaluates the two sides of an identity by different code paths
(see :mod:`dwarp.hypersurface`) and reports the residual against a
``C * spacing**2`` bound.  The bound constant is ``C0 * scale`` where
``scale`` measures the size of the graph's higher derivatives and its tilt,
so one constant serves all graphs.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from dwarp import base
from dwarp.base import ScalarField
from dwarp.errors import NonCompactBase
from dwarp.hypersurface import GraphHypersurface, divergence_data, geometry_field
from dwarp.reports import ResidualReport, combine_refinement

# C0 per identity, fixed once for the default second-order stencil
BOUND_CONSTANTS = {
    "covhyp": 10.0,
    "divhyp": 10.0,
    "covconf": 10.0,
    "divconf": 10.0,
    "divrt": 10.0,
    "cross_path_H": 10.0,
    "inte": 10.0,
}

SLICE_TOL = 1e-8


def derivative_scale(S: GraphHypersurface) -> float:
    """``(1 + max|d^3 u| + max|d^4 u|) * max(cosh theta)^4`` on the grid.

    Third and fourth derivatives are estimated by repeated differences;
    the tilt factor accounts for the ``(1 - tilt^2)^(-k)`` amplification of
    stencil errors in the extrinsic quantities.
    """
    grid = S.grid
    u = S.u.values
    d3 = d4 = 0.0
    for i in range(grid.dim):
        di = u
        ders = []
        for _ in range(4):
            di = base.partial(di, grid, i)
            ders.append(di)
        d3 = max(d3, float(np.max(np.abs(ders[2]))))
        d4 = max(d4, float(np.max(np.abs(ders[3]))))
    ct = float(np.max(divergence_data(S).cosh_theta))
    return (1.0 + d3 + d4) * ct**4


def _nodes(S):
    return S.grid.trust


def _report(name, S, residual, scale, label=""):
    vals = np.abs(np.asarray(residual, dtype=float))
    return ResidualReport(
        identity_name=name,
        max_residual=float(np.max(vals)) if vals.size else 0.0,
        l2_residual=float(np.sqrt(np.mean(vals**2))) if vals.size else 0.0,
        spacing=S.grid.h,
        bound_constant=BOUND_CONSTANTS[name] * scale,
        label=label,
    )


# --------------------------------------------------------------------------
# ambient vector field choices


class AmbientField:
    """Ambient vector field with analytic components and coordinate partials.

    ``components(t, x, chart)`` -> ``(..., m+1)``; ``partials`` ->
    ``(..., m+1, m+1)`` with ``[mu, nu] = d_mu X^nu``.
    """

    def __init__(self, name, components: Callable, partials: Callable):
        self.name = name
        self.components = components
        self.partials = partials


def xbar_choice(spacetime, choice: str = "rho_dt") -> AmbientField:
    """``rho_dt`` (the conformal field) or a coordinate field ``dt``, ``dx1``, ``dx2``."""
    d = spacetime.dim

    def zeros(t, x):
        shape = np.broadcast_shapes(np.shape(t), np.shape(x)[:-1])
        return np.zeros(shape + (d,)), np.zeros(shape + (d, d))

    if choice == "rho_dt":
        def comp(t, x, ch):
            c, _ = zeros(t, x)
            c[..., 0] = spacetime.warp(t)
            return c

        def part(t, x, ch):
            _, p = zeros(t, x)
            p[..., 0, 0] = spacetime.warp.deriv(t)
            return p

        return AmbientField(choice, comp, part)
    names = ["dt"] + [f"dx{i}" for i in range(1, d)]
    if choice not in names:
        raise ValueError(f"unknown ambient field {choice!r}; choose from rho_dt, {', '.join(names)}")
    k = names.index(choice)

    def comp(t, x, ch):
        c, _ = zeros(t, x)
        c[..., k] = 1.0
        return c

    return AmbientField(choice, comp, lambda t, x, ch: zeros(t, x)[1])


# --------------------------------------------------------------------------
# intrinsic side: tangential part and its covariant derivative on (M, g)


def _intrinsic_side(S: GraphHypersurface, Xf: AmbientField):
    """``g(nabla_i X, d_k)`` and ``div X`` from the induced metric alone (base stencils)."""
    grid = S.grid
    st = S.spacetime
    m = grid.dim
    dd = divergence_data(S)
    du = base.chart_gradient(S.u.values, grid)
    X_low = np.empty(grid.shape + (m,))
    for p in range(grid.n_patches):
        x = grid.coords[p]
        u = S.u.values[p]
        comp = Xf.components(u, x, p)
        h = st.potential.value(x, p)
        rho = st.warp(u)
        # gbar(Xbar, E_k) with E_k = u_k d_t + d_k
        X_low[p] = -(h**2 * comp[..., 0])[..., None] * du[p] + rho[..., None] ** 2 * np.einsum(
            "...kj,...j->...k", grid.sigma[p], comp[..., 1:])
    g = dd.g
    dg = np.stack([base.partial(g, grid, k) for k in range(m)], axis=-3)  # [k, i, j] = d_k g_ij
    chris = 0.5 * (np.einsum("...il,...jkl->...ijk", dd.ginv, dg)
                   + np.einsum("...il,...kjl->...ijk", dd.ginv, dg)
                   - np.einsum("...il,...ljk->...ijk", dd.ginv, dg))
    dX = np.stack([base.partial(X_low, grid, i) for i in range(m)], axis=-2)  # [i, k] = d_i X_k
    cov = dX - np.einsum("...lik,...l->...ik", chris, X_low)
    X_up = np.einsum("...ij,...j->...i", dd.ginv, X_low)
    div = base.div_metric(X_up, grid, dd.sqrt_det)
    return cov, div


def _ambient_side(S: GraphHypersurface, Xf: AmbientField, geo=None):
    """``gbar(nabla-bar_{E_i} Xbar, E_k)``, ``gbar(Xbar, N)``, ``div-bar Xbar``, ``gbar(nabla-bar_N Xbar, N)``."""
    geo = geo if geo is not None else geometry_field(S)
    grid = S.grid
    covs, xn, divs, nn = [], [], [], []
    for p in range(grid.n_patches):
        x = grid.coords[p]
        u = S.u.values[p]
        comp = Xf.components(u, x, p)
        part = Xf.partials(u, x, p)
        G = geo.Gamma[p]
        # (nabla-bar X)[mu, nu] = d_mu X^nu + Gamma^nu_{mu lam} X^lam
        nabX = part + np.einsum("...nml,...l->...mn", G, comp)
        gbar = geo.gbar[p]
        E = geo.E[p]
        N = geo.N[p]
        covs.append(np.einsum("...ia,...ab,...bc,...kc->...ik", E, nabX, gbar, E))
        xn.append(np.einsum("...a,...ab,...b->...", comp, gbar, N))
        divs.append(np.trace(nabX, axis1=-2, axis2=-1))
        nn.append(np.einsum("...a,...ab,...bc,...c->...", N, nabX, gbar, N))
    return geo, np.stack(covs), np.stack(xn), np.stack(divs), np.stack(nn)


def _unit_pairs(S, geo, rng):
    """One pair of random g-unit tangent vectors at every trusted node."""
    t = S.grid.trust
    g = geo.g[t]
    L = np.linalg.cholesky(g)
    pairs = []
    for _ in range(2):
        z = rng.standard_normal(g.shape[:-1])
        z /= np.linalg.norm(z, axis=-1, keepdims=True)
        pairs.append(np.linalg.solve(np.swapaxes(L, -1, -2), z[..., None])[..., 0])
    return t, pairs[0], pairs[1]


def _contract(T, t, V, W):
    return np.einsum("ni,nij,nj->n", V, T[t], W)


def check_covhyp_divhyp(S: GraphHypersurface, Xbar_choice: str = "rho_dt", rng=None,
                        scale: float | None = None, label: str = ""):
    """Tangential covariant derivative and divergence of an ambient field.

    Returns two reports: ``covhyp`` over a random g-unit tangent pair at each
    trusted node and ``divhyp`` over trusted nodes.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    Xf = xbar_choice(S.spacetime, Xbar_choice)
    scale = derivative_scale(S) if scale is None else scale
    cov_int, div_int = _intrinsic_side(S, Xf)
    geo, cov_amb, xn, div_amb, nn = _ambient_side(S, Xf)
    # gbar(Xbar, II(V, W)) with II = -b N
    rhs = cov_amb - geo.b * xn[..., None, None]
    t, V, W = _unit_pairs(S, geo, rng)
    res = _contract(cov_int - rhs, t, V, W)
    m = S.grid.dim
    # divhyp with gbar(N, N) = -1: div X = div-bar Xbar + m H gbar(N, Xbar) + gbar(nabla-bar_N Xbar, N)
    div_rhs = div_amb + m * geo.H * xn + nn
    return (_report("covhyp", S, res, scale, label),
            _report("divhyp", S, (div_int - div_rhs)[_nodes(S)], scale, label))


def check_conformal_forms(S: GraphHypersurface, rng=None, scale: float | None = None,
                          label: str = ""):
    """``g(nabla_V X, W) = eta g(V,W) + alpha cosh(theta) g(AV,W)`` and ``div X = m alpha (calH - H cosh theta)``.

    The first form is compared on the symmetric part of ``g(nabla X)``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    Xf = xbar_choice(S.spacetime, "rho_dt")
    scale = derivative_scale(S) if scale is None else scale
    cov_int, div_int = _intrinsic_side(S, Xf)
    geo = geometry_field(S)
    eta = S.drho()
    alpha = S.rho() * S.h()
    rhs = eta[..., None, None] * geo.g + (alpha * geo.cosh_theta)[..., None, None] * geo.b
    # conformality fixes only the symmetric part of nabla-bar Xbar; the
    # antisymmetric part is d(Xbar_flat)/2 = -h rho dh ^ dt, nonzero when dh != 0
    sym = 0.5 * (cov_int + np.swapaxes(cov_int, -1, -2))
    t, V, W = _unit_pairs(S, geo, rng)
    res = _contract(sym - rhs, t, V, W)
    m = S.grid.dim
    div_rhs = m * alpha * (S.script_H() - geo.H * geo.cosh_theta)
    return (_report("covconf", S, res, scale, label),
            _report("divconf", S, (div_int - div_rhs)[_nodes(S)], scale, label))


def check_divergence_identity(S: GraphHypersurface, scale: float | None = None, label: str = "") -> ResidualReport:
    """``div(rho h^2 grad u) - m h rho (H cosh theta - calH)``; LHS from the base stencils, RHS Weingarten."""
    scale = derivative_scale(S) if scale is None else scale
    dd = divergence_data(S)
    geo = geometry_field(S)
    m = S.grid.dim
    rhs = m * S.h() * S.rho() * (geo.H * geo.cosh_theta - S.script_H())
    return _report("divrt", S, (dd.div_flux - rhs)[_nodes(S)], scale, label)


def check_cross_path_H(S: GraphHypersurface, scale: float | None = None, label: str = "") -> ResidualReport:
    from dwarp.hypersurface import mean_curvature_via_divergence

    scale = derivative_scale(S) if scale is None else scale
    H1 = geometry_field(S).H
    H2 = mean_curvature_via_divergence(S).values
    return _report("cross_path_H", S, (H1 - H2)[_nodes(S)], scale, label)


def integral_formula_value(S: GraphHypersurface, geo=None) -> float:
    """``int_M (rho h H cosh theta - rho') dmu_g`` with the Weingarten-route ``H``."""
    if not S.grid.model.compact:
        raise NonCompactBase("the integral formula needs a compact base")
    geo = geo if geo is not None else geometry_field(S)
    integrand = S.rho() * S.h() * geo.H * geo.cosh_theta - S.drho()
    return base.integrate_values(integrand, S.grid, density=np.sqrt(np.linalg.det(geo.g)))


def check_integral_formula(S: GraphHypersurface, scale: float | None = None, label: str = "") -> ResidualReport:
    if not S.grid.model.compact:
        raise NonCompactBase("the integral formula needs a compact base")
    scale = derivative_scale(S) if scale is None else scale
    geo = geometry_field(S)
    val = abs(integral_formula_value(S, geo))
    vol = base.integrate_values(np.ones(S.grid.shape), S.grid, density=np.sqrt(np.linalg.det(geo.g)))
    rep = _report("inte", S, [val], scale * vol, label)
    return rep


CHECKS = {
    "covhyp_divhyp": check_covhyp_divhyp,
    "conformal_forms": check_conformal_forms,
    "divrt": check_divergence_identity,
    "cross_path_H": check_cross_path_H,
    "inte": check_integral_formula,
}


def run_all(S: GraphHypersurface, rng=None, label: str = "") -> list[ResidualReport]:
    """Every identity check on one graph (integral formula only on compact bases)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    scale = derivative_scale(S)
    out = list(check_covhyp_divhyp(S, rng=rng, scale=scale, label=label))
    out += list(check_conformal_forms(S, rng=rng, scale=scale, label=label))
    out.append(check_divergence_identity(S, scale=scale, label=label))
    out.append(check_cross_path_H(S, scale=scale, label=label))
    if S.grid.model.compact:
        out.append(check_integral_formula(S, scale=scale, label=label))
    return out


def refinement_study(spacetime, u_fn: Callable, sizes: Sequence, seed: int = 0, label: str = "",
                     names: Sequence[str] | None = None) -> list[ResidualReport]:
    """Run the checks on successively finer grids and merge per identity.

    The derivative scale is taken from the finest grid so that all grids
    share one bound constant.
    """
    surfaces = [GraphHypersurface(spacetime, ScalarField.from_function(spacetime.base.make_grid(n), u_fn))
                for n in sizes]
    scale = derivative_scale(surfaces[-1])
    per_name: dict[str, list] = {}
    for S in surfaces:
        rng = np.random.default_rng(seed)
        reps = list(check_covhyp_divhyp(S, rng=rng, scale=scale, label=label))
        reps += list(check_conformal_forms(S, rng=np.random.default_rng(seed), scale=scale, label=label))
        reps.append(check_divergence_identity(S, scale=scale, label=label))
        reps.append(check_cross_path_H(S, scale=scale, label=label))
        if S.grid.model.compact:
            reps.append(check_integral_formula(S, scale=scale, label=label))
        for r in reps:
            if names is None or r.identity_name in names:
                per_name.setdefault(r.identity_name, []).append(r)
    return [combine_refinement(v) for v in per_name.values()]
