"""Numerical probes of the rigidity results for spacelike graphs.

Rigidity statements forbid objects, so each probe searches for the
forbidden object and reports whether it was (correctly) not found:

* a non-constant compact graph with ``H >= calH`` everywhere under
  ``rho' >= 0`` (:func:`probe_compact_rigidity`);
* a global extremum of the height violating the two-sided curvature bound
  (:func:`extrema_inequality_check`);
* a non-constant compact graph of constant mean curvature in a static
  spacetime (:func:`static_cmc_check`);
* an asymptotically flat bump above a slice with ``H >= calH``
  (:func:`asymptotic_probe`).

:func:`slice_seeking_flow` evolves a graph by the weighted diffusion whose
defect field appears in the divergence identity, and
:func:`parabolicity_classifier` estimates the boundary-integral criterion on
the plane.  The classifier is a finite-radius heuristic.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from dwarp import base
from dwarp.base import EuclideanPlane, RoundSphere2, ScalarField
from dwarp.errors import DomainError, NonCompactBase, StabilityViolation
from dwarp.graphs import random_graph
from dwarp.hypersurface import GraphHypersurface, divergence_data, geometry_field
from dwarp.identities import SLICE_TOL, derivative_scale
from dwarp.reports import FlowTrace, ParabolicityVerdict, ProbeReport, TrialRecord

# tol_probe = PROBE_CONSTANT * scale * spacing**2; measured stencil error of H stays below 0.25 * scale * spacing**2
PROBE_CONSTANT = 0.5
# extrema tolerance is EXTREMA_CONSTANT * (1 + Lipschitz(H - calH)) * spacing
EXTREMA_CONSTANT = 1.0
DEGENERATE_HESSIAN = 1e-8
ROOT_TOL = 1e-10


def thread_count() -> int:
    """Worker threads for trial batches, from ``DWARP_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DWARP_THREADS", "1")))
    except ValueError:
        return 1


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Per-trial integer seeds spawned from the master seed."""
    children = np.random.SeedSequence(int(seed)).spawn(int(trials))
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def _map(fn, items):
    n = thread_count()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _require_compact(spacetime):
    if not spacetime.base.compact:
        raise NonCompactBase(f"{spacetime.base.kind} is not compact")


def _interior_times(spacetime, n):
    lo, hi = spacetime.warp.interval
    lo = lo if math.isfinite(lo) else -50.0
    hi = hi if math.isfinite(hi) else 50.0
    return np.linspace(lo, hi, n + 2)[1:-1]


# --------------------------------------------------------------------------
# totally geodesic slices


@dataclass(frozen=True)
class GeodesicSlice:
    """A totally geodesic slice ``{t0} x P``.

    ``identically_geodesic`` is set when ``rho'`` vanishes on all of I, in
    which case every slice qualifies and ``t0`` is the reference time.
    """

    t0: float
    residual: float
    identically_geodesic: bool = False
    roots: tuple = ()


def find_totally_geodesic_slice(spacetime, n_scan: int = 4001) -> GeodesicSlice | None:
    """Zero of ``rho'`` in I, or ``None`` when ``rho'`` has no zero there.

    ``rho'`` is scanned on ``n_scan`` interior points.  Sign changes are
    refined with Brent's method and touching zeros (local minima of
    ``|rho'|``) with a bounded scalar minimisation; a candidate is accepted
    when ``|rho'(t0)| <= 1e-10``.
    """
    warp = spacetime.warp
    ts = _interior_times(spacetime, n_scan)
    d = warp.deriv(ts)
    if np.all(np.abs(d) <= ROOT_TOL):
        t0 = float(warp.t_ref)
        return GeodesicSlice(t0, float(abs(warp.deriv(t0))), True, (t0,))
    roots = []
    for i in range(len(ts) - 1):
        if d[i] == 0.0:
            roots.append(float(ts[i]))
        elif d[i] * d[i + 1] < 0:
            roots.append(float(optimize.brentq(warp.deriv, ts[i], ts[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)))
    a = np.abs(d)
    for i in range(1, len(ts) - 1):
        if a[i] <= a[i - 1] and a[i] <= a[i + 1] and d[i - 1] * d[i + 1] > 0:
            res = optimize.minimize_scalar(lambda t: abs(float(warp.deriv(t))), bounds=(ts[i - 1], ts[i + 1]),
                                           method="bounded", options={"xatol": 1e-12})
            roots.append(float(res.x))
    roots = sorted(r for r in roots if abs(float(warp.deriv(r))) <= ROOT_TOL)
    if not roots:
        return None
    t0 = roots[0]
    return GeodesicSlice(t0, float(abs(warp.deriv(t0))), False, tuple(roots))


# --------------------------------------------------------------------------
# compact rigidity


def local_scale(S: GraphHypersurface, node, width: int = 3) -> float:
    """:func:`derivative_scale` restricted to the ``width``-node neighbourhood of ``node``.

    The stencil error of ``H`` at a node depends only on the derivatives of
    ``u`` within a few spacings, so the sign decision at ``node`` uses this
    local scale instead of the global one.
    """
    grid = S.grid
    u = S.u.values
    window = [node[0]]
    for ax in range(grid.dim):
        k = np.arange(node[ax + 1] - width, node[ax + 1] + width + 1)
        n = grid.shape[ax + 1]
        window.append(k % n if grid.periodic[ax] else k[(k >= 0) & (k < n)])
    sel = np.ix_(*[np.atleast_1d(w) for w in window])
    d3 = d4 = 0.0
    for i in range(grid.dim):
        di = u
        ders = []
        for _ in range(4):
            di = base.partial(di, grid, i)
            ders.append(di)
        d3 = max(d3, float(np.max(np.abs(ders[2][sel]))))
        d4 = max(d4, float(np.max(np.abs(ders[3][sel]))))
    ct = float(np.max(divergence_data(S).cosh_theta[sel]))
    return (1.0 + d3 + d4) * ct**4


def _defect(S: GraphHypersurface, constant: float = PROBE_CONSTANT):
    """Minimum of ``H - calH`` over trusted nodes, its node and ``tol_probe`` there."""
    geo = geometry_field(S)
    d = np.where(S.grid.trust, geo.H - S.script_H(), np.inf)
    idx = np.unravel_index(int(np.argmin(d)), d.shape)
    idx = tuple(int(i) for i in idx)
    tol = constant * local_scale(S, idx) * S.grid.h**2
    return float(d[idx]), idx, tol


def _rigidity_trial(spacetime, n, seed):
    rng = np.random.default_rng(seed)
    grid = spacetime.base.make_grid(n)
    graph = random_graph(spacetime, grid, rng)
    S = GraphHypersurface(spacetime, graph.on(grid))
    mn, node, tol = _defect(S)
    note = ""
    if mn >= -tol:
        # too close to the discretisation error to call: halve the spacing
        fine = grid.refine()
        S = GraphHypersurface(spacetime, graph.on(fine))
        mn, node, tol = _defect(S)
        note = "refined"
        if mn >= -tol:
            # a minimum above +tol would contradict the theorem outright
            note += "; counterexample" if mn > tol else "; inconclusive"
    return TrialRecord(seed, mn, node, S.grid.h, tol, bool(mn < -tol), note)


def _slice_controls(spacetime, n, seed, count):
    rng = np.random.default_rng(seed)
    grid = spacetime.base.make_grid(n)
    lo, hi = spacetime.warp.interval
    out = []
    for _ in range(count):
        t0 = float(rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo)))
        S = GraphHypersurface(spacetime, ScalarField.constant(grid, t0))
        geo = geometry_field(S)
        d = np.abs(geo.H - S.script_H())
        idx = np.unravel_index(int(np.argmax(d)), d.shape)
        out.append(TrialRecord(seed, float(-d[idx]), tuple(int(i) for i in idx), grid.h, SLICE_TOL,
                               bool(d[idx] > SLICE_TOL), f"slice t0={t0:.12g}"))
    return out


def probe_compact_rigidity(spacetime, trials: int = 100, seed: int = 0, n: int = 64,
                           slice_controls: int = 10) -> ProbeReport:
    """Random non-constant graphs must have ``min(H - calH) < -tol_probe``.

    Parameters
    ----------
    spacetime : DoublyWarpedSpacetime
        Compact base; its ``monotone_flag`` (``rho' >= 0``) must be set.
    trials : int
        Number of random graphs.
    seed : int
        Master seed; trial ``k`` uses the ``k``-th spawned child seed.
    n : int
        Grid size per axis.
    slice_controls : int
        Slices at random heights, checked for ``|H - calH| <= 1e-8`` and kept
        out of the violation count.

    Returns
    -------
    ProbeReport
        ``violations_found`` counts graphs with ``min(H - calH) < -tol_probe``;
        the probe passes when every graph is such a witness and every slice
        control is clean.
    """
    _require_compact(spacetime)
    if not spacetime.monotone_flag:
        raise DomainError("compact rigidity needs rho' >= 0: set monotone_flag")
    seeds = trial_seeds(seed, trials)
    recs = _map(lambda s: _rigidity_trial(spacetime, n, s), seeds)
    controls = _slice_controls(spacetime, n, seed, slice_controls)
    found = sum(r.violation for r in recs)
    worst = max((r.min_defect for r in recs), default=float("-inf"))
    return ProbeReport(
        theorem="compact_rigidity",
        trials=trials,
        violations_found=found,
        worst_margin=worst,
        passed=found == trials and not any(c.violation for c in controls),
        details=recs,
        expectation="every non-constant graph has min(H - calH) < -tol_probe",
        controls=controls,
    )


# --------------------------------------------------------------------------
# extrema bounds


def _hessian_floor(S, idx):
    """Smallest absolute eigenvalue of the chart Hessian of ``u`` at ``idx``."""
    m = S.grid.dim
    hess = np.empty((m, m))
    du = [base.partial(S.u.values, S.grid, i) for i in range(m)]
    for i in range(m):
        for j in range(m):
            hess[i, j] = base.partial(du[i], S.grid, j)[idx]
    hess = 0.5 * (hess + hess.T)
    return float(np.min(np.abs(np.linalg.eigvalsh(hess))))


def _extrema_record(S: GraphHypersurface, seed: int = 0, constant: float = EXTREMA_CONSTANT) -> TrialRecord:
    u = np.where(S.grid.trust, S.u.values, np.nan)
    if np.nanmax(u) - np.nanmin(u) <= 0:
        raise DomainError("extrema check needs a non-constant height")
    geo = geometry_field(S)
    defect = geo.H - S.script_H()
    # ties go to the lowest flat index
    i_min = np.unravel_index(int(np.nanargmin(u)), u.shape)
    i_max = np.unravel_index(int(np.nanargmax(u)), u.shape)
    lip = max(float(np.max(np.linalg.norm(base.chart_gradient(defect, S.grid), axis=-1))), 0.0)
    tol = constant * (1.0 + lip) * S.grid.h
    # calH <= H at the minimum, calH >= H at the maximum
    lo_margin = float(defect[i_min])
    hi_margin = float(-defect[i_max])
    worst = min(lo_margin, hi_margin)
    at = i_min if lo_margin <= hi_margin else i_max
    notes = []
    if _hessian_floor(S, i_min) < DEGENERATE_HESSIAN:
        notes.append("DegenerateExtremum:min")
    if _hessian_floor(S, i_max) < DEGENERATE_HESSIAN:
        notes.append("DegenerateExtremum:max")
    return TrialRecord(seed, worst, tuple(int(i) for i in at), S.grid.h, tol, bool(worst < -tol), ";".join(notes))


def extrema_inequality_check(S: GraphHypersurface, constant: float = EXTREMA_CONSTANT) -> ProbeReport:
    """Curvature bounds at the global extrema of the height.

    At the argmin ``p0`` of ``u`` the check asserts ``calH <= H + tol`` and
    at the argmax ``p1`` it asserts ``calH >= H - tol``, with
    ``tol = constant * (1 + max|d(H - calH)|) * spacing``: the discrete
    extremum sits within one spacing of the true one.  ``min_defect`` in the
    record is the smaller of ``H - calH`` at ``p0`` and ``calH - H`` at
    ``p1``.  A Hessian eigenvalue below ``1e-8`` at either extremum is
    flagged ``DegenerateExtremum`` in the note; the inequality is still
    checked.
    """
    _require_compact(S.spacetime)
    rec = _extrema_record(S, 0, constant)
    return ProbeReport(
        theorem="extrema_bounds",
        trials=1,
        violations_found=int(rec.violation),
        worst_margin=rec.min_defect,
        passed=not rec.violation,
        details=[rec],
        expectation="calH <= H at the minimum and calH >= H at the maximum, within tol",
    )


def extrema_probe(spacetime, trials: int = 100, seed: int = 0, n: int = 64,
                  constant: float = EXTREMA_CONSTANT) -> ProbeReport:
    """:func:`extrema_inequality_check` over random graphs; passes with zero failures."""
    _require_compact(spacetime)

    def one(s):
        rng = np.random.default_rng(s)
        grid = spacetime.base.make_grid(n)
        S = GraphHypersurface(spacetime, random_graph(spacetime, grid, rng).on(grid))
        return _extrema_record(S, s, constant)

    recs = _map(one, trial_seeds(seed, trials))
    found = sum(r.violation for r in recs)
    return ProbeReport(
        theorem="extrema_bounds",
        trials=trials,
        violations_found=found,
        worst_margin=min(r.min_defect for r in recs),
        passed=found == 0,
        details=recs,
        expectation="calH <= H at the minimum and calH >= H at the maximum, within tol",
    )


# --------------------------------------------------------------------------
# static spacetimes


def is_static(spacetime) -> bool:
    """True when ``rho'`` vanishes (to 1e-10) on a scan of I."""
    ts = _interior_times(spacetime, 401)
    return bool(np.all(np.abs(spacetime.warp.deriv(ts)) <= ROOT_TOL))


def _spread_record(S, seed, constant):
    geo = geometry_field(S)
    H = geo.H[S.grid.trust]
    spread = float(np.max(H) - np.min(H))
    u = S.u.values[S.grid.trust]
    if np.ptp(u) == 0:
        return TrialRecord(seed, spread, (), S.grid.h, SLICE_TOL, bool(np.max(np.abs(H)) > SLICE_TOL), "slice")
    tol = constant * derivative_scale(S) * S.grid.h**2
    i_max = np.unravel_index(int(np.argmax(np.where(S.grid.trust, geo.H, -np.inf))), geo.H.shape)
    return TrialRecord(seed, spread, tuple(int(i) for i in i_max), S.grid.h, tol, bool(spread <= tol), "")


def static_cmc_check(spacetime, S: GraphHypersurface | None = None, trials: int = 100, seed: int = 0,
                     n: int = 64, constant: float = PROBE_CONSTANT) -> ProbeReport:
    """Search for a non-constant compact graph of constant mean curvature with ``rho`` constant.

    With ``S`` given only that graph is examined; otherwise ``trials``
    random graphs are generated.  A non-constant graph counts as a
    violation when ``max H - min H <= tol`` (its ``H`` is numerically
    constant).  A slice counts as a violation when ``|H| > 1e-8``.
    ``min_defect`` holds the spread ``max H - min H``.
    """
    _require_compact(spacetime)
    if not is_static(spacetime):
        raise DomainError("static check needs a constant warping function")
    if S is not None:
        recs = [_spread_record(S, seed, constant)]
    else:
        def one(s):
            rng = np.random.default_rng(s)
            grid = spacetime.base.make_grid(n)
            return _spread_record(GraphHypersurface(spacetime, random_graph(spacetime, grid, rng).on(grid)), s,
                                  constant)

        recs = _map(one, trial_seeds(seed, trials))
    found = sum(r.violation for r in recs)
    return ProbeReport(
        theorem="static_cmc",
        trials=len(recs),
        violations_found=found,
        worst_margin=min(r.min_defect for r in recs),
        passed=found == 0,
        details=recs,
        expectation="no non-constant graph with constant H; slices have H = 0",
    )


# --------------------------------------------------------------------------
# slice-seeking flow


def _flow_stencil(S: GraphHypersurface):
    """Neighbour weights of the frozen operator ``(1/w) div_g(w grad_g u)``, ``w = rho h^2``.

    Returns a dict ``offset -> weight array``.  Diagonal terms are in flux
    form with face-averaged coefficients; the cross term uses the diagonal
    (or anti-diagonal) second difference chosen by the sign of ``g^12``,
    and its drift is upwinded, so every weight is non-negative when
    ``|g^12| dx/dy <= g^11`` and ``|g^12| dy/dx <= g^22``.
    """
    grid = S.grid
    m = grid.dim
    dd = divergence_data(S)
    W = (S.rho() * S.h() ** 2 * dd.sqrt_det)[0]
    K = W[..., None, None] * dd.ginv[0]
    sp = grid.spacing
    zero = (0,) * m
    st: dict = {}

    def add(off, c):
        st[off] = st.get(off, 0.0) + c

    def shift(f, ax, k):
        return np.roll(f, -k, axis=ax)

    for i in range(m):
        e = tuple(1 if k == i else 0 for k in range(m))
        me = tuple(-v for v in e)
        Kii = K[..., i, i]
        add(e, 0.5 * (Kii + shift(Kii, i, 1)) / (W * sp[i] ** 2))
        add(me, 0.5 * (Kii + shift(Kii, i, -1)) / (W * sp[i] ** 2))
    if m == 2:
        a = dd.ginv[0][..., 0, 1]
        c = np.abs(a) / (sp[0] * sp[1])
        pos = a >= 0
        add((1, 1), np.where(pos, c, 0.0))
        add((-1, -1), np.where(pos, c, 0.0))
        add((1, -1), np.where(pos, 0.0, c))
        add((-1, 1), np.where(pos, 0.0, c))
        for off in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            add(off, -c)
        K12 = K[..., 0, 1]
        drift = [(shift(K12, 1, 1) - shift(K12, 1, -1)) / (2 * sp[1] * W),  # multiplies d_1 u
                 (shift(K12, 0, 1) - shift(K12, 0, -1)) / (2 * sp[0] * W)]  # multiplies d_2 u
        for i, b in enumerate(drift):
            e = tuple(1 if k == i else 0 for k in range(m))
            me = tuple(-v for v in e)
            add(e, np.maximum(b, 0.0) / sp[i])
            add(me, np.maximum(-b, 0.0) / sp[i])
    st.pop(zero, None)
    return st


def _apply(u, st):
    out = np.zeros_like(u)
    for off, c in st.items():
        nb = u
        for ax, k in enumerate(off):
            if k:
                nb = np.roll(nb, -k, axis=ax)
        out += c * (nb - u)
    return out


def _osc(u):
    return float(np.max(u) - np.min(u))


def slice_seeking_flow(S0: GraphHypersurface, steps: int = 20000, dt: float | None = None,
                       target: float = 1e-4, cfl: float = 0.9, record_every: int = 10) -> FlowTrace:
    """Explicit monotone scheme for ``du/ds = Delta_{-log(rho h^2)} u``.

    Parameters
    ----------
    S0 : GraphHypersurface
        Initial graph over a Circle or FlatTorus2 with ``monotone_flag`` set.
    steps : int
        Maximum number of steps.
    dt : float, optional
        Fixed step.  By default each step uses ``cfl`` times the stability
        bound ``1 / max sum(weights)`` of the current stencil.
    target : float
        Stop once the oscillation ``max u - min u`` falls below this.
    record_every : int
        Trace sampling interval in steps (the first and last step are
        always recorded).

    Raises
    ------
    StabilityViolation
        When a stencil weight is negative, ``dt`` exceeds the bound, or a
        step increases the oscillation beyond roundoff.
    SpacelikeViolation
        When the evolving graph stops being spacelike.
    """
    st_model = S0.spacetime
    if not st_model.monotone_flag:
        raise DomainError("the flow needs rho' >= 0: set monotone_flag")
    if isinstance(st_model.base, RoundSphere2) or not st_model.base.compact:
        raise DomainError("the flow runs on Circle or FlatTorus2 bases only")
    S = S0
    S.require_spacelike()
    s = 0.0
    times, osc, sup = [], [], []

    def record():
        geo = geometry_field(S)
        times.append(s)
        osc.append(_osc(S.u.values))
        sup.append(float(np.max(np.abs(geo.H - S.script_H()))))

    record()
    prev = osc[-1]
    for k in range(1, steps + 1):
        if prev < target:
            break
        st = _flow_stencil(S)
        lo = min(float(np.min(c)) for c in st.values())
        total = sum(st.values())
        if lo < -1e-12 * float(np.max(total)):
            raise StabilityViolation(f"negative stencil weight {lo:.3e}: graph too tilted for the cross-term stencil")
        bound = 1.0 / float(np.max(total))
        step = cfl * bound if dt is None else dt
        if step > bound:
            raise StabilityViolation(f"dt={step:.3e} exceeds the stability bound {bound:.3e}")
        u = S.u.values[0]
        u_new = u + step * _apply(u, st)
        cur = _osc(u_new)
        if cur > prev + 1e-12 * max(1.0, float(np.max(np.abs(u)))):
            raise StabilityViolation(f"oscillation grew from {prev:.6e} to {cur:.6e} at step {k}")
        S = S.with_height(u_new[None])
        S.require_spacelike()
        s += step
        prev = cur
        if k % record_every == 0 or cur < target:
            record()
    if times[-1] != s:
        record()
    passed = osc[-1] < target and all(b <= a for a, b in zip(osc, osc[1:]))
    return FlowTrace(times, osc, sup, passed)


# --------------------------------------------------------------------------
# plane probes


def bump(s):
    """Smooth compactly supported profile, ``exp(1 - 1/(1 - s^2))`` on ``|s| < 1``, equal to 1 at 0."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    safe = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe**2)), 0.0)


def _bump_height(spacetime, grid, t0, centre, radius, tilt, room):
    x = grid.coords[0]
    r = np.linalg.norm(x - np.asarray(centre), axis=-1)
    shape = bump(r / radius)[None]
    dshape = base.chart_gradient(shape, grid, order=4)
    slope = np.linalg.norm(dshape, axis=-1)
    h = spacetime.potential.value(grid.coords[0], 0)[None]
    lo, hi = spacetime.warp.interval
    a_hi = room * (hi - t0)

    def tilt_of(a):
        return float(np.max(h * a * slope / spacetime.warp(t0 + a * shape)))

    if tilt_of(a_hi) <= tilt:
        return a_hi, shape
    a_lo = 0.0
    for _ in range(50):
        mid = 0.5 * (a_lo + a_hi)
        if tilt_of(mid) <= tilt:
            a_lo = mid
        else:
            a_hi = mid
    return a_lo, shape


def _bump_surface(spacetime, grid, t0, a, centre, radius):
    r = np.linalg.norm(grid.coords[0] - np.asarray(centre), axis=-1)
    return GraphHypersurface(spacetime, ScalarField(grid, t0 + a * bump(r / radius)[None]))


def _check_support(grid, centre, radius):
    model = grid.model
    L = model.half_width - model.trust_nodes * grid.h
    c = np.asarray(centre, dtype=float)
    if np.any(np.abs(c) + radius >= L):
        raise DomainError(f"bump support (centre {tuple(c)}, radius {radius}) reaches the untrusted boundary strip")


def asymptotic_probe(spacetime, t0: float, trials: int = 10, seed: int = 0, n: int = 161,
                     bumps=None, constant: float = PROBE_CONSTANT) -> ProbeReport:
    """Bumps above the slice ``{t0}`` on the plane must have ``min(H - calH) < 0``.

    Each bump is ``t0 + a * bump(|x - c| / R)``; ``a`` is fitted to a random
    tilt in ``[0.2, 0.6]``.  For every bump the field
    ``g(X, grad f) = rho h^2 |grad tau|^2`` with ``X = rho h^2 grad tau`` and
    ``f = tau - t0`` is evaluated from the Weingarten tangential part of the
    conformal field and must be ``>= -1e-12``.  A zero-height bump (the
    slice) is kept as a control.  Bumps too close to the tolerance are
    re-run at half spacing.

    Parameters
    ----------
    bumps : list of (centre, radius), optional
        Explicit bump placements instead of random ones.

    Raises
    ------
    DomainError
        If a bump's support reaches the outer strip excluded from the trust
        region, or the base is not the Cartesian plane.
    """
    model = spacetime.base
    if not isinstance(model, EuclideanPlane) or model.chart != "cartesian":
        raise DomainError("asymptotic probe runs on the Cartesian plane")
    if not spacetime.monotone_flag:
        raise DomainError("asymptotic probe needs rho' >= 0: set monotone_flag")
    if not spacetime.warp.contains(t0):
        raise DomainError(f"t0 = {t0} outside I")
    grid = model.make_grid(n)
    seeds = trial_seeds(seed, trials)
    if bumps is None:
        bumps = []
        for s in seeds:
            rng = np.random.default_rng(s)
            L = model.half_width - model.trust_nodes * grid.h
            radius = float(rng.uniform(0.25, 0.45) * L)
            centre = rng.uniform(-1, 1, 2) * 0.9 * (L - radius) / math.sqrt(2)
            bumps.append((tuple(float(v) for v in centre), radius))
    recs = []
    min_flux = math.inf
    for k, (centre, radius) in enumerate(bumps):
        _check_support(grid, centre, radius)
        s = seeds[k] if k < len(seeds) else k
        tilt = float(np.random.default_rng(s).uniform(0.2, 0.6))
        a, _ = _bump_height(spacetime, grid, t0, centre, radius, tilt, 0.8)
        S = _bump_surface(spacetime, grid, t0, a, centre, radius)
        mn, node, tol = _defect(S, constant)
        note = ""
        if mn >= -tol:
            S = _bump_surface(spacetime, grid.refine(), t0, a, centre, radius)
            mn, node, tol = _defect(S, constant)
            note = "refined "
        geo = geometry_field(S)
        flux = -np.einsum("...i,...i->...", geo.X_tan, base.chart_gradient(S.u.values, S.grid))
        flux_min = float(np.min(flux[S.grid.trust]))
        min_flux = min(min_flux, flux_min)
        bad = not (mn < -tol) or flux_min < -1e-12
        recs.append(TrialRecord(s, mn, node, S.grid.h, tol, bool(not bad),
                                note + f"centre={centre} radius={radius:.6g} height={a:.6g} "
                                f"min_gXgradf={flux_min:.3e}"))
    S0 = GraphHypersurface(spacetime, ScalarField.constant(grid, t0))
    geo0 = geometry_field(S0)
    d0 = np.abs(geo0.H - S0.script_H())[grid.trust]
    controls = [TrialRecord(seed, -float(np.max(d0)), (), grid.h, SLICE_TOL, bool(np.max(d0) > SLICE_TOL),
                            "zero bump")]
    found = sum(r.violation for r in recs)
    return ProbeReport(
        theorem="asymptotic_rigidity",
        trials=len(recs),
        violations_found=found,
        worst_margin=max((r.min_defect for r in recs), default=-math.inf),
        passed=found == len(recs) and not controls[0].violation and min_flux >= -1e-12,
        details=recs,
        expectation="every bump has min(H - calH) < -tol_probe and g(X, grad f) >= 0",
        controls=controls,
    )


def _increment_verdict(increments, diverge_at=0.9, converge_at=0.75):
    i2, i3 = increments[-2], increments[-1]
    q = i3 / i2 if i2 > 0 else 0.0
    if q >= diverge_at:
        return "diverges", q
    if q <= converge_at:
        return "converges", q
    return "inconclusive", q


def parabolicity_classifier(spacetime, weight_kind: str = "h2", R_max: float = 40.0, height=None,
                            o=None, n_quad: int = 256, label: str = "") -> ParabolicityVerdict:
    """Finite-radius estimate of ``int_1^inf (int_{dB_r} w)^(-1) dr``.

    ``w`` is ``h^2`` (``weight_kind="h2"``) or ``rho(tau) h^2``
    (``"rho_h2"``), with ``tau`` the callable ``height`` of chart
    coordinates (default: the constant reference time of I).  Partial
    integrals are taken at ``R_max/4``, ``R_max/2`` and ``R_max``.  With
    ``q`` the ratio of the last two increments, the verdict is
    ``diverges`` for ``q >= 0.9`` (log-like or faster growth),
    ``converges`` for ``q <= 0.75`` (geometric or power decay of the
    increments) and ``inconclusive`` otherwise.  This is a heuristic.
    """
    model = spacetime.base
    if not isinstance(model, EuclideanPlane):
        raise DomainError("parabolicity classifier runs on the plane")
    if R_max < 10:
        raise DomainError("R_max must be at least 10")
    if weight_kind not in ("h2", "rho_h2"):
        raise DomainError(f"unknown weight kind {weight_kind!r}")
    pot = spacetime.potential
    warp = spacetime.warp
    tau = height if height is not None else (lambda x: np.full(x.shape[:-1], warp.t_ref))

    def w(x):
        val = pot.value(x, 0) ** 2
        if weight_kind == "rho_h2":
            val = val * warp(tau(x))
        return val

    def integrand(r):
        return 1.0 / base.boundary_sphere_integral(model, w, r, o, n_quad)

    edges = [1.0, R_max / 4, R_max / 2, R_max]
    increments = [integrate.quad(integrand, a, b, limit=200, epsabs=0.0, epsrel=1e-10)[0]
                  for a, b in zip(edges, edges[1:])]
    partial = np.cumsum(increments)
    verdict, q = _increment_verdict(increments)
    return ParabolicityVerdict(
        integral_estimates=[(R, float(P)) for R, P in zip(edges[1:], partial)],
        verdict=verdict,
        weight_kind="rho h^2" if weight_kind == "rho_h2" else "h^2",
        label=label,
        increment_ratio=q,
        heuristic=True,
    )
