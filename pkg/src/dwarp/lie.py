"""Lie derivative of a metric by finite-difference flow transport.

This is an oracle: it never uses connection coefficients or any structure of
the vector field beyond evaluating it.  The flow is integrated with RK4, its
Jacobian is taken by central differences, and the pulled-back metric is
differentiated in the flow parameter with a five-point stencil.
"""

from __future__ import annotations

import numpy as np


def flow(vector_fn, points, s, substeps=4):
    """RK4 flow of ``vector_fn`` for parameter ``s`` (per-point array or scalar)."""
    p = np.array(points, dtype=float)
    s = np.broadcast_to(np.asarray(s, dtype=float), p.shape[:1])[:, None]
    ds = s / substeps
    for _ in range(substeps):
        k1 = vector_fn(p)
        k2 = vector_fn(p + 0.5 * ds * k1)
        k3 = vector_fn(p + 0.5 * ds * k2)
        k4 = vector_fn(p + ds * k3)
        p = p + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


def pullback(metric_fn, vector_fn, points, s, eps=1e-3):
    """``(phi_s^* g)`` at ``points`` with the flow Jacobian from 4th-order differences."""
    points = np.asarray(points, dtype=float)
    n, d = points.shape
    jac = np.empty((n, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = eps
        fp1 = flow(vector_fn, points + e, s)
        fm1 = flow(vector_fn, points - e, s)
        fp2 = flow(vector_fn, points + 2 * e, s)
        fm2 = flow(vector_fn, points - 2 * e, s)
        jac[:, :, k] = (8 * (fp1 - fm1) - (fp2 - fm2)) / (12 * eps)
    g = metric_fn(flow(vector_fn, points, s))
    return np.einsum("nai,nab,nbj->nij", jac, g, jac)


def lie_derivative_metric(metric_fn, vector_fn, points, step, eps=1e-3):
    """``(L_X g)`` at each point, shape ``(n, d, d)``.

    ``step`` is the flow parameter increment, scalar or one per point.
    """
    points = np.asarray(points, dtype=float)
    step = np.broadcast_to(np.asarray(step, dtype=float), points.shape[:1])
    f = {k: pullback(metric_fn, vector_fn, points, k * step, eps) for k in (-2, -1, 1, 2)}
    return (8 * (f[1] - f[-1]) - (f[2] - f[-2])) / (12 * step[:, None, None])
