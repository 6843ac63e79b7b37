"""The flat Lorentzian cylinder and its Killing fields.

The cylinder ``{x^2 + y^2 = 1}`` in 3-space with metric
``-dt^2 + dx^2 + dy^2`` carries the timelike Killing fields
``Xbar_a = d_t - a y d_x + a x d_y`` for ``|a| < 1``.  The horizontal circles
``psi_t0`` are compact and spacelike but orthogonal to ``Xbar_a`` only for
``a = 0``, while the helices ``gamma_{a,t0}(s) = (cos s, sin s, a s + t0)``
are spacelike geodesics orthogonal to ``Xbar_a``.

Everything here works on the embedded surface: intrinsic coordinates
``(theta, t)``, the embedding into 3-space and the pullback of the flat
metric.  The only code shared with the spacetime module is the generic
flow-transport Lie derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dwarp.errors import DomainError
from dwarp.lie import lie_derivative_metric
from dwarp.reports import write_csv, write_json

# ambient coordinates are (x, y, t)
ETA = np.diag([1.0, 1.0, -1.0])
FD_STEP = 1e-2


@dataclass(frozen=True)
class CylinderPoint:
    """Point ``(cos theta, sin theta, t)`` of the cylinder; ``theta`` is reduced mod 2 pi."""

    theta: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))
        object.__setattr__(self, "t", float(self.t))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.theta, self.t])


@dataclass(frozen=True)
class KillingParameter:
    """Parameter ``a`` of ``Xbar_a``; ``|a| < 1`` keeps the field timelike."""

    a: float

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise DomainError(f"|a| must be < 1 for a timelike Killing field, got a={self.a}")


def _param(a) -> float:
    return KillingParameter(float(a)).a


def embed(P) -> np.ndarray:
    """Intrinsic rows ``(theta, t)`` to ambient rows ``(x, y, t)``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return np.stack([np.cos(P[:, 0]), np.sin(P[:, 0]), P[:, 1]], axis=-1)


def embedding_jacobian(P) -> np.ndarray:
    """``d(x, y, t)/d(theta, t)``, shape ``(n, 3, 2)``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    J = np.zeros((len(P), 3, 2))
    J[:, 0, 0] = -np.sin(P[:, 0])
    J[:, 1, 0] = np.cos(P[:, 0])
    J[:, 2, 1] = 1.0
    return J


def induced_metric(P) -> np.ndarray:
    """Pullback of ``-dt^2 + dx^2 + dy^2`` to the cylinder."""
    J = embedding_jacobian(P)
    return np.einsum("nai,ab,nbj->nij", J, ETA, J)


def killing_field_ambient(a, X) -> np.ndarray:
    """``Xbar_a = d_t - a y d_x + a x d_y`` at ambient rows ``(x, y, t)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.stack([-a * X[:, 1], a * X[:, 0], np.ones(len(X))], axis=-1)


def killing_field(a, P) -> np.ndarray:
    """Intrinsic components of ``Xbar_a`` by least squares against the embedding Jacobian."""
    J = embedding_jacobian(P)
    V = killing_field_ambient(a, embed(P))
    return np.linalg.solve(np.einsum("nai,naj->nij", J, J), np.einsum("nai,na->ni", J, V)[..., None])[..., 0]


def _points(sample_points) -> np.ndarray:
    if len(sample_points) and isinstance(sample_points[0], CylinderPoint):
        return np.array([p.array for p in sample_points])
    return np.atleast_2d(np.asarray(sample_points, dtype=float))


def sample_points(n: int = 64, seed: int = 0, t_range=(-1.0, 1.0)) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.stack([rng.uniform(0, 2 * math.pi, n), rng.uniform(*t_range, n)], axis=-1)


def killing_residual(a: float, sample_points, step: float = 1e-2) -> float:
    """Max-norm of ``L_{Xbar_a} g`` over the samples, by flow transport."""
    a = _param(a)
    P = _points(sample_points)
    L = lie_derivative_metric(induced_metric, lambda Q: killing_field(a, Q), P, step)
    return float(np.max(np.abs(L)))


def killing_norm(a: float, sample_points) -> np.ndarray:
    """``gbar(Xbar_a, Xbar_a)`` at each sample (equals ``a^2 - 1``)."""
    a = _param(a)
    V = killing_field_ambient(a, embed(_points(sample_points)))
    return np.einsum("na,ab,nb->n", V, ETA, V)


def circle_orthogonality_defect(a: float, t0: float, n: int = 256) -> float:
    """``gbar(psi_t0', Xbar_a)`` of largest magnitude over ``n`` angles (equals ``a``)."""
    a = _param(a)
    th = 2 * math.pi * np.arange(n) / n
    pts = np.stack([np.cos(th), np.sin(th), np.full(n, float(t0))], axis=-1)
    tangent = np.stack([-np.sin(th), np.cos(th), np.zeros(n)], axis=-1)
    vals = np.einsum("na,ab,nb->n", tangent, ETA, killing_field_ambient(a, pts))
    return float(vals[int(np.argmax(np.abs(vals)))])


@dataclass(frozen=True)
class HelixReport:
    a: float
    t0: float
    geodesic_residual: float
    orthogonality_residual: float
    causal_character: float

    def to_dict(self):
        return {"a": self.a, "t0": self.t0, "geodesic_residual": self.geodesic_residual,
                "orthogonality_residual": self.orthogonality_residual, "causal_character": self.causal_character}


def helix(a, t0, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.stack([np.cos(s), np.sin(s), a * s + t0], axis=-1)


def helix_checks(a: float, t0: float, n: int = 256, fd_step: float = FD_STEP) -> HelixReport:
    """Geodesic, orthogonality and causal checks of ``gamma_{a,t0}``.

    The acceleration comes from central differences of the sampled curve
    with step ``fd_step``; its tangential part (the projection on
    ``d_theta``, ``d_t`` with respect to the flat metric) must vanish.  The
    velocity is analytic: ``gamma' = (-sin s, cos s, a)``, whose length is
    ``1 - a^2``.
    """
    a = _param(a)
    s = 2 * math.pi * np.arange(n) / n
    acc = (helix(a, t0, s + fd_step) - 2 * helix(a, t0, s) + helix(a, t0, s - fd_step)) / fd_step**2
    P = np.stack([s, a * s + t0], axis=-1)
    J = embedding_jacobian(P)
    gram = np.einsum("nai,ab,nbj->nij", J, ETA, J)
    comps = np.linalg.solve(gram, np.einsum("nai,ab,nb->ni", J, ETA, acc)[..., None])[..., 0]
    vel = np.stack([-np.sin(s), np.cos(s), np.full(n, a)], axis=-1)
    ortho = np.einsum("na,ab,nb->n", vel, ETA, killing_field_ambient(a, helix(a, t0, s)))
    char = np.einsum("na,ab,nb->n", vel, ETA, vel)
    worst = char[int(np.argmax(np.abs(char - (1 - a * a))))]
    return HelixReport(a, float(t0), float(np.max(np.abs(comps))), float(np.max(np.abs(ortho))), float(worst))


def cylinder_report(a_values=(-0.5, 0.0, 0.5, 0.9), t0: float = 0.0, n_samples: int = 64, seed: int = 0,
                    killing_tol: float = 1e-6, exact_tol: float = 1e-12, helix_tol: float = 1e-10) -> dict:
    """Killing, orthogonality and helix checks on the cylinder for each ``a``, with pass flags."""
    pts = sample_points(n_samples, seed)
    rows = []
    ok = True
    for a in a_values:
        kr = killing_residual(a, pts)
        kn = float(np.max(np.abs(killing_norm(a, pts) - (a * a - 1))))
        cd = circle_orthogonality_defect(a, t0)
        hx = helix_checks(a, t0)
        passed = (kr <= killing_tol and abs(cd - a) <= exact_tol and kn <= exact_tol
                  and hx.geodesic_residual <= helix_tol and hx.orthogonality_residual <= helix_tol
                  and abs(hx.causal_character - (1 - a * a)) <= exact_tol)
        ok = ok and passed
        rows.append({
            "a": float(a),
            "killing_residual": kr,
            "killing_norm_defect": kn,
            "circle_orthogonality_defect": cd,
            **{k: v for k, v in hx.to_dict().items() if k != "a"},
            "passed": passed,
        })
    return {"t0": float(t0), "n_samples": n_samples, "seed": seed, "per_a": rows, "passed": ok}


def write_cylinder_outputs(report: dict, json_path, csv_path, comment: str | None = None):
    """JSON report plus a CSV of defects against ``a`` for plotting."""
    write_json(json_path, report)
    cols = ["a", "killing_residual", "killing_norm_defect", "circle_orthogonality_defect", "geodesic_residual",
            "orthogonality_residual", "causal_character"]
    write_csv(csv_path, cols, [[r[c] for c in cols] for r in report["per_a"]], comment)
