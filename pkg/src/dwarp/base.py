"""Riemannian base manifolds, uniform chart grids and fields on them.

Every model is described through one or two coordinate charts with analytic
metric components ``sigma_ij`` and their first derivatives.  A :class:`BaseGrid`
is a stack of uniform lattices ("patches"), one per chart, so that field
values always have shape ``grid.shape + value_shape`` with
``grid.shape = (n_patches, n_1, ..., n_m)``.  Single-chart models have one
patch.

Lower bounds on the eigenvalues of ``sigma`` over each chart:

* ``Circle(R)``: ``R**2`` (constant).
* ``FlatTorus2``: 1 (identity metric).
* ``RoundSphere2(R)``: ``4 R**2 / (1 + 2 a**2)**2`` with ``a`` the patch
  half-width (the value at the patch corners).
* ``EuclideanPlane``: 1 for the Cartesian chart, ``min(1, r_min**2)`` for the
  polar chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import erfc

from dwarp.errors import DomainError, GridError, NonCompactBase

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BasePoint:
    """A point of the base given by its chart coordinates."""

    coords: tuple[float, ...]
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


class BaseManifoldModel:
    """Common interface of the chartable bases.

    Subclasses provide ``metric`` and ``metric_deriv`` on arrays of chart
    coordinates with trailing axis of length ``dim``; ``metric_deriv`` returns
    ``d[..., k, i, j] = d sigma_ij / d x^k``.
    """

    kind: str = "abstract"
    dim: int = 0
    compact: bool = False
    n_charts: int = 1

    # per-axis period, or None for a non-periodic axis
    periods: tuple = ()

    def metric(self, coords: np.ndarray, chart: int = 0) -> np.ndarray:
        raise NotImplementedError

    def metric_deriv(self, coords: np.ndarray, chart: int = 0) -> np.ndarray:
        raise NotImplementedError

    def make_grid(self, n) -> "BaseGrid":
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def point(self, *coords, chart: int = 0) -> BasePoint:
        if len(coords) != self.dim:
            raise DomainError(f"{self.kind} points have {self.dim} coordinates, got {len(coords)}")
        out = []
        for c, period in zip(coords, self.periods):
            c = float(c)
            if period is not None:
                c = c % period
            out.append(c)
        return BasePoint(tuple(out), chart)

    def metric_at(self, p: BasePoint) -> np.ndarray:
        return self.metric(p.array, p.chart)

    def metric_deriv_at(self, p: BasePoint) -> np.ndarray:
        return self.metric_deriv(p.array, p.chart)

    def to_primary(self, coords: np.ndarray, chart: int) -> np.ndarray:
        """Express chart coordinates in chart 0."""
        return coords

    def vector_to_chart(self, coords0: np.ndarray, v0: np.ndarray, chart: int) -> np.ndarray:
        """Transform vector components given in chart 0 at ``coords0`` to ``chart``."""
        return v0

    def eigen_floor(self) -> float:
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class Circle(BaseManifoldModel):
    """Circle of radius ``radius`` in the angle chart, ``sigma = radius**2``."""

    kind = "Circle"
    dim = 1
    compact = True

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise DomainError("radius must be positive")
        self.radius = float(radius)
        self.periods = (TWO_PI,)

    def params(self):
        return {"radius": self.radius}

    def metric(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        return np.full(coords.shape[:-1] + (1, 1), self.radius**2)

    def metric_deriv(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        return np.zeros(coords.shape[:-1] + (1, 1, 1))

    def eigen_floor(self):
        return self.radius**2

    def make_grid(self, n):
        n = _as_sizes(n, 1)
        return BaseGrid.periodic_lattice(self, [(0.0, TWO_PI)], n)


class FlatTorus2(BaseManifoldModel):
    """Flat 2-torus ``[0, L1) x [0, L2)`` with the identity metric."""

    kind = "FlatTorus2"
    dim = 2
    compact = True

    def __init__(self, periods: Sequence[float] = (TWO_PI, TWO_PI)):
        periods = tuple(float(p) for p in periods)
        if len(periods) != 2 or min(periods) <= 0:
            raise DomainError("FlatTorus2 needs two positive periods")
        self.periods = periods

    def params(self):
        return {"periods": list(self.periods)}

    def metric(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        return np.broadcast_to(np.eye(2), coords.shape[:-1] + (2, 2)).copy()

    def metric_deriv(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        return np.zeros(coords.shape[:-1] + (2, 2, 2))

    def eigen_floor(self):
        return 1.0

    def make_grid(self, n):
        n = _as_sizes(n, 2)
        return BaseGrid.periodic_lattice(self, [(0.0, p) for p in self.periods], n)


class RoundSphere2(BaseManifoldModel):
    """Round sphere of radius ``radius`` covered by two stereographic charts.

    Chart 0 projects from the north pole, chart 1 from the south pole; the
    transition is ``w -> w / |w|**2`` in both directions.  Each chart carries a
    square cell-centred patch ``[-a, a]**2``.  A smooth partition of unity
    ``chi(log|w|)`` with ``chi(s) + chi(-s) = 1`` blends the two patches for
    quadrature; ``blend_width`` is its width in ``log|w|``.
    """

    kind = "RoundSphere2"
    dim = 2
    compact = True
    n_charts = 2
    trust_weight = 1e-6

    def __init__(self, radius: float = 1.0, half_width: float = 2.5, blend_width: float = 0.15):
        if radius <= 0:
            raise DomainError("radius must be positive")
        if half_width <= 1.0:
            raise DomainError("patch half-width must exceed 1 so the charts overlap")
        self.radius = float(radius)
        self.half_width = float(half_width)
        self.blend_width = float(blend_width)
        self.periods = (None, None)

    def params(self):
        return {"radius": self.radius, "half_width": self.half_width, "blend_width": self.blend_width}

    def _conformal(self, coords):
        r2 = np.sum(np.asarray(coords, dtype=float) ** 2, axis=-1)
        return 4.0 * self.radius**2 / (1.0 + r2) ** 2, r2

    def metric(self, coords, chart=0):
        lam, _ = self._conformal(coords)
        return lam[..., None, None] * np.eye(2)

    def metric_deriv(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        _, r2 = self._conformal(coords)
        dlam = -16.0 * self.radius**2 * coords / (1.0 + r2)[..., None] ** 3
        return dlam[..., :, None, None] * np.eye(2)

    def eigen_floor(self):
        return 4.0 * self.radius**2 / (1.0 + 2.0 * self.half_width**2) ** 2

    def blend(self, coords):
        """Partition-of-unity weight of a chart at its own coordinates."""
        r = np.sqrt(np.sum(np.asarray(coords, dtype=float) ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            s = np.log(r)
        return 0.5 * erfc(s / self.blend_width)

    def to_primary(self, coords, chart):
        coords = np.asarray(coords, dtype=float)
        if chart == 0:
            return coords
        r2 = np.sum(coords**2, axis=-1, keepdims=True)
        return coords / r2

    def vector_to_chart(self, coords0, v0, chart):
        if chart == 0:
            return v0
        coords0 = np.asarray(coords0, dtype=float)
        r2 = np.sum(coords0**2, axis=-1)[..., None, None]
        outer = coords0[..., :, None] * coords0[..., None, :]
        jac = (np.eye(2) * r2 - 2.0 * outer) / r2**2
        return np.einsum("...ij,...j->...i", jac, v0)

    def embed(self, coords, chart=0):
        """Embedding in R^3 (x, y, z), chart 0 projecting from the north pole."""
        coords = np.asarray(coords, dtype=float)
        r2 = np.sum(coords**2, axis=-1)
        x = 2.0 * coords[..., 0] / (1.0 + r2)
        y = 2.0 * coords[..., 1] / (1.0 + r2)
        z = (r2 - 1.0) / (1.0 + r2)
        if chart == 1:
            z = -z
        return self.radius * np.stack([x, y, z], axis=-1)

    def chart_from_embedding(self, xyz, chart=0):
        xyz = np.asarray(xyz, dtype=float) / self.radius
        z = xyz[..., 2] if chart == 0 else -xyz[..., 2]
        denom = (1.0 - z)[..., None]
        return xyz[..., :2] / denom

    def make_grid(self, n):
        n = _as_sizes(n, 2)
        a = self.half_width
        return BaseGrid.cell_lattice(self, [(-a, a), (-a, a)], n, patches=2)


class EuclideanPlane(BaseManifoldModel):
    """Euclidean plane truncated to a square (Cartesian chart) or an annulus (polar chart).

    The polar chart uses ``(r, theta)`` with ``sigma = diag(1, r**2)`` on
    ``[r_min, half_width] x [0, 2 pi)``.  ``trust`` nodes exclude the outermost
    two stencil widths of every non-periodic axis.
    """

    kind = "EuclideanPlane"
    dim = 2
    compact = False
    trust_nodes = 4

    def __init__(self, half_width: float = 10.0, chart: str = "cartesian", r_min: float = 0.5):
        if half_width <= 0:
            raise DomainError("half_width must be positive")
        if chart not in ("cartesian", "polar"):
            raise DomainError(f"unknown plane chart {chart!r}")
        if chart == "polar" and not 0 < r_min < half_width:
            raise DomainError("polar chart needs 0 < r_min < half_width")
        self.half_width = float(half_width)
        self.chart = chart
        self.r_min = float(r_min)
        self.periods = (None, None) if chart == "cartesian" else (None, TWO_PI)

    def params(self):
        out = {"half_width": self.half_width, "chart": self.chart}
        if self.chart == "polar":
            out["r_min"] = self.r_min
        return out

    def metric(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        out = np.zeros(coords.shape[:-1] + (2, 2))
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = 1.0 if self.chart == "cartesian" else coords[..., 0] ** 2
        return out

    def metric_deriv(self, coords, chart=0):
        coords = np.asarray(coords, dtype=float)
        out = np.zeros(coords.shape[:-1] + (2, 2, 2))
        if self.chart == "polar":
            out[..., 0, 1, 1] = 2.0 * coords[..., 0]
        return out

    def eigen_floor(self):
        return 1.0 if self.chart == "cartesian" else min(1.0, self.r_min**2)

    def cartesian(self, coords):
        coords = np.asarray(coords, dtype=float)
        if self.chart == "cartesian":
            return coords
        r, th = coords[..., 0], coords[..., 1]
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def make_grid(self, n):
        n = _as_sizes(n, 2)
        L = self.half_width
        if self.chart == "cartesian":
            return BaseGrid.node_lattice(self, [(-L, L), (-L, L)], n)
        return BaseGrid.polar_lattice(self, (self.r_min, L), n)


def _as_sizes(n, dim):
    if np.isscalar(n):
        return (int(n),) * dim
    n = tuple(int(k) for k in n)
    if len(n) != dim:
        raise GridError(f"expected {dim} grid sizes, got {len(n)}")
    return n


@dataclass(frozen=True, eq=False)
class BaseGrid:
    """Uniform chart lattice(s) over a base model.

    Attributes
    ----------
    axes : list of ndarray
        1-D node coordinates along each chart axis (shared by all patches).
    spacing : tuple of float
        Lattice spacing per axis, in chart units.
    periodic : tuple of bool
    coords : ndarray, shape ``(P, n_1, ..., n_m, m)``
    sqrt_det : ndarray, shape ``(P, n_1, ..., n_m)``
    cell : ndarray
        Chart cell volume times the partition-of-unity weight (and trapezoid
        end factors on non-periodic axes).
    weights : ndarray
        ``cell * sqrt_det``, the Riemannian quadrature weights.
    """

    model: BaseManifoldModel
    axes: list
    spacing: tuple
    periodic: tuple
    n_patches: int = 1
    cell: np.ndarray = field(default=None, repr=False)
    coords: np.ndarray = field(default=None, repr=False)
    sigma: np.ndarray = field(default=None, repr=False)
    sqrt_det: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)
    trust: np.ndarray = field(default=None, repr=False)

    @classmethod
    def _build(cls, model, axes, spacing, periodic, n_patches, end_factor):
        mesh = np.meshgrid(*axes, indexing="ij")
        chart_coords = np.stack(mesh, axis=-1)
        coords = np.broadcast_to(chart_coords, (n_patches,) + chart_coords.shape).copy()
        cell = np.full(coords.shape[:-1], float(np.prod(spacing)))
        for ax, factor in enumerate(end_factor):
            if factor is not None:
                idx = [slice(None)] * cell.ndim
                for end in (0, -1):
                    idx[ax + 1] = end
                    cell[tuple(idx)] *= factor
        if isinstance(model, RoundSphere2):
            cell = cell * model.blend(coords)
        sigma = np.stack([model.metric(coords[p], p) for p in range(n_patches)])
        sqrt_det = np.sqrt(np.linalg.det(sigma))
        trust = np.ones(coords.shape[:-1], dtype=bool)
        if isinstance(model, RoundSphere2):
            # each patch answers only where its partition weight is non-negligible
            trust = model.blend(coords) >= model.trust_weight
        if isinstance(model, EuclideanPlane):
            k = model.trust_nodes
            for ax, per in enumerate(periodic):
                if not per:
                    idx = [slice(None)] * trust.ndim
                    idx[ax + 1] = slice(0, k)
                    trust[tuple(idx)] = False
                    idx[ax + 1] = slice(-k, None)
                    trust[tuple(idx)] = False
        return cls(
            model=model,
            axes=[np.asarray(a) for a in axes],
            spacing=tuple(float(s) for s in spacing),
            periodic=tuple(periodic),
            n_patches=n_patches,
            cell=cell,
            coords=coords,
            sigma=sigma,
            sqrt_det=sqrt_det,
            weights=cell * sqrt_det,
            trust=trust,
        )

    @classmethod
    def periodic_lattice(cls, model, bounds, n):
        axes, spacing = [], []
        for (lo, hi), k in zip(bounds, n):
            d = (hi - lo) / k
            axes.append(lo + d * np.arange(k))
            spacing.append(d)
        return cls._build(model, axes, spacing, (True,) * len(n), 1, [None] * len(n))

    @classmethod
    def node_lattice(cls, model, bounds, n):
        axes, spacing = [], []
        for (lo, hi), k in zip(bounds, n):
            axes.append(np.linspace(lo, hi, k))
            spacing.append((hi - lo) / (k - 1))
        return cls._build(model, axes, spacing, (False,) * len(n), 1, [0.5] * len(n))

    @classmethod
    def cell_lattice(cls, model, bounds, n, patches=1):
        axes, spacing = [], []
        for (lo, hi), k in zip(bounds, n):
            d = (hi - lo) / k
            axes.append(lo + d * (np.arange(k) + 0.5))
            spacing.append(d)
        return cls._build(model, axes, spacing, (False,) * len(n), patches, [None] * len(n))

    @classmethod
    def polar_lattice(cls, model, rbounds, n):
        lo, hi = rbounds
        r = np.linspace(lo, hi, n[0])
        dth = TWO_PI / n[1]
        th = dth * np.arange(n[1])
        return cls._build(model, [r, th], [(hi - lo) / (n[0] - 1), dth], (False, True), 1, [0.5, None])

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def shape(self) -> tuple:
        return self.coords.shape[:-1]

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def h(self) -> float:
        """Largest lattice spacing, the refinement parameter."""
        return max(self.spacing)

    def nodes(self) -> list[BasePoint]:
        out = []
        for idx in np.ndindex(*self.shape):
            out.append(BasePoint(tuple(self.coords[idx]), chart=idx[0]))
        return out

    def primary_coords(self) -> np.ndarray:
        """Node coordinates expressed in chart 0."""
        return np.stack([self.model.to_primary(self.coords[p], p) for p in range(self.n_patches)])

    def sigma_inv(self) -> np.ndarray:
        return np.linalg.inv(self.sigma)

    def sigma_deriv(self) -> np.ndarray:
        return np.stack([self.model.metric_deriv(self.coords[p], p) for p in range(self.n_patches)])

    def check_stencil(self):
        for k in self.shape[1:]:
            if k < 4:
                raise GridError(f"need at least 4 nodes per coordinate, got {self.shape[1:]}")

    def refine(self) -> "BaseGrid":
        """The same model on a grid with half the spacing."""
        n = []
        for ax, per in enumerate(self.periodic):
            k = self.shape[ax + 1]
            n.append(2 * k if per or isinstance(self.model, RoundSphere2) else 2 * k - 1)
        return self.model.make_grid(n)


# --------------------------------------------------------------------------
# fields


def _check_values(grid, values, value_shape, label):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape + value_shape:
        raise GridError(f"{label} values have shape {values.shape}, expected {grid.shape + value_shape}")
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: BaseGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, (), "scalar"))

    @classmethod
    def from_function(cls, grid: BaseGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "ScalarField":
        """Sample ``fn`` given in chart-0 coordinates (other charts are transformed)."""
        return cls(grid, np.asarray(fn(grid.primary_coords()), dtype=float) * np.ones(grid.shape))

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full(grid.shape, float(c)))


@dataclass(frozen=True, eq=False)
class VectorField:
    grid: BaseGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, (self.grid.dim,), "vector"))

    @classmethod
    def from_function(cls, grid: BaseGrid, fn) -> "VectorField":
        """Sample components ``fn`` given in chart 0 and push them to each patch chart."""
        c0 = grid.primary_coords()
        v0 = np.asarray(fn(c0), dtype=float)
        v = np.stack([grid.model.vector_to_chart(c0[p], v0[p], p) for p in range(grid.n_patches)])
        return cls(grid, v)


@dataclass(frozen=True, eq=False)
class SymTensorField:
    grid: BaseGrid
    values: np.ndarray

    def __post_init__(self):
        m = self.grid.dim
        values = _check_values(self.grid, self.values, (m, m), "tensor")
        if not np.allclose(values, np.swapaxes(values, -1, -2), rtol=1e-12, atol=1e-12):
            raise GridError("tensor field is not symmetric")
        object.__setattr__(self, "values", values)


# --------------------------------------------------------------------------
# stencils


def partial(values: np.ndarray, grid: BaseGrid, axis: int, order: int = 2) -> np.ndarray:
    """Chart partial derivative along ``axis`` of node values (leading axes = grid shape).

    Periodic axes use central differences; non-periodic axes switch to
    one-sided stencils of the same order at the two ends.
    """
    ax = axis + 1
    d = grid.spacing[axis]
    f = np.asarray(values, dtype=float)
    if grid.periodic[axis]:
        if order == 2:
            return (np.roll(f, -1, ax) - np.roll(f, 1, ax)) / (2 * d)
        return (8 * (np.roll(f, -1, ax) - np.roll(f, 1, ax)) - (np.roll(f, -2, ax) - np.roll(f, 2, ax))) / (12 * d)
    f = np.moveaxis(f, ax, 0)
    out = np.empty_like(f)
    if order == 2:
        out[1:-1] = (f[2:] - f[:-2]) / (2 * d)
        out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * d)
        out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * d)
    else:
        out[2:-2] = (8 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12 * d)
        out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * d)
        out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * d)
        out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * d)
        out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * d)
    return np.moveaxis(out, 0, ax)


def chart_gradient(values, grid, order=2):
    return np.stack([partial(values, grid, k, order) for k in range(grid.dim)], axis=-1)


def grad_metric(f: np.ndarray, grid: BaseGrid, ginv: np.ndarray, order: int = 2) -> np.ndarray:
    """Gradient components ``g^{ij} d_j f`` for an arbitrary metric field."""
    grid.check_stencil()
    return np.einsum("...ij,...j->...i", ginv, chart_gradient(f, grid, order))


def div_metric(V: np.ndarray, grid: BaseGrid, sqrt_det: np.ndarray, order: int = 2) -> np.ndarray:
    """Divergence ``(1/sqrt|g|) d_i (sqrt|g| V^i)`` for an arbitrary metric field."""
    grid.check_stencil()
    acc = np.zeros(grid.shape)
    for i in range(grid.dim):
        acc += partial(sqrt_det * V[..., i], grid, i, order)
    return acc / sqrt_det


def grad_sigma(f: ScalarField, order: int = 2) -> VectorField:
    """sigma-gradient ``sigma^{ij} d_j f``."""
    return VectorField(f.grid, grad_metric(f.values, f.grid, f.grid.sigma_inv(), order))


def div_sigma(V: VectorField, order: int = 2) -> ScalarField:
    """sigma-divergence ``(1/sqrt det sigma) d_i (sqrt det sigma V^i)``."""
    return ScalarField(V.grid, div_metric(V.values, V.grid, V.grid.sqrt_det, order))


# --------------------------------------------------------------------------
# quadrature


def _decays(grid, values, rel_tol=1e-10):
    """True when the field is negligible on the outer two stencil widths."""
    outer = ~grid.trust
    scale = max(1.0, float(np.max(np.abs(values))))
    return float(np.max(np.abs(values[outer]), initial=0.0)) <= rel_tol * scale


def integrate_values(values: np.ndarray, grid: BaseGrid, density: np.ndarray | None = None) -> float:
    """Quadrature of node values; ``density`` replaces ``sqrt det sigma`` when given."""
    values = np.asarray(values, dtype=float)
    if not grid.model.compact and not _decays(grid, values):
        raise NonCompactBase("field does not decay on the truncated non-compact chart")
    dens = grid.sqrt_det if density is None else density
    return float(np.sum(values * grid.cell * dens))


def integrate(f: ScalarField) -> float:
    """Riemannian integral ``sum f * weights``."""
    return integrate_values(f.values, f.grid)


def boundary_sphere_integral(model: BaseManifoldModel, h2field, r: float, o: BasePoint | None = None,
                             n_quad: int = 512) -> float:
    """Integral of a scalar over the geodesic sphere of radius ``r`` about ``o``.

    ``h2field`` is either a callable of chart-0 coordinates or a
    :class:`ScalarField` (interpolated; Cartesian plane grids only).  For the
    circle the geodesic sphere is two points and the counting measure is
    used.
    """
    if r <= 0:
        raise DomainError("radius must be positive")
    if o is None:
        o = model.point(*([0.0] * model.dim))
    fn = _as_callable(model, h2field)
    o = o.array
    if isinstance(model, Circle):
        if r >= math.pi * model.radius:
            raise DomainError("radius exceeds the injectivity radius of the circle")
        pts = np.array([[o[0] + r / model.radius], [o[0] - r / model.radius]])
        return float(np.sum(fn(pts)))
    th = TWO_PI * np.arange(n_quad) / n_quad
    ring = np.stack([np.cos(th), np.sin(th)], axis=-1)
    if isinstance(model, EuclideanPlane):
        if model.chart == "polar":
            centre = model.cartesian(o)
            xy = centre + r * ring
            pts = np.stack([np.hypot(xy[:, 0], xy[:, 1]), np.arctan2(xy[:, 1], xy[:, 0]) % TWO_PI], axis=-1)
        else:
            pts = o + r * ring
        return float(r * TWO_PI / n_quad * np.sum(fn(pts)))
    if isinstance(model, FlatTorus2):
        if r >= 0.5 * min(model.periods):
            raise DomainError("radius exceeds the injectivity radius of the torus")
        pts = (o + r * ring) % np.asarray(model.periods)
        return float(r * TWO_PI / n_quad * np.sum(fn(pts)))
    if isinstance(model, RoundSphere2):
        R = model.radius
        if r >= math.pi * R:
            raise DomainError("radius exceeds the injectivity radius of the sphere")
        p = model.embed(o) / R
        e1 = np.cross(p, [0.0, 0.0, 1.0])
        if np.linalg.norm(e1) < 1e-8:
            e1 = np.cross(p, [1.0, 0.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(p, e1)
        ang = r / R
        xyz = R * (math.cos(ang) * p + math.sin(ang) * (np.cos(th)[:, None] * e1 + np.sin(th)[:, None] * e2))
        pts = model.chart_from_embedding(xyz, 0)
        return float(R * math.sin(ang) * TWO_PI / n_quad * np.sum(fn(pts)))
    raise DomainError(f"no geodesic spheres for {model.kind}")


def _as_callable(model, h2field):
    if callable(h2field):
        return lambda pts: np.asarray(h2field(pts), dtype=float) * np.ones(pts.shape[:-1])
    if isinstance(h2field, ScalarField):
        grid = h2field.grid
        if not (isinstance(model, EuclideanPlane) and model.chart == "cartesian"):
            raise DomainError("field interpolation is only available on the Cartesian plane")
        interp = RegularGridInterpolator(tuple(grid.axes), h2field.values[0], method="cubic")
        return interp
    raise TypeError("h2field must be a callable or a ScalarField")


MODELS = {
    "Circle": Circle,
    "FlatTorus2": FlatTorus2,
    "RoundSphere2": RoundSphere2,
    "EuclideanPlane": EuclideanPlane,
}
