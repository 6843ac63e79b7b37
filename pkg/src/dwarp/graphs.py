"""Random smooth height functions for the probes.

A :class:`SmoothGraph` is a continuous height function (not tied to a grid),
so a trial can be re-evaluated on a finer lattice.  Amplitudes are rescaled
so that the graph stays spacelike with a prescribed tilt
``max h |du|_sigma / rho(u) = tilt < 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dwarp.base import BaseGrid, Circle, FlatTorus2, RoundSphere2, ScalarField, chart_gradient
from dwarp.errors import DomainError
from dwarp.hypersurface import EPS_MARGIN, GraphHypersurface

DEFAULT_MAX_MODES = 6


@dataclass
class SmoothGraph:
    """``u = center + amplitude * shape(x)`` with ``shape`` a finite Fourier/polynomial sum."""

    model: object
    center: float
    amplitude: float
    modes: list = field(default_factory=list)

    def shape_values(self, coords0):
        coords0 = np.asarray(coords0, dtype=float)
        out = np.zeros(coords0.shape[:-1])
        if isinstance(self.model, RoundSphere2):
            xyz = self.model.embed(coords0, 0) / self.model.radius
            for powers, c in self.modes:
                out += c * np.prod(xyz ** np.asarray(powers), axis=-1)
            return out
        periods = np.asarray(self.model.periods, dtype=float)
        for k, a, b in self.modes:
            phase = np.sum(2 * np.pi * np.asarray(k) / periods * coords0, axis=-1)
            out += a * np.cos(phase) + b * np.sin(phase)
        return out

    def __call__(self, coords0):
        return self.center + self.amplitude * self.shape_values(coords0)

    def on(self, grid: BaseGrid) -> ScalarField:
        return ScalarField.from_function(grid, self)

    def scaled(self, amplitude) -> "SmoothGraph":
        return SmoothGraph(self.model, self.center, amplitude, self.modes)


def random_shape(model, rng: np.random.Generator, n_grid: int, max_modes: int = DEFAULT_MAX_MODES):
    """Fourier modes ``<= n_grid/4`` with ``1/k^2`` decay (polynomials on the sphere)."""
    K = max(1, min(max_modes, n_grid // 4))
    modes = []
    if isinstance(model, Circle):
        for k in range(1, K + 1):
            a, b = rng.standard_normal(2) / k**2
            modes.append(((k,), a, b))
    elif isinstance(model, FlatTorus2):
        for k1 in range(-K, K + 1):
            for k2 in range(0, K + 1):
                if (k2 == 0 and k1 <= 0) or max(abs(k1), k2) == 0:
                    continue
                a, b = rng.standard_normal(2) / (k1 * k1 + k2 * k2)
                modes.append(((k1, k2), a, b))
    elif isinstance(model, RoundSphere2):
        for deg in range(1, 4):
            for i in range(deg + 1):
                for j in range(deg + 1 - i):
                    modes.append(((i, j, deg - i - j), rng.standard_normal() / deg**2))
    else:
        raise DomainError(f"no random graphs on {model.kind}")
    return modes


def tilt_of(spacetime, graph: SmoothGraph, grid: BaseGrid) -> float:
    """``max h |du|_sigma / rho(u)`` on ``grid`` (fourth-order gradient)."""
    return _tilt_curve(spacetime, graph, grid)(graph.amplitude)


def _tilt_curve(spacetime, graph, grid):
    shape = graph.scaled(1.0).on(grid).values - graph.center
    dshape = chart_gradient(shape, grid, order=4)
    slope = np.sqrt(np.einsum("...i,...ij,...j->...", dshape, grid.sigma_inv(), dshape))
    h = np.stack([spacetime.potential.value(grid.coords[p], p) for p in range(grid.n_patches)])

    def tilt(a):
        return float(np.max(h * abs(a) * slope / spacetime.warp(graph.center + a * shape)))

    return tilt


def fit_amplitude(spacetime, graph: SmoothGraph, grid: BaseGrid, tilt: float, room: float = 0.8) -> SmoothGraph:
    """Largest amplitude with tilt ``<= tilt`` and the height within the central ``room`` of I."""
    lo, hi = spacetime.warp.interval
    peak = float(np.max(np.abs(graph.scaled(1.0).on(grid).values - graph.center)))
    half = min(room * min(graph.center - lo, hi - graph.center), 1e3)
    a_max = half / peak if peak > 0 else 0.0
    curve = _tilt_curve(spacetime, graph, grid)
    if curve(a_max) <= tilt:
        return graph.scaled(a_max)
    a_lo, a_hi = 0.0, a_max
    for _ in range(50):
        mid = 0.5 * (a_lo + a_hi)
        if curve(mid) <= tilt:
            a_lo = mid
        else:
            a_hi = mid
    return graph.scaled(a_lo)


def random_graph(spacetime, grid: BaseGrid, rng: np.random.Generator, tilt_range=(0.2, 0.7),
                 max_modes: int = DEFAULT_MAX_MODES, center: float | None = None) -> SmoothGraph:
    """Random non-constant spacelike graph, margin at least ``EPS_MARGIN``."""
    model = spacetime.base
    n_grid = min(grid.shape[1:])
    lo, hi = spacetime.warp.interval
    if center is None:
        center = 0.5 * (lo + hi) if np.isfinite(lo) and np.isfinite(hi) else spacetime.warp.t_ref
    modes = random_shape(model, rng, n_grid, max_modes)
    tilt = rng.uniform(*tilt_range)
    graph = fit_amplitude(spacetime, SmoothGraph(model, float(center), 1.0, modes), grid, tilt)
    while GraphHypersurface(spacetime, graph.on(grid)).margin.values.min() < EPS_MARGIN:
        graph = graph.scaled(0.9 * graph.amplitude)
    return graph
