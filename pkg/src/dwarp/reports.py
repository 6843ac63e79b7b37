"""Report records and their JSON/CSV serialisation."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    """Stable JSON: sorted keys, 12 significant digits, trailing newline."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def config_hash(obj) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()[:16]


# residuals below this are roundoff and carry no convergence information
ROUNDOFF_FLOOR = 1e-12


def order_estimate(spacings, residuals):
    """Least-squares slope of ``log residual`` against ``log spacing``.

    ``None`` with fewer than two grids, a zero residual, or every residual
    below :data:`ROUNDOFF_FLOOR` (identity exact to roundoff).
    """
    h = np.asarray(spacings, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if len(h) < 2 or np.any(r <= 0) or np.all(r <= ROUNDOFF_FLOOR):
        return None
    slope, _ = np.polyfit(np.log(h), np.log(r), 1)
    return float(slope)


@dataclass
class ResidualReport:
    """Residual of one identity; ``passed`` iff ``max_residual <= bound_constant * spacing**2``.

    With a refinement study ``history`` holds ``(spacing, max, l2)`` per grid,
    the headline numbers are the finest grid's, and ``passed`` requires the
    bound on every grid.
    """

    identity_name: str
    max_residual: float
    l2_residual: float
    spacing: float
    bound_constant: float
    order_estimate: float | None = None
    passed: bool = False
    label: str = ""
    history: list = field(default_factory=list)

    def __post_init__(self):
        if not self.history:
            self.history = [(self.spacing, self.max_residual, self.l2_residual)]
        self.passed = all(mx <= self.bound_constant * h**2 for h, mx, _ in self.history)

    @property
    def bound(self) -> float:
        return self.bound_constant * self.spacing**2

    def to_dict(self):
        return {
            "identity_name": self.identity_name,
            "label": self.label,
            "spacing": self.spacing,
            "max_residual": self.max_residual,
            "l2_residual": self.l2_residual,
            "bound_constant": self.bound_constant,
            "bound": self.bound,
            "order_estimate": self.order_estimate,
            "passed": self.passed,
            "history": [list(h) for h in self.history],
        }


def combine_refinement(reports: list[ResidualReport]) -> ResidualReport:
    """Merge single-grid reports of one identity (coarse to fine) into a study."""
    reports = sorted(reports, key=lambda r: -r.spacing)
    hist = [(r.spacing, r.max_residual, r.l2_residual) for r in reports]
    fine = reports[-1]
    out = ResidualReport(
        identity_name=fine.identity_name,
        max_residual=fine.max_residual,
        l2_residual=fine.l2_residual,
        spacing=fine.spacing,
        bound_constant=max(r.bound_constant for r in reports),
        order_estimate=order_estimate([h for h, _, _ in hist], [m for _, m, _ in hist]),
        label=fine.label,
        history=hist,
    )
    return out


@dataclass
class TrialRecord:
    seed: int
    min_defect: float
    argmin_node: tuple
    spacing: float
    tol: float
    violation: bool
    note: str = ""


@dataclass
class ProbeReport:
    """Outcome of a theorem probe over random trials.

    ``violations_found`` counts trials exhibiting the property the probe is
    looking for (see each probe); ``passed`` records whether the probe's
    expectation held.  ``controls`` holds trials on slices, which are
    reported but never counted.
    """

    theorem: str
    trials: int
    violations_found: int
    worst_margin: float
    passed: bool
    details: list = field(default_factory=list)
    expectation: str = ""
    controls: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.violations_found <= self.trials:
            raise ValueError("violations_found must lie in [0, trials]")

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "expectation": self.expectation,
            "trials": self.trials,
            "violations_found": self.violations_found,
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "details": [asdict(d) for d in self.details],
            "controls": [asdict(d) for d in self.controls],
        }


@dataclass
class FlowTrace:
    times: list
    oscillation: list
    sup_H_defect: list
    passed: bool = True

    def to_dict(self):
        return {"times": self.times, "oscillation": self.oscillation, "sup_H_defect": self.sup_H_defect,
                "passed": self.passed, "final_oscillation": self.oscillation[-1] if self.oscillation else None}


@dataclass
class ParabolicityVerdict:
    integral_estimates: list
    verdict: str
    weight_kind: str
    label: str = ""
    increment_ratio: float | None = None
    heuristic: bool = True

    def to_dict(self):
        return {
            "label": self.label,
            "weight_kind": self.weight_kind,
            "integral_estimates": [list(e) for e in self.integral_estimates],
            "increment_ratio": self.increment_ratio,
            "verdict": self.verdict,
            "heuristic": self.heuristic,
        }


def write_json(path, obj):
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def write_csv(path, header, rows, comment=None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.12g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return path
