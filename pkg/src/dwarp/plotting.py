"""Figures for run reports (matplotlib, Agg backend, PNG files)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no timestamps or software tags, so repeated runs write identical files
_META = {"Software": None}


def _save(fig, path):
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def convergence(reports: list[dict], path, title: str = "") -> Path:
    """Log-log max residual against spacing, one line per identity, with ``Delta^2`` guide."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    hs_all = []
    for rep in reports:
        hist = np.asarray(rep["history"], dtype=float)
        if len(hist) == 0:
            continue
        hs_all.extend(hist[:, 0])
        order = rep.get("order_estimate")
        lab = rep["identity_name"] + (f" (order {order:.2f})" if isinstance(order, float) else "")
        ax.loglog(hist[:, 0], np.maximum(hist[:, 1], 1e-300), "o-", label=lab)
    if hs_all:
        h = np.array(sorted(set(hs_all)))
        top = max(float(np.max(np.asarray(r["history"])[:, 1])) for r in reports if r["history"])
        ax.loglog(h, top * (h / h.max()) ** 2, "k--", lw=0.8, label="slope 2")
    ax.set_xlabel("spacing")
    ax.set_ylabel("max residual")
    ax.set_title(title or "identity residuals")
    ax.legend(fontsize=7)
    return _save(fig, path)


def flow_trace(trace: dict, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    t = np.asarray(trace["times"])
    ax.semilogy(t, np.maximum(trace["oscillation"], 1e-300), label="max u - min u")
    ax.semilogy(t, np.maximum(trace["sup_H_defect"], 1e-300), label="max |H - calH|")
    ax.set_xlabel("flow time s")
    ax.set_title(title or "slice-seeking flow")
    ax.legend()
    return _save(fig, path)


def probe_histogram(probe: dict, path, title: str = "") -> Path:
    """Distribution of per-trial ``min_defect`` with the tolerances marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    vals = [d["min_defect"] for d in probe["details"]]
    ax.hist(vals, bins=min(30, max(5, len(vals) // 3)))
    tol = max((d["tol"] for d in probe["details"]), default=0.0)
    ax.axvline(-tol, color="r", ls="--", lw=0.8, label="-max tol")
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("min defect per trial")
    ax.set_ylabel("trials")
    ax.set_title(title or probe["theorem"])
    ax.legend()
    return _save(fig, path)


def parabolicity(verdicts: list[dict], path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for v in verdicts:
        est = np.asarray(v["integral_estimates"], dtype=float)
        ax.plot(est[:, 0], est[:, 1], "o-", label=f"{v['label']}: {v['verdict']}")
    ax.set_xlabel("R")
    ax.set_ylabel("partial integral from 1 to R")
    ax.set_title("boundary-integral criterion (heuristic)")
    ax.legend(fontsize=8)
    return _save(fig, path)


def cylinder(report: dict, path) -> Path:
    rows = report["per_a"]
    a = np.array([r["a"] for r in rows])
    order = np.argsort(a)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(a[order], [rows[i]["circle_orthogonality_defect"] for i in order], "o-", label="circle defect")
    ax1.plot(a[order], [rows[i]["causal_character"] for i in order], "s-", label="helix |gamma'|^2")
    ax1.set_xlabel("a")
    ax1.legend()
    for key in ("killing_residual", "geodesic_residual", "orthogonality_residual"):
        ax2.semilogy(a[order], [max(rows[i][key], 1e-18) for i in order], "o-", label=key)
    ax2.set_xlabel("a")
    ax2.legend(fontsize=7)
    fig.suptitle("flat Lorentzian cylinder")
    return _save(fig, path)
