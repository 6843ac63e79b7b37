"""Command line entry point: ``dwarp run | list-presets | refine``.

``run`` executes the configured suites and writes to the output directory:

* ``report.json``: config echo, per-suite reports, overall pass flag
  (byte-identical for identical config and seed);
* ``timings.json``: wall-clock seconds per suite (kept out of the report so
  the report stays reproducible);
* per-suite CSV files whose first line is ``# config <hash>``;
* per-identity JSON reports and PNG figures.

Exit status is 0 when every suite passed, 1 on a numerical failure and 2 on
a configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from dwarp import config as cfgmod
from dwarp import counterexample, identities, rigidity
from dwarp.base import Circle, EuclideanPlane, FlatTorus2, RoundSphere2, ScalarField
from dwarp.errors import ConfigError, DwarpError
from dwarp.graphs import random_graph
from dwarp.hypersurface import GraphHypersurface, write_field_csv
from dwarp.reports import config_hash, dumps, write_csv, write_json
from dwarp.spacetime import DoublyWarpedSpacetime, make_potential, make_warp

CYLINDER_A = (-0.5, 0.0, 0.5, 0.9)
PARABOLICITY_REFERENCE = (
    ("h=1", "constant", {}, "diverges"),
    ("h=exp(r)", "radial-exp", {"k": 1.0}, "converges"),
    ("h=(1+r^2)^(1/4)", "radial-power", {"p": 0.25}, "converges"),
)


def _centre(st):
    lo, hi = st.warp.interval
    return 0.5 * (lo + hi)


def sine_graph(st, amplitude: float, kind: str = "identities"):
    """Sine-mode height used by the identity and flow suites."""
    c = _centre(st)
    model = st.base
    if isinstance(model, Circle):
        return lambda x: c + amplitude * np.sin(x[..., 0])
    if isinstance(model, FlatTorus2):
        if kind == "flow":
            return lambda x: c + amplitude * (2 * np.sin(x[..., 0]) + np.cos(x[..., 1])) / 3
        return lambda x: c + amplitude * np.sin(x[..., 0]) * np.sin(x[..., 1])
    if isinstance(model, RoundSphere2):
        return lambda x: c + amplitude * model.embed(x, 0)[..., 2] / model.radius
    return lambda x: c + amplitude * np.exp(-np.sum(x**2, axis=-1) / 4.0)


def check_applicable(cfg) -> None:
    """Reject suites that cannot run on the configured model."""
    if "flow" in cfg.suites:
        if cfg.base not in ("Circle", "FlatTorus2"):
            raise ConfigError("suites", "the flow suite runs on Circle or FlatTorus2 only")
        if not cfg.monotone:
            raise ConfigError("monotone", "the flow suite needs monotone = true")


# --------------------------------------------------------------------------
# suites


def suite_identities(cfg, st, out: Path, tag: str, figures: bool):
    u_fn = sine_graph(st, cfg.amplitude)
    reps = identities.refinement_study(st, u_fn, cfg.grids, seed=cfg.seed, label="sine-mode")
    result = {"sine_mode": [r.to_dict() for r in reps]}
    rows = []
    for r in reps:
        write_json(out / f"identity_{r.identity_name}.json", {
            k: r.to_dict()[k] for k in ("identity_name", "spacing", "max_residual", "l2_residual",
                                        "order_estimate", "passed", "bound", "history")})
        for h, mx, l2 in r.history:
            rows.append([r.identity_name, h, mx, l2, r.bound_constant * h**2])
    write_csv(out / "identities.csv", ["identity", "spacing", "max_residual", "l2_residual", "bound"], rows, tag)
    finest = GraphHypersurface(st, ScalarField.from_function(st.base.make_grid(cfg.grids[-1]), u_fn))
    write_field_csv(out / "field_dump.csv", finest, header_comment=tag)
    passed = all(r.passed for r in reps)
    if st.base.compact:
        battery = []
        grid = st.base.make_grid(cfg.grids[0])
        for s in rigidity.trial_seeds(cfg.seed, cfg.random_graphs):
            S = GraphHypersurface(st, random_graph(st, grid, np.random.default_rng(s)).on(grid))
            battery.append(identities.check_integral_formula(S, label=f"seed={s}"))
        worst = max(battery, key=lambda r: r.max_residual / r.bound_constant)
        result["integral_battery"] = {
            "graphs": len(battery),
            "failures": sum(not r.passed for r in battery),
            "worst": worst.to_dict(),
            "passed": all(r.passed for r in battery),
        }
        write_csv(out / "integral_battery.csv", ["label", "spacing", "abs_integral", "bound"],
                  [[r.label, r.spacing, r.max_residual, r.bound] for r in battery], tag)
        passed = passed and result["integral_battery"]["passed"]
    if figures:
        from dwarp import plotting

        plotting.convergence(result["sine_mode"], out / "identities_convergence.png",
                             f"identity residuals ({cfg.preset or cfg.base})")
    result["passed"] = passed
    return result


def suite_rigidity(cfg, st, out: Path, tag: str, figures: bool):
    result = {}
    probes = []
    n = cfg.grids[0]
    if st.base.compact:
        g = rigidity.find_totally_geodesic_slice(st)
        result["totally_geodesic_slice"] = None if g is None else {
            "t0": g.t0, "residual": g.residual, "identically_geodesic": g.identically_geodesic}
        if st.monotone_flag:
            probes.append(rigidity.probe_compact_rigidity(st, cfg.trials, cfg.seed, n))
        probes.append(rigidity.extrema_probe(st, cfg.trials, cfg.seed, n))
        if rigidity.is_static(st):
            probes.append(rigidity.static_cmc_check(st, trials=cfg.trials, seed=cfg.seed, n=n))
    elif isinstance(st.base, EuclideanPlane) and st.monotone_flag:
        lo, hi = st.warp.interval
        probes.append(rigidity.asymptotic_probe(st, lo + 0.25 * (hi - lo), min(cfg.trials, 10), cfg.seed))
    result["probes"] = [p.to_dict() for p in probes]
    rows = []
    for p in probes:
        for d in p.details + p.controls:
            rows.append([p.theorem, d.seed, d.min_defect, " ".join(map(str, d.argmin_node)), d.spacing, d.tol,
                         int(d.violation), d.note])
    write_csv(out / "rigidity_trials.csv",
              ["probe", "seed", "min_defect", "node", "spacing", "tol", "flagged", "note"], rows, tag)
    if figures:
        from dwarp import plotting

        for p in result["probes"]:
            plotting.probe_histogram(p, out / f"rigidity_{p['theorem']}.png")
    result["passed"] = all(p.passed for p in probes)
    return result


def suite_counterexample(cfg, st, out: Path, tag: str, figures: bool):
    rep = counterexample.cylinder_report(CYLINDER_A, t0=0.0, seed=cfg.seed)
    counterexample.write_cylinder_outputs(rep, out / "cylinder.json", out / "cylinder.csv", tag)
    if figures:
        from dwarp import plotting

        plotting.cylinder(rep, out / "cylinder.png")
    return rep


def suite_parabolicity(cfg, st, out: Path, tag: str, figures: bool):
    plane = EuclideanPlane()
    verdicts = []
    ok = True
    for label, pot, params, expected in PARABOLICITY_REFERENCE:
        ref = DoublyWarpedSpacetime(plane, make_warp("constant"), make_potential(pot, plane, **params))
        v = rigidity.parabolicity_classifier(ref, "h2", cfg.r_max, label=label)
        d = v.to_dict()
        d["expected"] = expected
        d["matches"] = v.verdict == expected
        ok = ok and d["matches"]
        verdicts.append(d)
    if isinstance(st.base, EuclideanPlane):
        for kind in ("h2", "rho_h2"):
            v = rigidity.parabolicity_classifier(st, kind, cfg.r_max, label=f"configured {kind}")
            verdicts.append(v.to_dict())
    rows = [[v["label"], v["weight_kind"], R, P] for v in verdicts for R, P in v["integral_estimates"]]
    write_csv(out / "parabolicity.csv", ["label", "weight", "R", "partial_integral"], rows, tag)
    if figures:
        from dwarp import plotting

        plotting.parabolicity(verdicts, out / "parabolicity.png")
    return {"verdicts": verdicts, "heuristic": True, "passed": ok}


def suite_flow(cfg, st, out: Path, tag: str, figures: bool):
    grid = st.base.make_grid(cfg.grids[0])
    S0 = GraphHypersurface(st, ScalarField.from_function(grid, sine_graph(st, cfg.amplitude, "flow")))
    tr = rigidity.slice_seeking_flow(S0)
    d = tr.to_dict()
    write_csv(out / "flow.csv", ["time", "oscillation", "sup_H_defect"],
              list(zip(tr.times, tr.oscillation, tr.sup_H_defect)), tag)
    if figures:
        from dwarp import plotting

        plotting.flow_trace(d, out / "flow.png")
    return d


SUITE_FUNCS = {
    "identities": suite_identities,
    "rigidity": suite_rigidity,
    "counterexample": suite_counterexample,
    "parabolicity": suite_parabolicity,
    "flow": suite_flow,
}


def run(cfg, out=None, figures: bool = True) -> dict:
    """Run every configured suite; numerical failures are recorded, not raised."""
    cfg.validate()
    check_applicable(cfg)
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    echo = cfg.echo()
    tag = f"config {config_hash(echo)} seed {cfg.seed}"
    st = cfg.build()
    suites, timings = {}, {}
    for name in cfg.suites:
        t = time.perf_counter()
        try:
            suites[name] = SUITE_FUNCS[name](cfg, st, out, tag, figures)
        except DwarpError as exc:
            suites[name] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        timings[name] = time.perf_counter() - t
    report = {
        "config": echo,
        "config_hash": config_hash(echo),
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }
    (out / "report.json").write_text(dumps(report))
    (out / "timings.json").write_text(dumps({k: round(v, 6) for k, v in timings.items()}))
    return report


# --------------------------------------------------------------------------


def _csv_list(text, conv=str):
    return tuple(conv(s.strip()) for s in text.split(",") if s.strip())


def _load(args):
    if args.config:
        cfg = cfgmod.load(args.config)
    else:
        cfg = cfgmod.from_preset(args.preset or "CFG-A")
    if args.preset and args.config:
        raise ConfigError("preset", "give either --config or --preset, not both")
    grids = None
    if args.grid:
        try:
            grids = _csv_list(args.grid, int)
        except ValueError:
            raise ConfigError("grid", f"expected N[,N...], got {args.grid!r}") from None
    suites = _csv_list(args.suite) if args.suite is not None else None
    if suites is not None and not suites:
        raise ConfigError("suites", "at least one suite is required")
    return cfgmod.with_overrides(cfg, seed=args.seed, out=args.out, grids=grids, suites=suites)


def _summary(report) -> str:
    lines = []
    for name, s in report["suites"].items():
        lines.append(f"{name:15s} {'PASS' if s['passed'] else 'FAIL'}" + (f"  ({s['error']})" if "error" in s else ""))
    lines.append(f"{'overall':15s} {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dwarp", description="Checks for spacelike graphs in doubly warped products.")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, help_ in (("run", "run the configured suites"), ("refine", "identity convergence study")):
        q = sub.add_parser(verb, help=help_)
        q.add_argument("--config", help="flat key=value configuration file")
        q.add_argument("--preset", help="named configuration (CFG-A..CFG-D, PLANE) instead of --config")
        q.add_argument("--seed", type=int)
        q.add_argument("--out", help="output directory")
        q.add_argument("--grid", help="grid sizes N[,N...]")
        if verb == "run":
            q.add_argument("--suite", help="suites NAME[,NAME...]")
        q.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    sub.add_parser("list-presets", help="print the preset catalog")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "list-presets":
        print(cfgmod.preset_catalog())
        return 0
    try:
        if args.verb == "refine":
            args.suite = "identities"
        cfg = _load(args)
        check_applicable(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run(cfg, figures=not args.no_figures)
    if args.verb == "refine":
        for r in report["suites"]["identities"].get("sine_mode", []):
            order = r["order_estimate"]
            order = "n/a" if order is None or (isinstance(order, float) and math.isnan(order)) else f"{order:.3f}"
            print(f"{r['identity_name']:14s} order {order:>6s}  max {r['max_residual']:.3e}  "
                  f"bound {r['bound']:.3e}  {'PASS' if r['passed'] else 'FAIL'}")
    print(_summary(report))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
