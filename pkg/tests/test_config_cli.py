import json
import time

import pytest

from dwarp import cli
from dwarp.config import RunConfig, from_preset, load, parse, preset_catalog
from dwarp.errors import ConfigError

GOOD = """
preset = CFG-C
grids = 32, 64
suites = identities, counterexample
seed = 3
random_graphs = 5
"""


def test_parse_valid():
    cfg = parse(GOOD)
    assert cfg.base == "Circle" and cfg.rho == "exp" and cfg.h == "2+cos"
    assert cfg.grids == (32, 64) and cfg.suites == ("identities", "counterexample") and cfg.seed == 3


def test_parse_param_lists():
    cfg = parse("base = Circle\nrho = poly\nrho_params = coeffs=1;0;1\ninterval = 0, 2\n")
    assert cfg.rho_params == {"coeffs": (1.0, 0.0, 1.0)}


def test_parse_comments():
    cfg = parse("# a comment\npreset = CFG-A  # inline\n")
    assert cfg.preset == "CFG-A"


@pytest.mark.parametrize("text,key", [
    ("preset = CFG-A\ncolour = red\n", "colour"),
    ("preset = CFG-A\ngrids = 64, 32\n", "grids"),
    ("preset = CFG-A\nsuites =\n", "suites"),
    ("preset = CFG-A\nsuites = everything\n", "suites"),
    ("preset = CFG-Z\n", "preset"),
    ("base = Circle\nh = radial-exp\n", "model"),
    ("preset = CFG-A\ninterval = 1, 0\n", "interval"),
    ("preset = CFG-A\nseed = x\n", "seed"),
    ("preset = CFG-A\nmonotone = perhaps\n", "monotone"),
    ("preset = CFG-A\nr_max = 5\n", "r_max"),
])
def test_parse_rejects(text, key):
    with pytest.raises(ConfigError) as exc:
        parse(text)
    assert exc.value.field == key


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "nope.cfg")


def test_default_grids_depend_on_dimension():
    assert RunConfig(base="FlatTorus2").grids == (32, 64)
    assert RunConfig(base="Circle").grids == (64, 128, 256)


def test_list_presets(capsys):
    assert cli.main(["list-presets"]) == 0
    out = capsys.readouterr().out
    for word in ("Circle", "FlatTorus2", "RoundSphere2", "EuclideanPlane", "constant", "exp", "cosh", "poly",
                 "2+cos", "radial-exp"):
        assert word in out
    assert out.strip() == preset_catalog().strip()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("preset = CFG-A\ngrids = 64, 32\n")
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "grids" in capsys.readouterr().err


def test_flow_on_sphere_is_config_error(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("base = RoundSphere2\nrho = exp\nh = sphere-height\ninterval = 0, 2\nsuites = flow\n")
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_empty_suite_flag(tmp_path):
    assert cli.main(["run", "--preset", "CFG-A", "--suite", "", "--out", str(tmp_path)]) == 2


def test_counterexample_suite_fast(tmp_path, capsys):
    t = time.perf_counter()
    code = cli.main(["run", "--preset", "CFG-A", "--suite", "counterexample", "--out", str(tmp_path),
                     "--no-figures"])
    assert time.perf_counter() - t < 1.0
    assert code == 0
    assert "counterexample  PASS" in capsys.readouterr().out
    for name in ("report.json", "timings.json", "cylinder.json", "cylinder.csv"):
        assert (tmp_path / name).is_file()


def test_failing_run_exit_code(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.SUITE_FUNCS, "counterexample", lambda *a: {"passed": False})
    assert cli.main(["run", "--preset", "CFG-A", "--suite", "counterexample", "--out", str(tmp_path),
                     "--no-figures"]) == 1


def test_refine_cfg_a(tmp_path, capsys):
    assert cli.main(["refine", "--preset", "CFG-A", "--out", str(tmp_path), "--no-figures"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    rows = report["suites"]["identities"]["sine_mode"]
    orders = [r["order_estimate"] for r in rows if r["order_estimate"] is not None]
    assert orders and all(abs(o - 2.0) <= 0.1 for o in orders)
    assert "divrt" in capsys.readouterr().out


def test_run_is_deterministic(tmp_path):
    cfg = from_preset("CFG-B", grids=(64, 128), suites=("identities", "rigidity"), trials=5, random_graphs=5)
    a = cli.run(cfg, tmp_path / "a", figures=False)
    cli.run(cfg, tmp_path / "b", figures=False)
    assert a["passed"]
    for name in ("report.json", "rigidity_trials.csv", "identities.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_figures_written(tmp_path):
    cfg = from_preset("CFG-A", grids=(32, 64), suites=("identities", "flow", "counterexample", "parabolicity"),
                      random_graphs=3)
    rep = cli.run(cfg, tmp_path)
    assert rep["passed"], rep
    for stem in ("identities_convergence", "flow", "cylinder", "parabolicity"):
        assert (tmp_path / f"{stem}.png").is_file()
    for csv in ("identities.csv", "flow.csv", "cylinder.csv", "parabolicity.csv", "field_dump.csv"):
        assert (tmp_path / csv).is_file()


def test_plane_run(tmp_path):
    cfg = from_preset("PLANE", grids=(41, 81), suites=("identities", "rigidity", "parabolicity"), trials=3)
    rep = cli.run(cfg, tmp_path, figures=False)
    assert rep["passed"], rep
    assert "integral_battery" not in rep["suites"]["identities"]


def test_seed_override_changes_hash(tmp_path):
    a = cli.run(from_preset("CFG-A", suites=("counterexample",)), tmp_path / "a", figures=False)
    b = cli.run(from_preset("CFG-A", suites=("counterexample",), seed=1), tmp_path / "b", figures=False)
    assert a["config_hash"] != b["config_hash"]
