"""Run configuration: a flat ``key = value`` file and named presets.

Schema (every key optional; ``preset`` fills the model keys)::

    preset        = CFG-A | CFG-B | CFG-C | CFG-D | PLANE
    base          = Circle | FlatTorus2 | RoundSphere2 | EuclideanPlane
    base_params   = radius=1.0              (comma-separated k=v)
    rho           = constant | exp | cosh | poly
    rho_params    = a=1, k=1                (poly: coeffs=1;0;1)
    h             = constant | 2+cos | radial-exp | radial-power | sphere-height
    h_params      = a=2, b=1
    interval      = lo, hi
    monotone      = true | false            (declare rho' >= 0 on I)
    grids         = 64, 128, 256            (strictly increasing)
    suites        = identities, rigidity, counterexample, parabolicity, flow
    seed          = 0
    trials        = 100                     (rigidity probes)
    random_graphs = 50                      (integral-formula battery)
    amplitude     = 0.3                     (sine-mode test graph)
    r_max         = 40                      (parabolicity radius)
    out           = out

Lines starting with ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from dwarp.base import MODELS
from dwarp.errors import ConfigError, DwarpError
from dwarp.spacetime import POTENTIAL_PRESETS, WARP_PRESETS, DoublyWarpedSpacetime, make_potential, make_warp

SUITES = ("identities", "rigidity", "counterexample", "parabolicity", "flow")

PRESETS = {
    "CFG-A": {"base": "Circle", "rho": "constant", "h": "constant", "interval": (-1.0, 1.0), "monotone": True},
    "CFG-B": {"base": "Circle", "rho": "exp", "h": "constant", "interval": (0.0, 2.0), "monotone": True},
    "CFG-C": {"base": "Circle", "rho": "exp", "h": "2+cos", "interval": (-1.0, 1.0), "monotone": True},
    "CFG-D": {"base": "FlatTorus2", "rho": "constant", "h": "2+cos", "interval": (-1.0, 1.0), "monotone": True},
    "PLANE": {"base": "EuclideanPlane", "rho": "exp", "h": "constant", "interval": (0.0, 2.0), "monotone": True},
}

_KEYS = {"preset", "base", "base_params", "rho", "rho_params", "h", "h_params", "interval", "monotone", "grids",
         "suites", "seed", "trials", "random_graphs", "amplitude", "r_max", "out"}


@dataclass
class RunConfig:
    base: str = "Circle"
    base_params: dict = field(default_factory=dict)
    rho: str = "constant"
    rho_params: dict = field(default_factory=dict)
    h: str = "constant"
    h_params: dict = field(default_factory=dict)
    interval: tuple = (-1.0, 1.0)
    monotone: bool = True
    grids: tuple = ()
    suites: tuple = ("identities",)
    seed: int = 0
    trials: int = 100
    random_graphs: int = 50
    amplitude: float = 0.3
    r_max: float = 40.0
    out: str = "out"
    preset: str = ""

    def __post_init__(self):
        if not self.grids:
            self.grids = (32, 64) if self.base in ("FlatTorus2", "RoundSphere2", "EuclideanPlane") else (64, 128, 256)

    def validate(self) -> "RunConfig":
        if self.base not in MODELS:
            raise ConfigError("base", f"unknown base {self.base!r}; choose from {sorted(MODELS)}")
        if self.rho not in WARP_PRESETS:
            raise ConfigError("rho", f"unknown rho preset {self.rho!r}; choose from {sorted(WARP_PRESETS)}")
        if self.h not in POTENTIAL_PRESETS:
            raise ConfigError("h", f"unknown h preset {self.h!r}; choose from {sorted(POTENTIAL_PRESETS)}")
        lo, hi = self.interval
        if not lo < hi:
            raise ConfigError("interval", f"need lo < hi, got {self.interval}")
        if not self.grids or any(int(n) < 4 for n in self.grids):
            raise ConfigError("grids", "need at least one grid size, each >= 4")
        if any(b <= a for a, b in zip(self.grids, self.grids[1:])):
            raise ConfigError("grids", f"grid sizes must be strictly increasing, got {list(self.grids)}")
        if not self.suites:
            raise ConfigError("suites", "at least one suite is required")
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError("suites", f"unknown suite {s!r}; choose from {list(SUITES)}")
        if self.seed < 0:
            raise ConfigError("seed", "seed must be non-negative")
        if self.trials <= 0:
            raise ConfigError("trials", "trials must be positive")
        if self.random_graphs <= 0:
            raise ConfigError("random_graphs", "random_graphs must be positive")
        if not self.amplitude > 0:
            raise ConfigError("amplitude", "amplitude must be positive")
        if self.r_max < 10:
            raise ConfigError("r_max", "r_max must be at least 10")
        try:
            self.build()
        except DwarpError as exc:
            raise ConfigError("model", str(exc)) from exc
        except TypeError as exc:
            raise ConfigError("params", str(exc)) from exc
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d

    def build(self) -> DoublyWarpedSpacetime:
        model = MODELS[self.base](**self.base_params)
        warp = make_warp(self.rho, interval=tuple(self.interval), **self.rho_params)
        pot = make_potential(self.h, model, **self.h_params)
        return DoublyWarpedSpacetime(model, warp, pot, self.monotone)


def _params(text, key):
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise ConfigError(key, f"expected k=v, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if ";" in v:
            out[k] = _floats(v.replace(";", ","), key)
            continue
        try:
            num = float(v)
            out[k] = int(num) if num.is_integer() and "." not in v and "e" not in v.lower() else num
        except ValueError:
            out[k] = v
    return out


def _floats(text, key, n=None):
    try:
        vals = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(key, f"expected numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(key, f"expected {n} numbers, got {len(vals)}")
    return vals


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def from_preset(name: str, **overrides) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return RunConfig(preset=name, **{**PRESETS[name], **overrides})


def parse(text: str) -> RunConfig:
    """Parse the flat key-value format into a validated :class:`RunConfig`."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None
    raw = dict(cp["run"])
    for key in raw:
        if key not in _KEYS:
            raise ConfigError(key, "unknown key")
    kw: dict = {}
    for key, val in raw.items():
        if key in ("base_params", "rho_params", "h_params"):
            kw[key] = _params(val, key)
        elif key == "interval":
            kw[key] = _floats(val, key, 2)
        elif key == "grids":
            kw[key] = tuple(_int(s.strip(), key) for s in val.split(",") if s.strip())
        elif key == "suites":
            kw[key] = tuple(s.strip() for s in val.split(",") if s.strip())
        elif key in ("seed", "trials", "random_graphs"):
            kw[key] = _int(val, key)
        elif key in ("amplitude", "r_max"):
            kw[key] = _floats(val, key, 1)[0]
        elif key == "monotone":
            if val.strip().lower() not in ("true", "false", "yes", "no", "1", "0"):
                raise ConfigError(key, f"expected true/false, got {val!r}")
            kw[key] = val.strip().lower() in ("true", "yes", "1")
        else:
            kw[key] = val.strip()
    if "suites" in raw and not kw["suites"]:
        raise ConfigError("suites", "at least one suite is required")
    preset = kw.pop("preset", "")
    cfg = from_preset(preset, **kw) if preset else RunConfig(**kw)
    return cfg.validate()


def load(path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"no such file: {p}")
    return parse(p.read_text())


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    """Copy with non-``None`` overrides applied and re-validated."""
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw).validate()


def preset_catalog() -> str:
    """Human-readable list of bases, rho and h presets and named configurations."""
    lines = ["bases:"]
    for name, cls in MODELS.items():
        doc = (cls.__doc__ or "").strip().splitlines()[0]
        lines.append(f"  {name:16s} {doc}")
    lines.append("rho presets:")
    for name, (_, schema) in WARP_PRESETS.items():
        lines.append(f"  {name:16s} {schema}")
    lines.append("h presets:")
    for name, (schema, where) in POTENTIAL_PRESETS.items():
        lines.append(f"  {name:16s} {schema}  [{where}]")
    lines.append("named configurations:")
    for name, p in PRESETS.items():
        lines.append(f"  {name:16s} base={p['base']} rho={p['rho']} h={p['h']} I={p['interval']}")
    return "\n".join(lines)
