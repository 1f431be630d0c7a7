"""INI configuration: process specs and experiment descriptions.

Schema (all sections optional unless noted):

    [process]               ; required
    preset = stable15-sym   ; either a preset name ...
    family = stable         ; ... or a family with numeric parameters
    alpha = 1.5
    beta = 0.0
    scale = 1.0

    [grids]                 ; "lo:hi:n", log-spaced; x is linear in (0,1)
    r = 1e-2:1e2:21
    z = 1e-2:1e2:5
    lam = 0.1:100:13
    t = 0.02:2:5
    x = 0.1:0.9:5           ; exit start points as fractions of R

    [simulation]
    dt = 1e-3
    eps = 5e-3
    n_paths = 20000
    seed = 20240817
    refine_factor = 1024
    refine_zone = 0.1
    horizon = 50.0          ; omit for the automatic 50 / h(R)

    [verify]
    claims = kappa-identity, product-bound
    band = 50
    R = 1.0
    out = runs/demo

Families and their keys:
    stable      alpha, beta, scale
    cgmy        c_plus, c_minus, g, m, y, zero_mean | gamma
    brownian    sigma
    bm_poisson  sigma, rate, jump_mean, jump_std, zero_mean | gamma
    one_sided   sigma, rate, tail_decay, side
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .model import (
    CGMY,
    BrownianPlusCompoundPoisson,
    ProcessSpec,
    SpectrallyOneSided,
    Stable,
    brownian,
)
from .montecarlo import SimPlan
from .presets import PRESETS, preset

__all__ = ["ExperimentConfig", "load_config", "spec_from_section", "parse_grid"]


def parse_grid(text: str, log: bool = True) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}; expected lo:hi:n") from exc
    if n < 1 or not (lo < hi):
        raise ConfigError(f"bad grid {text!r}; need lo < hi and n >= 1")
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _floats(sec, *required, **optional):
    out = {}
    for name in required:
        if name not in sec:
            raise ConfigError(f"missing required key {name!r}")
        out[name] = float(sec[name])
    for name, default in optional.items():
        out[name] = float(sec[name]) if name in sec else default
    return out


def spec_from_section(sec) -> tuple[ProcessSpec, str]:
    if "preset" in sec:
        name = sec["preset"].strip()
        if name not in PRESETS:
            raise ConfigError(
                f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
        return preset(name), name
    family = sec.get("family", "").strip()
    if not family:
        raise ConfigError("[process] needs either 'preset' or 'family'")
    if family == "stable":
        p = _floats(sec, "alpha", beta=0.0, scale=1.0)
        return Stable(p["alpha"], p["beta"], p["scale"]), "stable"
    if family == "brownian":
        p = _floats(sec, sigma=1.0)
        return brownian(p["sigma"]), "brownian"
    if family == "cgmy":
        p = _floats(sec, "c_plus", "c_minus", "g", "m", "y")
        if sec.getboolean("zero_mean", fallback="gamma" not in sec):
            return CGMY.zero_mean(p["c_plus"], p["c_minus"], p["g"], p["m"], p["y"]), "cgmy"
        return CGMY(p["c_plus"], p["c_minus"], p["g"], p["m"], p["y"],
                    float(sec["gamma"])), "cgmy"
    if family == "bm_poisson":
        p = _floats(sec, "sigma", rate=0.0, jump_mean=0.0, jump_std=1.0)
        if sec.getboolean("zero_mean", fallback="gamma" not in sec):
            return BrownianPlusCompoundPoisson.zero_mean(
                p["sigma"], p["rate"], p["jump_mean"], p["jump_std"]), "bm_poisson"
        return BrownianPlusCompoundPoisson(
            p["sigma"], p["rate"], p["jump_mean"], p["jump_std"],
            float(sec["gamma"])), "bm_poisson"
    if family == "one_sided":
        p = _floats(sec, "sigma", "rate", "tail_decay")
        return SpectrallyOneSided(p["sigma"], p["rate"], p["tail_decay"],
                                  sec.get("side", "negative")), "one_sided"
    raise ConfigError(f"unknown family {family!r}")


@dataclass
class ExperimentConfig:
    """A verification run: spec, claims, grids, simulation plan, output."""

    spec: ProcessSpec
    spec_name: str
    claims: tuple = ()
    grids: dict = field(default_factory=dict)
    plan: SimPlan = field(default_factory=SimPlan)
    band: float = 50.0
    R: float = 1.0
    outdir: Optional[Path] = None

    def grid(self, name: str, default: Optional[np.ndarray] = None):
        if name in self.grids:
            return self.grids[name]
        return default


def load_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp.read(path)
    if "process" not in cp:
        raise ConfigError("config needs a [process] section")
    spec, name = spec_from_section(cp["process"])

    grids = {}
    if "grids" in cp:
        for key, val in cp["grids"].items():
            grids[key] = parse_grid(val, log=(key != "x"))

    plan_kwargs = {}
    if "simulation" in cp:
        sec = cp["simulation"]
        for key, cast in (("dt", float), ("eps", float), ("n_paths", int),
                          ("seed", int), ("refine_factor", float),
                          ("refine_zone", float), ("horizon", float)):
            if key in sec and sec[key].strip():
                plan_kwargs[key] = cast(sec[key])
    plan = SimPlan(**plan_kwargs)

    claims: tuple = ()
    band, R, outdir = 50.0, 1.0, None
    if "verify" in cp:
        sec = cp["verify"]
        if "claims" in sec:
            claims = tuple(c.strip() for c in sec["claims"].split(",") if c.strip())
        band = float(sec.get("band", 50.0))
        R = float(sec.get("R", 1.0))
        if "out" in sec:
            outdir = Path(sec["out"])
    return ExperimentConfig(spec=spec, spec_name=name, claims=claims, grids=grids,
                            plan=plan, band=band, R=R, outdir=outdir)
