"""Scenario configuration: INI-style keyed plain text.

A scenario file has up to six sections; unknown keys are rejected with the
section and key named in the error.

    [model]        kind = simplified | distributed, plus parameter overrides
    [constraint]   amplitude, gain, kp, kd
    [initial]      q_u, p_u  (optional q_a, p_a for full runs)
    [run]          mode = reduced | full, duration, tolerances, output_dt
    [regulate]     mode, target, hysteresis, gain_magnitude, dynamics
    [montecarlo]   samples, duration, seed
    [verify]       osc_r, rot_r (grids), gains
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .constraint import VnhcSpec
from .integrator import IntegratorConfig
from .models import DistributedParams, SimplifiedParams, TESTBED_PARAMS
from .supervisor import RegulationConfig

__all__ = ["ConfigError", "ScenarioConfig", "load_config"]


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


_MODEL_KEYS = {
    "simplified": {"m", "l", "g"},
    "distributed": {"m_u", "m_a", "l_u", "l_a", "l_cu", "l_ca", "J_u", "J_a", "g"},
}
_SECTIONS = {"model", "constraint", "initial", "run", "regulate",
             "montecarlo", "verify"}


@dataclass
class ScenarioConfig:
    model: object = field(default_factory=SimplifiedParams)
    spec: VnhcSpec = field(default_factory=VnhcSpec)
    initial: tuple[float, float] = (0.0, 0.0)
    initial_full: tuple | None = None
    mode: str = "reduced"
    duration: float = 30.0
    output_dt: float = 0.01
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    regulation: RegulationConfig | None = None
    regulation_dynamics: str = "reduced"
    samples: int = 100
    mc_duration: float = 120.0
    seed: int | None = None
    osc_r: tuple = ()
    rot_r: tuple = ()
    gains: tuple = ()


def _get(parser, section, key, conv, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _floats(raw: str) -> tuple:
    """Comma list '0.1,0.2' or range 'start:stop:step' (stop inclusive)."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ValueError("range needs start:stop:step")
        start, stop, step = (float(p) for p in parts)
        out = []
        v = start
        while v <= stop + 1e-12:
            out.append(round(v, 12))
            v += step
        return tuple(out)
    return tuple(float(p) for p in raw.split(",") if p.strip())


def _check_keys(parser, section, allowed):
    for key in parser.options(section):
        if key not in allowed:
            raise ConfigError(f"[{section}] unknown key '{key}'")


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")

    cfg = ScenarioConfig()

    if parser.has_section("model"):
        kind = _get(parser, "model", "kind", str, default="simplified").lower()
        if kind not in _MODEL_KEYS:
            raise ConfigError(f"[model] kind must be simplified or distributed, "
                              f"got {kind!r}")
        _check_keys(parser, "model", _MODEL_KEYS[kind] | {"kind"})
        base = SimplifiedParams() if kind == "simplified" else TESTBED_PARAMS
        overrides = {}
        for key in _MODEL_KEYS[kind]:
            v = _get(parser, "model", key, float)
            if v is not None:
                overrides[key] = v
        try:
            cfg.model = type(base)(**{**base.__dict__, **overrides})
        except ValueError as exc:
            raise ConfigError(f"[model] {exc}") from exc

    if parser.has_section("constraint"):
        _check_keys(parser, "constraint", {"amplitude", "gain", "kp", "kd"})
        try:
            cfg.spec = VnhcSpec(
                amplitude=_get(parser, "constraint", "amplitude", float, 1.0),
                gain=_get(parser, "constraint", "gain", float, 0.0),
                kp=_get(parser, "constraint", "kp", float, 100.0),
                kd=_get(parser, "constraint", "kd", float, 20.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[constraint] {exc}") from exc

    if parser.has_section("initial"):
        _check_keys(parser, "initial", {"q_u", "p_u", "q_a", "p_a"})
        q_u = _get(parser, "initial", "q_u", float, 0.0)
        p_u = _get(parser, "initial", "p_u", float, 0.0)
        cfg.initial = (q_u, p_u)
        if parser.has_option("initial", "q_a") or parser.has_option("initial", "p_a"):
            q_a = _get(parser, "initial", "q_a", float, 0.0)
            p_a = _get(parser, "initial", "p_a", float, 0.0)
            cfg.initial_full = (q_u, q_a, p_u, p_a)

    if parser.has_section("run"):
        _check_keys(parser, "run", {"mode", "duration", "rel_tol", "abs_tol",
                                    "max_step", "output_dt"})
        cfg.mode = _get(parser, "run", "mode", str, "reduced").lower()
        if cfg.mode not in ("reduced", "full"):
            raise ConfigError(f"[run] mode must be reduced or full, got {cfg.mode!r}")
        cfg.duration = _get(parser, "run", "duration", float, 30.0)
        if cfg.duration <= 0:
            raise ConfigError("[run] duration must be positive")
        cfg.output_dt = _get(parser, "run", "output_dt", float, 0.01)
        max_step = _get(parser, "run", "max_step", float, 0.0)
        try:
            cfg.integrator = IntegratorConfig(
                rel_tol=_get(parser, "run", "rel_tol", float, 1e-10),
                abs_tol=_get(parser, "run", "abs_tol", float, 1e-12),
                max_step=max_step if max_step and max_step > 0 else math.inf,
            )
        except ValueError as exc:
            raise ConfigError(f"[run] {exc}") from exc

    if parser.has_section("regulate"):
        _check_keys(parser, "regulate", {"mode", "target", "hysteresis",
                                         "gain_magnitude", "dynamics"})
        try:
            cfg.regulation = RegulationConfig(
                mode=_get(parser, "regulate", "mode", str, required=True).lower(),
                target=_get(parser, "regulate", "target", float, required=True),
                hysteresis=_get(parser, "regulate", "hysteresis", float, 0.05),
                gain_magnitude=_get(parser, "regulate", "gain_magnitude", float, 10.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[regulate] {exc}") from exc
        cfg.regulation_dynamics = _get(parser, "regulate", "dynamics", str,
                                       "reduced").lower()
        if cfg.regulation_dynamics not in ("reduced", "full"):
            raise ConfigError("[regulate] dynamics must be reduced or full")

    if parser.has_section("montecarlo"):
        _check_keys(parser, "montecarlo", {"samples", "duration", "seed"})
        cfg.samples = _get(parser, "montecarlo", "samples", int, 100)
        if cfg.samples <= 0:
            raise ConfigError("[montecarlo] samples must be positive")
        cfg.mc_duration = _get(parser, "montecarlo", "duration", float, 120.0)
        cfg.seed = _get(parser, "montecarlo", "seed", int)

    if parser.has_section("verify"):
        _check_keys(parser, "verify", {"osc_r", "rot_r", "gains"})
        cfg.osc_r = _get(parser, "verify", "osc_r", _floats, ())
        cfg.rot_r = _get(parser, "verify", "rot_r", _floats, ())
        cfg.gains = _get(parser, "verify", "gains", _floats, ())

    return cfg
