"""Flat dotted-key run configuration.

A config file holds one ``section.key = value`` assignment per line; ``#``
starts a comment.  Values are Python literals (``0.25``, ``[0.4, 0.2]``,
``true``); anything that is not a literal is kept as a bare string.
"""

import ast
from dataclasses import asdict, dataclass, field, fields
import os
from pathlib import Path
import warnings

from .errors import ConfigurationError
from .ground_state import SEED_PROFILES

OUTPUT_ENV = "CSSR_OUTPUT_DIR"


@dataclass
class GridConfig:
    n_x: int = 256
    l_x: float = 12.0
    m_y: int = 64


@dataclass
class PhysicsConfig:
    beta: float = 1.0
    epsilon: float = 0.25


@dataclass
class FlowSection:
    tau: float = 0.5
    tol_energy: float = 1e-13
    tol_residual: float = 1e-8
    max_iters: int = 5000
    seed_profile: str = "gaussian"
    seed: int = 0
    seed_file: str = ""


@dataclass
class TimeConfig:
    dt: float = 2.5e-4
    t_final: float = 0.5
    snapshot_stride: float = 0.01


@dataclass
class SweepConfig:
    epsilons: list = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    workers: int = 0


@dataclass
class OutputConfig:
    dir: str = "output"
    write_fields: bool = False


@dataclass
class SimulationConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    flow: FlowSection = field(default_factory=FlowSection)
    time: TimeConfig = field(default_factory=TimeConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self):
        """Flat ``{"section.key": value}`` echo of the effective config."""
        return {f"{sec}.{k}": v for sec, d in asdict(self).items() for k, v in d.items()}

    def validate(self):
        g, p, f, t, s = self.grid, self.physics, self.flow, self.time, self.sweep
        n = g.n_x
        _require(n >= 16 and not n & (n - 1), "grid.n_x", "a power of two >= 16", n)
        _require(g.l_x > 0, "grid.l_x", "positive", g.l_x)
        _require(g.m_y >= 2, "grid.m_y", ">= 2", g.m_y)
        _require(p.epsilon > 0, "physics.epsilon", "positive", p.epsilon)
        _require(p.beta >= 0, "physics.beta", "nonnegative", p.beta)
        for key in ("tau", "tol_energy", "tol_residual"):
            _require(getattr(f, key) > 0, f"flow.{key}", "positive", getattr(f, key))
        _require(f.max_iters >= 1, "flow.max_iters", ">= 1", f.max_iters)
        _require(f.seed_profile in SEED_PROFILES, "flow.seed_profile",
                 f"one of {SEED_PROFILES}", f.seed_profile)
        _require(t.dt > 0, "time.dt", "positive", t.dt)
        _require(t.t_final >= 0, "time.t_final", "nonnegative", t.t_final)
        _require(t.snapshot_stride > 0, "time.snapshot_stride", "positive", t.snapshot_stride)
        eps = s.epsilons
        _require(len(eps) >= 1 and all(e > 0 for e in eps)
                 and all(b < a for a, b in zip(eps, eps[1:])),
                 "sweep.epsilons", "positive and strictly decreasing", eps)
        _require(s.workers >= 0, "sweep.workers", "nonnegative", s.workers)
        return self

    def flow_config(self):
        from .ground_state import FlowConfig
        f = self.flow
        return FlowConfig(tau=f.tau, tol_energy=f.tol_energy, tol_residual=f.tol_residual,
                          max_iters=f.max_iters, seed_profile=f.seed_profile, seed=f.seed)

    def worker_count(self):
        return self.sweep.workers or os.cpu_count() or 1


def _require(ok, key, what, value):
    if not ok:
        raise ConfigurationError(f"{key} must be {what}, got {value!r}", key=key)


def _literal(text):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text.strip("\"'")


def _coerce(key, value, default):
    try:
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            return int(value)
        if isinstance(default, float):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if isinstance(default, list):
            return [float(v) for v in value]
        return str(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"invalid value for {key}: {value!r}", key=key) from None


def apply_overrides(cfg, values):
    """Set flat dotted keys on ``cfg`` in place; unknown keys only warn."""
    for key, value in values.items():
        sec, _, name = key.partition(".")
        section = getattr(cfg, sec, None)
        if section is None or name not in {f.name for f in fields(section)}:
            warnings.warn(f"unknown config key {key!r} ignored", stacklevel=2)
            continue
        setattr(section, name, _coerce(key, value, getattr(section, name)))
    return cfg


def parse_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        values[key.strip()] = _literal(value.strip())
    return values


def parse_config(path=None, overrides=None):
    """Read ``path`` (may be None for pure defaults), apply overrides and the
    ``CSSR_OUTPUT_DIR`` environment override, then validate."""
    cfg = SimulationConfig()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigurationError(f"config file not found: {p}")
        apply_overrides(cfg, parse_text(p.read_text()))
    if overrides:
        apply_overrides(cfg, overrides)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        cfg.output.dir = env
    return cfg.validate()
