"""Flat INI-style run configuration with strict validation.

Sections and keys (everything optional unless noted)::

    [geometry]  kind = straight | circle | perturbed   (required)
                theta            straight: edge normal angle (default 0)
                R                circle: radius (default 20)
                branch           circle: moving | fixed spinor branch cut (default moving)
                epsilon          perturbed: bending scale in (0, 1) (default 0.2)
                amplitude, frequency   perturbed: h(s) = amplitude sin(frequency s) (default 1, 1)
    [profile]   kind = tanh | sign (default tanh), m_inf (default 1), r0
    [grid]      n1, n2 (powers of two); x1_min, x1_max, x2_min, x2_max (all four or none)
    [envelope]  kind = gaussian | bump; center; width (gaussian); kappa (bump)
    [time]      T (default 5), dt (number or auto = min(0.4 dx, 0.02)), sample_interval (default 0.5)
    [output]    directory, tag, snapshots (comma-separated times)
    [sweep]     values (comma-separated parameter list for sweeps and ansatz checks)

When the box is omitted it follows the geometry: ``[-30, 30]^2`` for a straight
edge, ``[-(R+20), R+20]^2`` for a circle, and for a perturbed edge
``x1 in [-20, 20]`` with an ``x2`` window that is a whole number of periods of
``h(epsilon x2)`` covering at least ``20 pi``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .fields import GridSpec, make_grid
from .mass import TANH_R0

_ALLOWED = {
    "geometry": {"kind", "theta", "r", "branch", "epsilon", "amplitude", "frequency"},
    "profile": {"kind", "m_inf", "r0"},
    "grid": {"n1", "n2", "x1_min", "x1_max", "x2_min", "x2_max"},
    "envelope": {"kind", "center", "width", "kappa"},
    "time": {"t", "dt", "sample_interval"},
    "output": {"directory", "tag", "snapshots"},
    "sweep": {"values"},
}

CUT_WEIGHT_LIMIT = 1e-12
# splitting error at this step sits well below the ansatz errors being measured
AUTO_DT_CAP = 0.02
PERIOD_TOL = 1e-9


class ConfigError(ValueError):
    """Carries every violation found, not just the first."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class GeometryConfig:
    kind: str
    theta: float = 0.0
    R: float = 20.0
    branch: str = "moving"
    epsilon: float = 0.2
    amplitude: float = 1.0
    frequency: float = 1.0


@dataclass
class ProfileConfig:
    kind: str = "tanh"
    m_inf: float = 1.0
    r0: float | None = None

    @property
    def effective_r0(self) -> float:
        if self.r0 is not None:
            return self.r0
        return TANH_R0 if self.kind == "tanh" else 0.1


@dataclass
class GridConfig:
    n1: int = 512
    n2: int = 512
    bounds: tuple[float, float, float, float] | None = None


@dataclass
class EnvelopeConfig:
    kind: str
    center: float
    width: float = 1.0
    kappa: float = 40.0


@dataclass
class RunConfig:
    geometry: GeometryConfig
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    envelope: EnvelopeConfig | None = None
    T: float = 5.0
    dt: float | str = "auto"
    sample_interval: float = 0.5
    out_dir: str = "."
    tag: str = "run"
    snapshots: tuple[float, ...] = ()
    sweep_values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.envelope is None:
            self.envelope = default_envelope(self.geometry.kind)

    def with_parameter(self, value: float) -> "RunConfig":
        """Copy with the swept parameter (``R`` or ``epsilon``) replaced; box back to auto."""
        kind = self.geometry.kind
        if kind == "circle":
            geo = replace(self.geometry, R=float(value))
        elif kind == "perturbed":
            geo = replace(self.geometry, epsilon=float(value))
        else:
            raise ConfigError([f"geometry {kind!r} has no sweep parameter"])
        return replace(self, geometry=geo, grid=replace(self.grid, bounds=None))

    def resolved_grid(self) -> GridSpec:
        bounds = self.grid.bounds or auto_bounds(self.geometry)
        n2 = self.grid.n2
        if self.grid.bounds is None and self.geometry.kind == "perturbed":
            n2 = _pow2_at_least((bounds[3] - bounds[2]) / 0.125)
        return make_grid(bounds, self.grid.n1, n2)

    def resolved_dt(self) -> float:
        if self.dt == "auto":
            g = self.resolved_grid()
            return min(0.4 * min(g.dx1, g.dx2), AUTO_DT_CAP)
        return float(self.dt)


def _pow2_at_least(x: float) -> int:
    return 1 << max(0, math.ceil(math.log2(x) - 1e-9))


def perturbed_period(geo: GeometryConfig) -> float:
    return 2 * np.pi / (abs(geo.frequency) * geo.epsilon)


def auto_bounds(geo: GeometryConfig) -> tuple[float, float, float, float]:
    if geo.kind == "straight":
        return (-30.0, 30.0, -30.0, 30.0)
    if geo.kind == "circle":
        L = geo.R + 20.0
        return (-L, L, -L, L)
    if geo.kind == "perturbed":
        if not geo.epsilon > 0:
            half = 10 * np.pi
        else:
            P = perturbed_period(geo)
            half = P * math.ceil(20 * np.pi / P - 1e-9) / 2
        return (-20.0, 20.0, -half, half)
    raise ConfigError([f"unknown geometry kind {geo.kind!r}"])


def default_envelope(kind: str) -> EnvelopeConfig:
    if kind == "straight":
        return EnvelopeConfig("gaussian", center=-2.5, width=1.0)
    if kind == "circle":
        return EnvelopeConfig("bump", center=float(np.pi), kappa=40.0)
    return EnvelopeConfig("gaussian", center=0.0, width=1.0)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(s) for s in text.replace(";", ",").split(",") if s.strip())


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    return parse_config_text(path.read_text())


def parse_config_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed config: {exc}"]) from exc

    problems: list[str] = []
    for sec in cp.sections():
        if sec not in _ALLOWED:
            problems.append(f"unknown section [{sec}]")
            continue
        for key in cp[sec]:
            if key not in _ALLOWED[sec]:
                problems.append(f"unknown key '{key}' in [{sec}]")

    def get(sec, key, conv=float, default=None):
        if not cp.has_option(sec, key):
            return default
        raw = cp.get(sec, key).strip()
        try:
            return conv(raw)
        except ValueError:
            problems.append(f"[{sec}] {key} = {raw!r} is not a valid value")
            return default

    kind = get("geometry", "kind", str)
    if kind is None:
        problems.append("[geometry] kind is required")
        kind = "straight"
    geo = GeometryConfig(
        kind=kind,
        theta=get("geometry", "theta", default=0.0),
        R=get("geometry", "r", default=20.0),
        branch=get("geometry", "branch", str, "moving"),
        epsilon=get("geometry", "epsilon", default=0.2),
        amplitude=get("geometry", "amplitude", default=1.0),
        frequency=get("geometry", "frequency", default=1.0),
    )
    prof = ProfileConfig(get("profile", "kind", str, "tanh"), get("profile", "m_inf", default=1.0),
                         get("profile", "r0"))

    bkeys = ("x1_min", "x1_max", "x2_min", "x2_max")
    given = [get("grid", k) for k in bkeys]
    bounds = None
    if all(v is not None for v in given):
        bounds = tuple(given)
    elif any(cp.has_option("grid", k) for k in bkeys):
        problems.append("[grid] give all four of x1_min, x1_max, x2_min, x2_max or none")
    grid = GridConfig(get("grid", "n1", int, 512), get("grid", "n2", int, 512), bounds)

    env = default_envelope(kind)
    env = EnvelopeConfig(get("envelope", "kind", str, env.kind), get("envelope", "center", default=env.center),
                         get("envelope", "width", default=env.width), get("envelope", "kappa", default=env.kappa))

    dt_raw = get("time", "dt", str, "auto")
    dt: float | str = "auto"
    if dt_raw != "auto":
        try:
            dt = float(dt_raw)
        except ValueError:
            problems.append(f"[time] dt = {dt_raw!r} must be a number or 'auto'")

    cfg = RunConfig(
        geometry=geo, profile=prof, grid=grid, envelope=env,
        T=get("time", "t", default=5.0), dt=dt,
        sample_interval=get("time", "sample_interval", default=0.5),
        out_dir=get("output", "directory", str, "."),
        tag=get("output", "tag", str, "run"),
        snapshots=get("output", "snapshots", _floats, ()),
        sweep_values=get("sweep", "values", _floats, ()),
    )
    problems.extend(validate(cfg))
    if problems:
        raise ConfigError(problems)
    return cfg


def validate(cfg: RunConfig) -> list[str]:
    """Every rule the config breaks; an empty list means it is usable."""
    out: list[str] = []
    geo, prof, env = cfg.geometry, cfg.profile, cfg.envelope
    if geo.kind not in ("straight", "circle", "perturbed"):
        return [f"unknown geometry kind {geo.kind!r}"]
    if prof.kind not in ("tanh", "sign"):
        out.append(f"[profile] kind must be tanh or sign, got {prof.kind!r}")
    if not prof.m_inf > 0:
        out.append("[profile] m_inf must be positive")
    if prof.r0 is not None and not prof.r0 > 0:
        out.append("[profile] r0 must be positive")
    if not cfg.T >= 0:
        out.append("[time] T must be nonnegative")
    if cfg.dt != "auto" and not cfg.dt > 0:
        out.append("[time] dt must be positive")
    if not cfg.sample_interval > 0:
        out.append("[time] sample_interval must be positive")
    for s in cfg.snapshots:
        if not 0 <= s <= cfg.T:
            out.append(f"snapshot time {s} outside [0, T={cfg.T}]")

    if env.kind not in ("gaussian", "bump"):
        out.append(f"[envelope] kind must be gaussian or bump, got {env.kind!r}")
    elif geo.kind == "circle" and env.kind != "bump":
        out.append("circle runs need a periodic envelope: [envelope] kind = bump")
    elif geo.kind != "circle" and env.kind != "gaussian":
        out.append(f"{geo.kind} runs need [envelope] kind = gaussian")
    if not env.width > 0 or not env.kappa > 0:
        out.append("[envelope] width and kappa must be positive")

    if geo.kind == "circle":
        r0 = prof.effective_r0
        if not geo.R > 3 * r0:
            out.append(f"circle radius violates R > 3*r0: R={geo.R} <= 3*r0={3 * r0:.4g}")
        if geo.branch not in ("moving", "fixed"):
            out.append(f"[geometry] branch must be moving or fixed, got {geo.branch!r}")
        elif env.kind == "bump" and env.kappa > 0 and geo.R > 0:
            w = cut_weight_max(geo, env, cfg.T)
            if w > CUT_WEIGHT_LIMIT:
                out.append(f"envelope reaches the spinor branch cut: relative weight {w:.2e} "
                           f"> {CUT_WEIGHT_LIMIT:g}")
    if geo.kind == "perturbed":
        if not 0 < geo.epsilon < 1:
            out.append(f"epsilon must lie in the open interval (0, 1), got {geo.epsilon}")
        elif cfg.grid.bounds is not None and geo.frequency != 0:
            P = perturbed_period(geo)
            L = cfg.grid.bounds[3] - cfg.grid.bounds[2]
            k = L / P
            if abs(k - round(k)) > PERIOD_TOL * max(1.0, k) or round(k) < 1:
                out.append(f"x2 length {L:.6g} is not a whole number of periods {P:.6g} "
                           "of h(epsilon x2)")
        if geo.frequency == 0:
            out.append("[geometry] frequency must be nonzero")
    if not out:
        try:
            cfg.resolved_grid()
        except (ValueError, ConfigError) as exc:
            out.append(f"[grid] {exc}")
    return out


def cut_weight_max(geo: GeometryConfig, env: EnvelopeConfig, T: float) -> float:
    """Largest envelope weight at the branch cut over ``[0, T]``, relative to the peak."""
    if geo.branch == "moving":
        return float(np.exp(-2 * env.kappa))
    t = np.linspace(0.0, max(T, 0.0), 2001)
    d = -t / geo.R - env.center
    return float(np.max(np.exp(env.kappa * (np.cos(d) - 1))))
