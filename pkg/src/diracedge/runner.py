"""Turn a validated :class:`RunConfig` into grids, masses and ansaetze, and run them."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .analysis import ErrorSeries, Sample, edge_centroid
from .ansatz import (AnsatzSolution, ChiProfile, CirclePhi, CircleSolution, CurvedSolution,
                     GaussianEnvelope, PeriodicBump, StraightSolution)
from .config import RunConfig
from .fields import GridSpec, energy, l2_distance
from .mass import PerturbedEdge, SinePerturbation, TransitionProfile, sample_mass
from .propagator import evolve
from .snapshot import write_snapshot

log = logging.getLogger(__name__)


@dataclass
class Experiment:
    config: RunConfig
    grid: GridSpec
    ansatz: AnsatzSolution
    mass: np.ndarray
    dt: float

    @property
    def geometry(self):
        return self.ansatz.mass_model.geometry


def build_profile(cfg: RunConfig) -> TransitionProfile:
    p = cfg.profile
    return TransitionProfile(p.kind, p.m_inf, p.r0)


def build_ansatz(cfg: RunConfig, profile: TransitionProfile | None = None) -> AnsatzSolution:
    profile = profile or build_profile(cfg)
    chi_ = ChiProfile(profile)
    geo, env = cfg.geometry, cfg.envelope
    if geo.kind == "straight":
        return StraightSolution(chi_, geo.theta, GaussianEnvelope(env.center, env.width))
    if geo.kind == "circle":
        return CircleSolution(CirclePhi(chi_, geo.R), PeriodicBump(env.center, env.kappa), geo.branch)
    edge = PerturbedEdge(SinePerturbation(geo.amplitude, geo.frequency), geo.epsilon)
    return CurvedSolution(chi_, edge, GaussianEnvelope(env.center, env.width))


def build_experiment(cfg: RunConfig) -> Experiment:
    grid = cfg.resolved_grid()
    ansatz = build_ansatz(cfg).normalize(grid)
    return Experiment(cfg, grid, ansatz, sample_mass(ansatz.mass_model, grid), cfg.resolved_dt())


def sample_schedule(cfg: RunConfig) -> list[float]:
    """Multiples of the sample interval up to ``T``, plus ``T`` and snapshot times."""
    n = int(np.floor(cfg.T / cfg.sample_interval + 1e-9))
    times = {round(k * cfg.sample_interval, 12) for k in range(n + 1)}
    times.update({float(cfg.T), *map(float, cfg.snapshots)})
    return sorted(times)


@dataclass
class RunOutcome:
    series: ErrorSeries
    leaked: bool
    leak_ratio: float
    snapshot_files: list[Path] = field(default_factory=list)
    csv_path: Path | None = None

    @property
    def final_error(self) -> float:
        return float(self.series.samples[-1].l2_error)


def run_experiment(cfg: RunConfig, out_dir=None, snapshots: Sequence[float] | None = None,
                   workers: int | None = None, write_csv: bool = True) -> RunOutcome:
    exp = build_experiment(cfg)
    snaps = sorted(set(cfg.snapshots if snapshots is None else snapshots))
    if snapshots is not None:
        cfg = replace(cfg, snapshots=tuple(snaps))
    times = sample_schedule(cfg)
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    if write_csv or snaps:
        out.mkdir(parents=True, exist_ok=True)
    geometry = exp.geometry
    files: list[Path] = []
    snap_set = {float(s) for s in snaps}

    def observe(t, f):
        ref = exp.ansatz.sample(exp.grid, t)
        if t in snap_set:
            files.append(write_snapshot(out / f"{cfg.tag}_t{t:.6g}.bin", f, t, geometry.tag))
        return Sample(float(t), l2_distance(f, ref), energy(f), edge_centroid(f, geometry))

    f0 = exp.ansatz.sample(exp.grid, 0.0)
    res = evolve(f0, exp.mass, cfg.T, exp.dt, sample_times=times, observer=observe,
                 workers=workers)
    series = ErrorSeries()
    for s in res.outputs:
        series.append(s)
    outcome = RunOutcome(series, res.leaked, res.leak_ratio, files)
    if write_csv:
        outcome.csv_path = out / f"{cfg.tag}.csv"
        series.write_csv(outcome.csv_path)
    return outcome


def residual_norm(cfg: RunConfig, t: float = 0.0) -> float:
    """L2 norm of the ansatz residual on the configured grid, ansatz scaled to unit energy."""
    exp_grid = cfg.resolved_grid()
    ansatz = build_ansatz(cfg).normalize(exp_grid)
    if not hasattr(ansatz, "residual"):
        return 0.0
    X1, X2 = exp_grid.mesh()
    r1, r2 = ansatz.residual(t, X1, X2)
    return float(np.sqrt(np.sum(np.abs(r1) ** 2 + np.abs(r2) ** 2) * exp_grid.cell_area))


@dataclass
class SweepPoint:
    value: float
    error: float
    leaked: bool
    failure: str | None = None


def _final_error_task(cfg: RunConfig) -> SweepPoint:
    value = cfg.geometry.R if cfg.geometry.kind == "circle" else cfg.geometry.epsilon
    try:
        o = run_experiment(cfg, write_csv=False, snapshots=())
    except ArithmeticError as exc:
        return SweepPoint(value, float("nan"), False, str(exc))
    return SweepPoint(value, o.final_error, o.leaked)


def run_pool(task: Callable, items: Sequence, workers: int = 1) -> list:
    """Map ``task`` over ``items``; results come back in input order regardless of workers."""
    if workers <= 1 or len(items) <= 1:
        return [task(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, items))


def sweep(template: RunConfig, values: Sequence[float], workers: int = 1,
          task: Callable[[RunConfig], SweepPoint] = _final_error_task) -> list[SweepPoint]:
    configs = [template.with_parameter(v) for v in values]
    return run_pool(task, configs, workers)
