"""Post-processing: error against an ansatz, edge centroids, chirality, power-law fits."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .fields import SpinorField, energy, l2_distance
from .mass import CircleEdge, EdgeGeometry


@dataclass
class Sample:
    t: float
    l2_error: float
    energy: float
    centroid: float


@dataclass
class ErrorSeries:
    samples: list[Sample] = field(default_factory=list)

    def append(self, sample: Sample):
        if self.samples and not sample.t > self.samples[-1].t:
            raise ValueError("sample times must be strictly increasing")
        self.samples.append(sample)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def errors(self) -> np.ndarray:
        return np.array([s.l2_error for s in self.samples])

    @property
    def centroids(self) -> np.ndarray:
        return np.array([s.centroid for s in self.samples])

    @property
    def energy_drift(self) -> float:
        e = np.array([s.energy for s in self.samples])
        return float(np.max(np.abs(e - e[0])) / e[0]) if e.size and e[0] else 0.0

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "l2_error", "energy", "centroid"])
            for s in self.samples:
                w.writerow([repr(s.t), repr(s.l2_error), repr(s.energy), repr(s.centroid)])

    @classmethod
    def read_csv(cls, path) -> "ErrorSeries":
        out = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                out.append(Sample(float(row["t"]), float(row["l2_error"]), float(row["energy"]),
                                  float(row["centroid"])))
        return out


def edge_centroid(f: SpinorField, geometry: EdgeGeometry) -> float:
    """Density-weighted position along the edge.

    Circular mean of the polar angle for a circle (in ``[0, 2pi)``), mean of ``x2``
    otherwise.
    """
    w = f.density()
    total = w.sum()
    if total * f.grid.cell_area < 1e-12:
        raise ValueError("field carries no weight")
    X1, X2 = f.grid.mesh()
    if isinstance(geometry, CircleEdge):
        theta = np.arctan2(X2, X1)
        ang = np.arctan2(np.sum(w * np.sin(theta)), np.sum(w * np.cos(theta)))
        return float(np.mod(ang, 2 * np.pi))
    return float(np.sum(w * X2) / total)


def unwrap_centroids(values, geometry: EdgeGeometry) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.unwrap(values) if isinstance(geometry, CircleEdge) else values


def error_vs_ansatz(times, fields, ansatz, geometry: EdgeGeometry) -> ErrorSeries:
    """Pair each numerical field with the ansatz sampled at the same time."""
    series = ErrorSeries()
    for t, f in zip(times, fields):
        ref = ansatz.sample(f.grid, t)
        series.append(Sample(float(t), l2_distance(f, ref), energy(f), edge_centroid(f, geometry)))
    return series


def chirality_sign(times, centroids, geometry: EdgeGeometry, noise: float = 1e-6) -> int:
    """Sign of the centroid drift along the edge's positive orientation.

    Positive orientation keeps the positive mass on the right: ``+x2`` for the
    vertical and perturbed edges (mass positive at large ``x1``), counterclockwise
    for the circle (mass positive outside).
    """
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("need at least two samples")
    c = unwrap_centroids(centroids, geometry)
    drift = np.polyfit(times, c, 1)[0]
    if abs(drift) < noise:
        raise ValueError(f"centroid drift {drift:.3g} is below the noise threshold")
    return int(np.sign(drift))


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    residual_rms: float
    points: list[tuple[float, float]]

    def predict(self, p):
        return np.exp(self.intercept) * np.asarray(p, dtype=float) ** self.slope

    def to_json(self, path=None, **extra) -> str:
        text = json.dumps({**asdict(self), **extra}, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def power_law_fit(params, errors) -> PowerLawFit:
    """Least-squares line through ``(ln p, ln e)``."""
    p = np.asarray(params, dtype=float)
    e = np.asarray(errors, dtype=float)
    if p.size != e.size:
        raise ValueError("params and errors differ in length")
    if p.size < 3:
        raise ValueError("a power-law fit needs at least 3 points")
    if np.any(p <= 0) or np.any(e <= 0):
        raise ValueError("power-law fit needs positive parameters and errors")
    lp, le = np.log(p), np.log(e)
    A = np.vstack([lp, np.ones_like(lp)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, le, rcond=None)
    resid = le - (slope * lp + intercept)
    return PowerLawFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))),
                       [(float(a), float(b)) for a, b in zip(lp, le)])
