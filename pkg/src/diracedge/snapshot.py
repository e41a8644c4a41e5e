"""Raw binary field snapshots with a JSON sidecar.

Layout: little-endian float64, ``[re beta1, im beta1, re beta2, im beta2]`` per grid
point, x1 varying fastest.  The sidecar holds ``bounds``, ``n1``, ``n2``, ``t`` and
``geometry``.  One-dimensional eigenvectors use the same record layout with
``n2 = 1``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fields import SpinorField, make_grid

_DTYPE = np.dtype("<f8")


def _records(b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    # arrays are indexed [i1, i2]; transpose so x1 is the fastest index in C order
    out = np.empty(b1.T.shape + (4,), dtype=_DTYPE)
    out[..., 0], out[..., 1] = b1.T.real, b1.T.imag
    out[..., 2], out[..., 3] = b2.T.real, b2.T.imag
    return out


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_snapshot(path, f: SpinorField, t: float, geometry: str) -> Path:
    path = Path(path)
    g = f.grid
    path.write_bytes(_records(f.beta1, f.beta2).tobytes())
    header = {"bounds": [g.x1_min, g.x1_max, g.x2_min, g.x2_max], "n1": g.n1, "n2": g.n2,
              "t": float(t), "geometry": geometry}
    sidecar_path(path).write_text(json.dumps(header, indent=2) + "\n")
    return path


def read_snapshot(path) -> tuple[SpinorField, dict]:
    path = Path(path)
    header = json.loads(sidecar_path(path).read_text())
    n1, n2 = header["n1"], header["n2"]
    raw = np.fromfile(path, dtype=_DTYPE)
    if raw.size != 4 * n1 * n2:
        raise ValueError(f"{path}: expected {4 * n1 * n2} values, found {raw.size}")
    rec = raw.reshape(n2, n1, 4)
    b1 = (rec[..., 0] + 1j * rec[..., 1]).T
    b2 = (rec[..., 2] + 1j * rec[..., 3]).T
    grid = make_grid(tuple(header["bounds"]), n1, n2)
    return SpinorField(b1, b2, grid), header


def write_vector_1d(path, u: np.ndarray, vector: np.ndarray, lam: float, omega: float) -> Path:
    """Dump a ``(2, n)`` eigenvector in the snapshot record layout."""
    path = Path(path)
    vector = np.asarray(vector, dtype=complex)
    path.write_bytes(_records(vector[0][:, None], vector[1][:, None]).tobytes())
    h = float(u[1] - u[0])
    header = {"bounds": [float(u[0]), float(u[0] + h * len(u))], "n1": len(u), "n2": 1,
              "lambda": float(lam), "omega": float(omega), "geometry": "line1d"}
    sidecar_path(path).write_text(json.dumps(header, indent=2) + "\n")
    return path


def read_vector_1d(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    header = json.loads(sidecar_path(path).read_text())
    rec = np.fromfile(path, dtype=_DTYPE).reshape(header["n1"], 4)
    return np.stack([rec[:, 0] + 1j * rec[:, 1], rec[:, 2] + 1j * rec[:, 3]]), header
