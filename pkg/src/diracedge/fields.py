"""Uniform periodic grids and two-component complex fields on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Periodic box ``[x1_min, x1_max) x [x2_min, x2_max)`` with ``n1 x n2`` nodes."""

    x1_min: float
    x1_max: float
    x2_min: float
    x2_max: float
    n1: int
    n2: int

    def __post_init__(self):
        if not (_is_power_of_two(self.n1) and _is_power_of_two(self.n2)):
            raise ValueError(f"grid sizes must be powers of two, got {self.n1}x{self.n2}")
        if not (self.x1_max > self.x1_min and self.x2_max > self.x2_min):
            raise ValueError("grid bounds are degenerate: need max > min on both axes")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x1_min, self.x1_max, self.x2_min, self.x2_max)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def dx1(self) -> float:
        return (self.x1_max - self.x1_min) / self.n1

    @property
    def dx2(self) -> float:
        return (self.x2_max - self.x2_min) / self.n2

    @property
    def cell_area(self) -> float:
        return self.dx1 * self.dx2

    @property
    def x1(self) -> np.ndarray:
        return self.x1_min + self.dx1 * np.arange(self.n1)

    @property
    def x2(self) -> np.ndarray:
        return self.x2_min + self.dx2 * np.arange(self.n2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as two ``(n1, n2)`` arrays (``ij`` indexing)."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular wavenumbers ``(k1, k2)`` broadcastable to the grid shape."""
        k1 = 2 * np.pi * np.fft.fftfreq(self.n1, d=self.dx1)
        k2 = 2 * np.pi * np.fft.fftfreq(self.n2, d=self.dx2)
        return k1[:, None], k2[None, :]


def make_grid(bounds, n1: int, n2: int) -> GridSpec:
    """Build a :class:`GridSpec` from ``(x1_min, x1_max, x2_min, x2_max)``."""
    x1_min, x1_max, x2_min, x2_max = (float(b) for b in bounds)
    return GridSpec(x1_min, x1_max, x2_min, x2_max, int(n1), int(n2))


def _check_components(grid: GridSpec, a, b, names) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for name, arr in zip(names, (a, b)):
        if arr.shape != grid.shape:
            raise ValueError(f"{name} has shape {arr.shape}, grid is {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains NaN or Inf")
    return a, b


@dataclass(frozen=True, eq=False)
class SpinorField:
    """The pair ``(beta1, beta2)`` sampled on ``grid``."""

    beta1: np.ndarray
    beta2: np.ndarray
    grid: GridSpec = field(repr=False)

    def __post_init__(self):
        b1, b2 = _check_components(self.grid, self.beta1, self.beta2, ("beta1", "beta2"))
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpinorField":
        return cls(np.zeros(grid.shape, complex), np.zeros(grid.shape, complex), grid)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "SpinorField":
        """Sample ``func(x1, x2) -> (beta1, beta2)`` at the grid nodes."""
        X1, X2 = grid.mesh()
        b1, b2 = func(X1, X2)
        return cls(np.broadcast_to(b1, grid.shape), np.broadcast_to(b2, grid.shape), grid)

    def stacked(self) -> np.ndarray:
        """Components as one ``(2, n1, n2)`` array (a copy)."""
        return np.stack([self.beta1, self.beta2])

    def density(self) -> np.ndarray:
        return np.abs(self.beta1) ** 2 + np.abs(self.beta2) ** 2

    def scaled(self, c) -> "SpinorField":
        return SpinorField(c * self.beta1, c * self.beta2, self.grid)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _require_same_grid(self, other)
        return SpinorField(self.beta1 - other.beta1, self.beta2 - other.beta2, self.grid)

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _require_same_grid(self, other)
        return SpinorField(self.beta1 + other.beta1, self.beta2 + other.beta2, self.grid)


@dataclass(frozen=True, eq=False)
class AlphaField:
    """The original unknowns ``(alpha1, alpha2)`` before the change of variables."""

    alpha1: np.ndarray
    alpha2: np.ndarray
    grid: GridSpec = field(repr=False)

    def __post_init__(self):
        a1, a2 = _check_components(self.grid, self.alpha1, self.alpha2, ("alpha1", "alpha2"))
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def energy(f: SpinorField) -> float:
    """Total energy: cell-sum quadrature of ``|beta1|^2 + |beta2|^2``."""
    return float(np.sum(f.density()) * f.grid.cell_area)


def l2_norm(f: SpinorField) -> float:
    return float(np.sqrt(energy(f)))


def l2_distance(a: SpinorField, b: SpinorField) -> float:
    return l2_norm(a - b)


def alpha_to_beta(a: AlphaField) -> SpinorField:
    return SpinorField(a.alpha1 + 1j * a.alpha2, a.alpha1 - 1j * a.alpha2, a.grid)


def beta_to_alpha(f: SpinorField) -> AlphaField:
    return AlphaField((f.beta1 + f.beta2) / 2, (f.beta1 - f.beta2) / 2j, f.grid)


def boundary_ratio(f: SpinorField, width: int = 2) -> float:
    """Largest magnitude on the outer ``width``-cell frame relative to the global max.

    Returns 0 for the zero field.
    """
    amp = np.sqrt(f.density())
    peak = amp.max()
    if peak == 0:
        return 0.0
    frame = max(
        amp[:width, :].max(), amp[-width:, :].max(), amp[:, :width].max(), amp[:, -width:].max()
    )
    return float(frame / peak)
