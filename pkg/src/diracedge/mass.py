"""Edge-admissible masses ``m(f(x))``: a transition profile composed with an edge geometry."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .fields import GridSpec

TANH_R0 = float(np.arctanh(0.5))


class TransitionProfile:
    """Odd-looking transition ``u -> m(u)`` with limits ``-m_inf`` and ``+m_inf``.

    ``kind`` is ``"tanh"`` (``m_inf * tanh(u)``), ``"sign"`` (``m_inf * sign(u)``)
    or ``"custom"``, in which case ``func`` supplies the profile.  ``r0`` bounds the
    transition layer: ``|m(u)| > m_inf / 2`` whenever ``|u| > r0``.

    Custom profiles are assumed to approach ``+-m_inf`` exponentially fast; a slow
    tail still evaluates but the circle error constants no longer apply.
    """

    def __init__(self, kind: str = "tanh", m_inf: float = 1.0, r0: float | None = None,
                 func: Callable | None = None):
        if kind not in ("tanh", "sign", "custom"):
            raise ValueError(f"unknown profile kind {kind!r}")
        if not m_inf > 0:
            raise ValueError("m_inf must be positive")
        if kind == "custom" and func is None:
            raise ValueError("custom profile needs func")
        if r0 is None:
            r0 = {"tanh": TANH_R0, "sign": 0.1}.get(kind)
            if r0 is None:
                raise ValueError("custom profile needs an explicit r0")
        if not r0 > 0:
            raise ValueError("r0 must be positive")
        self.kind = kind
        self.m_inf = float(m_inf)
        self.r0 = float(r0)
        self.func = func

    def __repr__(self):
        return f"TransitionProfile(kind={self.kind!r}, m_inf={self.m_inf}, r0={self.r0:.6g})"

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "tanh":
            return self.m_inf * np.tanh(u)
        if self.kind == "sign":
            return self.m_inf * np.sign(u)
        return np.asarray(np.vectorize(self.func, otypes=[float])(u))

    def antiderivative(self, u):
        """``int_0^u m(s) ds``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "tanh":
            au = np.abs(u)
            # log(cosh u) without overflow
            return self.m_inf * (au + np.log1p(np.exp(-2 * au)) - np.log(2.0))
        if self.kind == "sign":
            return self.m_inf * np.abs(u)
        return _custom_antiderivative(self, u)


def _custom_antiderivative(profile: TransitionProfile, u: np.ndarray) -> np.ndarray:
    flat = u.ravel()
    if flat.size <= 64:
        out = np.empty_like(flat)
        for i, val in enumerate(flat):
            res, err = integrate.quad(profile.func, 0.0, val, limit=200, epsabs=1e-13, epsrel=1e-12)
            if not np.isfinite(res) or err > 1e-8 * max(1.0, abs(res)):
                raise ArithmeticError(f"quadrature of the mass profile did not converge at u={val}")
            out[i] = res
        return out.reshape(u.shape)
    # Large arrays: dense table of the running integral, then spline lookup.
    lo, hi = min(flat.min(), 0.0), max(flat.max(), 0.0)
    nodes = np.linspace(lo, hi, max(4001, int(40 * (hi - lo)) + 1))
    running = integrate.cumulative_simpson(profile(nodes), x=nodes, initial=0.0)
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(nodes, running)
    return (spline(flat) - spline(0.0)).reshape(u.shape)


class EdgeGeometry:
    """Base for edge curves ``{x : f(x) = 0}``; ``coordinate`` evaluates ``f``."""

    tag = "abstract"

    def coordinate(self, x1, x2):
        raise NotImplementedError


@dataclass(frozen=True)
class StraightEdge(EdgeGeometry):
    """Line through the origin with normal ``(cos theta, sin theta)``."""

    theta: float = 0.0
    tag = "straight"

    @property
    def normal(self) -> np.ndarray:
        return np.array([np.cos(self.theta), np.sin(self.theta)])

    @property
    def tangent(self) -> np.ndarray:
        return np.array([-np.sin(self.theta), np.cos(self.theta)])

    def coordinate(self, x1, x2):
        return np.cos(self.theta) * np.asarray(x1) + np.sin(self.theta) * np.asarray(x2)

    def tangential(self, x1, x2):
        return -np.sin(self.theta) * np.asarray(x1) + np.cos(self.theta) * np.asarray(x2)


@dataclass(frozen=True)
class CircleEdge(EdgeGeometry):
    """Circle of radius ``R`` about the origin; positive mass outside."""

    R: float
    tag = "circle"

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("circle radius must be positive")

    def coordinate(self, x1, x2):
        return np.hypot(x1, x2) - self.R


@dataclass(frozen=True)
class SinePerturbation:
    """``h(s) = amplitude * sin(frequency * s)`` with exact derivatives."""

    amplitude: float = 1.0
    frequency: float = 1.0

    def h(self, s):
        return self.amplitude * np.sin(self.frequency * s)

    def dh(self, s):
        return self.amplitude * self.frequency * np.cos(self.frequency * s)

    def d2h(self, s):
        return -self.amplitude * self.frequency**2 * np.sin(self.frequency * s)

    @property
    def period(self) -> float:
        return 2 * np.pi / abs(self.frequency)


@dataclass(frozen=True)
class CallablePerturbation:
    """User-supplied ``h`` with analytic ``h'`` and ``h''``; ``period`` is optional."""

    h: Callable
    dh: Callable
    d2h: Callable
    period: float | None = None


@dataclass(frozen=True)
class PerturbedEdge(EdgeGeometry):
    """Slowly bent vertical line ``x1 + h(epsilon x2) = 0``."""

    perturbation: SinePerturbation | CallablePerturbation
    epsilon: float
    tag = "perturbed"

    def __post_init__(self):
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must lie in [0, 1)")
        probe = np.linspace(-50.0, 50.0, 201)
        p = self.perturbation
        for name, fn in (("h", p.h), ("h'", p.dh), ("h''", p.d2h)):
            if not np.all(np.isfinite(fn(probe))):
                raise ValueError(f"{name} is not finite on sample points")

    @property
    def period_x2(self) -> float | None:
        """Period of ``h(epsilon x2)`` in ``x2``, if ``h`` is periodic and ``epsilon > 0``."""
        if self.perturbation.period is None or self.epsilon == 0:
            return None
        return self.perturbation.period / self.epsilon

    def coordinate(self, x1, x2):
        return np.asarray(x1) + self.perturbation.h(self.epsilon * np.asarray(x2))


@dataclass(frozen=True)
class MassModel:
    profile: TransitionProfile
    geometry: EdgeGeometry

    def __post_init__(self):
        if isinstance(self.geometry, CircleEdge) and not self.geometry.R > 3 * self.profile.r0:
            raise ValueError(
                f"circle radius R={self.geometry.R} must exceed 3*r0={3 * self.profile.r0:.4g}"
            )

    def __call__(self, x1, x2):
        return eval_mass(self, x1, x2)


def signed_edge_coordinate(geometry: EdgeGeometry, x1, x2):
    return geometry.coordinate(x1, x2)


def eval_mass(model: MassModel, x1, x2):
    return model.profile(signed_edge_coordinate(model.geometry, x1, x2))


def sample_mass(model: MassModel, grid: GridSpec) -> np.ndarray:
    X1, X2 = grid.mesh()
    m = np.asarray(eval_mass(model, X1, X2), dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("mass is not finite on the grid")
    return m
