"""Closed-form edge states: exact straight-edge waves and the circle / curved-edge ansaetze.

All evaluators take ``(t, x1, x2)`` with array ``x1, x2`` and return the pair
``(beta1, beta2)``.  Residual functions return ``(i d/dt + D)`` applied to the
corresponding ansatz, where ``D`` is the Dirac operator with the matching mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .fields import GridSpec, SpinorField, energy
from .mass import (CircleEdge, MassModel, PerturbedEdge, StraightEdge, TransitionProfile)


class ChiProfile:
    """Transverse bound state ``chi(u) = C exp(-int_0^u m)``, normalized in L2(R)."""

    def __init__(self, profile: TransitionProfile):
        self.profile = profile
        self.C = self._normalization()

    def _normalization(self) -> float:
        p = self.profile
        if p.kind == "tanh":
            # int cosh(u)^(-2 m) du = B(1/2, m)
            return float(1 / np.sqrt(special.beta(0.5, p.m_inf)))
        if p.kind == "sign":
            return float(np.sqrt(p.m_inf))
        val, err = integrate.quad(lambda s: np.exp(-2 * p.antiderivative(s)), -np.inf, np.inf,
                                  limit=400)
        if not np.isfinite(val) or val <= 0 or err > 1e-8 * val:
            raise ArithmeticError("could not normalize chi for this profile")
        return float(1 / np.sqrt(val))

    def __call__(self, u):
        return self.C * np.exp(-self.profile.antiderivative(u))

    def derivative(self, u):
        return -self.profile(u) * self(u)


def chi(profile: TransitionProfile, u):
    return ChiProfile(profile)(u)


class GaussianEnvelope:
    """``g(v) = exp(-(v - center)^2 / (2 width^2))`` on the real line."""

    def __init__(self, center: float = 0.0, width: float = 1.0):
        if not width > 0:
            raise ValueError("width must be positive")
        self.center = float(center)
        self.width = float(width)

    def __call__(self, v):
        z = (np.asarray(v) - self.center) / self.width
        return np.exp(-0.5 * z * z)

    def derivative(self, v):
        z = (np.asarray(v) - self.center) / self.width
        return -z / self.width * np.exp(-0.5 * z * z)


class PeriodicBump:
    """Smooth 2pi-periodic bump ``exp(kappa (cos(theta - center) - 1))``."""

    def __init__(self, center: float = np.pi, kappa: float = 40.0):
        if not kappa > 0:
            raise ValueError("kappa must be positive")
        self.center = float(center)
        self.kappa = float(kappa)

    @property
    def width(self) -> float:
        return 1 / np.sqrt(self.kappa)

    def __call__(self, theta):
        return np.exp(self.kappa * (np.cos(np.asarray(theta) - self.center) - 1))

    def derivative(self, theta):
        d = np.asarray(theta) - self.center
        return -self.kappa * np.sin(d) * np.exp(self.kappa * (np.cos(d) - 1))


def rotation_spinor(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def spinor_factor(theta):
    """Polarization ``(cos theta/2, i sin theta/2)`` carried by edge states."""
    return np.cos(np.asarray(theta) / 2), 1j * np.sin(np.asarray(theta) / 2)


def plane_wave(chi_: ChiProfile, theta: float, lam: float, t, x1, x2):
    edge = StraightEdge(theta)
    u, v = edge.coordinate(x1, x2), edge.tangential(x1, x2)
    amp = chi_(u) * np.exp(1j * lam * (v - t))
    c, s = spinor_factor(theta)
    return amp * c, amp * s


def straight_traveling(chi_: ChiProfile, theta: float, g, t, x1, x2):
    edge = StraightEdge(theta)
    u, v = edge.coordinate(x1, x2), edge.tangential(x1, x2)
    amp = chi_(u) * g(v - t)
    c, s = spinor_factor(theta)
    return amp * c, amp * s


class CirclePhi:
    """Radial profile for the circle ansatz.

    Zero on ``[0, R/3]``, ``chi(r - R) exp(-r / 2R) / sqrt(R)`` on ``[R/2, inf)``,
    and a smoothstep blend of the outer formula in between, so the result is C^1.
    """

    def __init__(self, chi_: ChiProfile, R: float):
        if not R > 3 * chi_.profile.r0:
            raise ValueError(f"R={R} must exceed 3*r0={3 * chi_.profile.r0:.4g}")
        self.chi = chi_
        self.R = float(R)

    def _outer(self, r):
        R = self.R
        return self.chi(r - R) * np.exp(-r / (2 * R)) / np.sqrt(R)

    def _outer_derivative(self, r):
        return self._outer(r) * (-self.chi.profile(r - self.R) - 1 / (2 * self.R))

    def _blend(self, r):
        R = self.R
        s = np.clip((r - R / 3) / (R / 6), 0.0, 1.0)
        w = s * s * (3 - 2 * s)
        dw = 6 * s * (1 - s) / (R / 6)
        return w, dw

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        w, _ = self._blend(r)
        return w * self._outer(r)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        w, dw = self._blend(r)
        return dw * self._outer(r) + w * self._outer_derivative(r)


def circle_phi(profile: TransitionProfile, R: float, r):
    return CirclePhi(ChiProfile(profile), R)(r)


def _polar_angle(x1, x2, t, R, g, branch):
    """Angle used in the spinor factor.

    ``"fixed"`` uses ``[0, 2pi)``.  ``"moving"`` puts the cut opposite the packet
    centre ``g.center + t/R`` so the angle stays continuous along the packet path.
    """
    raw = np.arctan2(x2, x1)
    if branch == "fixed":
        return np.mod(raw, 2 * np.pi)
    if branch == "moving":
        lo = g.center + t / R - np.pi
        return lo + np.mod(raw - lo, 2 * np.pi)
    raise ValueError(f"unknown branch {branch!r}")


def circle_ansatz(phi: CirclePhi, g, t, x1, x2, branch: str = "moving"):
    R = phi.R
    r = np.hypot(x1, x2)
    theta = _polar_angle(x1, x2, t, R, g, branch)
    amp = phi(r) * g(theta - t / R)
    c, s = spinor_factor(theta)
    return amp * c, amp * s


def circle_residual(phi: CirclePhi, g, t, x1, x2, branch: str = "moving"):
    R = phi.R
    r = np.hypot(x1, x2)
    theta = _polar_angle(x1, x2, t, R, g, branch)
    m = phi.chi.profile(r - R)
    p, dp = phi(r), phi.derivative(r)
    safe_r = np.where(r > 0, r, 1.0)
    radial = np.where(r > 0, dp + m * p + p / (2 * safe_r), 0.0)
    angular = np.where(r > 0, (1 / safe_r - 1 / R) * p, 0.0)
    G, dG = g(theta - t / R), g.derivative(theta - t / R)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    r1 = 1j * (radial * G * s + angular * dG * c)
    r2 = radial * G * c - angular * dG * s
    return r1, r2


def curved_ansatz(chi_: ChiProfile, edge: PerturbedEdge, g, t, x1, x2):
    eps, p = edge.epsilon, edge.perturbation
    y = edge.coordinate(x1, x2)
    a = eps * p.dh(eps * np.asarray(x2))
    b1 = chi_(y) * g(-a * y + x2 - t)
    return b1, 0.5j * a * b1


def curved_residual(chi_: ChiProfile, edge: PerturbedEdge, g, t, x1, x2):
    eps, p = edge.epsilon, edge.perturbation
    s2 = eps * np.asarray(x2)
    y = edge.coordinate(x1, x2)
    h1, h2 = p.dh(s2), p.d2h(s2)
    arg = -eps * h1 * y + x2 - t
    X, dX = chi_(y), chi_.derivative(y)
    G, dG = g(arg), g.derivative(arg)
    r1 = -0.5j * eps**2 * X * dG * (h1**2 + 2 * y * h2)
    r2 = 0.5 * eps**2 * (X * G * h2 + dX * G * h1**2
                         - eps * y * X * dG * h1 * h2 - eps * X * dG * h1**3)
    return r1, r2


class AnsatzSolution:
    """Grid-level wrapper around a closed-form solution.

    ``scale`` multiplies every evaluation; :meth:`normalize` fixes it once so the
    sampled field has unit energy at ``t = 0``.
    """

    geometry_tag = "abstract"
    scale = 1.0

    def pointwise(self, t, x1, x2):
        raise NotImplementedError

    def __call__(self, t, x1, x2):
        b1, b2 = self.pointwise(t, x1, x2)
        return self.scale * b1, self.scale * b2

    def sample(self, grid: GridSpec, t: float = 0.0) -> SpinorField:
        X1, X2 = grid.mesh()
        b1, b2 = self(t, X1, X2)
        return SpinorField(b1, b2, grid)

    def normalize(self, grid: GridSpec) -> "AnsatzSolution":
        self.scale = 1.0
        self.scale = 1 / np.sqrt(energy(self.sample(grid, 0.0)))
        return self


@dataclass
class PlaneWaveSolution(AnsatzSolution):
    chi: ChiProfile
    theta: float
    lam: float
    geometry_tag = "straight"

    def pointwise(self, t, x1, x2):
        return plane_wave(self.chi, self.theta, self.lam, t, x1, x2)


@dataclass
class StraightSolution(AnsatzSolution):
    chi: ChiProfile
    theta: float
    envelope: GaussianEnvelope
    geometry_tag = "straight"

    def pointwise(self, t, x1, x2):
        return straight_traveling(self.chi, self.theta, self.envelope, t, x1, x2)

    @property
    def mass_model(self) -> MassModel:
        return MassModel(self.chi.profile, StraightEdge(self.theta))


@dataclass
class CircleSolution(AnsatzSolution):
    phi: CirclePhi
    envelope: PeriodicBump
    branch: str = "moving"
    geometry_tag = "circle"

    def pointwise(self, t, x1, x2):
        return circle_ansatz(self.phi, self.envelope, t, x1, x2, self.branch)

    def residual(self, t, x1, x2):
        r1, r2 = circle_residual(self.phi, self.envelope, t, x1, x2, self.branch)
        return self.scale * r1, self.scale * r2

    def cut_weight(self, t: float) -> float:
        """Envelope value at the spinor branch cut, relative to its peak."""
        R, g = self.phi.R, self.envelope
        cut = 0.0 if self.branch == "fixed" else g.center + t / R - np.pi
        return float(g(cut - t / R) / g(g.center))

    @property
    def mass_model(self) -> MassModel:
        return MassModel(self.phi.chi.profile, CircleEdge(self.phi.R))


@dataclass
class CurvedSolution(AnsatzSolution):
    chi: ChiProfile
    edge: PerturbedEdge
    envelope: GaussianEnvelope
    geometry_tag = "perturbed"

    def pointwise(self, t, x1, x2):
        return curved_ansatz(self.chi, self.edge, self.envelope, t, x1, x2)

    def residual(self, t, x1, x2):
        r1, r2 = curved_residual(self.chi, self.edge, self.envelope, t, x1, x2)
        return self.scale * r1, self.scale * r2

    @property
    def mass_model(self) -> MassModel:
        return MassModel(self.chi.profile, self.edge)
