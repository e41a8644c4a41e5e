"""Spectrum of the 1D Dirac operator ``D_lam = [[-lam, m - d/du], [m + d/du, lam]]``.

The derivative is the periodic fourth-order central difference, so the matrix is
real symmetric.  Two kinds of spurious in-gap states come with that choice:
fermion doublers of the central stencil, and modes bound to the reversed mass
jump at the periodic wrap.  They sit near ``+lam`` or at the box edge, so the
physical edge mode is picked out by its weight in the upper component near
``u = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .mass import TransitionProfile

_STENCIL = ((1, 8 / 12), (-1, -8 / 12), (2, -1 / 12), (-2, 1 / 12))


@dataclass(frozen=True)
class Dirac1DProblem:
    lam: float
    profile: TransitionProfile
    u_min: float = -30.0
    u_max: float = 30.0
    n: int = 1024

    def __post_init__(self):
        if self.n < 64:
            raise ValueError("need at least 64 grid points")
        if not np.isclose(self.u_min, -self.u_max) or self.u_max <= 0:
            raise ValueError("u-range must be symmetric about 0")
        from .ansatz import ChiProfile

        chi = ChiProfile(self.profile)
        tail = max(chi(self.u_min), chi(self.u_max))
        if tail >= 1e-10:
            raise ValueError(f"u-range too narrow: chi at the boundary is {tail:.2e}")

    @property
    def h(self) -> float:
        return (self.u_max - self.u_min) / self.n

    @property
    def u(self) -> np.ndarray:
        return self.u_min + self.h * np.arange(self.n)

    def with_lambda(self, lam: float) -> "Dirac1DProblem":
        return Dirac1DProblem(lam, self.profile, self.u_min, self.u_max, self.n)


@dataclass
class EigenPair:
    omega: float
    vector: np.ndarray  # shape (2, n), unit norm in the discrete L2 (weight h)


def derivative_matrix(n: int, h: float) -> np.ndarray:
    K = np.zeros((n, n))
    rows = np.arange(n)
    for off, c in _STENCIL:
        K[rows, (rows + off) % n] += c / h
    return K


def assemble(problem: Dirac1DProblem) -> np.ndarray:
    n, lam = problem.n, problem.lam
    B = np.diag(problem.profile(problem.u)) + derivative_matrix(n, problem.h)
    eye = np.eye(n)
    return np.block([[-lam * eye, B.T], [B, lam * eye]])


def essential_spectrum_edge(lam: float, m_inf: float = 1.0) -> float:
    return float(np.hypot(lam, m_inf))


def _as_pairs(problem, w, V):
    n, h = problem.n, problem.h
    return [EigenPair(float(w[i]), V[:, i].reshape(2, n) / np.sqrt(h)) for i in range(len(w))]


def eigenpairs(problem: Dirac1DProblem, k: int | None = None) -> list[EigenPair]:
    """All (or the ``k`` smallest-``|omega|``) eigenpairs, smallest ``|omega|`` first."""
    try:
        w, V = sla.eigh(assemble(problem))
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigensolver did not converge") from exc
    order = np.argsort(np.abs(w), kind="stable")
    if k is not None:
        order = order[:k]
    return _as_pairs(problem, w[order], V[:, order])


def in_gap_pairs(problem: Dirac1DProblem) -> list[EigenPair]:
    """Eigenpairs with ``|omega|`` below the continuum edge minus a ``5 h^2`` margin."""
    edge = essential_spectrum_edge(problem.lam, problem.profile.m_inf) - 5 * problem.h**2
    try:
        w, V = sla.eigh(assemble(problem), subset_by_value=(-edge, edge), driver="evr")
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigensolver did not converge") from exc
    return _as_pairs(problem, w, V)


def _center_weight(problem: Dirac1DProblem) -> np.ndarray:
    """Diagonal weight selecting the upper component on ``|u| < u_max / 2``."""
    n = problem.n
    mask = np.zeros(2 * n)
    mask[:n] = np.abs(problem.u) < problem.u_max / 2
    return mask


def gap_mode(problem: Dirac1DProblem, cluster_tol: float = 1e-8,
             min_weight: float = 0.5) -> EigenPair | None:
    """The physical edge mode, or ``None`` if no in-gap state is edge-localized.

    Near-degenerate in-gap eigenvalues (closer than ``cluster_tol``) are treated as
    one eigenspace, rotated to maximize edge-localized upper-component weight.
    """
    pairs = in_gap_pairs(problem)
    if not pairs:
        return None
    h = problem.h
    weight = _center_weight(problem)
    omegas = np.array([p.omega for p in pairs])
    clusters, start = [], 0
    for i in range(1, len(omegas) + 1):
        if i == len(omegas) or omegas[i] - omegas[i - 1] > cluster_tol:
            clusters.append(range(start, i))
            start = i
    best, best_score = None, min_weight
    for idx in clusters:
        V = np.stack([pairs[i].vector.ravel() * np.sqrt(h) for i in idx], axis=1)
        W = V.conj().T @ (weight[:, None] * V)
        vals, vecs = np.linalg.eigh(W)
        if vals[-1] > best_score:
            v = V @ vecs[:, -1]
            best_score = vals[-1]
            omega = float(np.mean(omegas[list(idx)]))
            best = EigenPair(omega, v.reshape(2, -1) / np.sqrt(h))
    return best


def mode_residual(problem: Dirac1DProblem) -> float:
    """``||(D_lam + lam)(chi, 0)|| / ||chi||`` for the sampled closed-form ``chi``."""
    from .ansatz import ChiProfile

    x = ChiProfile(problem.profile)(problem.u)
    v = np.concatenate([x, np.zeros_like(x)])
    r = assemble(problem) @ v + problem.lam * v
    return float(np.linalg.norm(r) / np.linalg.norm(x))


@dataclass
class DispersionRow:
    lam: float
    omega_gap: float  # NaN when no edge mode is found
    edge: float


def dispersion_scan(lambda_values, template: Dirac1DProblem) -> list[DispersionRow]:
    rows = []
    for lam in lambda_values:
        prob = template.with_lambda(float(lam))
        mode = gap_mode(prob)
        rows.append(DispersionRow(float(lam), np.nan if mode is None else mode.omega,
                                  essential_spectrum_edge(lam, prob.profile.m_inf)))
    return rows


def gap_branch_slope(rows: list[DispersionRow]) -> float:
    lam = np.array([r.lam for r in rows if np.isfinite(r.omega_gap)])
    om = np.array([r.omega_gap for r in rows if np.isfinite(r.omega_gap)])
    if lam.size < 2:
        raise ValueError("need at least two gap eigenvalues to fit a slope")
    return float(np.polyfit(lam, om, 1)[0])
