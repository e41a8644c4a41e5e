"""Independent reference computations shared by the tests."""

import numpy as np


def d4(f, h):
    """Fourth-order central difference of ``f(s)`` at ``s = 0``."""
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def apply_dirac_fd(beta, mass, t, x1, x2, h=1e-3):
    """``(i d/dt + D) beta`` by finite differences, ``D = [[i d2, m - d1], [m + d1, -i d2]]``.

    ``beta(t, x1, x2) -> (b1, b2)`` and ``mass(x1, x2)`` are evaluated pointwise.
    """
    def comp(k, which):
        if which == "t":
            return d4(lambda s: beta(t + s, x1, x2)[k], h)
        if which == 1:
            return d4(lambda s: beta(t, x1 + s, x2)[k], h)
        return d4(lambda s: beta(t, x1, x2 + s)[k], h)

    b1, b2 = beta(t, x1, x2)
    m = mass(x1, x2)
    r1 = 1j * comp(0, "t") + 1j * comp(0, 2) + m * b2 - comp(1, 1)
    r2 = 1j * comp(1, "t") + m * b1 + comp(0, 1) - 1j * comp(1, 2)
    return r1, r2


def symbol_expm(k1, k2, tau):
    """Reference ``exp(i tau A_k)`` by scipy's general matrix exponential."""
    from scipy.linalg import expm

    A = np.array([[-k2, -1j * k1], [1j * k1, k2]])
    return expm(1j * tau * A)


def constant_mass_evolution(b, grid, m0, T):
    """Exact flow of ``i d/dt beta + D beta = 0`` for constant mass, mode by mode.

    Each Fourier mode obeys ``d/dt b_k = i M_k b_k`` with
    ``M_k = [[-k2, m0 - i k1], [m0 + i k1, k2]]``.
    """
    from scipy.linalg import expm

    bh = np.fft.fft2(b, axes=(1, 2))
    k1, k2 = grid.wavenumbers()
    out = np.empty_like(bh)
    for i in range(grid.n1):
        for j in range(grid.n2):
            a, c = float(k1[i, 0]), float(k2[0, j])
            M = np.array([[-c, m0 - 1j * a], [m0 + 1j * a, c]])
            out[:, i, j] = expm(1j * T * M) @ bh[:, i, j]
    return np.fft.ifft2(out, axes=(1, 2))
