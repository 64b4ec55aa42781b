"""Discretization substrate: periodic Fourier grid in x, Hermite eigenbasis in y.

Two-dimensional fields are stored as arrays of shape ``(n_x, m_y)`` holding
node values ``psi(x_i, y_j)``; the y nodes are Gauss-Hermite points and the
matching quadrature weights are folded (``w_j * exp(y_j**2)``) so that

    sum_j weights[j] * f(y_j) * g(y_j) == integral f g dy

exactly whenever ``f`` and ``g`` lie in the span of the first ``m_y`` Hermite
functions. One-dimensional fields are plain arrays of length ``n_x``.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import erf

from .errors import ConfigurationError

PI_M14 = np.pi ** -0.25


def hermite_functions(y, m):
    """Orthonormal Hermite functions ``h_0..h_{m-1}`` at points ``y``.

    Returns an array of shape ``(len(y), m)``. Uses the three-term recurrence,
    which is stable well past the largest Gauss-Hermite node for m <= 256.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape + (m,))
    out[..., 0] = PI_M14 * np.exp(-0.5 * y**2)
    if m > 1:
        out[..., 1] = np.sqrt(2.0) * y * out[..., 0]
    for n in range(1, m - 1):
        out[..., n + 1] = (np.sqrt(2.0 / (n + 1)) * y * out[..., n]
                           - np.sqrt(n / (n + 1)) * out[..., n - 1])
    return out


def hermite_antiderivatives(y, m):
    """``I_n(y) = integral_{-inf}^{y} h_n`` for n < m, shape ``(len(y), m)``.

    From h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}:
    I_{n+1} = sqrt(n/(n+1)) I_{n-1} - sqrt(2/(n+1)) h_n.
    """
    y = np.asarray(y, dtype=float)
    h = hermite_functions(y, max(m, 1))
    out = np.empty(y.shape + (m,))
    out[..., 0] = PI_M14 * np.sqrt(np.pi / 2.0) * (1.0 + erf(y / np.sqrt(2.0)))
    if m > 1:
        out[..., 1] = -np.sqrt(2.0) * h[..., 0]
    for n in range(1, m - 1):
        out[..., n + 1] = (np.sqrt(n / (n + 1)) * out[..., n - 1]
                           - np.sqrt(2.0 / (n + 1)) * h[..., n])
    return out


def hermite_integrals(m):
    """Full-line integrals of ``h_0..h_{m-1}`` (odd ones vanish)."""
    out = np.zeros(m)
    out[0] = PI_M14 * np.sqrt(2.0 * np.pi)
    for n in range(1, m - 1):
        out[n + 1] = np.sqrt(n / (n + 1)) * out[n - 1]
    return out


@dataclass(frozen=True)
class GridX:
    """Uniform periodic grid on ``[-l_x, l_x)``."""

    n_x: int = 256
    l_x: float = 12.0
    nodes: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n_x)
        if n < 16 or n & (n - 1):
            raise ConfigurationError(
                f"grid.n_x must be a power of two >= 16, got {self.n_x}", key="grid.n_x")
        if not self.l_x > 0:
            raise ConfigurationError(f"grid.l_x must be positive, got {self.l_x}", key="grid.l_x")
        dx = 2.0 * self.l_x / n
        nodes = -self.l_x + dx * np.arange(n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
        # unpaired Nyquist mode dropped: keeps d/dx real and exactly skew
        k[n // 2] = 0.0
        nodes.flags.writeable = False
        k.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "wavenumbers", k)

    @property
    def dx(self):
        return 2.0 * self.l_x / self.n_x


@dataclass(frozen=True)
class HermiteBasisY:
    """Gauss-Hermite collocation for the eigenfunctions of ``-d_y^2 + y^2``.

    ``mode_matrix[j, k]`` is the (k+1)-th eigenfunction at node j, with
    eigenvalue ``eigenvalues[k] = 2k + 1``.
    """

    m_y: int = 64
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    eigenvalues: np.ndarray = field(init=False, repr=False)
    mode_matrix: np.ndarray = field(init=False, repr=False)
    analysis_matrix: np.ndarray = field(init=False, repr=False)
    sgn_matrix: np.ndarray = field(init=False, repr=False)
    diff_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = int(self.m_y)
        if m < 2:
            raise ConfigurationError(f"grid.m_y must be >= 2, got {self.m_y}", key="grid.m_y")
        y, _ = hermgauss(m)
        # symmetrize so f(-y) = -f(y) holds bitwise on mirrored nodes
        y = 0.5 * (y - y[::-1])
        U = hermite_functions(y, m)
        # Christoffel numbers of the orthonormal Hermite functions = folded weights
        w = 1.0 / np.sum(U**2, axis=1)
        w = 0.5 * (w + w[::-1])
        A = (U * w[:, None]).T  # node values -> mode coefficients
        # sgn-kernel convolution of the Hermite interpolant, evaluated at nodes:
        # (sgn * rho)(y) = 2 F(y) - F(inf), F the running integral
        anti = hermite_antiderivatives(y, m)
        total = hermite_integrals(m)
        S = (2.0 * anti - total[None, :]) @ A
        # d/dy in mode space: h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}, top mode truncated
        D = np.zeros((m, m))
        n = np.arange(m)
        D[n[:-1], n[1:]] = np.sqrt(n[1:] / 2.0)
        D[n[1:], n[:-1]] = -np.sqrt(n[1:] / 2.0)
        for name, val in (("nodes", y), ("weights", w), ("eigenvalues", 2.0 * n + 1.0),
                          ("mode_matrix", U), ("analysis_matrix", A), ("sgn_matrix", S),
                          ("diff_matrix", D)):
            val.flags.writeable = False
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class SpectralWorkspace:
    """Immutable bundle of the x grid and y basis; safe to share across threads."""

    grid_x: GridX
    basis_y: HermiteBasisY

    @property
    def shape(self):
        return (self.grid_x.n_x, self.basis_y.m_y)

    @property
    def x(self):
        return self.grid_x.nodes

    @property
    def y(self):
        return self.basis_y.nodes


def make_workspace(n_x=256, l_x=12.0, m_y=64):
    return SpectralWorkspace(GridX(n_x, l_x), HermiteBasisY(m_y))


def _check_2d(psi, ws):
    psi = np.asarray(psi)
    if psi.shape != ws.shape:
        raise ConfigurationError(
            f"field shape {psi.shape} does not match workspace shape {ws.shape}")
    return psi


def _check_x(psi, ws):
    psi = np.asarray(psi)
    if psi.shape[0] != ws.grid_x.n_x:
        raise ConfigurationError(
            f"field has {psi.shape[0]} x-nodes, workspace has {ws.grid_x.n_x}")
    return psi


def to_hermite(psi, ws):
    """Mode coefficients ``c[i, k] = sum_j w_j psi(x_i, y_j) u_k(y_j)``."""
    psi = _check_2d(psi, ws)
    return psi @ ws.basis_y.analysis_matrix.T


def from_hermite(c, ws):
    """Node values from mode coefficients; inverse of :func:`to_hermite`."""
    c = _check_2d(c, ws)
    return c @ ws.basis_y.mode_matrix.T


def diff_x(psi, ws):
    """Spectral derivative along x (axis 0); works for 1D and 2D fields."""
    psi = _check_x(psi, ws)
    k = ws.grid_x.wavenumbers
    if psi.ndim == 2:
        k = k[:, None]
    out = np.fft.ifft(1j * k * np.fft.fft(psi, axis=0), axis=0)
    return out.real if np.isrealobj(psi) else out


def diff_y(psi, ws):
    """Derivative along y, exact on the first ``m_y - 1`` modes."""
    c = to_hermite(psi, ws)
    return from_hermite(c @ ws.basis_y.diff_matrix.T, ws)


def apply_h_y(psi, ws):
    """``(-d_y^2 + y^2) psi`` evaluated diagonally in the eigenbasis."""
    c = to_hermite(psi, ws)
    return from_hermite(c * ws.basis_y.eigenvalues, ws)


def apply_h_x(psi, ws):
    """``(-d_x^2 + x^2) psi`` for 1D or 2D fields."""
    psi = _check_x(psi, ws)
    k2 = ws.grid_x.wavenumbers**2
    x2 = ws.grid_x.nodes**2
    if psi.ndim == 2:
        k2, x2 = k2[:, None], x2[:, None]
    kin = np.fft.ifft(k2 * np.fft.fft(psi, axis=0), axis=0)
    return (kin.real if np.isrealobj(psi) else kin) + x2 * psi


def integrate(f, ws):
    """Quadrature of a 1D or 2D integrand (trapezoid in x, folded Gauss in y)."""
    f = _check_x(f, ws)
    dx = ws.grid_x.dx
    if f.ndim == 1:
        return dx * np.sum(f)
    return dx * np.sum(f @ ws.basis_y.weights)


def inner(a, b, ws):
    """``<a, b> = integral conj(a) b``."""
    return integrate(np.conj(a) * b, ws)


def mass(psi, ws):
    return float(integrate(np.abs(psi) ** 2, ws).real)


def norm(psi, ws):
    return np.sqrt(mass(psi, ws))


def normalize(psi, ws):
    return psi / norm(psi, ws)


def propagate_linear_y(psi, dt, eps, ws, imaginary=False):
    """Exact flow of ``i d_t psi = (1/eps) H_y psi`` over ``dt``.

    With ``imaginary=True`` the decay ``exp(-dt lambda_k / eps)`` is applied
    instead of the phase.
    """
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    lam = ws.basis_y.eigenvalues
    factor = np.exp(-dt * lam / eps) if imaginary else np.exp(-1j * dt * lam / eps)
    return from_hermite(to_hermite(psi, ws) * factor, ws)


def parseval_mass(psi, ws):
    """Mass computed from Hermite coefficients; equals :func:`mass` on resolved fields."""
    c = to_hermite(psi, ws)
    return float(ws.grid_x.dx * np.sum(np.abs(c) ** 2))
