"""Gauge-field objects of the gauged, rescaled Chern-Simons-Schroedinger frame.

The only kernel needed after the change of gauge is the x-component of the
reduced field, ``(T0)_x(x, y) = -pi sgn(y) delta(x)``, which acts on each
x-slice as a one-dimensional sgn-convolution in y.  That convolution is taken
as the exact sgn-convolution of the Hermite interpolant of the integrand
(``HermiteBasisY.sgn_matrix``), evaluated back at the nodes.
"""

import numpy as np

from .errors import ConfigurationError, DomainError
from .spectral import diff_x, hermite_functions

NEGATIVE_DENSITY_SLACK = 1e-12


def sgn_convolve(g, ws):
    """``integral sgn(y - nu) g(x, nu) d nu`` for a signed field ``g``."""
    return np.asarray(g) @ ws.basis_y.sgn_matrix.T


def t_convolve(rho, ws):
    """Gauge potential ``a = ((T0)_x * rho)``, shape ``(n_x, m_y)``.

    ``rho`` must be a density; entries below ``-1e-12`` raise DomainError.
    """
    rho = np.asarray(rho)
    if np.iscomplexobj(rho):
        rho = rho.real
    if rho.size and rho.min() < -NEGATIVE_DENSITY_SLACK:
        raise DomainError(f"density has negative entries (min {rho.min():.3e})")
    return -np.pi * sgn_convolve(rho, ws)


def f_profile(eps, ws):
    """``f(y) = integral sgn(y - nu) u_eps(nu)^2 d nu`` on the scaled nodes.

    Returns ``(y, weights, f, u_eps_squared)`` where ``y = sqrt(eps) * nodes``
    and ``weights`` are the matching quadrature weights, so that e.g.
    ``sum(weights * f * u2)`` is the integral of ``f u_eps^2``.
    """
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    b = ws.basis_y
    s = np.sqrt(eps)
    y = s * b.nodes
    w = s * b.weights
    u2 = np.exp(-(y**2) / eps) / np.sqrt(np.pi * eps)
    # sgn-convolution is scale-free once the density is written per unit of the scaled variable
    f = sgn_convolve(s * u2, ws)
    return y, w, f, u2


def current_x(psi, a, ws):
    """x-component of the current, ``Re[conj(psi) (-i d_x + a) psi]``."""
    dpsi = diff_x(psi, ws)
    return np.real(np.conj(psi) * (-1j * dpsi + a * psi))


def nonlinearity(phi, beta, ws):
    """The nonlinear term of the rescaled gauged equation.

    ``b^2 a^2 phi - i b a phi_x - i b (a phi)_x - 2 b [(T0)_x * (j0 + b a rho)] phi``
    with ``a = (T0)_x * |phi|^2`` and ``j0`` the free current.
    """
    phi = np.asarray(phi, dtype=complex)
    if beta == 0:
        return np.zeros_like(phi)
    rho = np.abs(phi) ** 2
    a = t_convolve(rho, ws)
    dphi = diff_x(phi, ws)
    j0 = np.real(np.conj(phi) * (-1j * dphi))
    nested = -np.pi * sgn_convolve(j0 + beta * a * rho, ws)
    return (beta**2 * a**2 * phi
            - 1j * beta * a * dphi
            - 1j * beta * diff_x(a * phi, ws)
            - 2.0 * beta * nested * phi)


def _s_kernel(dx, dy):
    # principal arctan(dy/dx); the dx = 0 line takes the mean of its one-sided limits
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.arctan(dy / dx)
    return np.where(dx == 0.0, 0.0, out)


def _refined_sources(rho, ws, y_scale, refine):
    """Spectral interpolation of ``rho`` onto a uniform grid ``refine`` times finer in x
    with matching spacing in y; returns flattened source coordinates and weights."""
    n_x = ws.grid_x.n_x
    dx = ws.grid_x.dx
    if refine == 1:
        x = ws.grid_x.nodes
        y = y_scale * ws.basis_y.nodes
        w = dx * y_scale * ws.basis_y.weights[None, :] * rho
        return x, y, w
    # y: evaluate the Hermite interpolant on a uniform grid
    h = dx / refine
    c = rho @ ws.basis_y.analysis_matrix.T
    y_max = y_scale * ws.basis_y.nodes[-1]
    n_y = int(np.ceil(y_max / h))
    y = h * np.arange(-n_y, n_y + 1)
    rho_y = c @ hermite_functions(y / y_scale, ws.basis_y.m_y).T
    # x: zero-padded Fourier interpolation
    coef = np.fft.fft(rho_y, axis=0)
    n_f = refine * n_x
    padded = np.zeros((n_f, y.size), dtype=complex)
    half = n_x // 2
    padded[:half] = coef[:half]
    padded[-half + 1:] = coef[-half + 1:]
    rho_f = refine * np.fft.ifft(padded, axis=0).real
    x = -ws.grid_x.l_x + h * np.arange(n_f)
    w = h * h * rho_f
    return x, y, w


def s_phase(rho, ws, y_scale=1.0, targets=None, refine=1, chunk=2048):
    """Phase ``S[rho] = integral arctan((y - y')/(x - x')) rho(x', y') dx' dy'``.

    ``rho`` lives on the workspace grid with y-nodes multiplied by ``y_scale``
    (use ``sqrt(eps)`` for the unscaled frame).  Returns the phase on the same
    grid, or at the ``(n, 2)`` array of ``targets`` points if given.

    Direct O(N^2) quadrature, desk scale only.  Sources at ``x' == x`` take the
    mean of the two one-sided limits (zero), so targets whose x coordinate is a
    grid node get second-order accuracy in x.  ``refine > 1`` first
    interpolates ``rho`` onto a uniform grid that much finer than the x grid,
    which resolves the near-singular source rows.
    """
    rho = np.real(np.asarray(rho))
    sx, sy, w = _refined_sources(rho, ws, y_scale, int(refine))
    mask = w != 0.0
    src_x = np.broadcast_to(sx[:, None], w.shape)[mask]
    src_y = np.broadcast_to(sy[None, :], w.shape)[mask]
    src_w = w[mask]
    if targets is None:
        tx = np.broadcast_to(ws.grid_x.nodes[:, None], rho.shape).ravel()
        ty = np.broadcast_to(y_scale * ws.basis_y.nodes[None, :], rho.shape).ravel()
    else:
        targets = np.asarray(targets, dtype=float).reshape(-1, 2)
        tx, ty = targets[:, 0], targets[:, 1]
    out = np.empty(tx.shape)
    for start in range(0, tx.size, chunk):
        sl = slice(start, start + chunk)
        k = _s_kernel(tx[sl, None] - src_x[None, :], ty[sl, None] - src_y[None, :])
        out[sl] = k @ src_w
    return out.reshape(rho.shape) if targets is None else out
