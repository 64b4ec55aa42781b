"""Energy functionals and their variational gradients.

Gradients follow the convention ``dE[phi + h d]/dh = 2 Re <grad, d>`` at h=0,
so that ``i d_t phi = grad`` is the Hamiltonian flow of ``E``.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigurationError
from .gauge import nonlinearity, t_convolve
from .spectral import apply_h_x, apply_h_y, diff_x, integrate, to_hermite

PI2 = np.pi**2


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy split into parts; ``total`` is their sum.

    For the 1D functional ``interaction`` is the quintic term.  For the gauged
    2D functional it is the gauge correction ``int |D phi|^2 - int |phi_x|^2``
    with ``D = -i d_x + beta a``, which reduces to the quintic term on the
    trial states ``phi0(x) u1(y)``.
    """

    kinetic_x: float
    interaction: float
    potential_x: float
    transverse: float = 0.0

    @property
    def total(self):
        return self.kinetic_x + self.interaction + self.potential_x + self.transverse

    def as_dict(self):
        d = asdict(self)
        d["total"] = self.total
        return d


def e_eps(eps):
    """Transverse ground-state energy ``1/eps`` of ``-d_y^2 + y^2/eps^2``."""
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    return 1.0 / eps


def energy_1d(phi, beta, ws):
    dphi = diff_x(phi, ws)
    rho = np.abs(phi) ** 2
    x2 = ws.grid_x.nodes**2
    return EnergyBreakdown(
        kinetic_x=float(integrate(np.abs(dphi) ** 2, ws)),
        interaction=float(PI2 * beta**2 / 3.0 * integrate(rho**3, ws)),
        potential_x=float(integrate(x2 * rho, ws)),
    )


def gradient_1d(phi, beta, ws):
    """``-phi_xx + pi^2 beta^2 |phi|^4 phi + x^2 phi``."""
    return apply_h_x(phi, ws) + PI2 * beta**2 * np.abs(phi) ** 4 * phi


def energy_2d_gauged(phi, beta, eps, ws):
    """Rescaled gauged 2D energy; transverse part summed in the Hermite basis."""
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    rho = np.abs(phi) ** 2
    dphi = diff_x(phi, ws)
    kin = integrate(np.abs(dphi) ** 2, ws)
    if beta != 0:
        a = t_convolve(rho, ws)
        gauge_kin = integrate(np.abs(-1j * dphi + beta * a * phi) ** 2, ws)
    else:
        gauge_kin = kin
    c = to_hermite(phi, ws)
    transverse = ws.grid_x.dx * np.sum(np.abs(c) ** 2 @ ws.basis_y.eigenvalues) / eps
    return EnergyBreakdown(
        kinetic_x=float(kin),
        interaction=float(gauge_kin - kin),
        potential_x=float(integrate(ws.grid_x.nodes[:, None] ** 2 * rho, ws)),
        transverse=float(transverse),
    )


def gradient_2d(phi, beta, eps, ws):
    """``(1/eps) H_y phi + H_x phi + f[phi]``."""
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    out = apply_h_y(phi, ws) / eps + apply_h_x(phi, ws)
    if beta != 0:
        out = out + nonlinearity(phi, beta, ws)
    return out
