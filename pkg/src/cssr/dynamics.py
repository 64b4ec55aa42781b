"""Time integrators for the quintic NLS and the rescaled gauged 2D equation.

Both use second-order Strang splitting.  In 2D the linear flow
``(1/eps) H_y + H_x`` is split off and the stiff transverse part is applied
exactly in the Hermite basis, so the step size does not depend on ``eps``;
the nonlinear substep ``i d_t phi = f[phi]`` is advanced with classical RK4.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .energy import PI2, energy_1d, energy_2d_gauged
from .errors import ConfigurationError, InstabilityError
from .gauge import nonlinearity, t_convolve
from .spectral import apply_h_x, apply_h_y, diff_x, diff_y, from_hermite, integrate, mass, to_hermite

log = logging.getLogger(__name__)

MASS_GUARD = 1e-3


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    snapshots: list
    mass_series: np.ndarray
    energy_series: np.ndarray
    continuity_residual_series: np.ndarray
    sigma_norm_series: np.ndarray
    meta: dict = field(default_factory=dict)


def _steps(t_final, dt, snapshot_stride):
    if not dt > 0:
        raise ConfigurationError(f"time step must be positive, got {dt}", key="time.dt")
    if t_final < 0:
        raise ConfigurationError(f"t_final must be nonnegative, got {t_final}", key="time.t_final")
    n = int(np.ceil(t_final / dt - 1e-9))
    dt = t_final / n if n else dt
    stride = max(1, int(round(snapshot_stride / dt))) if snapshot_stride else 1
    return n, dt, stride


def continuity_residual(before, after, dt, beta, ws, eps=None):
    """L2 norm of ``(rho1 - rho0)/dt + 2 div J`` at the midpoint state.

    1D fields use ``J = Im(conj(phi) phi_x)``.  2D fields (``eps`` required)
    use the gauged current of the rescaled frame, whose continuity equation is
    ``d_t rho + 2 d_x J_x + (2/eps) d_y J_y = 0``.
    """
    before = np.asarray(before)
    after = np.asarray(after)
    mid = 0.5 * (before + after)
    drho = (np.abs(after) ** 2 - np.abs(before) ** 2) / dt
    dmid = diff_x(mid, ws)
    if mid.ndim == 1:
        jx = np.imag(np.conj(mid) * dmid)
        res = drho + 2.0 * diff_x(jx, ws)
    else:
        if eps is None:
            raise ConfigurationError("2D continuity residual needs epsilon", key="physics.epsilon")
        a = t_convolve(np.abs(mid) ** 2, ws) if beta != 0 else 0.0
        jx = np.real(np.conj(mid) * (-1j * dmid + beta * a * mid))
        jy = np.imag(np.conj(mid) * diff_y(mid, ws))
        res = drho + 2.0 * diff_x(jx, ws) + (2.0 / eps) * diff_y(jy, ws)
    return float(np.sqrt(integrate(np.abs(res) ** 2, ws).real))


def _sigma_norm(phi, ws):
    h = apply_h_x(phi, ws)
    if phi.ndim == 2:
        h = h + apply_h_y(phi, ws)
    return float(np.sqrt(mass(h, ws)))


def _record(traj, t, phi, prev, dt, energy, beta, ws, eps, store):
    traj["times"].append(t)
    traj["snapshots"].append(phi.copy() if store else None)
    traj["mass"].append(mass(phi, ws))
    traj["energy"].append(energy(phi))
    traj["sigma"].append(_sigma_norm(phi, ws))
    traj["cont"].append(np.nan if prev is None else continuity_residual(prev, phi, dt, beta, ws, eps))


def _run(phi0, n, dt, stride, step, energy, beta, ws, eps, store_fields, meta):
    phi = np.array(phi0, dtype=complex)
    m0 = mass(phi, ws)
    if abs(m0 - 1.0) > 1e-8:
        raise ConfigurationError(f"initial datum must have unit mass (got {m0:.12f})")
    traj = {k: [] for k in ("times", "snapshots", "mass", "energy", "sigma", "cont")}
    _record(traj, 0.0, phi, None, dt, energy, beta, ws, eps, store_fields)
    for i in range(1, n + 1):
        prev = phi
        phi = step(phi)
        if i % stride == 0 or i == n:
            t = i * dt
            m = mass(phi, ws)
            if not np.isfinite(m) or abs(m - m0) > MASS_GUARD:
                raise InstabilityError(
                    f"mass drift {abs(m - m0):.3e} exceeds guard at t={t:.6g}", time=t,
                    mass_drift=abs(m - m0))
            _record(traj, t, phi, prev, dt, energy, beta, ws, eps, store_fields)
    return TrajectoryRecord(
        times=np.array(traj["times"]),
        snapshots=traj["snapshots"],
        mass_series=np.array(traj["mass"]),
        energy_series=np.array(traj["energy"]),
        continuity_residual_series=np.array(traj["cont"]),
        sigma_norm_series=np.array(traj["sigma"]),
        meta=dict(meta, dt=dt, steps=n),
    )


def evolve_1d(phi0, beta, t_final, dt, ws, snapshot_stride=0.01, store_fields=True):
    """Quintic NLS ``i phi_t = -phi_xx + x^2 phi + pi^2 beta^2 |phi|^4 phi``.

    The potential-plus-quintic half steps are exact phases (they preserve
    ``|phi|``); the kinetic step is exact in Fourier space.
    """
    n, dt, stride = _steps(t_final, dt, snapshot_stride)
    x2 = ws.grid_x.nodes**2
    kin = np.exp(-1j * dt * ws.grid_x.wavenumbers**2)
    c = PI2 * beta**2

    def step(phi):
        phi = phi * np.exp(-0.5j * dt * (x2 + c * np.abs(phi) ** 4))
        phi = np.fft.ifft(kin * np.fft.fft(phi))
        return phi * np.exp(-0.5j * dt * (x2 + c * np.abs(phi) ** 4))

    return _run(phi0, n, dt, stride, step, lambda p: energy_1d(p, beta, ws).total, beta, ws,
                None, store_fields, {"beta": beta, "dim": 1})


def linear_half_step_2d(dt, eps, ws):
    """Return the map ``exp(-i (dt/2) ((1/eps) H_y + H_x))``, with ``H_x`` split
    as potential/kinetic/potential and ``H_y`` exact."""
    x2 = ws.grid_x.nodes[:, None] ** 2
    pot = np.exp(-0.25j * dt * x2)
    kin = np.exp(-0.5j * dt * ws.grid_x.wavenumbers**2)[:, None]
    trans = np.exp(-0.5j * dt * ws.basis_y.eigenvalues / eps)[None, :]

    def apply(phi):
        phi = pot * phi
        c = np.fft.fft(to_hermite(phi, ws), axis=0)
        phi = from_hermite(np.fft.ifft(kin * trans * c, axis=0), ws)
        return pot * phi

    return apply


def evolve_2d(phi0, beta, eps, t_final, dt, ws, snapshot_stride=0.01, store_fields=True):
    """Rescaled gauged equation ``i phi_t = (1/eps) H_y phi + H_x phi + f[phi]``."""
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    n, dt, stride = _steps(t_final, dt, snapshot_stride)
    half = linear_half_step_2d(dt, eps, ws)

    def rhs(p):
        return -1j * nonlinearity(p, beta, ws)

    def step(phi):
        phi = half(phi)
        if beta != 0:
            k1 = rhs(phi)
            k2 = rhs(phi + 0.5 * dt * k1)
            k3 = rhs(phi + 0.5 * dt * k2)
            k4 = rhs(phi + dt * k3)
            phi = phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return half(phi)

    return _run(phi0, n, dt, stride, step, lambda p: energy_2d_gauged(p, beta, eps, ws).total,
                beta, ws, eps, store_fields, {"beta": beta, "epsilon": eps, "dim": 2})
