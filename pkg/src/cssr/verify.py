"""Invariant battery behind the ``verify`` subcommand.

Every check is an exact identity of the discretization (or a derivative
test), so it runs in seconds at the default resolution.
"""

from dataclasses import dataclass
import io

import numpy as np

from .energy import energy_1d, energy_2d_gauged, gradient_1d, gradient_2d
from .gauge import f_profile, nonlinearity
from .reduction import project_ground
from .snapshot import decode_snapshot, encode_snapshot
from .spectral import inner, integrate, normalize


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.3e} (tol {self.tolerance:.1e})"


def trial_profiles(ws):
    """Three real unit-mass x-profiles: centred, shifted, and two-bump."""
    x = ws.grid_x.nodes
    raw = (np.exp(-0.5 * x**2), np.exp(-0.5 * (x - 1.0) ** 2),
           np.exp(-(x - 1.5) ** 2) + np.exp(-(x + 1.5) ** 2))
    return [normalize(p.astype(complex), ws) for p in raw]


def f_moment_errors(eps, ws):
    _, w, f, u2 = f_profile(eps, ws)
    return abs(np.sum(w * f * u2)), abs(np.sum(w * f**2 * u2) - 1.0 / 3.0)


def decoupling_error(phi0, beta, eps, ws):
    u1 = ws.basis_y.mode_matrix[:, 0]
    e1 = energy_1d(phi0, beta, ws).total
    e2 = energy_2d_gauged(np.outer(phi0, u1), beta, eps, ws).total
    return abs(e2 - 1.0 / eps - e1) / (1.0 + abs(e1))


def claim_error(phi0, beta, ws):
    """L2 distance between the u1-average of f[phi0 u1] and the quintic term."""
    u1 = ws.basis_y.mode_matrix[:, 0]
    avg = nonlinearity(np.outer(phi0, u1), beta, ws) @ (ws.basis_y.weights * u1)
    d = avg - np.pi**2 * beta**2 * np.abs(phi0) ** 4 * phi0
    return float(np.sqrt(integrate(np.abs(d) ** 2, ws).real))


def _smooth_direction(rng, ws, dim):
    x = ws.grid_x.nodes if dim == 1 else ws.grid_x.nodes[:, None]
    if dim == 1:
        basis = [np.ones_like(x), x, x**2, x**3]
        env = np.exp(-0.5 * x**2)
    else:
        y = ws.basis_y.nodes[None, :]
        basis = [np.ones_like(x * y), x, y, x * y, x**2, y**2]
        env = np.exp(-0.5 * x**2 - 0.5 * y**2)
    c = rng.standard_normal((2, len(basis)))
    return env * (sum(a * b for a, b in zip(c[0], basis))
                  + 1j * sum(a * b for a, b in zip(c[1], basis)))


def gradient_check(energy, gradient, phi, ws, rng, n_dirs=20, h=1e-5, dim=1):
    """Worst relative gap between central differences of ``energy`` and
    ``2 Re <gradient, delta>`` over random smooth directions."""
    g = gradient(phi)
    worst = 0.0
    for _ in range(n_dirs):
        d = _smooth_direction(rng, ws, dim)
        fd = (energy(phi + h * d) - energy(phi - h * d)) / (2.0 * h)
        an = 2.0 * inner(g, d, ws).real
        worst = max(worst, abs(fd - an) / abs(an))
    return worst


def generic_state(ws, dim):
    x = ws.grid_x.nodes if dim == 1 else ws.grid_x.nodes[:, None]
    if dim == 1:
        phi = np.exp(-0.5 * x**2) * (1.0 + 0.3 * x + 0.2j * x**2)
    else:
        y = ws.basis_y.nodes[None, :]
        phi = np.exp(-0.5 * (x**2 + y**2)) * (1.0 + 0.3 * x + 0.2j * y + 0.1 * x * y)
    return normalize(phi, ws)


def projection_errors(ws, rng):
    shape = ws.shape
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    b = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    pa = project_ground(a, ws)
    idem = np.max(np.abs(project_ground(pa, ws) - pa))
    adj = abs(inner(pa, b, ws) - inner(a, project_ground(b, ws), ws))
    g = rng.standard_normal(ws.grid_x.n_x)
    orth = np.max(np.abs(project_ground(np.outer(g, ws.basis_y.mode_matrix[:, 1]), ws)))
    return idem, adj, orth


def run_battery(ws, seed=0):
    rng = np.random.default_rng(seed)
    checks = []
    for eps in (1.0, 0.25, 0.05):
        m1, m2 = f_moment_errors(eps, ws)
        checks.append(Check(f"f-moment int f u^2 (eps={eps})", m1, 1e-10))
        checks.append(Check(f"f-moment int f^2 u^2 - 1/3 (eps={eps})", m2, 1e-8))
    profiles = trial_profiles(ws)
    dec = max(decoupling_error(p, b, e, ws) for p in profiles
              for b in (0.0, 0.5, 1.0, 2.0) for e in (0.5, 0.1))
    checks.append(Check("energy decoupling on phi0 u1", dec, 1e-6))
    claim = max(claim_error(p, b, ws) for p in profiles for b in (0.5, 1.0))
    checks.append(Check("effective quintic nonlinearity", claim, 1e-6))
    p1 = generic_state(ws, 1)
    checks.append(Check("gradient_1d vs finite differences", gradient_check(
        lambda p: energy_1d(p, 1.0, ws).total, lambda p: gradient_1d(p, 1.0, ws),
        p1, ws, rng, dim=1), 1e-6))
    p2 = generic_state(ws, 2)
    checks.append(Check("gradient_2d vs finite differences", gradient_check(
        lambda p: energy_2d_gauged(p, 1.0, 0.25, ws).total,
        lambda p: gradient_2d(p, 1.0, 0.25, ws), p2, ws, rng, dim=2), 1e-5))
    idem, adj, orth = projection_errors(ws, rng)
    checks.append(Check("projection idempotent", idem, 1e-12))
    checks.append(Check("projection self-adjoint", adj, 1e-12))
    checks.append(Check("projection kills mode 2", orth, 1e-12))
    z = rng.standard_normal(ws.shape) + 1j * rng.standard_normal(ws.shape)
    back, _ = decode_snapshot(encode_snapshot(z, {"l_x": ws.grid_x.l_x}))
    checks.append(Check("snapshot round trip", float(back.tobytes() != z.tobytes()), 0.0))
    return checks


def format_report(checks):
    out = io.StringIO()
    for c in checks:
        out.write(c.line() + "\n")
    return out.getvalue()
