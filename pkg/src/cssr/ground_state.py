"""Normalized gradient flow (imaginary time) for the 1D and gauged 2D energies.

Each step is

    phi <- normalize(phi - tau * phi1(tau L) (grad(phi) - mu phi)),

with ``L = k^2 + lambda_k / eps + 1`` diagonal in Fourier (x) times Hermite (y)
and ``phi1(z) = (1 - exp(-z)) / z``.  For the linear separable part this is
exactly the decay ``exp(-tau L)``, so the stiff ``(1/eps) H_y`` term never
limits ``tau``; the remaining terms enter explicitly.  Fixed points satisfy
``grad = mu phi`` exactly, so the discrete minimizer carries no step-size bias.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .energy import energy_1d, energy_2d_gauged, gradient_1d, gradient_2d
from .errors import ConfigurationError
from .spectral import from_hermite, inner, integrate, mass, to_hermite

log = logging.getLogger(__name__)

SEED_PROFILES = ("gaussian", "noisy-gaussian", "file")


@dataclass
class FlowConfig:
    tau: float = 0.5
    tol_energy: float = 1e-13
    tol_residual: float = 1e-8
    max_iters: int = 5000
    seed_profile: str = "gaussian"
    seed: int = 0
    tau_floor: float = 1e-6

    def __post_init__(self):
        for key in ("tau", "tol_energy", "tol_residual"):
            if not getattr(self, key) > 0:
                raise ConfigurationError(f"flow.{key} must be positive", key=f"flow.{key}")
        if int(self.max_iters) < 1:
            raise ConfigurationError("flow.max_iters must be >= 1", key="flow.max_iters")
        if self.seed_profile not in SEED_PROFILES:
            raise ConfigurationError(
                f"flow.seed_profile must be one of {SEED_PROFILES}", key="flow.seed_profile")


@dataclass
class GroundStateResult:
    state: np.ndarray
    energy: object
    chemical_potential: float
    iterations: int
    converged: bool
    residual: float
    energy_history: list = field(default_factory=list, repr=False)


def _phi1(z):
    out = np.ones_like(z)
    big = z > 1e-8
    out[big] = -np.expm1(-z[big]) / z[big]
    return out


def _fix_phase(phi, ws):
    s = integrate(phi, ws)
    if abs(s) > 0:
        phi = phi * (np.conj(s) / abs(s))
    return phi


def _flow(phi, energy, gradient, precondition, cfg, ws):
    """Shared driver; ``precondition(r, tau)`` returns ``tau phi1(tau L) r``."""
    phi = phi / np.sqrt(mass(phi, ws))
    tau = float(cfg.tau)
    e_old = energy(phi)
    history = [e_old]
    accepted = 0
    converged = False
    it = 0
    g = gradient(phi)
    mu = inner(phi, g, ws).real
    res = np.sqrt(mass(g - mu * phi, ws) / mass(g, ws))
    while it < cfg.max_iters:
        it += 1
        trial = phi - precondition(g - mu * phi, tau)
        trial = trial / np.sqrt(mass(trial, ws))
        e_new = energy(trial)
        if e_new > e_old + 1e-14 * abs(e_old):
            if tau <= cfg.tau_floor:
                log.warning("step floor reached at iteration %d", it)
                break
            tau = max(tau / 2.0, cfg.tau_floor)
            accepted = 0
            continue
        d_e = e_old - e_new
        phi, e_old = trial, e_new
        history.append(e_new)
        accepted += 1
        if accepted % 10 == 0:
            tau *= 1.2
        g = gradient(phi)
        mu = inner(phi, g, ws).real
        res = np.sqrt(mass(g - mu * phi, ws) / mass(g, ws))
        if d_e < cfg.tol_energy and res < cfg.tol_residual:
            converged = True
            break
    return phi, mu, it, converged, res, history


def _seed_1d(cfg, ws):
    x = ws.grid_x.nodes
    phi = np.exp(-0.5 * (x / 1.3) ** 2).astype(complex)
    if cfg.seed_profile == "noisy-gaussian":
        rng = np.random.default_rng(cfg.seed)
        phi = phi * (1.0 + 0.2 * rng.standard_normal(x.size))
    return phi


def _seed_2d(cfg, ws):
    x = ws.grid_x.nodes[:, None]
    y = ws.basis_y.nodes[None, :]
    phi = np.exp(-0.5 * (x / 1.3) ** 2 - 0.5 * (y / 1.2) ** 2).astype(complex)
    if cfg.seed_profile == "noisy-gaussian":
        rng = np.random.default_rng(cfg.seed)
        phi = phi * (1.0 + 0.2 * rng.standard_normal(phi.shape))
    return phi


def minimize_1d(beta, cfg=None, ws=None, initial=None):
    """Ground state of the quintic 1D energy on unit-mass states."""
    cfg = cfg or FlowConfig()
    if initial is None:
        if cfg.seed_profile == "file":
            raise ConfigurationError("seed_profile 'file' needs an initial state", key="flow.seed_profile")
        initial = _seed_1d(cfg, ws)
    k2 = ws.grid_x.wavenumbers**2
    lin = k2 + 1.0

    def precondition(r, tau):
        z = tau * lin
        return np.fft.ifft(tau * _phi1(z) * np.fft.fft(r))

    phi, mu, it, ok, res, hist = _flow(
        np.asarray(initial, dtype=complex),
        lambda p: energy_1d(p, beta, ws).total,
        lambda p: gradient_1d(p, beta, ws),
        precondition, cfg, ws)
    phi = _fix_phase(phi, ws)
    return GroundStateResult(phi, energy_1d(phi, beta, ws), float(mu), it, ok, float(res), hist)


def minimize_2d(beta, eps, cfg=None, ws=None, initial=None):
    """Ground state of the rescaled gauged 2D energy on unit-mass states."""
    if not eps > 0:
        raise ConfigurationError(f"epsilon must be positive, got {eps}", key="physics.epsilon")
    cfg = cfg or FlowConfig()
    if initial is None:
        if cfg.seed_profile == "file":
            raise ConfigurationError("seed_profile 'file' needs an initial state", key="flow.seed_profile")
        initial = _seed_2d(cfg, ws)
    lin = ws.grid_x.wavenumbers[:, None] ** 2 + ws.basis_y.eigenvalues[None, :] / eps + 1.0

    def precondition(r, tau):
        c = np.fft.fft(to_hermite(r, ws), axis=0)
        c *= tau * _phi1(tau * lin)
        return from_hermite(np.fft.ifft(c, axis=0), ws)

    phi, mu, it, ok, res, hist = _flow(
        np.asarray(initial, dtype=complex),
        lambda p: energy_2d_gauged(p, beta, eps, ws).total,
        lambda p: gradient_2d(p, beta, eps, ws),
        precondition, cfg, ws)
    phi = _fix_phase(phi, ws)
    return GroundStateResult(phi, energy_2d_gauged(phi, beta, eps, ws), float(mu), it, ok,
                             float(res), hist)
