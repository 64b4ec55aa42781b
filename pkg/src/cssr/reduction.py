"""Dimensional-reduction diagnostics: projection onto the transverse ground
mode, the reduced 1D amplitude, residuals against the quintic NLS, epsilon
sweeps with log-log rate fits, and reconstruction of the ungauged field."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import stats

from .dynamics import evolve_1d, evolve_2d
from .errors import ConfigurationError, DomainError
from .gauge import s_phase
from .ground_state import FlowConfig, minimize_1d, minimize_2d
from .spectral import from_hermite, to_hermite

log = logging.getLogger(__name__)


@dataclass
class RateFit:
    slope: float
    intercept: float
    stderr: float

    @property
    def constant(self):
        return float(np.exp(self.intercept))


@dataclass
class SweepReport:
    beta: float
    epsilons: list
    gse_gap: list = field(default_factory=list)
    e2d: list = field(default_factory=list)
    e1d: float = float("nan")
    iterations: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    proj_residual: list = field(default_factory=list)
    dyn_residual: list = field(default_factory=list)
    t_final: float = float("nan")
    dt: float = float("nan")
    fitted_rates: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)


def project_ground(phi, ws):
    """``(Pi_1 phi)(x, y) = [integral phi(x, y') u1(y') dy'] u1(y)``."""
    c = to_hermite(phi, ws)
    c[:, 1:] = 0.0
    return from_hermite(c, ws)


def extract_phi_eps(phi, t, eps, ws):
    """Reduced amplitude ``exp(i t/eps) integral phi(t, x, y) u1(y) dy``."""
    c0 = np.asarray(phi) @ ws.basis_y.analysis_matrix[0]
    return np.exp(1j * t / eps) * c0


def _l2(f, ws):
    dx = ws.grid_x.dx
    f = np.asarray(f)
    if f.ndim == 1:
        return float(np.sqrt(dx * np.sum(np.abs(f) ** 2)))
    return float(np.sqrt(dx * np.sum(np.abs(f) ** 2 @ ws.basis_y.weights)))


def _transverse_excess(phi, ws):
    c = to_hermite(phi, ws)
    return float(np.sqrt(ws.grid_x.dx * np.sum(np.abs(c[:, 1:]) ** 2)))


def projection_residual(traj2d, ws):
    """``sup_t ||phi(t) - Pi_1 phi(t)||``."""
    return max(_transverse_excess(p, ws) for p in traj2d.snapshots)


def dynamics_residual(traj2d, traj1d, eps, ws):
    """``sup_t ||phi_eps(t) - phi(t)||`` over the shared snapshot times."""
    t2, t1 = np.asarray(traj2d.times), np.asarray(traj1d.times)
    if t2.shape != t1.shape or not np.allclose(t2, t1, rtol=0, atol=1e-12):
        raise ConfigurationError("2D and 1D trajectories have different snapshot times")
    if any(s is None for s in traj2d.snapshots) or any(s is None for s in traj1d.snapshots):
        raise ConfigurationError("trajectories must store fields")
    return max(_l2(extract_phi_eps(p2, t, eps, ws) - p1, ws)
               for t, p2, p1 in zip(t2, traj2d.snapshots, traj1d.snapshots))


def fit_rate(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3 or xs.size != ys.size:
        raise ConfigurationError("rate fit needs at least three aligned points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("rate fit needs positive data")
    r = stats.linregress(np.log(xs), np.log(ys))
    return RateFit(float(r.slope), float(r.intercept), float(r.stderr))


@dataclass
class UnscaledField:
    """Field on the physical grid ``(x, sqrt(eps) y_j)`` with matching y weights."""

    values: np.ndarray
    x: np.ndarray
    y: np.ndarray
    y_weights: np.ndarray
    dx: float

    def mass(self):
        return float(self.dx * np.sum(np.abs(self.values) ** 2 @ self.y_weights))


def reconstruct_psi(phi, t, eps, beta, ws, refine=1):
    """Undo the transverse rescaling and the change of gauge.

    Returns ``psi = eps^{-1/4} phi(x, y/sqrt(eps)) exp(-i beta S[|.|^2])``
    sampled at the scaled nodes.  ``t`` is kept for provenance only: the fast
    phase ``exp(-i t/eps)`` is already carried by ``phi``.  Quadratic cost.
    """
    s = np.sqrt(eps)
    tilde = eps**-0.25 * np.asarray(phi, dtype=complex)
    if beta != 0:
        phase = s_phase(np.abs(tilde) ** 2, ws, y_scale=s, refine=refine)
        values = tilde * np.exp(-1j * beta * phase)
    else:
        values = tilde
    return UnscaledField(values, ws.grid_x.nodes.copy(), s * ws.basis_y.nodes,
                         s * ws.basis_y.weights, ws.grid_x.dx)


def _check_epsilons(epsilons):
    eps = [float(e) for e in epsilons]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError("sweep.epsilons must be positive and strictly decreasing",
                                 key="sweep.epsilons")
    return eps


def _map(fn, items, workers):
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, *zip(*items)))
    return [fn(*it) for it in items]


def _gse_job(beta, eps, cfg, ws, seed_state):
    u1 = ws.basis_y.mode_matrix[:, 0]
    initial = np.outer(seed_state, u1) if seed_state is not None else None
    return minimize_2d(beta, eps, cfg, ws, initial=initial)


def run_gse_sweep(beta, epsilons, cfg=None, ws=None, workers=1, warm_start=True):
    """Ground-state energies over ``epsilons``; gap ``|E2D - 1/eps - E1D|``."""
    eps = _check_epsilons(epsilons)
    cfg = cfg or FlowConfig()
    g1 = minimize_1d(beta, cfg, ws)
    rep = SweepReport(beta=beta, epsilons=eps, e1d=g1.energy.total)
    if not g1.converged:
        rep.flags.append("1d-not-converged")
    seed = g1.state if warm_start else None
    results = _map(_gse_job, [(beta, e, cfg, ws, seed) for e in eps], workers)
    for e, r in zip(eps, results):
        rep.e2d.append(r.energy.total)
        rep.gse_gap.append(abs(r.energy.total - 1.0 / e - g1.energy.total))
        rep.iterations.append(r.iterations)
        rep.converged.append(bool(r.converged))
        if not r.converged:
            rep.flags.append(f"eps={e}:not-converged")
    if len(eps) >= 3 and all(g > 0 for g in rep.gse_gap):
        rep.fitted_rates["gse_gap"] = fit_rate(eps, rep.gse_gap)
    return rep


def default_initial_1d(ws, shift=1.0):
    """Unit-mass Gaussian centred at ``shift``: a moving initial datum."""
    x = ws.grid_x.nodes
    return (np.pi**-0.25 * np.exp(-0.5 * (x - shift) ** 2)).astype(complex)


def _dyn_job(phi0, beta, eps, t_final, dt, ws, stride):
    u1 = ws.basis_y.mode_matrix[:, 0]
    tr = evolve_2d(np.outer(phi0, u1), beta, eps, t_final, dt, ws, snapshot_stride=stride)
    return tr


def run_dynamics_sweep(beta, epsilons, t_final, dt, ws, phi0=None, snapshot_stride=0.01,
                       workers=1):
    """Evolve ``phi0(x) u1(y)`` for each eps and compare with the quintic NLS."""
    eps = _check_epsilons(epsilons)
    phi0 = default_initial_1d(ws) if phi0 is None else np.asarray(phi0, dtype=complex)
    rep = SweepReport(beta=beta, epsilons=eps, t_final=t_final, dt=dt)
    ref = evolve_1d(phi0, beta, t_final, dt, ws, snapshot_stride=snapshot_stride)
    trajs = _map(_dyn_job, [(phi0, beta, e, t_final, dt, ws, snapshot_stride) for e in eps],
                 workers)
    for e, tr in zip(eps, trajs):
        rep.dyn_residual.append(dynamics_residual(tr, ref, e, ws))
        rep.proj_residual.append(projection_residual(tr, ws))
    for name in ("dyn_residual", "proj_residual"):
        ys = getattr(rep, name)
        if len(eps) >= 3 and all(v > 0 for v in ys):
            rep.fitted_rates[name] = fit_rate(eps, ys)
    return rep
