"""Gauged Chern-Simons-Schroedinger equation in an anisotropic trap and its
quintic NLS limit: spectral discretization, energies, ground states,
dynamics, and dimensional-reduction diagnostics."""

from .config import SimulationConfig, parse_config
from .dynamics import TrajectoryRecord, continuity_residual, evolve_1d, evolve_2d
from .energy import EnergyBreakdown, e_eps, energy_1d, energy_2d_gauged, gradient_1d, gradient_2d
from .errors import ConfigurationError, DomainError, InstabilityError, SnapshotError
from .gauge import current_x, f_profile, nonlinearity, s_phase, sgn_convolve, t_convolve
from .ground_state import FlowConfig, GroundStateResult, minimize_1d, minimize_2d
from .reduction import (SweepReport, dynamics_residual, extract_phi_eps, fit_rate,
                        project_ground, projection_residual, reconstruct_psi,
                        run_dynamics_sweep, run_gse_sweep)
from .snapshot import read_snapshot, write_snapshot
from .spectral import SpectralWorkspace, make_workspace

__version__ = "0.1.0"
