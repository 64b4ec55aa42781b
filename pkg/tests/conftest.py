import numpy as np
import pytest

from cssr.spectral import make_workspace


@pytest.fixture(scope="session")
def ws():
    """Default resolution: n_x = 256, l_x = 12, m_y = 64."""
    return make_workspace()


@pytest.fixture(scope="session")
def small_ws():
    """Coarse grid for fast structural tests."""
    return make_workspace(64, 8.0, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def gaussian_1d(ws, shift=0.0, width=1.0):
    x = ws.grid_x.nodes
    g = np.exp(-0.5 * ((x - shift) / width) ** 2).astype(complex)
    dx = ws.grid_x.dx
    return g / np.sqrt(dx * np.sum(np.abs(g) ** 2))


def product_state(ws, phi0):
    return np.outer(phi0, ws.basis_y.mode_matrix[:, 0])
