import numpy as np
import pytest

from pxbar.crossbar import CrossbarArray
from pxbar.device import DeviceParams
from pxbar.materials import MaterialRecord
from pxbar.optics import WaveguideCellGeometry


def synthetic_material(n_a=2.0, k_a=0.0, n_c=3.0, k_c=0.5, name="synthetic"):
    """Two-node table, identical at both nodes, on [1500, 1600] nm."""
    row = (n_a, k_a, n_c, k_c)
    return MaterialRecord(name, ((1500.0, *row), (1600.0, *row)), 1e-6, 1e-4)


@pytest.fixture
def lossy_material():
    # n_c >= n_a and k_c >= k_a: balance is the transmission maximum
    return synthetic_material(2.0, 0.01, 3.0, 0.5)


@pytest.fixture
def lossless_material():
    return synthetic_material(2.0, 0.0, 2.4, 0.0)


@pytest.fixture
def pcm_params():
    return DeviceParams("PCM", v_set=1.0, v_reset=2.0, tau_set=100e-9, g_a=1e-6, g_c=1e-4)


@pytest.fixture
def geometry():
    return WaveguideCellGeometry(
        length=10e-6, wavelength=1550.0, gamma=0.1, fill=0.5,
        pcm_side="ridge", alpha_min=100.0, c2=1e6, n_mode0=1.5,
    )


@pytest.fixture
def make_array(pcm_params, geometry, lossy_material):
    def factory(rows, cols, r_row=0.0, r_col=0.0, params=None):
        return CrossbarArray(rows, cols, params or pcm_params, geometry, lossy_material, r_row, r_col)

    return factory


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
