import numpy as np
import pytest

from fnslab.lattice import Lattice, SpectralField

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def small_lattice():
    return Lattice((16, 1, 12))


@pytest.fixture
def cube_lattice():
    return Lattice((12, 12, 12))


def single_wave(lattice, k, v, amplitude=1.0, phase="cos"):
    f = SpectralField.zeros(lattice)
    f.add_wave(k, amplitude * np.asarray(v, dtype=float), phase=phase)
    return f


def rel_err(a, b):
    scale = max(np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / scale)
