from __future__ import annotations

import numpy as np
from scipy import linalg

from pulsefid import su2

# small blocks so that ensembles in tests span several jobs
TEST_BLOCK_SIZE = 256


def expm_oracle(pulse_area, pulse_phase):
    """Pulse operator from a general matrix exponential"""
    axis = np.cos(pulse_phase) * su2.SIGMA_X - np.sin(pulse_phase) * su2.SIGMA_Y
    return linalg.expm(-0.5j * pulse_area * axis)


def unitarity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))


def within_standard_errors(value, expected, std_error, k=3) -> bool:
    return abs(value - expected) <= k * std_error


def random_angles(rng, size):
    """Bloch angles spread over the sphere, phi in [0, 2pi)"""
    return np.arccos(rng.uniform(-1, 1, size)), rng.uniform(0, 2 * np.pi, size)
