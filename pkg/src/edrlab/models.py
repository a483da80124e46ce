"""Ready-made qubit measuring processes used throughout the examples and tests."""

from __future__ import annotations

import numpy as np

from .linalg import SIGMA_Z
from .measurement import MeasuringProcess

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_PLUS_I = np.array([1, 1j], dtype=complex) / np.sqrt(2)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=complex,
)


def cnot_model() -> MeasuringProcess:
    """System qubit controls a probe flip; probe starts in ``|0>``, meter ``sigma_z``."""
    return MeasuringProcess(KET0, CNOT, SIGMA_Z)


def constant_meter_model(sys_dim: int = 2, probe_dim: int = 2, value: float = 0.0) -> MeasuringProcess:
    """No interaction and a meter that always reads ``value``."""
    xi = np.zeros(probe_dim, dtype=complex)
    xi[0] = 1.0
    return MeasuringProcess(xi, np.eye(sys_dim * probe_dim), value * np.eye(probe_dim))


def no_interaction_model(meter, probe_state=KET0, sys_dim: int = 2) -> MeasuringProcess:
    """``U = I``: nothing is disturbed and the meter reads only the probe."""
    xi = np.asarray(probe_state, dtype=complex)
    return MeasuringProcess(xi, np.eye(sys_dim * xi.size), meter)


def swap_model(meter, probe_state=KET0) -> MeasuringProcess:
    """Equal-dimension swap: ``M(dt) = M (x) I``."""
    xi = np.asarray(probe_state, dtype=complex)
    d = xi.size
    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    return MeasuringProcess(xi, swap, meter)
