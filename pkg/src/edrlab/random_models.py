"""
Seeded random ensembles for property suites.

Haar unitaries come from QR of complex Ginibre matrices (phase-corrected),
Hermitian observables from the Gaussian unitary ensemble and mixed states
from normalized Wishart matrices.
"""

from __future__ import annotations

import numpy as np

from .measurement import MeasuringProcess


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = ginibre(rng, dim)
    return 0.5 * (g + g.conj().T)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng, dim, dim if rank is None else rank)
    w = g @ g.conj().T
    return w / np.trace(w).real


def random_process(rng: np.random.Generator, sys_dim: int, probe_dim: int) -> MeasuringProcess:
    return MeasuringProcess(
        random_unit_vector(rng, probe_dim),
        haar_unitary(rng, sys_dim * probe_dim),
        random_hermitian(rng, probe_dim),
    )


def unitary_with_first_column(rng: np.random.Generator, v: np.ndarray) -> np.ndarray:
    """Random unitary whose first column is the unit vector ``v``."""
    g = ginibre(rng, v.size)
    g[:, 0] = v
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q


def _steer(rng: np.random.Generator, xi: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Random unitary mapping ``xi`` to ``target``."""
    return unitary_with_first_column(rng, target) @ unitary_with_first_column(rng, xi).conj().T


def controlled_instance(rng: np.random.Generator, sys_dim: int, probe_dim: int, mode: str = "mixed"):
    """
    Measuring process controlled by the eigenbasis of a random observable ``A``.

    Each eigenvector ``v_k`` of ``A`` steers the probe by a unitary ``W_k``.
    ``mode`` decides where the support levels of the state send the probe:

    ``"faithful"``
        into the meter eigenspace of the matching eigenvalue ``a_k``
        (precise in rho, generally not elsewhere);
    ``"mislabeled"``
        into the eigenspace of a meter value that ``A`` does not have
        (commuting, but the joint law is off the diagonal);
    ``"mixed"``
        faithful steering for some levels, Haar for others, and a state that
        may or may not stay on the faithful levels.

    Returns ``(mp, A, rho)``.
    """
    n_values = int(rng.integers(1, sys_dim + 1))
    values = np.unique(np.round(rng.normal(0.0, 2.0, n_values), 3))
    a_diag = np.concatenate([values, rng.choice(values, sys_dim - values.size)])
    rng.shuffle(a_diag)
    V = haar_unitary(rng, sys_dim)
    A = V @ np.diag(a_diag) @ V.conj().T
    A = 0.5 * (A + A.conj().T)

    # support levels; their A-values must fit in the meter spectrum with one spare slot
    order = rng.permutation(sys_dim)
    support: list[int] = []
    for k in order[: int(rng.integers(1, sys_dim + 1))]:
        if len(set(a_diag[support + [k]])) <= probe_dim - 1:
            support.append(int(k))
    if not support:
        support = [int(order[0])]
    needed = sorted(set(a_diag[support]))
    spare = float(values.max() + 1.0)
    meter_vals = list(needed) + [spare]
    while len(meter_vals) < probe_dim:
        meter_vals.append(float(rng.choice(values)) if rng.random() < 0.5 else float(np.round(rng.normal(0, 2), 3)))
    meter_vals = np.array(meter_vals[:probe_dim])
    Wm = haar_unitary(rng, probe_dim)
    M = Wm @ np.diag(meter_vals) @ Wm.conj().T
    M = 0.5 * (M + M.conj().T)
    xi = random_unit_vector(rng, probe_dim)

    def eigvec_of(value):
        idx = np.flatnonzero(np.abs(meter_vals - value) < 1e-12)
        c = ginibre(rng, idx.size, 1)[:, 0]
        v = Wm[:, idx] @ c
        return v / np.linalg.norm(v)

    U = np.zeros((sys_dim * probe_dim,) * 2, dtype=complex)
    for k in range(sys_dim):
        has_value = bool(np.any(np.abs(meter_vals - a_diag[k]) < 1e-12))
        if mode == "mislabeled" and k in support:
            Wk = _steer(rng, xi, eigvec_of(spare))
        elif has_value and not (mode == "mixed" and rng.random() < 0.3):
            Wk = _steer(rng, xi, eigvec_of(a_diag[k]))
        else:
            Wk = haar_unitary(rng, probe_dim)
        vk = V[:, k : k + 1]
        U += np.kron(vk @ vk.conj().T, Wk)

    if mode == "mixed" and rng.random() < 0.5:
        rho = random_density(rng, sys_dim, rank=int(rng.integers(1, sys_dim + 1)))
    else:
        Vs = V[:, support]
        inner = random_density(rng, len(support), rank=int(rng.integers(1, len(support) + 1)))
        rho = Vs @ inner @ Vs.conj().T
        rho = 0.5 * (rho + rho.conj().T)
    return MeasuringProcess(xi, U, M), A, rho


def theorem1_instance(rng: np.random.Generator, sys_dims=(2, 3, 4), probe_dims=(2, 3)):
    """Draw a generic, faithful, mislabeled or mixed instance with equal odds."""
    ds = int(rng.choice(sys_dims))
    dp = int(rng.choice(probe_dims))
    kind = ["generic", "faithful", "mislabeled", "mixed"][int(rng.integers(4))]
    if kind == "generic":
        mp = random_process(rng, ds, dp)
        return kind, mp, random_hermitian(rng, ds), random_density(rng, ds, rank=int(rng.integers(1, ds + 1)))
    mp, A, rho = controlled_instance(rng, ds, dp, kind)
    return kind, mp, A, rho
