"""
Dense complex linear algebra for finite-dimensional measurement models.

Operators and states are plain ``numpy`` arrays; the ``check_*`` helpers
validate them and return a complex copy. All composite spaces use the
system-major ordering of :func:`numpy.kron`, i.e. ``system (x) probe``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .config import TOL

ArrayLike = npt.ArrayLike

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


class ValidationError(ValueError):
    """Raised when an operator or state violates its defining invariants."""


def _square(a: ArrayLike, name: str) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


def check_hermitian(op: ArrayLike, name: str = "operator", tol: float = TOL.hermit_tol) -> np.ndarray:
    """Return ``op`` as a complex array after checking ``op == op^dagger``."""
    m = _square(op, name)
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > tol:
        raise ValidationError(f"{name} is not Hermitian: max |A - A^dagger| = {asym:.3e}")
    return m


def check_density(rho: ArrayLike, name: str = "state") -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace, positive semidefinite)."""
    m = check_hermitian(rho, name)
    tr = np.trace(m)
    if abs(tr - 1.0) > TOL.trace_tol:
        raise ValidationError(f"{name} has trace {tr.real:.12g}, expected 1")
    lo = float(np.linalg.eigvalsh(m).min())
    if lo < -TOL.psd_tol:
        raise ValidationError(f"{name} has negative eigenvalue {lo:.3e}")
    return m


def check_unitary(u: ArrayLike, name: str = "unitary") -> np.ndarray:
    m = _square(u, name)
    dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    if dev > TOL.unitary_tol:
        raise ValidationError(f"{name} is not unitary: max |U^dagger U - I| = {dev:.3e}")
    return m


def check_unit_vector(v: ArrayLike, name: str = "vector") -> np.ndarray:
    x = np.array(v, dtype=complex)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d vector, got shape {x.shape}")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > TOL.norm_tol:
        raise ValidationError(f"{name} has norm {nrm:.12g}, expected 1")
    return x


def ket(v: ArrayLike) -> np.ndarray:
    """Normalize ``v`` to a unit vector."""
    x = np.asarray(v, dtype=complex).ravel()
    return x / np.linalg.norm(x)


def pure_state(v: ArrayLike) -> np.ndarray:
    """Density matrix ``|v><v|`` of the normalized vector ``v``."""
    x = ket(v)
    return np.outer(x, x.conj())


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their orthogonal projectors."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projectors))

    def projector_for(self, value: float, tol: float = TOL.value_match_tol) -> np.ndarray | None:
        """Projector of the eigenvalue within ``tol`` of ``value``, or None."""
        for lam, p in zip(self.eigenvalues, self.projectors):
            if abs(lam - value) <= tol:
                return p
        return None


def spectral_decompose(op: ArrayLike, degeneracy_tol: float = TOL.degeneracy_tol) -> SpectralDecomposition:
    """
    Spectral measure of a Hermitian matrix.

    Eigenvalues closer than ``degeneracy_tol`` to their predecessor are merged
    into one block, so each distinct value owns exactly one projector.

    Examples
    --------
    >>> d = spectral_decompose(SIGMA_X)
    >>> d.eigenvalues
    array([-1.,  1.])
    """
    m = check_hermitian(op)
    w, v = np.linalg.eigh(m)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= degeneracy_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    values = np.array([w[g].mean() for g in groups])
    projs = []
    for g in groups:
        vg = v[:, g]
        p = vg @ vg.conj().T
        projs.append(0.5 * (p + p.conj().T))
    return SpectralDecomposition(values, tuple(projs))


def tensor(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Kronecker product with ``a`` as the major (system) factor."""
    return np.kron(_square(a, "a"), _square(b, "b"))


def expectation(op: ArrayLike, state: ArrayLike) -> complex:
    """``Tr[op state]``."""
    o = _square(op, "operator")
    s = _square(state, "state")
    if o.shape != s.shape:
        raise ValidationError(f"dimension mismatch: operator {o.shape} vs state {s.shape}")
    return complex(np.einsum("ij,ji->", o, s))


def _clamped_sqrt(raw: float, what: str) -> float:
    if raw < -TOL.psd_tol:
        raise ValidationError(f"{what} is negative ({raw:.3e}); input is corrupted")
    return float(np.sqrt(max(0.0, raw)))


def std_dev(op: ArrayLike, state: ArrayLike) -> float:
    """Standard deviation ``sqrt(<A^2> - <A>^2)``."""
    a = check_hermitian(op)
    mean = expectation(a, state).real
    # centred form avoids cancellation in <A^2> - <A>^2
    c = a - mean * np.eye(a.shape[0])
    return _clamped_sqrt(expectation(c @ c, state).real, "variance")


def partial_probe_expectation(composite_op: ArrayLike, probe_state: ArrayLike) -> np.ndarray:
    """
    Contract the probe factor of ``composite_op`` against ``|xi>``.

    Returns the system operator ``K`` with
    ``<phi|K|phi> = <phi (x) xi| composite_op |phi (x) xi>``.
    """
    xi = check_unit_vector(probe_state, "probe state")
    c = _square(composite_op, "composite operator")
    dp = xi.size
    n = c.shape[0]
    if n % dp:
        raise ValidationError(f"composite dimension {n} does not factor with probe dimension {dp}")
    ds = n // dp
    blocks = c.reshape(ds, dp, ds, dp)
    return np.einsum("k,ikjl,l->ij", xi.conj(), blocks, xi)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def orthonormal_basis(vectors: np.ndarray, rank_tol: float = TOL.rank_tol) -> np.ndarray:
    """
    Orthonormal basis (as columns) of the span of the columns of ``vectors``.

    Singular values at or below ``rank_tol`` times the largest one (and at
    least ``rank_tol`` in absolute terms) are treated as zero.
    """
    m = np.asarray(vectors, dtype=complex)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cut = rank_tol * max(1.0, s[0] if s.size else 0.0)
    return u[:, s > cut]


def support_basis(state: ArrayLike, tol: float = TOL.support_tol) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues above ``tol`` and their eigenvectors (columns)."""
    w, v = np.linalg.eigh(_square(state, "state"))
    keep = w > tol
    return w[keep], v[:, keep]


def sqrt_psd(state: ArrayLike) -> np.ndarray:
    w, v = np.linalg.eigh(_square(state, "state"))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def operator_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0
