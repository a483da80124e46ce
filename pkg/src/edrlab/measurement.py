"""
Finite-dimensional measuring processes and their error/disturbance observables.

A measuring process is ``(K, |xi>, U, M)``: probe space, probe state, coupling
unitary on ``system (x) probe`` and meter observable on the probe. Heisenberg
operators follow ``X(0) = X (x) I`` (system) or ``I (x) X`` (probe) and
``X(dt) = U^dagger X(0) U``.

rms quantities are computed as Frobenius norms ``||N (sqrt(rho) (x) xi)||``
rather than ``sqrt(Tr[N^2 sigma])`` so that exact zeros stay at machine
precision instead of its square root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .config import TOL
from .linalg import (
    SpectralDecomposition,
    ValidationError,
    check_density,
    check_hermitian,
    check_unit_vector,
    check_unitary,
    commutator,
    ket,
    operator_norm,
    orthonormal_basis,
    partial_probe_expectation,
    spectral_decompose,
    support_basis,
)

Factor = Literal["system", "probe", "composite"]


@dataclass(frozen=True)
class MeasuringProcess:
    probe_state: np.ndarray
    unitary: np.ndarray
    meter: np.ndarray
    sys_dim: int = field(init=False)

    def __post_init__(self):
        xi = check_unit_vector(self.probe_state, "probe state")
        u = check_unitary(self.unitary, "coupling unitary")
        m = check_hermitian(self.meter, "meter observable")
        dp = xi.size
        if m.shape[0] != dp:
            raise ValidationError(f"meter dimension {m.shape[0]} != probe dimension {dp}")
        if u.shape[0] % dp:
            raise ValidationError(f"unitary dimension {u.shape[0]} is not a multiple of probe dimension {dp}")
        object.__setattr__(self, "probe_state", xi)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "meter", m)
        object.__setattr__(self, "sys_dim", u.shape[0] // dp)

    @property
    def probe_dim(self) -> int:
        return self.probe_state.size

    @property
    def dim(self) -> int:
        return self.sys_dim * self.probe_dim

    def composite_state(self, rho) -> np.ndarray:
        r = check_density(rho)
        if r.shape[0] != self.sys_dim:
            raise ValidationError(f"state dimension {r.shape[0]} != system dimension {self.sys_dim}")
        return np.kron(r, np.outer(self.probe_state, self.probe_state.conj()))

    def state_factor(self, rho) -> np.ndarray:
        """
        ``X`` with ``X X^dagger = rho (x) |xi><xi|`` on the support of ``rho``.

        Eigenvalues at or below ``TOL.support_tol`` are dropped; left in, their
        rounding noise (about 1e-16) would surface as 1e-8 in an rms value.
        """
        r = check_density(rho)
        if r.shape[0] != self.sys_dim:
            raise ValidationError(f"state dimension {r.shape[0]} != system dimension {self.sys_dim}")
        w, v = support_basis(r)
        return np.kron(v * np.sqrt(w), self.probe_state[:, None])

    def vector_factor(self, phi) -> np.ndarray:
        """Column ``phi (x) xi`` for a (normalized) system vector."""
        return np.kron(ket(phi), self.probe_state)[:, None]

    def with_global_phase(self, phase: float) -> "MeasuringProcess":
        return MeasuringProcess(self.probe_state, np.exp(1j * phase) * self.unitary, self.meter)

    def scaled_meter(self, factor: float) -> "MeasuringProcess":
        return MeasuringProcess(self.probe_state, self.unitary, factor * self.meter)


def heisenberg_evolve(
    mp: MeasuringProcess, op, which: Factor = "system", time: Literal["0", "dt"] = "dt"
) -> np.ndarray:
    """Embed ``op`` into the composite space and, for ``time="dt"``, conjugate by ``U``."""
    o = check_hermitian(op)
    if which == "system":
        if o.shape[0] != mp.sys_dim:
            raise ValidationError(f"system operator has dimension {o.shape[0]}, expected {mp.sys_dim}")
        op0 = np.kron(o, np.eye(mp.probe_dim))
    elif which == "probe":
        if o.shape[0] != mp.probe_dim:
            raise ValidationError(f"probe operator has dimension {o.shape[0]}, expected {mp.probe_dim}")
        op0 = np.kron(np.eye(mp.sys_dim), o)
    elif which == "composite":
        if o.shape[0] != mp.dim:
            raise ValidationError(f"composite operator has dimension {o.shape[0]}, expected {mp.dim}")
        op0 = o
    else:
        raise ValueError(f"unknown factor {which!r}")
    if time == "0":
        return op0
    if time != "dt":
        raise ValueError(f"time must be '0' or 'dt', got {time!r}")
    u = mp.unitary
    out = u.conj().T @ op0 @ u
    return 0.5 * (out + out.conj().T)


def meter_output(mp: MeasuringProcess) -> np.ndarray:
    """``M(dt)``."""
    return heisenberg_evolve(mp, mp.meter, "probe")


@dataclass(frozen=True)
class ErrorObservables:
    N_A: np.ndarray
    D_B: np.ndarray
    n_A: np.ndarray
    d_B: np.ndarray


def error_operator(mp: MeasuringProcess, A) -> np.ndarray:
    """``N(A) = M(dt) - A(0)``."""
    return meter_output(mp) - heisenberg_evolve(mp, A, "system", "0")


def disturbance_operator(mp: MeasuringProcess, B) -> np.ndarray:
    """``D(B) = B(dt) - B(0)``."""
    return heisenberg_evolve(mp, B, "system", "dt") - heisenberg_evolve(mp, B, "system", "0")


def error_observables(mp: MeasuringProcess, A, B) -> ErrorObservables:
    N = error_operator(mp, A)
    D = disturbance_operator(mp, B)
    n = partial_probe_expectation(N, mp.probe_state)
    d = partial_probe_expectation(D, mp.probe_state)
    return ErrorObservables(N, D, 0.5 * (n + n.conj().T), 0.5 * (d + d.conj().T))


def _rms(op: np.ndarray, factor: np.ndarray) -> float:
    return float(np.linalg.norm(op @ factor))


def rms_error(mp: MeasuringProcess, A, rho) -> float:
    """``eps(A, rho) = Tr[N(A)^2 rho (x) |xi><xi|]^(1/2)``."""
    return _rms(error_operator(mp, A), mp.state_factor(rho))


def rms_disturbance(mp: MeasuringProcess, B, rho) -> float:
    """``eta(B, rho) = Tr[D(B)^2 rho (x) |xi><xi|]^(1/2)``."""
    return _rms(disturbance_operator(mp, B), mp.state_factor(rho))


def rms_error_pure(mp: MeasuringProcess, A, phi) -> float:
    return _rms(error_operator(mp, A), mp.vector_factor(phi))


def rms_disturbance_pure(mp: MeasuringProcess, B, phi) -> float:
    return _rms(disturbance_operator(mp, B), mp.vector_factor(phi))


# --- joint and weak joint distributions ------------------------------------


@dataclass(frozen=True)
class WeakJointDistribution:
    """
    ``values[i, j] = <E^X(x_i) E^Y(y_j)>``; complex in general.

    ``x`` labels the t=0 observable and ``y`` the t=dt observable.
    """

    x_values: np.ndarray
    y_values: np.ndarray
    values: np.ndarray

    @property
    def support(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x in self.x_values for y in self.y_values]

    def flat_values(self) -> np.ndarray:
        return self.values.ravel()

    def marginal_x(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def marginal_y(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def off_diagonal_mask(self, tol: float = TOL.value_match_tol) -> np.ndarray:
        return np.abs(self.x_values[:, None] - self.y_values[None, :]) > tol

    def max_off_diagonal(self, tol: float = TOL.value_match_tol) -> float:
        mask = self.off_diagonal_mask(tol)
        return float(np.abs(self.values[mask]).max()) if mask.any() else 0.0

    def mean_square_difference(self) -> float:
        """``sum (x - y)^2 Re mu(x, y)``; unclamped."""
        diff = (self.x_values[:, None] - self.y_values[None, :]) ** 2
        return float(np.sum(diff * self.values.real))


@dataclass(frozen=True)
class JointDistribution(WeakJointDistribution):
    """Proper joint distribution; ``values`` are real probabilities."""

    @property
    def probs(self) -> np.ndarray:
        return self.values

    def off_diagonal_mass(self, tol: float = TOL.value_match_tol) -> float:
        return float(self.values[self.off_diagonal_mask(tol)].sum())


class NoncommutingError(ValueError):
    """The pair does not commute in the state; no joint distribution exists."""


def _weak_values(dx: SpectralDecomposition, dy: SpectralDecomposition, sigma: np.ndarray) -> np.ndarray:
    out = np.empty((len(dx), len(dy)), dtype=complex)
    for i, px in enumerate(dx.projectors):
        for j, py in enumerate(dy.projectors):
            out[i, j] = np.einsum("ij,jk,ki->", px, py, sigma)
    return out


def weak_joint_distribution_of(x_op, y_op, sigma) -> WeakJointDistribution:
    """Weak joint distribution of two composite observables in ``sigma``."""
    dx = spectral_decompose(x_op)
    dy = spectral_decompose(y_op)
    return WeakJointDistribution(dx.eigenvalues, dy.eigenvalues, _weak_values(dx, dy, np.asarray(sigma)))


def weak_joint_distribution(mp: MeasuringProcess, A, rho) -> WeakJointDistribution:
    """``mu_W(x, y) = <E^{A(0)}(x) E^{M(dt)}(y)>`` in ``rho (x) |xi><xi|``."""
    return weak_joint_distribution_of(
        heisenberg_evolve(mp, A, "system", "0"), meter_output(mp), mp.composite_state(rho)
    )


def invariant_closure(basis: np.ndarray, projectors: list[np.ndarray], rank_tol: float = TOL.rank_tol) -> np.ndarray:
    """Smallest subspace containing ``basis`` and invariant under every projector."""
    cur = orthonormal_basis(basis, rank_tol)
    while True:
        grown = orthonormal_basis(np.hstack([cur] + [p @ cur for p in projectors]), rank_tol)
        if grown.shape[1] == cur.shape[1]:
            return grown
        cur = grown


def commutation_residual(x_op, y_op, sigma) -> float:
    """
    Largest ``||[E^X(a), E^Y(b)] w||`` over unit ``w`` in the cyclic subspace
    generated by both spectral measures from the support of ``sigma``.
    """
    dx = spectral_decompose(x_op)
    dy = spectral_decompose(y_op)
    _, supp = support_basis(sigma)
    w = invariant_closure(supp, list(dx.projectors) + list(dy.projectors))
    res = 0.0
    for px in dx.projectors:
        for py in dy.projectors:
            res = max(res, operator_norm(commutator(px, py) @ w))
    return res


def commute_in_state(x_op, y_op, sigma, tol: float = TOL.commute_tol) -> bool:
    return commutation_residual(x_op, y_op, sigma) <= tol


def joint_distribution_of(x_op, y_op, sigma) -> JointDistribution:
    residual = commutation_residual(x_op, y_op, sigma)
    if residual > TOL.commute_tol:
        raise NoncommutingError(
            f"observables do not commute in the state (residual {residual:.3e}); "
            "use weak_joint_distribution instead"
        )
    w = weak_joint_distribution_of(x_op, y_op, sigma)
    probs = w.values.real
    if probs.min() < -TOL.psd_tol:
        raise ValidationError(f"negative joint probability {probs.min():.3e}")
    return JointDistribution(w.x_values, w.y_values, np.clip(probs, 0.0, None))


def joint_distribution(mp: MeasuringProcess, x_op, y_op, rho) -> JointDistribution:
    """
    Joint distribution of two composite observables in ``rho (x) |xi><xi|``.

    ``x_op`` and ``y_op`` are composite-space matrices, typically built with
    :func:`heisenberg_evolve` (e.g. ``A(0)`` and ``M(dt)``).
    """
    return joint_distribution_of(x_op, y_op, mp.composite_state(rho))


# --- precision, cyclic subspaces, Theorem-1 style characterization ----------


@dataclass(frozen=True)
class PrecisionDiagnostics:
    precise: bool
    commuting: bool
    commutation_residual: float
    off_diagonal_mass: float | None

    def __bool__(self) -> bool:
        return self.precise


def _diagonal_check(x_op, y_op, sigma) -> PrecisionDiagnostics:
    residual = commutation_residual(x_op, y_op, sigma)
    if residual > TOL.commute_tol:
        return PrecisionDiagnostics(False, False, residual, None)
    jd = joint_distribution_of(x_op, y_op, sigma)
    mass = jd.off_diagonal_mass()
    return PrecisionDiagnostics(mass <= TOL.zero_tol, True, residual, mass)


def is_precise(mp: MeasuringProcess, A, rho) -> PrecisionDiagnostics:
    """``A(0)`` and ``M(dt)`` commute in the state and their joint law sits on ``x = y``."""
    return _diagonal_check(heisenberg_evolve(mp, A, "system", "0"), meter_output(mp), mp.composite_state(rho))


def is_nondisturbing(mp: MeasuringProcess, B, rho) -> PrecisionDiagnostics:
    """``B(0)`` and ``B(dt)`` commute in the state and their joint law sits on the diagonal."""
    return _diagonal_check(
        heisenberg_evolve(mp, B, "system", "0"),
        heisenberg_evolve(mp, B, "system", "dt"),
        mp.composite_state(rho),
    )


@dataclass(frozen=True)
class CyclicSubspace:
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def random_unit_vector(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        return self.basis @ (c / np.linalg.norm(c))


def cyclic_subspace(A, rho) -> CyclicSubspace:
    """Span of ``E^A(a) |phi>`` over eigenvalues ``a`` and support vectors ``phi`` of ``rho``."""
    dec = spectral_decompose(A)
    r = check_density(rho)
    if r.shape[0] != dec.projectors[0].shape[0]:
        raise ValidationError("observable and state dimensions differ")
    _, supp = support_basis(r)
    images = np.hstack([p @ supp for p in dec.projectors])
    return CyclicSubspace(orthonormal_basis(images))


@dataclass(frozen=True)
class Theorem1Conditions:
    precise: bool
    weak_diagonal: bool
    vanishes_on_cyclic: bool
    vanishes_on_generating: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.precise, self.weak_diagonal, self.vanishes_on_cyclic, self.vanishes_on_generating)

    @property
    def agree(self) -> bool:
        return len(set(self.as_tuple())) == 1


def _four_conditions(diag, wjd, rms_pure, subspace, rng, n_random) -> Theorem1Conditions:
    weak_diag = wjd.max_off_diagonal() <= TOL.zero_tol
    on_basis = all(rms_pure(subspace.basis[:, k]) <= TOL.zero_tol for k in range(subspace.dim))
    on_random = all(rms_pure(subspace.random_unit_vector(rng)) <= TOL.zero_tol for _ in range(n_random))
    return Theorem1Conditions(bool(diag), weak_diag, on_basis and on_random, on_basis)


def theorem1_conditions(
    mp: MeasuringProcess, A, rho, rng: np.random.Generator | None = None, n_random: int = 20
) -> Theorem1Conditions:
    """
    The four equivalent characterizations of precise measurement of ``A`` in ``rho``.

    (iii) is probed on a basis of ``C(A, rho)`` plus ``n_random`` random unit
    vectors; (iv) uses the basis itself as the generating subset.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    return _four_conditions(
        is_precise(mp, A, rho),
        weak_joint_distribution(mp, A, rho),
        lambda phi: rms_error_pure(mp, A, phi),
        cyclic_subspace(A, rho),
        rng,
        n_random,
    )


def nondisturbance_conditions(
    mp: MeasuringProcess, B, rho, rng: np.random.Generator | None = None, n_random: int = 20
) -> Theorem1Conditions:
    """Mirror of :func:`theorem1_conditions` for the pair ``(B(0), B(dt))``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    wjd = weak_joint_distribution_of(
        heisenberg_evolve(mp, B, "system", "0"), heisenberg_evolve(mp, B, "system", "dt"), mp.composite_state(rho)
    )
    return _four_conditions(
        is_nondisturbing(mp, B, rho),
        wjd,
        lambda phi: rms_disturbance_pure(mp, B, phi),
        cyclic_subspace(B, rho),
        rng,
        n_random,
    )


def _sup_over(op: np.ndarray, mp: MeasuringProcess, subspace: CyclicSubspace) -> float:
    # eps(phi) = ||op (B c (x) xi)|| for phi = B c, so the sup is a singular value
    cols = np.kron(subspace.basis, mp.probe_state[:, None])
    return float(np.linalg.svd(op @ cols, compute_uv=False).max())


def locally_uniform_error(mp: MeasuringProcess, A, rho) -> float:
    """``sup eps(A, |phi>)`` over unit vectors of ``C(A, rho)``."""
    return _sup_over(error_operator(mp, A), mp, cyclic_subspace(A, rho))


def locally_uniform_disturbance(mp: MeasuringProcess, B, rho) -> float:
    """``sup eta(B, |phi>)`` over unit vectors of ``C(B, rho)``."""
    return _sup_over(disturbance_operator(mp, B), mp, cyclic_subspace(B, rho))
