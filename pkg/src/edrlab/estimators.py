"""
Statistics-only estimates of rms error and disturbance.

Three-state method
    The cross term ``<M(dt) A(0) + A(0) M(dt)>`` equals ``Tr[O1 (A rho + rho A)]``
    and ``A rho + rho A = (1+A) rho (1+A) - rho - A rho A``. So the output
    statistics of the apparatus in the three preparable states ``rho``,
    ``A rho A / t2`` and ``(1+A) rho (1+A) / t3`` (with ``t2``, ``t3`` their
    normalizations) plus a direct measurement of ``A`` in ``rho`` give

        eps^2 = <A^2> + Tr[O2 rho] - (t3 Tr[O1 rho3] - Tr[O1 rho] - t2 Tr[O1 rho2]).

Weak-measurement method
    ``eps^2 = sum (x - y)^2 Re mu_W(x, y)`` over the weak joint distribution of
    ``A(0)`` and ``M(dt)``; the disturbance uses ``B(0)`` and ``B(dt)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .linalg import (
    ValidationError,
    check_density,
    check_hermitian,
    expectation,
    partial_probe_expectation,
    spectral_decompose,
)
from .measurement import (
    MeasuringProcess,
    WeakJointDistribution,
    heisenberg_evolve,
    weak_joint_distribution,
    weak_joint_distribution_of,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OutputMoments:
    """
    Outcome statistics of an apparatus as system operators.

    ``povm[k]`` is the effect of outcome ``values[k]``; ``O1`` and ``O2`` are
    the first and second moment operators ``sum_k values[k]**j povm[k]``.
    """

    values: np.ndarray
    povm: tuple[np.ndarray, ...]

    def __post_init__(self):
        total = sum(self.povm)
        if np.max(np.abs(total - np.eye(total.shape[0]))) > TOL.projector_tol:
            raise ValidationError("POVM elements do not sum to the identity")

    @property
    def O1(self) -> np.ndarray:
        return sum(v * e for v, e in zip(self.values, self.povm))

    @property
    def O2(self) -> np.ndarray:
        return sum(v * v * e for v, e in zip(self.values, self.povm))

    def probabilities(self, rho) -> np.ndarray:
        p = np.array([expectation(e, rho).real for e in self.povm])
        return np.clip(p, 0.0, None) / np.clip(p, 0.0, None).sum()

    def shifted(self, c: float) -> "OutputMoments":
        return OutputMoments(self.values + c, self.povm)


def _povm_of(mp: MeasuringProcess, composite_obs: np.ndarray) -> OutputMoments:
    dec = spectral_decompose(composite_obs)
    effects = []
    for p in dec.projectors:
        e = partial_probe_expectation(p, mp.probe_state)
        effects.append(0.5 * (e + e.conj().T))
    return OutputMoments(dec.eigenvalues, tuple(effects))


def output_moments(mp: MeasuringProcess) -> OutputMoments:
    """Meter statistics: effects ``<xi| U^dagger (I (x) P_m) U |xi>``."""
    dec = spectral_decompose(mp.meter)
    effects = []
    for p in dec.projectors:
        e = partial_probe_expectation(heisenberg_evolve(mp, p, "probe"), mp.probe_state)
        effects.append(0.5 * (e + e.conj().T))
    return OutputMoments(dec.eigenvalues, tuple(effects))


def evolved_moments(mp: MeasuringProcess, B) -> OutputMoments:
    """Statistics of a projective ``B`` measurement on the system after the interaction."""
    return _povm_of(mp, heisenberg_evolve(mp, B, "system", "dt"))


def projective_moments(A) -> OutputMoments:
    dec = spectral_decompose(A)
    return OutputMoments(dec.eigenvalues, dec.projectors)


@dataclass(frozen=True)
class ThreeStates:
    rho: np.ndarray
    rho_a: np.ndarray
    t_a: float
    rho_1pa: np.ndarray
    t_1pa: float


def three_states(A, rho) -> ThreeStates:
    """``rho``, ``A rho A / t2`` and ``(1+A) rho (1+A) / t3``; raises if a trace vanishes."""
    A = check_hermitian(A, "A")
    rho = check_density(rho)
    one_a = np.eye(A.shape[0]) + A
    s2 = A @ rho @ A
    s3 = one_a @ rho @ one_a
    t2 = float(np.trace(s2).real)
    t3 = float(np.trace(s3).real)
    if t2 <= TOL.support_tol or t3 <= TOL.support_tol:
        raise ValidationError(
            f"degenerate three-state preparation (Tr[A rho A]={t2:.3e}, Tr[(1+A) rho (1+A)]={t3:.3e}); "
            "use a shifted observable A + c I"
        )
    return ThreeStates(rho, s2 / t2, t2, s3 / t3, t3)


def shift_constant(A) -> float:
    """``1 + max |eig(A)|``, which makes ``A + c I`` positive definite."""
    return 1.0 + float(np.max(np.abs(np.linalg.eigvalsh(check_hermitian(A)))))


def _needs_shift(A, rho) -> bool:
    try:
        three_states(A, rho)
    except ValidationError:
        return True
    return False


def _three_state_square(moments: OutputMoments, A, rho) -> float:
    st = three_states(A, rho)
    O1 = moments.O1
    cross = (
        st.t_1pa * expectation(O1, st.rho_1pa).real
        - expectation(O1, st.rho).real
        - st.t_a * expectation(O1, st.rho_a).real
    )
    return float(expectation(A @ A, rho).real + expectation(moments.O2, rho).real - cross)


def _clamped_sqrt(raw: float) -> float:
    if raw < -TOL.psd_tol:
        raise ValidationError(f"estimated mean-square error is negative ({raw:.3e})")
    return float(np.sqrt(max(0.0, raw)))


def three_state_square(moments: OutputMoments, A, rho) -> float:
    """Unclamped three-state estimate of the mean-square error."""
    A = check_hermitian(A, "A")
    if _needs_shift(A, rho):
        # eps is invariant under A -> A + c, M -> M + c
        c = shift_constant(A)
        log.warning("three-state preparation degenerate; shifting A by %g", c)
        return _three_state_square(moments.shifted(c), A + c * np.eye(A.shape[0]), rho)
    return _three_state_square(moments, A, rho)


def three_state_error(moments: OutputMoments, A, rho) -> float:
    """rms error from apparatus statistics in three states and a direct ``A`` measurement."""
    return _clamped_sqrt(three_state_square(moments, A, rho))


def three_state_disturbance(mp: MeasuringProcess, B, rho) -> float:
    """rms disturbance with ``B`` measured after the interaction playing the meter."""
    return _clamped_sqrt(three_state_square(evolved_moments(mp, B), B, rho))


def weak_method_square(wjd: WeakJointDistribution) -> float:
    return wjd.mean_square_difference()


def weak_method_error(wjd: WeakJointDistribution) -> float:
    """``(sum (x - y)^2 Re mu_W(x, y))^(1/2)``."""
    return _clamped_sqrt(weak_method_square(wjd))


def weak_method_disturbance(mp: MeasuringProcess, B, rho) -> float:
    wjd = weak_joint_distribution_of(
        heisenberg_evolve(mp, B, "system", "0"),
        heisenberg_evolve(mp, B, "system", "dt"),
        mp.composite_state(rho),
    )
    return weak_method_error(wjd)


def weak_method_error_of(mp: MeasuringProcess, A, rho) -> float:
    return weak_method_error(weak_joint_distribution(mp, A, rho))


# --- sampling mode ----------------------------------------------------------


@dataclass(frozen=True)
class SampledStatistics:
    """
    Outcome counts per preparation label.

    ``values[label]`` are the possible outcomes and ``counts[label]`` how often
    each occurred; every label has ``n_shots`` shots. ``shift`` is the constant
    added to the measured observable (and to every recorded outcome) when the
    three-state preparation had to be regularized.
    """

    values: dict[str, np.ndarray]
    counts: dict[str, np.ndarray]
    n_shots: int
    seed: int
    shift: float = 0.0

    def mean(self, label: str, power: int = 1) -> float:
        return float(np.dot(self.values[label] ** power, self.counts[label]) / self.n_shots)

    def sample_variance(self, label: str, f) -> float:
        """Unbiased sample variance of ``f(outcome)``."""
        v = f(self.values[label])
        c = self.counts[label]
        mu = np.dot(v, c) / self.n_shots
        return float(np.dot((v - mu) ** 2, c) / max(1, self.n_shots - 1))


def _draw(rng: np.random.Generator, probs: np.ndarray, n_shots: int) -> np.ndarray:
    return rng.multinomial(n_shots, probs)


def sample_outcomes(mp: MeasuringProcess, rho, n_shots: int, seed: int) -> SampledStatistics:
    """i.i.d. meter readings after the interaction, from the Born rule."""
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    mom = output_moments(mp)
    rng = np.random.default_rng(seed)
    counts = _draw(rng, mom.probabilities(check_density(rho)), n_shots)
    return SampledStatistics({"rho": mom.values}, {"rho": counts}, n_shots, seed)


def sample_three_state(moments: OutputMoments, A, rho, n_shots: int, seed: int) -> SampledStatistics:
    """
    Simulated three-state experiment.

    Runs the apparatus described by ``moments`` ``n_shots`` times in each of
    the three states and measures ``A`` directly ``n_shots`` times in ``rho``.
    Each preparation draws from its own child of ``SeedSequence(seed)``.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    A = check_hermitian(A, "A")
    rho = check_density(rho)
    c = shift_constant(A) if _needs_shift(A, rho) else 0.0
    A_eff = A + c * np.eye(A.shape[0])
    mom = moments.shifted(c)
    st = three_states(A_eff, rho)
    direct = projective_moments(A_eff)
    preps = {
        "rho": (mom, st.rho),
        "rho_A": (mom, st.rho_a),
        "rho_1pA": (mom, st.rho_1pa),
        "direct": (direct, rho),
    }
    children = np.random.SeedSequence(seed).spawn(len(preps))
    values, counts = {}, {}
    for (label, (m, state)), child in zip(preps.items(), children):
        values[label] = m.values
        counts[label] = _draw(np.random.default_rng(child), m.probabilities(state), n_shots)
    return SampledStatistics(values, counts, n_shots, seed, c)


@dataclass(frozen=True)
class SampledEstimate:
    """Mean-square estimate with its standard error (delta-free: linear in sample means)."""

    square: float
    square_stderr: float

    @property
    def value(self) -> float:
        return float(np.sqrt(max(0.0, self.square)))


def three_state_from_samples(stats: SampledStatistics, A, rho) -> SampledEstimate:
    """
    Three-state estimate from counts.

    ``t2`` and ``t3`` are preparation data and are taken as exact. The ``rho``
    shots contribute through ``m^2 + m`` so that the four preparations are
    independent and the standard error adds in quadrature.
    """
    A = check_hermitian(A, "A")
    st = three_states(A + stats.shift * np.eye(A.shape[0]), rho)
    n = stats.n_shots
    sq = (
        stats.mean("direct", 2)
        + stats.mean("rho", 2)
        + stats.mean("rho", 1)
        - st.t_1pa * stats.mean("rho_1pA")
        + st.t_a * stats.mean("rho_A")
    )
    var = (
        stats.sample_variance("direct", lambda v: v**2)
        + stats.sample_variance("rho", lambda v: v**2 + v)
        + st.t_1pa**2 * stats.sample_variance("rho_1pA", lambda v: v)
        + st.t_a**2 * stats.sample_variance("rho_A", lambda v: v)
    ) / n
    return SampledEstimate(float(sq), float(np.sqrt(var)))
