import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edrlab.linalg import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, ValidationError, pure_state
from edrlab.measurement import (
    MeasuringProcess,
    NoncommutingError,
    cyclic_subspace,
    disturbance_operator,
    error_observables,
    error_operator,
    heisenberg_evolve,
    is_nondisturbing,
    is_precise,
    joint_distribution,
    locally_uniform_disturbance,
    locally_uniform_error,
    meter_output,
    nondisturbance_conditions,
    rms_disturbance,
    rms_disturbance_pure,
    rms_error,
    rms_error_pure,
    theorem1_conditions,
    weak_joint_distribution,
)
from edrlab.models import KET0, KET_PLUS, KET_PLUS_I, constant_meter_model, no_interaction_model, swap_model
from edrlab.random_models import (
    controlled_instance,
    haar_unitary,
    random_density,
    random_hermitian,
    random_process,
    random_unit_vector,
    theorem1_instance,
)

from .oracles import expanded_disturbance_square, expanded_mean_square, pure_error, sup_oracle

seeds = st.integers(0, 2**32 - 1)
DIAG_PM = np.diag([1.0, -1.0])


# --- process construction -------------------------------------------------------


def test_process_validation():
    with pytest.raises(ValidationError, match="norm"):
        MeasuringProcess(np.array([1.0, 1.0]), np.eye(4), SIGMA_Z)
    with pytest.raises(ValidationError, match="unitary"):
        MeasuringProcess(KET0, 2 * np.eye(4), SIGMA_Z)
    with pytest.raises(ValidationError, match="multiple"):
        MeasuringProcess(KET0, np.eye(5), SIGMA_Z)
    mp = MeasuringProcess(np.array([1, 0, 0]), np.eye(6), np.diag([0.0, 1.0, 2.0]))
    assert (mp.sys_dim, mp.probe_dim, mp.dim) == (2, 3, 6)


# --- Heisenberg picture ------------------------------------------------------------


def test_identity_coupling_leaves_operators(rng):
    mp = no_interaction_model(SIGMA_Z)
    A = random_hermitian(rng, 2)
    np.testing.assert_allclose(heisenberg_evolve(mp, A, "system", "dt"), np.kron(A, np.eye(2)), atol=1e-14)


def test_swap_moves_meter_onto_system(rng):
    M = random_hermitian(rng, 3)
    mp = swap_model(M, np.array([1, 0, 0]))
    np.testing.assert_allclose(meter_output(mp), np.kron(M, np.eye(3)), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_conjugation_preserves_spectrum(seed):
    rng = np.random.default_rng(seed)
    mp = random_process(rng, 3, 2)
    A = random_hermitian(rng, 3)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(heisenberg_evolve(mp, A)),
        np.linalg.eigvalsh(np.kron(A, np.eye(2))),
        atol=1e-10,
    )


def test_evolve_dimension_errors(cnot):
    with pytest.raises(ValidationError):
        heisenberg_evolve(cnot, np.eye(3))
    with pytest.raises(ValidationError):
        heisenberg_evolve(cnot, np.eye(3), "probe")
    with pytest.raises(ValueError):
        heisenberg_evolve(cnot, np.eye(2), "environment")


# --- error observables and rms values -------------------------------------------------


def test_error_observable_without_coupling(rng):
    A = random_hermitian(rng, 2)
    M = random_hermitian(rng, 2)
    mp = no_interaction_model(M, random_unit_vector(rng, 2))
    obs = error_observables(mp, A, np.eye(2))
    np.testing.assert_allclose(obs.N_A, np.kron(np.eye(2), M) - np.kron(A, np.eye(2)), atol=1e-14)
    np.testing.assert_allclose(obs.D_B, 0, atol=1e-14)
    np.testing.assert_allclose(obs.d_B, 0, atol=1e-14)


def test_cnot_error_vanishes_on_probe_sector(cnot):
    N = error_operator(cnot, SIGMA_Z)
    np.testing.assert_allclose(N @ np.kron(np.eye(2), KET0[:, None]), 0, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_cnot_exact_values(seed):
    from edrlab.models import cnot_model

    rng = np.random.default_rng(seed)
    mp = cnot_model()
    rho = random_density(rng, 2)
    assert rms_error(mp, SIGMA_Z, rho) <= 1e-14
    assert rms_disturbance(mp, SIGMA_X, rho) == pytest.approx(np.sqrt(2), abs=1e-12)
    assert rms_disturbance(mp, IDENTITY2, rho) == 0.0


def test_constant_meter_error():
    assert rms_error(constant_meter_model(), DIAG_PM, pure_state(KET0)) == pytest.approx(1.0, abs=1e-15)


def test_no_interaction_does_not_disturb(rng):
    mp = no_interaction_model(random_hermitian(rng, 3), random_unit_vector(rng, 3))
    for _ in range(5):
        assert rms_disturbance(mp, random_hermitian(rng, 2), random_density(rng, 2)) == 0.0


@settings(max_examples=100, deadline=None)
@given(seed=seeds, ds=st.integers(2, 4), dp=st.integers(2, 3))
def test_rms_matches_expanded_traces(seed, ds, dp):
    rng = np.random.default_rng(seed)
    mp = random_process(rng, ds, dp)
    A, B = random_hermitian(rng, ds), random_hermitian(rng, ds)
    rho = random_density(rng, ds)
    assert rms_error(mp, A, rho) ** 2 == pytest.approx(expanded_mean_square(mp, A, rho), abs=1e-10)
    assert rms_disturbance(mp, B, rho) ** 2 == pytest.approx(expanded_disturbance_square(mp, B, rho), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_pure_state_forms_agree(seed):
    rng = np.random.default_rng(seed)
    mp = random_process(rng, 3, 2)
    A = random_hermitian(rng, 3)
    phi = random_unit_vector(rng, 3)
    assert rms_error_pure(mp, A, phi) == pytest.approx(rms_error(mp, A, pure_state(phi)), abs=1e-12)
    assert rms_error_pure(mp, A, phi) == pytest.approx(pure_error(mp, A, phi), abs=1e-10)
    assert rms_disturbance_pure(mp, A, phi) == pytest.approx(rms_disturbance(mp, A, pure_state(phi)), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, phase=st.floats(0, 2 * np.pi))
def test_global_phase_invariance(seed, phase):
    rng = np.random.default_rng(seed)
    mp = random_process(rng, 2, 3)
    A, rho = random_hermitian(rng, 2), random_density(rng, 2)
    shifted = mp.with_global_phase(phase)
    assert rms_error(shifted, A, rho) == pytest.approx(rms_error(mp, A, rho), abs=1e-12)
    assert rms_disturbance(shifted, A, rho) == pytest.approx(rms_disturbance(mp, A, rho), abs=1e-12)


def test_degenerate_meter_relabeling(rng):
    # the same meter written with two different eigenbases of its degenerate block
    W = haar_unitary(rng, 3)
    block = haar_unitary(rng, 2)
    W2 = W.copy()
    W2[:, :2] = W[:, :2] @ block
    vals = np.diag([1.0, 1.0, -2.0])
    U = haar_unitary(rng, 6)
    xi = random_unit_vector(rng, 3)
    mp1 = MeasuringProcess(xi, U, W @ vals @ W.conj().T)
    mp2 = MeasuringProcess(xi, U, W2 @ vals @ W2.conj().T)
    A, rho = random_hermitian(rng, 2), random_density(rng, 2)
    assert rms_error(mp1, A, rho) == pytest.approx(rms_error(mp2, A, rho), abs=1e-12)


def test_state_dimension_checked(cnot):
    with pytest.raises(ValidationError):
        rms_error(cnot, SIGMA_Z, np.eye(3) / 3)


# --- joint and weak joint distributions ---------------------------------------------


def test_cnot_joint_distribution(cnot):
    rho = pure_state(KET_PLUS)
    jd = joint_distribution(cnot, heisenberg_evolve(cnot, SIGMA_Z, "system", "0"), meter_output(cnot), rho)
    np.testing.assert_allclose(jd.x_values, [-1, 1])
    np.testing.assert_allclose(jd.y_values, [-1, 1])
    np.testing.assert_allclose(jd.probs, [[0.5, 0.0], [0.0, 0.5]], atol=1e-14)
    assert jd.off_diagonal_mass() == pytest.approx(0.0, abs=1e-15)
    wjd = weak_joint_distribution(cnot, SIGMA_Z, rho)
    np.testing.assert_array_equal(wjd.values.real, jd.probs)


def test_independent_meter_gives_product_distribution(rng):
    xi = random_unit_vector(rng, 2)
    mp = no_interaction_model(SIGMA_X, xi)
    rho = random_density(rng, 2)
    jd = joint_distribution(mp, heisenberg_evolve(mp, SIGMA_Z, "system", "0"), meter_output(mp), rho)
    pz = np.array([rho[1, 1].real, rho[0, 0].real])
    minus = np.array([1, -1]) / np.sqrt(2)
    px = np.array([abs(np.vdot(minus, xi)) ** 2, 1 - abs(np.vdot(minus, xi)) ** 2])
    np.testing.assert_allclose(jd.probs, np.outer(pz, px), atol=1e-12)
    assert jd.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_noncommuting_pair_raises():
    mp = swap_model(SIGMA_X)
    with pytest.raises(NoncommutingError, match="weak_joint_distribution"):
        joint_distribution(mp, heisenberg_evolve(mp, SIGMA_Z, "system", "0"), meter_output(mp), pure_state(KET_PLUS_I))


def test_weak_values_can_be_complex():
    mp = swap_model(SIGMA_X)
    wjd = weak_joint_distribution(mp, SIGMA_Z, pure_state(KET_PLUS_I))
    assert np.abs(wjd.values.imag).max() > 1e-3
    assert wjd.values.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(wjd.marginal_x(), [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(wjd.marginal_y(), [0.5, 0.5], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=seeds, ds=st.integers(2, 4), dp=st.integers(2, 3))
def test_weak_distribution_marginals_and_expansion(seed, ds, dp):
    rng = np.random.default_rng(seed)
    mp = random_process(rng, ds, dp)
    A, rho = random_hermitian(rng, ds), random_density(rng, ds)
    wjd = weak_joint_distribution(mp, A, rho)
    assert wjd.values.sum() == pytest.approx(1.0, abs=1e-9)
    sigma = mp.composite_state(rho)
    born_x = [np.trace(p @ sigma).real for p in _projectors(heisenberg_evolve(mp, A, "system", "0"))]
    born_y = [np.trace(p @ sigma).real for p in _projectors(meter_output(mp))]
    np.testing.assert_allclose(wjd.marginal_x(), born_x, atol=1e-9)
    np.testing.assert_allclose(wjd.marginal_y(), born_y, atol=1e-9)
    assert wjd.mean_square_difference() == pytest.approx(rms_error(mp, A, rho) ** 2, abs=1e-9)


def _projectors(op):
    from edrlab.linalg import spectral_decompose

    return spectral_decompose(op).projectors


def test_joint_equals_weak_when_defined():
    rng = np.random.default_rng(99)
    found = 0
    for _ in range(200):
        _, mp, A, rho = theorem1_instance(rng)
        x0 = heisenberg_evolve(mp, A, "system", "0")
        try:
            jd = joint_distribution(mp, x0, meter_output(mp), rho)
        except NoncommutingError:
            continue
        found += 1
        wjd = weak_joint_distribution(mp, A, rho)
        np.testing.assert_allclose(jd.probs, wjd.values.real, atol=1e-9)
        assert np.abs(wjd.values.imag).max() <= 1e-9
    assert found >= 50


# --- precision ---------------------------------------------------------------------


def test_is_precise_examples(cnot, rng):
    for _ in range(10):
        assert is_precise(cnot, SIGMA_Z, random_density(rng, 2))
    diag = is_precise(constant_meter_model(), DIAG_PM, np.eye(2) / 2)
    assert not diag
    assert diag.commuting and diag.off_diagonal_mass == pytest.approx(1.0)


def test_precise_implies_zero_error():
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(300):
        _, mp, A, rho = theorem1_instance(rng)
        if is_precise(mp, A, rho):
            hits += 1
            assert rms_error(mp, A, rho) <= 1e-9
    assert hits > 20


def test_nondisturbing_examples(cnot, rng):
    mp = no_interaction_model(SIGMA_X)
    assert is_nondisturbing(mp, random_hermitian(rng, 2), random_density(rng, 2))
    assert not is_nondisturbing(cnot, SIGMA_X, np.eye(2) / 2)
    # sigma_z is the control: untouched by the coupling
    assert is_nondisturbing(cnot, SIGMA_Z, random_density(rng, 2))


# --- cyclic subspace -------------------------------------------------------------------


def test_cyclic_full_rank(rng):
    assert cyclic_subspace(random_hermitian(rng, 4), random_density(rng, 4)).dim == 4


def test_cyclic_eigenvector():
    c = cyclic_subspace(np.diag([1.0, -1.0, 5.0]), pure_state([1, 0, 0]))
    assert c.dim == 1
    np.testing.assert_allclose(np.abs(c.basis[:, 0]), [1, 0, 0], atol=1e-12)


def test_cyclic_degenerate_block():
    A = np.diag([1.0, 1.0, 2.0])
    c = cyclic_subspace(A, pure_state([1, 1, 1]))
    assert c.dim == 2
    P = c.projector()
    np.testing.assert_allclose(P @ np.array([1, 1, 0]), [1, 1, 0], atol=1e-12)
    np.testing.assert_allclose(P @ np.array([0, 0, 1]), [0, 0, 1], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(2, 5))
def test_cyclic_subspace_invariants(seed, dim):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, dim)
    A = np.round(A, 0) + np.round(A, 0).conj().T  # encourage degeneracies
    rho = random_density(rng, dim, rank=int(rng.integers(1, dim + 1)))
    c = cyclic_subspace(A, rho)
    np.testing.assert_allclose(c.basis.conj().T @ c.basis, np.eye(c.dim), atol=1e-10)
    P = c.projector()
    for proj in _projectors(A):
        np.testing.assert_allclose(P @ proj @ c.basis, proj @ c.basis, atol=1e-9)
    np.testing.assert_allclose(P @ rho @ P, rho, atol=1e-9)


# --- four-way characterization -------------------------------------------------------------


def test_theorem1_examples(cnot, rng):
    assert theorem1_conditions(cnot, SIGMA_Z, random_density(rng, 2)).as_tuple() == (True,) * 4
    cm = constant_meter_model()
    assert theorem1_conditions(cm, DIAG_PM, random_density(rng, 2)).as_tuple() == (False,) * 4


def test_theorem1_pure_eigenstate_edge_case():
    # the constant meter reading 1 is precise for A = diag(1,-1) only in |0>
    mp = constant_meter_model(value=1.0)
    assert theorem1_conditions(mp, DIAG_PM, pure_state([1, 0])).as_tuple() == (True,) * 4
    assert theorem1_conditions(mp, DIAG_PM, pure_state([0, 1])).as_tuple() == (False,) * 4
    assert theorem1_conditions(mp, DIAG_PM, pure_state([1, 1])).as_tuple() == (False,) * 4


def test_theorem1_agreement_on_random_instances():
    rng = np.random.default_rng(2024)
    seen = {True: 0, False: 0}
    for _ in range(300):
        kind, mp, A, rho = theorem1_instance(rng)
        c = theorem1_conditions(mp, A, rho, rng)
        assert c.agree, (kind, c)
        seen[c.precise] += 1
    assert seen[True] > 20 and seen[False] > 20


def test_mislabeled_instances_commute_but_are_imprecise():
    rng = np.random.default_rng(8)
    for _ in range(30):
        mp, A, rho = controlled_instance(rng, 3, 3, "mislabeled")
        d = is_precise(mp, A, rho)
        assert d.commuting and not d.precise


def test_nondisturbance_agreement(cnot, rng):
    mp = no_interaction_model(SIGMA_Y)
    assert nondisturbance_conditions(mp, SIGMA_X, random_density(rng, 2)).as_tuple() == (True,) * 4
    assert nondisturbance_conditions(cnot, SIGMA_X, random_density(rng, 2)).as_tuple() == (False,) * 4
    for _ in range(100):
        mp = random_process(rng, 2, 2)
        c = nondisturbance_conditions(mp, random_hermitian(rng, 2), random_density(rng, 2), rng)
        assert c.agree


# --- locally uniform quantities -----------------------------------------------------------------


def test_locally_uniform_examples(cnot, rng):
    rho = random_density(rng, 2)
    assert locally_uniform_error(cnot, SIGMA_Z, rho) <= 1e-14
    assert locally_uniform_error(constant_meter_model(), DIAG_PM, rho) == pytest.approx(1.0, abs=1e-12)
    assert locally_uniform_disturbance(cnot, SIGMA_X, rho) == pytest.approx(np.sqrt(2), abs=1e-12)
    assert locally_uniform_disturbance(no_interaction_model(SIGMA_Z), SIGMA_X, rho) == 0.0


def test_locally_uniform_vanishes_iff_precise():
    rng = np.random.default_rng(17)
    for _ in range(200):
        _, mp, A, rho = theorem1_instance(rng)
        assert (locally_uniform_error(mp, A, rho) <= 1e-9) == bool(is_precise(mp, A, rho))


def test_locally_uniform_against_sampling_oracle():
    rng = np.random.default_rng(41)
    for _ in range(5):
        mp = random_process(rng, 3, 2)
        A, rho = random_hermitian(rng, 3), random_density(rng, 3, rank=2)
        c = cyclic_subspace(A, rho)
        eps_bar = locally_uniform_error(mp, A, rho)
        sampled, polished = sup_oracle(lambda phi: pure_error(mp, A, phi), c.basis, rng, n_samples=2000)
        assert sampled <= eps_bar + 1e-12
        assert polished == pytest.approx(eps_bar, abs=1e-6)
        assert rms_error(mp, A, rho) <= eps_bar + 1e-12


def test_locally_uniform_disturbance_bounds_pure_values(rng):
    mp = random_process(rng, 3, 3)
    B, rho = random_hermitian(rng, 3), random_density(rng, 3)
    eta_bar = locally_uniform_disturbance(mp, B, rho)
    c = cyclic_subspace(B, rho)
    for _ in range(200):
        assert rms_disturbance_pure(mp, B, c.random_unit_vector(rng)) <= eta_bar + 1e-12
    assert disturbance_operator(mp, B).shape == (9, 9)
