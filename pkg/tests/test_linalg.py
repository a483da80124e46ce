import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edrlab.linalg import (
    SIGMA_X,
    SIGMA_Z,
    ValidationError,
    check_density,
    expectation,
    partial_probe_expectation,
    pure_state,
    spectral_decompose,
    std_dev,
    tensor,
)
from edrlab.random_models import random_density, random_hermitian, random_unit_vector

from .oracles import kron_loops, probe_contraction_loops

seeds = st.integers(0, 2**32 - 1)


def test_spectral_identity():
    d = spectral_decompose(np.eye(2))
    np.testing.assert_allclose(d.eigenvalues, [1.0])
    np.testing.assert_allclose(d.projectors[0], np.eye(2), atol=1e-12)


def test_spectral_diagonal():
    d = spectral_decompose(np.diag([-1.0, 1.0]))
    np.testing.assert_allclose(d.eigenvalues, [-1.0, 1.0])
    np.testing.assert_allclose(d.projectors[0], np.diag([1, 0]), atol=1e-12)
    np.testing.assert_allclose(d.projectors[1], np.diag([0, 1]), atol=1e-12)


def test_spectral_pauli_x():
    d = spectral_decompose(SIGMA_X)
    np.testing.assert_allclose(d.eigenvalues, [-1.0, 1.0], atol=1e-12)
    minus = 0.5 * np.array([[1, -1], [-1, 1]])
    plus = 0.5 * np.array([[1, 1], [1, 1]])
    np.testing.assert_allclose(d.projectors[0], minus, atol=1e-12)
    np.testing.assert_allclose(d.projectors[1], plus, atol=1e-12)
    for p in d.projectors:
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(-minus + plus, SIGMA_X, atol=1e-12)


def test_spectral_merges_degenerate_values():
    d = spectral_decompose(np.diag([2.0, 1.0, 2.0 + 1e-10]))
    assert len(d) == 2
    np.testing.assert_allclose(np.trace(d.projectors[1]).real, 2.0)


def test_spectral_rejects_non_hermitian():
    with pytest.raises(ValidationError, match="max"):
        spectral_decompose(np.array([[0, 1], [0, 0]]))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, dim=st.integers(2, 8))
def test_spectral_invariants(seed, dim):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, dim)
    d = spectral_decompose(H)
    np.testing.assert_allclose(d.reconstruct(), H, atol=1e-9)
    np.testing.assert_allclose(sum(d.projectors), np.eye(dim), atol=1e-9)
    for i, p in enumerate(d.projectors):
        np.testing.assert_allclose(p @ p, p, atol=1e-9)
        for q in d.projectors[i + 1 :]:
            np.testing.assert_allclose(p @ q, 0, atol=1e-9)
    np.testing.assert_allclose(
        np.sort(np.linalg.eigvalsh(H)),
        np.repeat(d.eigenvalues, [round(np.trace(p).real) for p in d.projectors]),
        atol=1e-9,
    )


def test_tensor_examples():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(tensor(np.diag([1, 2]), np.eye(2)), np.diag([1, 1, 2, 2]))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, da=st.integers(1, 4), db=st.integers(1, 4))
def test_tensor_block_order_and_hermiticity(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, da), random_hermitian(rng, db)
    t = tensor(a, b)
    np.testing.assert_allclose(t, kron_loops(a, b), atol=1e-14)
    np.testing.assert_allclose(t, t.conj().T, atol=1e-14)


def test_expectation_examples():
    rng = np.random.default_rng(1)
    rho = random_density(rng, 3)
    assert expectation(np.eye(3), rho) == pytest.approx(1.0)
    assert expectation(np.diag([-1, 1]), np.diag([0.25, 0.75])) == pytest.approx(0.5)
    plus = pure_state([1, 1])
    assert expectation(SIGMA_X, plus) == pytest.approx(1.0)


def test_expectation_dimension_mismatch():
    with pytest.raises(ValidationError):
        expectation(np.eye(2), np.eye(3) / 3)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 6))
def test_projector_expectations_in_unit_interval(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, dim)
    for p in spectral_decompose(random_hermitian(rng, dim)).projectors:
        val = expectation(p, rho)
        assert abs(val.imag) < 1e-10
        assert -1e-10 <= val.real <= 1 + 1e-10


def test_std_dev_examples():
    rho = random_density(np.random.default_rng(2), 2)
    assert std_dev(np.eye(2), rho) == pytest.approx(0.0, abs=1e-12)
    assert std_dev(SIGMA_Z, pure_state([1, 1])) == pytest.approx(1.0)
    assert std_dev(SIGMA_Z, pure_state([1, 0])) == 0.0


def test_std_dev_rejects_corrupted_state():
    # not a density matrix: negative weight makes the variance negative
    bad = np.diag([2.0, -1.0])
    with pytest.raises(ValidationError, match="negative"):
        std_dev(SIGMA_Z, bad)


def test_check_density():
    with pytest.raises(ValidationError, match="trace"):
        check_density(np.eye(2))
    with pytest.raises(ValidationError, match="negative"):
        check_density(np.diag([1.5, -0.5]))


def test_partial_probe_expectation_examples():
    rng = np.random.default_rng(3)
    xi = random_unit_vector(rng, 3)
    A = random_hermitian(rng, 2)
    B = random_hermitian(rng, 3)
    np.testing.assert_allclose(partial_probe_expectation(np.eye(6), xi), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(partial_probe_expectation(np.kron(A, np.eye(3)), xi), A, atol=1e-14)
    expected = A * np.vdot(xi, B @ xi)
    got = partial_probe_expectation(np.kron(A, B), xi)
    np.testing.assert_allclose(got, expected, atol=1e-14)
    np.testing.assert_allclose(got, probe_contraction_loops(np.kron(A, B), xi), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, ds=st.integers(1, 4), dp=st.integers(1, 4))
def test_partial_probe_expectation_quadratic_form(seed, ds, dp):
    rng = np.random.default_rng(seed)
    xi = random_unit_vector(rng, dp)
    N = random_hermitian(rng, ds * dp)
    K = partial_probe_expectation(N @ N, xi)
    np.testing.assert_allclose(K, probe_contraction_loops(N @ N, xi), atol=1e-12)
    np.testing.assert_allclose(K, K.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(K).min() >= -1e-10
    phi = random_unit_vector(rng, ds)
    v = np.kron(phi, xi)
    assert np.vdot(phi, K @ phi) == pytest.approx(np.vdot(v, N @ N @ v), abs=1e-12)


def test_partial_probe_expectation_errors():
    with pytest.raises(ValidationError, match="factor"):
        partial_probe_expectation(np.eye(5), np.array([1.0, 0.0]))
    with pytest.raises(ValidationError, match="norm"):
        partial_probe_expectation(np.eye(4), np.array([1.0, 1.0]))
