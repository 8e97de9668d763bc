"""Linear algebra layer: eigensolver against an independent reference,
partial transpose/trace identities, and density matrix validation."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaocav.linalg import (
    InvariantViolation,
    eig_hermitian,
    is_hermitian,
    jacobi_eigh,
    partial_trace,
    partial_transpose,
    partial_transpose_batch,
    purity_overlap,
    require_density_matrix,
    tensor,
)
from conftest import random_density, random_hermitian, random_pure_state, random_unitary

BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def test_tensor_matches_kron_chain():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 1j], [-1j, 0]], dtype=complex)
    c = np.eye(2, dtype=complex)
    assert np.array_equal(tensor(a, b), np.kron(a, b))
    assert np.array_equal(tensor(a, b, c), np.kron(np.kron(a, b), c))
    assert tensor(a).shape == (2, 2)


def test_jacobi_matches_reference_on_large_batch(rng):
    mats = np.array([random_hermitian(rng) for _ in range(1000)])
    got = jacobi_eigh(mats)
    want = np.linalg.eigvalsh(mats)
    assert np.max(np.abs(got - want)) <= 1e-11
    traces = np.einsum("bii->b", mats).real
    assert np.max(np.abs(got.sum(axis=1) - traces)) <= 1e-10


def test_jacobi_eigenvectors_diagonalize(rng):
    mats = np.array([random_hermitian(rng) for _ in range(50)])
    w, v = jacobi_eigh(mats, vectors=True)
    residual = np.einsum("bij,bjk->bik", mats, v) - v * w[:, None, :]
    assert np.max(np.abs(residual)) <= 1e-9
    gram = np.einsum("bij,bik->bjk", v.conj(), v)
    assert np.max(np.abs(gram - np.eye(4))) <= 1e-10


def test_jacobi_diagonal_input_is_exact():
    d = np.diag([3.0, -1.0, 0.5, 2.0]).astype(complex)
    w = jacobi_eigh(d)
    assert np.array_equal(w, np.array([-1.0, 0.5, 2.0, 3.0]))


def test_jacobi_single_matrix_shape(rng):
    m = random_hermitian(rng, dim=3)
    w = jacobi_eigh(m)
    assert w.shape == (3,)
    assert np.all(np.diff(w) >= 0)


def test_eig_hermitian_rejects_asymmetric_input():
    m = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(InvariantViolation):
        eig_hermitian(m)


def test_partial_transpose_bell_spectrum():
    rho = np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj())
    w = jacobi_eigh(partial_transpose(rho, 2))
    assert np.max(np.abs(w - np.array([-0.5, 0.5, 0.5, 0.5]))) <= 1e-12
    w1 = jacobi_eigh(partial_transpose(rho, 1))
    assert np.max(np.abs(w1 - np.array([-0.5, 0.5, 0.5, 0.5]))) <= 1e-12


def test_partial_transpose_involution(rng):
    for _ in range(25):
        rho = random_density(rng)
        again = partial_transpose(partial_transpose(rho, 2), 2)
        assert np.array_equal(again, rho)


def test_partial_transpose_batch_agrees_with_single(rng):
    rhos = np.array([random_density(rng) for _ in range(8)])
    batch = partial_transpose_batch(rhos, subsystem=2)
    for i in range(8):
        assert np.array_equal(batch[i], partial_transpose(rhos[i], 2))


def test_partial_transpose_input_checks():
    with pytest.raises(InvariantViolation):
        partial_transpose(np.eye(3, dtype=complex), 2)
    bad = np.eye(4, dtype=complex)
    bad[0, 1] = 1.0
    with pytest.raises(InvariantViolation):
        partial_transpose(bad, 2)
    with pytest.raises(InvariantViolation):
        partial_transpose(np.eye(4, dtype=complex) / 4.0, 3)


def test_partial_trace_of_product_state(rng):
    rho1 = random_density(rng, dim=2)
    rho2 = random_density(rng, dim=2)
    joint = tensor(rho1, rho2)
    assert np.max(np.abs(partial_trace(joint, 1) - rho1)) <= 1e-12
    assert np.max(np.abs(partial_trace(joint, 2) - rho2)) <= 1e-12
    assert np.max(np.abs(partial_trace(joint, (1, 2)) - joint)) <= 1e-12


def test_partial_trace_three_qubit_register(rng):
    rho1 = random_density(rng, dim=2)
    rho23 = random_density(rng, dim=4)
    joint = tensor(rho1, rho23)
    assert np.max(np.abs(partial_trace(joint, (2, 3)) - rho23)) <= 1e-12
    assert np.max(np.abs(partial_trace(joint, 1) - rho1)) <= 1e-12
    # tracing everything but one qubit of an entangled pair gives its marginal
    bell = np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj())
    marg = partial_trace(tensor(rho1, bell), 3)
    assert np.max(np.abs(marg - np.eye(2) / 2.0)) <= 1e-12


def test_partial_trace_index_validation():
    rho = np.eye(4, dtype=complex) / 4.0
    with pytest.raises(InvariantViolation):
        partial_trace(rho, 3)
    with pytest.raises(InvariantViolation):
        partial_trace(rho, ())
    with pytest.raises(InvariantViolation):
        partial_trace(np.eye(3, dtype=complex) / 3.0, 1)


def test_purity_overlap_reference_values():
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    assert abs(purity_overlap(rho, rho) - 0.5) <= 1e-15
    pure = np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj())
    assert abs(purity_overlap(pure, pure) - 1.0) <= 1e-12
    with pytest.raises(InvariantViolation):
        purity_overlap(pure, np.eye(2, dtype=complex))


def test_require_density_matrix_accepts_valid(rng):
    for _ in range(10):
        require_density_matrix(random_density(rng))


def test_require_density_matrix_rejects_bad_trace():
    with pytest.raises(InvariantViolation, match="trace"):
        require_density_matrix(np.eye(4, dtype=complex))


def test_require_density_matrix_rejects_nonhermitian():
    rho = np.eye(4, dtype=complex) / 4.0
    rho[0, 1] = 1e-6
    with pytest.raises(InvariantViolation, match="Hermitian"):
        require_density_matrix(rho)


def test_require_density_matrix_rejects_negative_eigenvalue():
    rho = np.diag([1.1, -0.1, 0.0, 0.0]).astype(complex)
    with pytest.raises(InvariantViolation, match="eigenvalue"):
        require_density_matrix(rho)


def test_require_density_matrix_rejects_nonfinite():
    rho = np.eye(4, dtype=complex) / 4.0
    rho[2, 2] = np.nan
    with pytest.raises(InvariantViolation, match="finite"):
        require_density_matrix(rho)


def test_is_hermitian_tolerance():
    m = np.eye(2, dtype=complex)
    m[0, 1] = 1e-10
    assert is_hermitian(m)
    m[0, 1] = 1e-8
    assert not is_hermitian(m)


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_eigenvalue_sum_equals_trace(seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng)
    w = jacobi_eigh(m)
    assert abs(w.sum() - np.trace(m).real) <= 1e-10


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_partial_transpose_preserves_trace_and_hermiticity(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    pt = partial_transpose(rho, 2)
    assert abs(np.trace(pt) - np.trace(rho)) <= 1e-12
    assert np.max(np.abs(pt - pt.conj().T)) <= 1e-12


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_local_rotation_keeps_partial_transpose_spectrum(seed):
    # local unitaries commute with the transpose on the other factor
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    u = tensor(random_unitary(rng), np.eye(2))
    rotated = u @ rho @ u.conj().T
    w0 = jacobi_eigh(partial_transpose(rho, 2))
    w1 = jacobi_eigh(partial_transpose(rotated, 2))
    assert np.max(np.abs(w0 - w1)) <= 1e-9


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_pure_state_marginals_share_spectrum(seed):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(rng)
    rho = np.outer(psi, psi.conj())
    wa = jacobi_eigh(partial_trace(rho, 1))
    wb = jacobi_eigh(partial_trace(rho, 2))
    assert np.max(np.abs(wa - wb)) <= 1e-10
