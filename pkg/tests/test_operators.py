"""Basis construction, state parametrization, Haar sampling and moments."""

import numpy as np
import pytest

from qttf import (
    DensityMatrix,
    InvalidDimensionError,
    PomValidationError,
    UnsupportedDimensionError,
    admix_white_noise,
    bloch_coords,
    build_basis,
    duplicate_outcome,
    haar_probability_moment,
    haar_pure_state,
    haar_state_vectors,
    mub_povm,
    qubit_sic,
    random_pom,
    sic_povm,
    state_from_bloch,
)

PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_basis_is_trace_orthonormal(dim):
    basis = build_basis(dim)
    ops = basis.traceless_ops
    assert ops.shape == (dim * dim - 1, dim, dim)
    assert basis.n_traceless == dim * dim - 1
    for a in range(len(ops)):
        assert abs(np.trace(ops[a])) < 1e-12
        assert np.abs(ops[a] - ops[a].conj().T).max() < 1e-12
        for b in range(a, len(ops)):
            want = 1.0 if a == b else 0.0
            assert abs(np.trace(ops[a] @ ops[b]) - want) < 1e-12
    np.testing.assert_allclose(basis.identity_op, np.eye(dim) / np.sqrt(dim), atol=1e-15)
    assert basis.full_ops.shape == (dim * dim, dim, dim)
    np.testing.assert_allclose(basis.full_ops[0], basis.identity_op, atol=0)


def test_qubit_basis_is_scaled_paulis():
    ops = build_basis(2).traceless_ops
    for pauli in PAULI:
        target = pauli / np.sqrt(2.0)
        assert any(np.abs(op - target).max() < 1e-12 for op in ops)


def test_basis_rejects_bad_dimension():
    with pytest.raises(InvalidDimensionError):
        build_basis(1)
    with pytest.raises(InvalidDimensionError):
        build_basis(2.5)


@pytest.mark.parametrize("dim", [2, 3])
def test_bloch_round_trip(dim):
    rng = np.random.default_rng(5)
    basis = build_basis(dim)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    coords = bloch_coords(rho, basis)
    assert coords.shape == (dim * dim - 1,)
    assert coords.dtype.kind == "f"
    np.testing.assert_allclose(state_from_bloch(coords, basis), rho, atol=1e-12)
    # purity decomposition: Tr(rho^2) = 1/dim + |coords|^2
    purity = np.trace(rho @ rho).real
    assert abs(purity - (1.0 / dim + coords @ coords)) < 1e-12


def test_bloch_coords_of_maximally_mixed_vanish():
    basis = build_basis(3)
    coords = bloch_coords(np.eye(3) / 3, basis)
    assert np.abs(coords).max() < 1e-14


def test_state_from_bloch_allows_nonpositive_output():
    basis = build_basis(2)
    rho = state_from_bloch(np.array([2.0, 0.0, 0.0]), basis)
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.abs(rho - rho.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(rho)[0] < -0.5  # far outside the state space


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.0, 0.5], [0.1, 0.0]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.2, -0.2]))  # negative eigenvalue
    rho = DensityMatrix(np.diag([0.25, 0.75]))
    assert rho.dim == 2
    assert abs(rho.purity - (0.25**2 + 0.75**2)) < 1e-14


@pytest.mark.parametrize("dim", [2, 4])
def test_haar_pure_state_properties(dim):
    rho = haar_pure_state(dim, np.random.default_rng(0))
    eigs = np.linalg.eigvalsh(rho.matrix)
    assert abs(eigs[-1] - 1.0) < 1e-12 and np.abs(eigs[:-1]).max() < 1e-12
    again = haar_pure_state(dim, np.random.default_rng(0))
    np.testing.assert_array_equal(rho.matrix, again.matrix)
    other = haar_pure_state(dim, np.random.default_rng(1))
    assert np.abs(rho.matrix - other.matrix).max() > 1e-3


def test_haar_pure_state_mean_is_maximally_mixed():
    dim, n = 2, 4000
    rng = np.random.default_rng(12)
    mean = np.zeros((dim, dim), dtype=complex)
    for _ in range(n):
        mean += haar_pure_state(dim, rng).matrix
    mean /= n
    # entry fluctuations are O(1/sqrt(n))
    assert np.abs(mean - np.eye(dim) / dim).max() < 5.0 / np.sqrt(n)


def test_haar_state_vectors_shape_and_norms():
    vecs = haar_state_vectors(3, 7, np.random.default_rng(2))
    assert vecs.shape == (7, 3)
    np.testing.assert_allclose(np.linalg.norm(vecs, axis=1), 1.0, atol=1e-12)


def test_haar_moment_first_order_is_mean_probability():
    pom = qubit_sic()
    for j in range(pom.n_outcomes):
        want = np.trace(pom.outcomes[j]).real / pom.dim
        assert abs(haar_probability_moment([j], pom) - want) < 1e-14


def test_haar_moment_second_order_closed_form():
    rng = np.random.default_rng(8)
    pom = random_pom(2, 5, rank=2, rng=rng)
    d = pom.dim
    for a in range(5):
        for b in range(5):
            pa, pb = pom.outcomes[a], pom.outcomes[b]
            want = (np.trace(pa).real * np.trace(pb).real + np.trace(pa @ pb).real) / (
                d * (d + 1)
            )
            assert abs(haar_probability_moment([a, b], pom) - want) < 1e-12


def test_haar_moment_is_symmetric_in_indices():
    pom = random_pom(3, 5, rank=1, rng=np.random.default_rng(4))
    reference = haar_probability_moment([0, 1, 2, 1], pom)
    for perm in ([1, 0, 1, 2], [2, 1, 1, 0], [1, 1, 2, 0]):
        assert abs(haar_probability_moment(perm, pom) - reference) < 1e-15


def test_haar_moment_against_monte_carlo():
    pom = random_pom(2, 4, rank=1, rng=np.random.default_rng(10))
    rng = np.random.default_rng(11)
    n = 200000
    vecs = haar_state_vectors(2, n, rng)
    probs = np.einsum("si,mij,sj->sm", vecs.conj(), pom.outcomes, vecs).real
    for idx in ([0, 2], [0, 1, 3], [0, 0, 2, 3]):
        sample = np.prod([probs[:, j] for j in idx], axis=0)
        stderr = sample.std(ddof=1) / np.sqrt(n)
        assert abs(haar_probability_moment(idx, pom) - sample.mean()) < 4 * stderr


def test_qubit_sic_geometry():
    pom = qubit_sic()
    assert pom.n_outcomes == 4
    np.testing.assert_allclose(pom.outcomes.sum(axis=0), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(pom.traces, 0.5, atol=1e-12)
    for a in range(4):
        for b in range(4):
            want = 0.25 if a == b else 1.0 / 12.0
            assert abs(np.trace(pom.outcomes[a] @ pom.outcomes[b]).real - want) < 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_sic_povm_geometry(dim):
    pom = sic_povm(dim)
    m = dim * dim
    assert pom.n_outcomes == m
    np.testing.assert_allclose(pom.outcomes.sum(axis=0), np.eye(dim), atol=1e-12)
    np.testing.assert_allclose(pom.traces, 1.0 / dim, atol=1e-12)
    for a in range(m):
        eigs = np.linalg.eigvalsh(pom.outcomes[a])
        assert np.abs(eigs[:-1]).max() < 1e-12  # rank one
        for b in range(a + 1, m):
            overlap = np.trace(pom.outcomes[a] @ pom.outcomes[b]).real
            assert abs(overlap - 1.0 / (m * (dim + 1))) < 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_mub_povm_geometry(dim):
    pom = mub_povm(dim)
    n_bases = dim + 1
    assert pom.n_outcomes == dim * n_bases
    np.testing.assert_allclose(pom.outcomes.sum(axis=0), np.eye(dim), atol=1e-12)
    np.testing.assert_allclose(pom.traces, 1.0 / n_bases, atol=1e-12)
    for g in range(n_bases):
        block = pom.outcomes[g * dim : (g + 1) * dim].sum(axis=0)
        np.testing.assert_allclose(block, np.eye(dim) / n_bases, atol=1e-12)
    # cross-basis overlaps are flat: |<e|f>|^2 = 1/dim
    for a in range(dim):
        for b in range(dim, pom.n_outcomes):
            overlap = np.trace(pom.outcomes[a] @ pom.outcomes[b]).real
            assert abs(overlap - 1.0 / (dim * n_bases**2)) < 1e-12


def test_builtin_measurements_unsupported_dimension():
    with pytest.raises(UnsupportedDimensionError):
        sic_povm(4)
    with pytest.raises(UnsupportedDimensionError):
        mub_povm(5)


@pytest.mark.parametrize("dim,m,rank", [(2, 4, 1), (2, 7, 2), (3, 9, 1), (4, 20, 3)])
def test_random_pom_is_valid(dim, m, rank):
    pom = random_pom(dim, m, rank, rng=np.random.default_rng(17))
    assert pom.n_outcomes == m and pom.dim == dim
    np.testing.assert_allclose(pom.outcomes.sum(axis=0), np.eye(dim), atol=1e-10)
    for outcome in pom.outcomes:
        eigs = np.linalg.eigvalsh(outcome)
        assert eigs[0] > -1e-12
        assert np.sum(eigs > 1e-10) <= rank


def test_random_pom_is_deterministic_for_integer_seed():
    a = random_pom(2, 6, 1, rng=21)
    b = random_pom(2, 6, 1, rng=21)
    np.testing.assert_array_equal(a.outcomes, b.outcomes)


def test_random_pom_rejects_underspecified_draws():
    with pytest.raises(InvalidDimensionError):
        random_pom(2, 4, rank=3, rng=0)
    with pytest.raises(PomValidationError):
        random_pom(3, 2, rank=1, rng=0)  # 2 rank-one outcomes cannot span


def test_admix_white_noise_formula_and_invariants():
    pom = qubit_sic()
    eps = 0.07
    noisy = admix_white_noise(pom, eps)
    np.testing.assert_allclose(noisy.outcomes.sum(axis=0), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(noisy.traces, pom.traces, atol=1e-12)
    want = (pom.outcomes[1] + eps * pom.traces[1] * np.eye(2) / 2) / (1 + eps)
    np.testing.assert_allclose(noisy.outcomes[1], want, atol=1e-15)
    unchanged = admix_white_noise(pom, 0.0)
    np.testing.assert_allclose(unchanged.outcomes, pom.outcomes, atol=0)
    with pytest.raises(PomValidationError):
        admix_white_noise(pom, -0.1)


def test_duplicate_outcome_splits_and_labels():
    pom = qubit_sic()
    dup = duplicate_outcome(pom, 3, [0.5, 0.5])
    assert dup.n_outcomes == 5
    np.testing.assert_allclose(dup.outcomes.sum(axis=0), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(dup.outcomes[3], 0.5 * pom.outcomes[3], atol=1e-15)
    np.testing.assert_allclose(dup.outcomes[4], 0.5 * pom.outcomes[3], atol=1e-15)
    assert "dup(4" in dup.label  # outcome numbering is 1-based in labels
    uneven = duplicate_outcome(pom, 0, [0.7, 0.2, 0.1])
    assert uneven.n_outcomes == 6
    np.testing.assert_allclose(uneven.outcomes.sum(axis=0), np.eye(2), atol=1e-12)


def test_duplicate_outcome_validates_weights_and_index():
    pom = qubit_sic()
    with pytest.raises(PomValidationError):
        duplicate_outcome(pom, 0, [0.6, 0.6])  # weights must sum to 1
    with pytest.raises(PomValidationError):
        duplicate_outcome(pom, 0, [1.3, -0.3])  # negative weight
    with pytest.raises(PomValidationError):
        duplicate_outcome(pom, 9, [0.5, 0.5])  # index out of range
