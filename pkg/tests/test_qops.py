import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_density_matrix
from qdcavity import qops


@pytest.mark.parametrize("n_fock, dim", [(1, 6), (2, 9), (3, 12)])
def test_make_space_dimensions(n_fock, dim):
    space = qops.make_space(n_fock)
    assert space.total_dim == dim == space.emitter_dim * (n_fock + 1)


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_make_space_rejects(bad):
    with pytest.raises(qops.InvalidDimensionError):
        qops.make_space(bad)


@given(st.integers(1, 5))
def test_basis_round_trip(n_fock):
    space = qops.make_space(n_fock)
    for i in range(space.total_dim):
        level, n = space.label(i)
        assert space.index(level, n) == i
        assert i == (level - 1) * (n_fock + 1) + n


def test_annihilation_entries():
    a1 = qops.annihilation(qops.make_space(1))
    # cavity block of the ground level
    assert a1[0, 1] == 1.0
    a2 = qops.annihilation(qops.make_space(2))
    assert a2[1, 2] == pytest.approx(np.sqrt(2), abs=1e-15)
    assert np.allclose(qops.creation(qops.make_space(2)), a2.conj().T)


@pytest.mark.parametrize("n_fock", [1, 2, 4])
def test_commutator_truncation(n_fock):
    space = qops.make_space(n_fock)
    a, ad = qops.annihilation(space), qops.creation(space)
    comm = a @ ad - ad @ a
    expected_cavity = np.eye(n_fock + 1)
    expected_cavity[-1, -1] = -n_fock
    assert np.allclose(comm, np.kron(np.eye(3), expected_cavity), atol=1e-14)


def test_number_diagonal():
    space = qops.make_space(3)
    n = qops.number(space)
    assert np.allclose(n, np.diag(np.diagonal(n)))
    assert np.allclose(np.diagonal(n).real, [space.label(i)[1] for i in range(space.total_dim)])


def test_sigma_algebra():
    space = qops.make_space(2)
    s12, s21 = qops.sigma(space, 1, 2), qops.sigma(space, 2, 1)
    assert np.allclose(s12 @ s21, qops.sigma(space, 1, 1))
    assert np.allclose(s12 @ s12, 0)
    assert np.trace(qops.sigma(space, 2, 2)).real == 3
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            s = qops.sigma(space, i, j)
            assert np.allclose(s.conj().T, qops.sigma(space, j, i))
            assert np.count_nonzero(s) == space.cavity_dim
    with pytest.raises(qops.InvalidLevelError):
        qops.sigma(space, 0, 1)
    with pytest.raises(qops.InvalidLevelError):
        qops.sigma(space, 1, 4)


def test_jump_operators_have_diagonal_ldagl():
    space = qops.make_space(2)
    for L in (qops.annihilation(space), qops.sigma(space, 1, 2), qops.sigma(space, 2, 3), qops.sigma(space, 3, 1)):
        m = L.conj().T @ L
        assert np.allclose(m, np.diag(np.diagonal(m)))


def test_algebra_helpers(rng):
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    B = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert np.array_equal(qops.adjoint(qops.adjoint(A)), A)
    assert np.allclose(qops.compose(np.eye(6), A), A)
    assert np.allclose(qops.adjoint(qops.compose(A, B)), qops.compose(qops.adjoint(B), qops.adjoint(A)))
    assert np.allclose(qops.add_scaled(A, B, 2 - 1j), A + (2 - 1j) * B)
    with pytest.raises(qops.DimensionMismatchError):
        qops.compose(A, np.eye(5))
    with pytest.raises(qops.DimensionMismatchError):
        qops.add_scaled(A, np.eye(5), 1.0)


def test_expectation_examples(rng):
    space = qops.make_space(2)
    rho = random_density_matrix(rng, space.total_dim)
    assert qops.expectation(rho, qops.identity(space)) == pytest.approx(1.0, abs=1e-12)
    ex = qops.basis_state(space, qops.EXCITON, 0)
    assert qops.expectation(ex, qops.sigma(space, 2, 2)) == pytest.approx(1.0)
    mixed = qops.maximally_mixed(space)
    assert qops.expectation(mixed, qops.number(space)) == pytest.approx(1.0, abs=1e-14)
    val = qops.expectation(rho, qops.number(space))
    assert abs(np.imag(val)) < 1e-10
    with pytest.raises(qops.DimensionMismatchError):
        qops.expectation(rho, np.eye(6))


def test_dissipator_hand_evaluated():
    space = qops.make_space(1)
    rho = qops.basis_state(space, qops.GROUND, 1)
    D = qops.dissipator(qops.annihilation(space), rho)
    expected = np.zeros((6, 6))
    expected[0, 0], expected[1, 1] = 1.0, -1.0
    assert np.allclose(D, expected, atol=1e-15)
    assert np.allclose(qops.dissipator(np.zeros((6, 6)), rho), 0)


def test_dissipator_trace_and_hermiticity(rng):
    for _ in range(20):
        L = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        rho = random_density_matrix(rng, 9)
        D = qops.dissipator(L, rho)
        assert abs(np.trace(D)) < 1e-12 * 9 * max(1.0, np.abs(L).max() ** 2)
        assert np.max(np.abs(D - D.conj().T)) < 1e-12 * max(1.0, np.abs(L).max() ** 2)


def test_density_matrix_checks(rng):
    space = qops.make_space(2)
    rho = random_density_matrix(rng, space.total_dim)
    assert qops.is_density_matrix(rho)
    bad = rho.copy()
    bad[0, 1] += 1e-3
    assert not qops.is_density_matrix(bad)
    assert not qops.is_density_matrix(2 * rho)
    pops = qops.level_populations(rho, space)
    assert sum(pops) == pytest.approx(1.0)
