import numpy as np
import pytest
from conftest import random_unitary
from hypothesis import given
from hypothesis import strategies as st

from selfadjoint1d import IntervalSystem, find_eigenvalues, named_bc
from selfadjoint1d.errors import DimensionMismatch, NonUnitary
from selfadjoint1d.symmetry import (
    BoundaryRep,
    cylinder_constraints,
    cylinder_rep,
    eigenfunction_symmetry_residual,
    is_invariant,
    parity_rep,
    so2_fourier_rep,
    so2_rep,
    swap_matrix,
)

PI = np.pi
SYM = IntervalSystem.single(-PI, PI)


def _parity_family(alpha, delta):
    return np.exp(1j * delta) * np.array([[np.cos(alpha), 1j * np.sin(alpha)], [1j * np.sin(alpha), np.cos(alpha)]])


def test_trivial_rep_everything_invariant(rng):
    rep = BoundaryRep.finite([np.eye(2)])
    assert is_invariant(random_unitary(2, rng), rep)[0]


@given(st.floats(0, 2 * PI), st.floats(0, 2 * PI))
def test_parity_family_invariant(alpha, delta):
    assert is_invariant(_parity_family(alpha, delta), parity_rep())[0]


def test_quasi_periodic_breaks_parity():
    ok, worst = is_invariant(named_bc("quasi_periodic", PI / 3), parity_rep())
    assert not ok and worst > 1


def test_dimension_checked():
    with pytest.raises(DimensionMismatch):
        is_invariant(np.eye(4), parity_rep(1))


def test_finite_rep_must_close():
    with pytest.raises(ValueError):
        BoundaryRep.finite([np.eye(2), 1j * np.eye(2)])
    with pytest.raises(NonUnitary):
        BoundaryRep.finite([np.eye(2), 2 * np.eye(2)])


def test_parity_rep_of_two_intervals_closes():
    rep = parity_rep(2)
    assert rep.closure()[0] and np.allclose(swap_matrix(2) @ swap_matrix(2), np.eye(4))


@given(st.floats(-PI, PI), st.floats(-PI, PI))
def test_cylinder_robin(b1, b2):
    r = cylinder_constraints(np.diag(np.exp(1j * np.array([b1, b2]))), [[1.0]])
    assert (max(r) < 1e-9) == (abs(np.exp(1j * b1) - np.exp(1j * b2)) < 1e-9)


@given(st.floats(-PI, PI))
def test_cylinder_quasi_periodic(alpha):
    r = cylinder_constraints(named_bc("quasi_periodic", alpha), [[1.0]])
    assert (max(r) < 1e-9) == (abs(np.sin(alpha)) < 1e-9)


def test_cylinder_quasi_periodic_exact_points():
    for a in (0.0, PI):
        assert max(cylinder_constraints(named_bc("quasi_periodic", a), [[1.0]])) < 1e-15


def test_cylinder_identity_any_v(rng):
    v = random_unitary(2, rng)
    assert max(cylinder_constraints(np.eye(4), v)) < 1e-14


def test_cylinder_constraints_equal_commutation(rng):
    # a generic U violates the constraints
    U = random_unitary(4, rng)
    assert max(cylinder_constraints(U, np.eye(2))) > 1e-3
    assert not is_invariant(U, BoundaryRep.finite([np.eye(4), cylinder_rep(np.eye(2))]))[0]
    # build an invariant U by averaging over the Z2 generated by the swap with v = 1
    g1 = cylinder_rep(np.eye(2))
    W = random_unitary(4, rng)
    H = W + g1 @ W @ g1
    w, vecs = np.linalg.eigh(H + H.conj().T)
    Uinv = (vecs * np.exp(1j * w)) @ vecs.conj().T
    assert is_invariant(Uinv, BoundaryRep.finite([np.eye(4), g1]))[0]
    assert max(cylinder_constraints(Uinv, np.eye(2))) < 1e-9


def test_so2_rep_examples(rng):
    assert np.array_equal(so2_fourier_rep(0, 0.7), np.eye(1))
    assert is_invariant(np.array([[np.exp(0.3j)]]), so2_rep(0))[0]
    diag = np.diag(np.exp(1j * np.array([0.1, 0.5, -1.0, 2.0, 0.9])))
    assert is_invariant(diag, so2_rep(2, [0.7]))[0]
    perm = np.eye(5)[[1, 0, 2, 3, 4]]
    assert not is_invariant(perm, so2_rep(2, [0.7]))[0]


def test_so2_irrational_sample_included():
    rep = so2_rep(1, [])
    assert len(rep.matrices) == 1 and abs(rep.labels[0] / PI - np.sqrt(2)) < 1e-15


def test_parity_invariant_ground_state():
    U = named_bc("robin", 0.8)
    ground = find_eigenvalues(U, SYM, (-2, 3))[0]
    assert eigenfunction_symmetry_residual(U, SYM, swap_matrix(1), ground) < 1e-7


def test_quasi_periodic_excited_state_not_symmetric():
    U = named_bc("quasi_periodic", PI / 3)
    excited = find_eigenvalues(U, SYM, (0.05, 3))[0]
    assert eigenfunction_symmetry_residual(U, SYM, swap_matrix(1), excited) > 1e-2


def test_identity_element_zero_residual():
    for U in (named_bc("quasi_periodic", PI / 3), named_bc("robin", [0.3, 1.2])):
        for p in find_eigenvalues(U, SYM, (-1, 3)):
            assert eigenfunction_symmetry_residual(U, SYM, np.eye(2), p) < 1e-9


def test_invariant_eigenspaces_mapped_into_themselves():
    U = _parity_family(0.7, 0.4)
    assert is_invariant(U, parity_rep())[0]
    sp = find_eigenvalues(U, SYM, (-2, 5))
    assert np.allclose(sp.values, find_eigenvalues(swap_matrix(1) @ U @ swap_matrix(1), SYM, (-2, 5)).values)
    for p in sp:
        assert eigenfunction_symmetry_residual(U, SYM, swap_matrix(1), p) < 1e-7
