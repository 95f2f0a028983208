import numpy as np
import pytest
from conftest import random_unitary
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar

from selfadjoint1d import Interval, IntervalSystem, PotentialSpec, assemble_M, eigenfunction, find_eigenvalues, named_bc
from selfadjoint1d.errors import DimensionMismatch, NotAnEigenvalue, NotNormalized, NotSingleInterval
from selfadjoint1d.spectral import (
    eigenpair_residual,
    exponential_basis_factor,
    hadamard_mat,
    hadamard_vec,
    momentum_spectrum,
    spectral_function,
    spectral_function_n1,
    su2_unitary,
    w_bracket,
)

PI = np.pi
ZERO_PI = IntervalSystem.single(0, PI)
TWO_PI = IntervalSystem.single(0, 2 * PI)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
cvec = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=6)


# -- Hadamard calculus --------------------------------------------------------


def test_hadamard_vec_examples():
    assert np.array_equal(hadamard_vec([1, 2], [3, 4]), [3, 8])
    x = np.array([1.5, -2j])
    assert np.array_equal(hadamard_vec(x, np.ones(2)), x)
    assert np.array_equal(hadamard_vec(x, np.zeros(2)), np.zeros(2))
    with pytest.raises(DimensionMismatch):
        hadamard_vec([1, 2], [1, 2, 3])


def test_hadamard_mat_examples():
    T = np.arange(9.0).reshape(3, 3)
    x = np.array([1.0, 2.0, -1j])
    assert np.array_equal(hadamard_mat(T, np.ones(3)), T)
    assert np.array_equal(hadamard_mat(np.eye(3), x), np.diag(x))
    with pytest.raises(DimensionMismatch):
        hadamard_mat(T, [1, 2])


@settings(max_examples=100)
@given(seeds, st.integers(1, 6))
def test_hadamard_mat_associates(seed, n):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    x, y = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    assert np.allclose(hadamard_mat(T, x) @ y, T @ hadamard_vec(x, y), atol=1e-12, rtol=0)


@given(cvec)
def test_hadamard_vec_commutes(x):
    y = np.conj(np.asarray(x))[::-1]
    assert np.allclose(hadamard_vec(x, y), hadamard_vec(y, x), rtol=1e-14, atol=0)


# -- assembly ----------------------------------------------------------------


@pytest.mark.parametrize("lam", [0.3, 1.7, 4.0])
def test_dirichlet_matrix_and_determinant(lam):
    k = np.sqrt(2 * lam)
    M = assemble_M(named_bc("dirichlet"), ZERO_PI, lam).entries
    expected = 2 * np.array([[1, 0], [np.cos(k * PI), np.sin(k * PI) / k]])
    assert np.allclose(M, expected, atol=1e-14)
    assert spectral_function(named_bc("dirichlet"), ZERO_PI, lam) == pytest.approx(4 * np.sin(k * PI) / k, abs=1e-13)


@pytest.mark.parametrize("lam", [0.3, 1.7, 4.0])
def test_neumann_determinant(lam):
    k = np.sqrt(2 * lam)
    M = assemble_M(named_bc("neumann"), ZERO_PI, lam).entries
    # M = -2i [[-psi'(0)], [psi'(pi)]]
    Phid = np.array([[0, -1], [-k * np.sin(k * PI), np.cos(k * PI)]])
    assert np.allclose(M, -2j * Phid, atol=1e-14)
    assert spectral_function(named_bc("neumann"), ZERO_PI, lam) == pytest.approx(4 * k * np.sin(k * PI), abs=1e-12)


def _embed(Ua, Ub):
    U = np.zeros((4, 4), dtype=complex)
    ia, ib = [0, 2], [1, 3]
    U[np.ix_(ia, ia)] = Ua
    U[np.ix_(ib, ib)] = Ub
    return U


def test_block_diagonal_assembly_decouples(rng):
    Ua, Ub = random_unitary(2, rng), random_unitary(2, rng)
    system = IntervalSystem([Interval(0, 1), Interval(0, 1.7)])
    lam = 2.2
    M = assemble_M(_embed(Ua, Ub), system, lam).entries
    Ma = assemble_M(Ua, IntervalSystem([system[0]]), lam).entries
    Mb = assemble_M(Ub, IntervalSystem([system[1]]), lam).entries
    # rows: slots (l0, l1, r0, r1); columns: (A1_0, A1_1, A2_0, A2_1)
    P = np.eye(4)[[0, 2, 1, 3]]
    blocks = P @ M @ P.T
    assert np.allclose(blocks[:2, :2], Ma) and np.allclose(blocks[2:, 2:], Mb)
    assert np.allclose(blocks[:2, 2:], 0) and np.allclose(blocks[2:, :2], 0)


def test_spectral_function_values():
    assert abs(spectral_function(named_bc("dirichlet"), ZERO_PI, 0.5)) < 1e-14
    k = np.sqrt(0.6)
    assert spectral_function(named_bc("dirichlet"), ZERO_PI, 0.3) == pytest.approx(4 * np.sin(k * PI) / k)


def test_exponential_basis_relation(rng):
    # det in the exponential basis = det in the entire basis times the basis change
    for _ in range(10):
        U = random_unitary(2, rng)
        lam = rng.uniform(0.05, 6)
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        alpha, beta, theta = complex(v[0], v[1]), complex(v[2], v[3]), rng.uniform(0, 2 * PI)
        U = su2_unitary(alpha, beta, theta)
        ent = spectral_function(U, TWO_PI, lam)
        exp = spectral_function_n1(alpha, beta, theta, TWO_PI, lam, basis="exponential")
        assert exp == pytest.approx(ent * exponential_basis_factor(TWO_PI, lam), rel=1e-9, abs=1e-9)


# -- W brackets and the n = 1 closed form ------------------------------------


def test_w_bracket_examples():
    lam = 1 / 8
    assert w_bracket(("l", "l", "+", "-"), TWO_PI, lam, basis="exponential") == pytest.approx(2.0)
    assert abs(w_bracket(("r", "l", "-", "+"), TWO_PI, lam, basis="exponential")) < 1e-14
    assert w_bracket(("l", "l", "+", "+"), TWO_PI, 0.7) == 0
    with pytest.raises(NotSingleInterval):
        w_bracket(("l", "r", "+", "-"), IntervalSystem([Interval(0, 1), Interval(1, 2)]), 1.0)


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(-3, 10))
def test_n1_closed_form_matches_general(seed, lam):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    alpha, beta, theta = complex(v[0], v[1]), complex(v[2], v[3]), rng.uniform(0, 2 * PI)
    system = IntervalSystem.single(-0.3, 1.9)
    general = spectral_function(su2_unitary(alpha, beta, theta), system, lam)
    closed = spectral_function_n1(alpha, beta, theta, system, lam)
    scale = np.linalg.norm(assemble_M(su2_unitary(alpha, beta, theta), system, lam).entries) ** 2
    assert abs(general - closed) <= 1e-9 * max(scale, abs(general))


def test_n1_normalization_checked():
    with pytest.raises(NotNormalized):
        spectral_function_n1(1.0, 0.5, 0.0, TWO_PI, 1.0)


def test_n1_dirichlet_and_neumann_zero_sets():
    lams = np.arange(1, 12) ** 2 / 8
    dirichlet = [abs(spectral_function_n1(1, 0, 2 * PI, TWO_PI, lam)) for lam in lams]
    neumann = [abs(spectral_function_n1(1, 0, 0.0, TWO_PI, lam)) for lam in np.r_[0.0, lams]]
    assert max(dirichlet) < 1e-12 and max(neumann) < 1e-12
    assert abs(spectral_function_n1(1, 0, 2 * PI, TWO_PI, 0.0)) > 1
    assert abs(spectral_function_n1(1, 0, 0.0, TWO_PI, 0.3)) > 1e-3


def _exp_sigma(U, lam):
    """Relative sigma_min of M assembled in the exponential basis, built by hand."""
    k = np.sqrt(2 * lam)
    e = np.exp(2j * PI * k)
    phi = np.array([[1, 1], [e, 1 / e]])
    phid = np.array([[-1j * k, 1j * k], [1j * k * e, -1j * k / e]])
    Pp, Pm = phi + 1j * phid, phi - 1j * phid
    M = Pm - U @ Pp
    s = np.linalg.svd(M, compute_uv=False)
    return s[-1] / (np.linalg.norm(Pm) + np.linalg.norm(U @ Pp))


def _exp_roots(U, lo, hi, n=4000):
    lams = np.linspace(lo, hi, n)
    f = np.array([_exp_sigma(U, x) for x in lams])
    out = []
    for i in range(1, n - 1):
        if f[i] <= f[i - 1] and f[i] < f[i + 1] and f[i] < 1e-2:
            r = minimize_scalar(lambda x: _exp_sigma(U, x), bounds=(lams[i - 1], lams[i + 1]),
                                method="bounded", options={"xatol": 1e-12})
            if r.fun < 1e-7:
                out.append(r.x)
    return np.array(out)


def test_zero_sets_coincide_with_exponential_basis(rng):
    lo, hi = 0.05, 4.0
    for _ in range(50):
        U = random_unitary(2, rng)
        ours = find_eigenvalues(U, TWO_PI, (lo, hi)).values
        ref = _exp_roots(U, lo, hi)
        # drop oracle roots hugging the window ends
        ref = ref[(ref > lo + 1e-6) & (ref < hi - 1e-6)]
        ours = ours[(ours > lo + 1e-6) & (ours < hi - 1e-6)]
        assert ours.size == ref.size
        assert np.max(np.abs(ours - ref), initial=0.0) < 1e-7


# -- eigenvalue search --------------------------------------------------------


def test_dirichlet_spectrum():
    sp = find_eigenvalues(named_bc("dirichlet"), ZERO_PI, (0.1, 13))
    assert np.allclose(sp.values, [0.5, 2, 4.5, 8, 12.5], rtol=1e-8, atol=0)
    assert sp.multiplicities == [1] * 5


def test_neumann_spectrum_includes_zero():
    sp = find_eigenvalues(named_bc("neumann"), ZERO_PI, (-0.1, 5))
    assert np.allclose(sp.values, [0, 0.5, 2, 4.5], atol=1e-9)


def test_periodic_spectrum_doubly_degenerate():
    sp = find_eigenvalues(named_bc("periodic"), TWO_PI, (0.1, 3))
    assert np.allclose(sp.values, [0.5, 2.0], rtol=1e-8)
    assert sp.multiplicities == [2, 2]
    assert np.allclose(sp.expanded(), [0.5, 0.5, 2, 2], rtol=1e-8)


def test_robin_negative_ground_state():
    # psi_dot = A psi with A = +1 on both ends gives a bound state below zero
    from selfadjoint1d import cayley_from_operator

    U = cayley_from_operator(np.eye(2))
    sp = find_eigenvalues(U, ZERO_PI, (-5, 1))
    # oracle: -(1/2) psi'' = -kappa^2/2 psi, symmetric state cosh(kappa (x - pi/2)) with kappa tanh(kappa pi/2) = 1
    from scipy.optimize import brentq

    kappa = brentq(lambda k: k * np.tanh(k * PI / 2) - 1, 0.1, 5)
    assert sp.values[0] == pytest.approx(-(kappa**2) / 2, rel=1e-9)


def test_block_decoupling_union(rng):
    system = IntervalSystem([Interval(0, 1), Interval(0, 1.7)])
    for _ in range(3):
        Ua, Ub = random_unitary(2, rng), random_unitary(2, rng)
        window = (-3, 25)
        full = find_eigenvalues(_embed(Ua, Ub), system, window).expanded()
        union = np.sort(np.concatenate([
            find_eigenvalues(Ua, IntervalSystem([system[0]]), window).expanded(),
            find_eigenvalues(Ub, IntervalSystem([system[1]]), window).expanded(),
        ]))
        assert full.size == union.size
        assert np.max(np.abs(full - union), initial=0) < 1e-8


def test_returned_pairs_satisfy_boundary_condition(rng):
    for _ in range(5):
        U = random_unitary(4, rng)
        system = IntervalSystem([Interval(0, 1), Interval(1, 2.5, potential=PotentialSpec.polynomial([0, 1]))])
        sp = find_eigenvalues(U, system, (-2, 15))
        assert len(sp) > 0
        for p in sp:
            assert p.residual < 1e-8
            assert eigenpair_residual(U, system, p) < 1e-8


def test_complex_polish_stays_real(rng):
    for _ in range(20):
        U = random_unitary(2, rng)
        for p in find_eigenvalues(U, ZERO_PI, (-2, 10)):
            assert p.imag_drift <= 1e-9


def test_tabulated_potential_fd_oracle():
    xs = np.linspace(0, 2, 41)
    pot = PotentialSpec.tabulated(list(zip(xs, 3 * np.sin(2 * xs) + xs)))
    system = IntervalSystem.single(0, 2, potential=pot)
    N = 10_000
    h = 2 / N
    x = np.arange(1, N) * h
    ref = eigh_tridiagonal(1 / h**2 + pot(x), np.full(N - 2, -0.5 / h**2), select="i",
                           select_range=(0, 4), eigvals_only=True)
    sp = find_eigenvalues(named_bc("dirichlet"), system, (ref[0] - 1, ref[4] + 0.5))
    assert np.max(np.abs(sp.values[:5] - ref) / np.abs(ref)) < 1e-4


def test_metadata_reported():
    sp = find_eigenvalues(named_bc("dirichlet"), ZERO_PI, (0.1, 13), grid_density=300)
    assert sp.grid_points >= 256 and sp.grid_step > 0


def test_weighted_interval_rescales_spectrum():
    # eta scales the kinetic term: eigenvalues k^2/(2 eta)
    sp = find_eigenvalues(named_bc("dirichlet"), IntervalSystem.single(0, PI, weight=2.0), (0.1, 5))
    assert np.allclose(sp.values, np.arange(1, 5) ** 2 / 4, rtol=1e-8)


# -- eigenfunctions -----------------------------------------------------------


def test_dirichlet_ground_state_is_sine():
    pair = eigenfunction(named_bc("dirichlet"), ZERO_PI, 0.5)
    a1, a2 = pair.coefficients[0, 0]
    assert abs(a1) < 1e-12 and abs(abs(a2) - 1) < 1e-12
    x = np.linspace(0, PI, 11)
    f = pair.evaluate(ZERO_PI, 0, x)
    assert np.allclose(f / a2, np.sin(x), atol=1e-12)


def test_neumann_state_is_cosine():
    pair = eigenfunction(named_bc("neumann"), ZERO_PI, 0.5)
    a1, a2 = pair.coefficients[0, 0]
    assert abs(a2) < 1e-12 and abs(abs(a1) - 1) < 1e-12


def test_not_an_eigenvalue():
    with pytest.raises(NotAnEigenvalue):
        eigenfunction(named_bc("dirichlet"), ZERO_PI, 0.3)


def test_periodic_eigenspace_two_dimensional():
    pair = eigenfunction(named_bc("periodic"), TWO_PI, 2.0)
    assert pair.multiplicity == 2 and pair.coefficients.shape == (2, 1, 2)


# -- momentum operator --------------------------------------------------------


def test_momentum_periodic_integers():
    assert np.allclose(momentum_spectrum(0.0, Interval(0, 2 * PI), (-2.5, 2.5)), [-2, -1, 0, 1, 2])


def test_momentum_antiperiodic_half_integers():
    assert np.allclose(momentum_spectrum(PI, Interval(0, 2 * PI), (-2, 2)), [-1.5, -0.5, 0.5, 1.5])


@given(st.floats(-PI, PI), st.floats(0.5, 5))
def test_momentum_eigenfunctions_satisfy_condition(theta, length):
    iv = Interval(0, length)
    for E in momentum_spectrum(theta, iv, (-10, 10)):
        # psi = exp(-i E x): psi(b) = e^{i theta} psi(a)
        assert abs(np.exp(-1j * E * length) - np.exp(1j * theta)) < 1e-9


def test_momentum_zero_mode_constant():
    # E = 0 eigenfunction is the constant; i d/dx of it vanishes
    assert 0.0 in momentum_spectrum(0.0, Interval(0, 1), (-1, 1))


def _symmetric_robin_bound_states(A, L):
    # even: kappa tanh(kappa L / 2) = A, odd: kappa coth(kappa L / 2) = A
    from scipy.optimize import brentq

    even = brentq(lambda k: k * np.tanh(k * L / 2) - A, 1e-9, 10 * A + 10)
    odd = brentq(lambda k: k / np.tanh(k * L / 2) - A, 1e-9, 10 * A + 10)
    return sorted([-(even**2) / 2, -(odd**2) / 2])


@pytest.mark.parametrize("lmin", [-20.0, -300.0])
def test_deep_negative_window_has_no_spurious_roots(lmin):
    # far below the spectrum both basis solutions grow alike; nothing may be certified there
    eps = -2.5
    A = -np.tan(eps / 2)
    spec = find_eigenvalues(named_bc("robin", [eps, eps]), ZERO_PI, (lmin, 0))
    assert np.allclose(spec.values, _symmetric_robin_bound_states(A, PI), rtol=1e-9, atol=1e-10)


def test_harmonic_well_behind_barriers():
    # x^2/2 on [-8, 8]: the Dirichlet walls shift the levels by far less than 1e-12
    well = IntervalSystem.single(-8, 8, potential=PotentialSpec.polynomial([0, 0, 0.5]))
    spec = find_eigenvalues(named_bc("dirichlet"), well, (0, 3))
    assert np.allclose(spec.values, [0.5, 1.5, 2.5], atol=1e-8)
    x = np.linspace(-3, 3, 13)
    f = np.abs(spec[0].evaluate(well, 0, x))
    assert np.allclose(f / f[6], np.exp(-x**2 / 2), rtol=1e-6)
