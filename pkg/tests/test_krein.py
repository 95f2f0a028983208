import numpy as np
import pytest
from conftest import random_unitary

from selfadjoint1d import Interval, IntervalSystem, PotentialSpec, find_eigenvalues, named_bc
from selfadjoint1d.boundary import cayley_surface_distance
from selfadjoint1d.errors import AtBackgroundPole, SingularDenominator
from selfadjoint1d.krein import krein_correction, neumann_boundary_green, neumann_eigenvalues, pole_scan

PI = np.pi
ZERO_PI = IntervalSystem.single(0, PI)


def _expansion_oracle(z, modes=10_000):
    """Neumann eigen-expansion of G(0,0) on [0, pi] plus an integral estimate of the tail."""
    k = np.arange(1, modes + 1)
    head = 1 / (PI * z) + np.sum((2 / PI) / (z + k**2 / 2))
    # sum_{k > modes} (4/pi)/(2z + k^2) ~ integral from modes + 1/2
    c = np.sqrt(2 * z)
    tail = (4 / PI) / c * (PI / 2 - np.arctan((modes + 0.5) / c))
    return head + tail


def test_green_diagonal_matches_expansion():
    G = neumann_boundary_green(ZERO_PI, 1.0).entries
    assert abs(G[0, 0] - _expansion_oracle(1.0)) < 1e-6
    assert abs(G[1, 1] - _expansion_oracle(1.0)) < 1e-6


def test_green_closed_form():
    # (z - (1/2) d^2) G = delta with Neumann ends: G(0,0) = 2 coth(c pi)/c, c = sqrt(2z)
    z = 0.7
    c = np.sqrt(2 * z)
    G = neumann_boundary_green(ZERO_PI, z).entries
    assert G[0, 0] == pytest.approx(2 / (c * np.tanh(c * PI)), rel=1e-12)
    assert G[0, 1] == pytest.approx(2 / (c * np.sinh(c * PI)), rel=1e-12)


def test_green_symmetric():
    G = neumann_boundary_green(IntervalSystem.single(0, PI, potential=PotentialSpec.polynomial([0, 0.3])), 0.8).entries
    assert abs(G[0, 1] - G[1, 0]) < 1e-10


def test_green_off_diagonal_decays():
    zs = np.linspace(1, 100, 40)
    off = [abs(neumann_boundary_green(ZERO_PI, z).entries[0, 1]) for z in zs]
    assert np.all(np.diff(off) < 0) and off[-1] < 1e-5


def test_green_at_background_pole():
    with pytest.raises(AtBackgroundPole):
        neumann_boundary_green(ZERO_PI, -0.5)


def test_neumann_correction_vanishes():
    kc = krein_correction(named_bc("neumann"), ZERO_PI, 1.3)
    assert np.allclose(kc.R, 0) and np.allclose(kc.corrected, kc.background)


def test_dirichlet_correction_inverts_background():
    kc = krein_correction(named_bc("dirichlet"), ZERO_PI, 1.3)
    assert np.allclose(kc.R, np.linalg.inv(kc.background), atol=1e-12)
    # the Dirichlet resolvent vanishes on the boundary
    assert np.max(np.abs(kc.corrected)) < 1e-12


def test_denominator_identity(rng):
    for _ in range(10):
        U = random_unitary(2, rng)
        kc = krein_correction(U, ZERO_PI, 2.0)
        D = (np.eye(2) - U) @ kc.background - 2j * (np.eye(2) + U)
        assert np.max(np.abs(D @ kc.R - (np.eye(2) - U))) < 1e-10


def test_corrected_resolvent_hermitian_below_spectrum(rng):
    z = 30.0
    for _ in range(20):
        U = random_unitary(2, rng)
        if cayley_surface_distance(U) < 0.3:
            continue
        assert find_eigenvalues(U, ZERO_PI, (-z, 0.0)).values.min(initial=0) > -z
        C = krein_correction(U, ZERO_PI, z).corrected
        assert np.max(np.abs(C - C.conj().T)) < 1e-10


def test_corrected_resolvent_matches_direct_robin():
    # Robin psi_dot = a psi on [0, pi]: boundary Green function of (z + H) from the closed form
    a, z = 0.4, 1.1
    from selfadjoint1d import cayley_from_operator

    U = cayley_from_operator(a * np.eye(2))
    C = krein_correction(U, ZERO_PI, z).corrected
    c = np.sqrt(2 * z)
    # G(x, y) = -2 u_l(x<) u_r(x>) / W with u_l, u_r satisfying the Robin condition at each end
    ul = lambda x: c * np.cosh(c * x) - a * np.sinh(c * x)  # noqa: E731, -u'(0) = a u(0)
    ulp = lambda x: c * c * np.sinh(c * x) - a * c * np.cosh(c * x)  # noqa: E731
    ur = lambda x: c * np.cosh(c * (PI - x)) - a * np.sinh(c * (PI - x))  # noqa: E731, u'(pi) = a u(pi)
    urp = lambda x: -c * c * np.sinh(c * (PI - x)) + a * c * np.cosh(c * (PI - x))  # noqa: E731
    W = ul(0) * urp(0) - ulp(0) * ur(0)
    G = lambda x, y: -2 * ul(min(x, y)) * ur(max(x, y)) / W  # noqa: E731
    expected = np.array([[G(0, 0), G(0, PI)], [G(PI, 0), G(PI, PI)]])
    assert np.allclose(C, expected, rtol=1e-10)


def test_R_spikes_at_robin_eigenvalue():
    U = named_bc("robin", [0.7, -1.1])
    lam = find_eigenvalues(U, ZERO_PI, (0.2, 3)).values[0]
    norms = []
    for d in (1e-2, 1e-4, 1e-6):
        norms.append(np.linalg.norm(krein_correction(U, ZERO_PI, -(lam + d)).R))
    assert norms[1] > 50 * norms[0] and norms[2] > 50 * norms[1]
    with pytest.raises(SingularDenominator):
        krein_correction(U, ZERO_PI, -lam)
    poles = pole_scan(U, ZERO_PI, (0.2, 3))
    assert abs(poles[0] - lam) < 1e-6


def test_pole_scan_dirichlet_zero_to_pi():
    # literal example: Dirichlet poles 0.5, 2, 4.5 on [0, pi] with the Neumann background
    poles = pole_scan(named_bc("dirichlet"), ZERO_PI, (0.1, 5))
    assert len(poles) == 3, f"expected poles near 0.5, 2, 4.5; got {poles}"
    assert np.allclose(poles, [0.5, 2.0, 4.5], atol=1e-6)


def test_pole_scan_dirichlet_with_potential():
    # with V = x the Dirichlet and Neumann ladders separate, and the poles are visible
    system = IntervalSystem.single(0, PI, potential=PotentialSpec.polynomial([0, 1]))
    window = (0.1, 10)
    poles = np.array(pole_scan(named_bc("dirichlet"), system, window))
    eigs = find_eigenvalues(named_bc("dirichlet"), system, window).values
    bg = neumann_eigenvalues(system, window)
    eigs = eigs[[np.min(np.abs(bg - e)) >= 1e-4 for e in eigs]]
    assert eigs.size >= 3 and poles.size == eigs.size
    assert np.max(np.abs(poles - eigs)) < 1e-6


def test_pole_scan_neumann_empty():
    assert pole_scan(named_bc("neumann"), ZERO_PI, (0.0, 20)) == []


def test_pole_scan_quasi_periodic_two_pi():
    system = IntervalSystem.single(0, 2 * PI)
    U = named_bc("quasi_periodic", PI / 2)
    window = (0.0, 6.0)
    poles = np.array(pole_scan(U, system, window))
    eigs = find_eigenvalues(U, system, window).values
    bg = neumann_eigenvalues(system, window)
    eigs = eigs[[np.min(np.abs(bg - e)) >= 1e-4 for e in eigs]]
    assert poles.size == eigs.size > 0
    assert np.max(np.abs(poles - eigs)) < 1e-6


def test_pole_scan_two_intervals(rng):
    system = IntervalSystem([Interval(0, 1), Interval(0, 1.6)])
    window = (0.0, 15.0)
    bg = neumann_eigenvalues(system, window)
    for _ in range(3):
        U = random_unitary(4, rng)
        poles = np.array(pole_scan(U, system, window))
        eigs = find_eigenvalues(U, system, window)
        eigs = np.array([p.lam for p in eigs if np.min(np.abs(bg - p.lam)) >= 1e-4])
        assert poles.size == eigs.size
        assert np.max(np.abs(poles - eigs), initial=0) < 1e-6
