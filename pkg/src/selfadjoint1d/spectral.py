"""Spectral function, eigenvalues and eigenfunctions.

On interval ``alpha`` a solution is ``A1 psi1 + A2 psi2``. Stacking the
boundary data of the basis gives the ``2n x 2n`` matrices

    P_pm = [[diag psi_l+-^1, diag psi_l+-^2], [diag psi_r+-^1, diag psi_r+-^2]]

with ``psi_pm = psi +- i psi_dot``; the boundary condition becomes
``M(U, lam) [A1; A2] = 0`` with ``M = P_- - U P_+`` and the spectral function
is ``det M``. With the entire basis of :mod:`.fundamental` it is entire in
``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _roots, _shooting
from .boundary import BoundaryTrace, as_matrix, asorey_residual
from .errors import DimensionMismatch, NotAnEigenvalue, NotNormalized, NotSingleInterval
from .fundamental import endpoint_data, fundamental_pair
from .intervals import Interval, IntervalSystem


def hadamard_vec(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionMismatch(f"Hadamard product of shapes {x.shape} and {y.shape}")
    return x * y


def hadamard_mat(T, x):
    """``T o x``: the matrix with ``(T o x) y = T (x o y)``, i.e. column j scaled by ``x_j``."""
    T = np.asarray(T)
    x = np.asarray(x)
    if T.ndim != 2 or x.ndim != 1 or T.shape[1] != x.size:
        raise DimensionMismatch(f"cannot form T o x with T {T.shape} and x {x.shape}")
    return T * x[None, :]


def _check_dims(Um, system):
    if Um.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"U is {Um.shape[0]}-dimensional, system has {system.dim} boundary slots")


def _slot_traces(system: IntervalSystem, vals, ders):
    """Per-slot traces from endpoint data stacked over intervals.

    ``vals``/``ders`` have shape ``(m, n, 2, 2)`` ``[lam, interval, solution, end]``.
    Returns ``phi``, ``phi_dot`` of shape ``(m, 2n, 2)`` ``[lam, slot, solution]``.
    """
    sq = np.sqrt(np.array([iv.weight for iv in system]))[None, :, None]
    phi = np.concatenate([vals[..., 0], vals[..., 1]], axis=1)
    phi_dot = np.concatenate([-ders[..., 0] / sq, ders[..., 1] / sq], axis=1)
    return phi, phi_dot


def _endpoint_stack(system, lams, accurate, ode_options):
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if accurate:
        out = [[fundamental_pair(iv, lam, **ode_options) for iv in system] for lam in lams]
        vals = np.array([[p.values for p in row] for row in out])
        ders = np.array([[p.derivs for p in row] for row in out])
        return vals, ders
    parts = [endpoint_data(iv, lams) for iv in system]
    vals = np.stack([p[0] for p in parts], axis=1)
    ders = np.stack([p[1] for p in parts], axis=1)
    return vals, ders


def boundary_traces(system: IntervalSystem, lam, accurate: bool = True, **ode_options):
    """``phi``, ``phi_dot`` arrays ``[slot, solution]`` of the basis at ``lam``."""
    vals, ders = _endpoint_stack(system, [lam], accurate, ode_options)
    phi, phi_dot = _slot_traces(system, vals, ders)
    return phi[0], phi_dot[0]


def _trace_matrices(phi):
    """Spread ``[..., slot, solution]`` data into ``[..., 2n, 2n]`` block-diagonal form."""
    m, dim, _ = phi.shape
    n = dim // 2
    out = np.zeros((m, dim, dim), dtype=complex)
    slots = np.arange(dim)
    owner = slots % n
    out[:, slots, owner] = phi[:, :, 0]
    out[:, slots, owner + n] = phi[:, :, 1]
    return out


def _M_scaled(Um, system, lams, accurate=False, ode_options=None):
    """Stacked ``M`` and the size of the trace data it is built from."""
    vals, ders = _endpoint_stack(system, lams, accurate, ode_options or {})
    phi, phi_dot = _slot_traces(system, vals, ders)
    p_minus = _trace_matrices(phi - 1j * phi_dot)
    u_plus = Um[None] @ _trace_matrices(phi + 1j * phi_dot)
    scale = np.linalg.norm(p_minus, axis=(1, 2)) + np.linalg.norm(u_plus, axis=(1, 2))
    return p_minus - u_plus, scale


def _M_stack(Um, system, lams, accurate=False, ode_options=None):
    return _M_scaled(Um, system, lams, accurate, ode_options)[0]


@dataclass(frozen=True)
class SpectralMatrix:
    lam: complex
    entries: np.ndarray

    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def assemble_M(U, system: IntervalSystem, lam, **ode_options) -> SpectralMatrix:
    """``M(U, lam) = I o [psi_-^1 | psi_-^2] - U o [psi_+^1 | psi_+^2]``."""
    Um = as_matrix(U)
    _check_dims(Um, system)
    return SpectralMatrix(complex(lam), _M_stack(Um, system, [lam], True, ode_options)[0])


def spectral_function(U, system: IntervalSystem, lam, **ode_options) -> complex:
    return assemble_M(U, system, lam, **ode_options).det()


def _exponential_traces(interval: Interval, lam):
    """Traces of ``exp(+-i k (x - a))``, ``k = sqrt(2 eta lam)`` (principal root)."""
    k = np.sqrt(2.0 * interval.weight * complex(lam))
    L = interval.length
    sq = np.sqrt(interval.weight)
    e = np.exp(1j * k * L)
    vals = np.array([[1.0, e], [1.0, 1.0 / e]], dtype=complex)
    ders = np.array([[1j * k, 1j * k * e], [-1j * k, -1j * k / e]], dtype=complex)
    phi = np.array([vals[:, 0], vals[:, 1]])
    phi_dot = np.array([-ders[:, 0] / sq, ders[:, 1] / sq])
    return phi, phi_dot


def _single(system: IntervalSystem) -> Interval:
    if system.n != 1:
        raise NotSingleInterval(f"needs one interval, got {system.n}")
    return system[0]


def w_bracket(kind, system: IntervalSystem, lam, basis: str = "entire", **ode_options) -> complex:
    """``W(end1, end2, sign1, sign2)``: the determinant with rows ``psi_{end1 sign1}``
    and ``psi_{end2 sign2}``.

    ``kind`` is e.g. ``("l", "r", "-", "-")``. ``basis`` selects the entire
    cos/sin basis or the exponential basis ``exp(+-i k (x - a))``.
    """
    iv = _single(system)
    if basis == "entire":
        phi, phi_dot = boundary_traces(system, lam, **ode_options)
    elif basis == "exponential":
        phi, phi_dot = _exponential_traces(iv, lam)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    e1, e2, s1, s2 = kind
    rows = []
    for end, sign in ((e1, s1), (e2, s2)):
        slot = {"l": 0, "left": 0, "r": 1, "right": 1}[end]
        sgn = {"+": 1.0, "-": -1.0, 1: 1.0, -1: -1.0}[sign]
        rows.append(phi[slot] + sgn * 1j * phi_dot[slot])
    return complex(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0])


def su2_unitary(alpha, beta, theta):
    """``e^{i theta/2} [[alpha, beta], [-conj(beta), conj(alpha)]]``."""
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(norm)
    return np.exp(0.5j * theta) * np.array([[alpha, beta], [-np.conj(beta), np.conj(alpha)]], dtype=complex)


def spectral_function_n1(alpha, beta, theta, system: IntervalSystem, lam, basis: str = "entire", **ode_options) -> complex:
    """Closed form of ``det M`` for one interval in terms of ``W`` brackets.

    ``Lambda = W(l,r,-,-) + U11 W(r,l,-,+) + U22 W(r,l,+,-) + U12 W(r,r,-,+)
    + U21 W(l,l,+,-) + det U W(l,r,+,+)`` with ``U`` from :func:`su2_unitary`.
    """
    U = su2_unitary(alpha, beta, theta)
    W = lambda *k: w_bracket(k, system, lam, basis=basis, **ode_options)  # noqa: E731
    return (
        W("l", "r", "-", "-")
        + U[0, 0] * W("r", "l", "-", "+")
        + U[1, 1] * W("r", "l", "+", "-")
        + U[0, 1] * W("r", "r", "-", "+")
        + U[1, 0] * W("l", "l", "+", "-")
        + np.linalg.det(U) * W("l", "r", "+", "+")
    )


def exponential_basis_factor(system: IntervalSystem, lam) -> complex:
    """Ratio of the exponential-basis determinant to the entire-basis one.

    ``exp(+-i k t) = cos(k t) +- i k sin(k t)/k`` so each interval contributes
    the determinant ``-2 i k`` of the change of basis.
    """
    out = 1.0 + 0j
    for iv in system:
        out *= -2j * np.sqrt(2.0 * iv.weight * complex(lam))
    return out


@dataclass
class SolverOptions(_roots.RootOptions):
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    ode_method: str = "RK45"


def _ode_kw(opts: SolverOptions):
    return {"rtol": opts.ode_rtol, "atol": opts.ode_atol, "method": opts.ode_method}


@dataclass
class Eigenpair:
    """Eigenvalue with its null vectors ``[A1; A2]`` (columns of ``vectors``).

    ``coefficients[j, alpha] = (A1, A2)`` for null vector ``j`` on interval ``alpha``.
    When the pair comes from the shooting solver, ``nodes`` and ``node_data``
    hold ``(psi, psi')`` at the segment nodes of every interval (arrays of shape
    ``(multiplicity, K + 1, 2)``); traces and values are then taken from them,
    which stays accurate where propagation from the left end would not.
    """

    lam: float
    multiplicity: int
    vectors: np.ndarray
    residual: float  # smallest singular value of the row-normalized condition
    imag_drift: float = 0.0
    nodes: list | None = None
    node_data: list | None = None

    @property
    def coefficients(self) -> np.ndarray:
        n = self.vectors.shape[0] // 2
        return np.stack([self.vectors[:n].T, self.vectors[n:].T], axis=-1)

    def trace(self, system: IntervalSystem, j: int = 0, **ode_options) -> BoundaryTrace:
        if self.node_data is not None:
            n = system.n
            phi = np.empty(2 * n, dtype=complex)
            phi_dot = np.empty(2 * n, dtype=complex)
            for alpha, iv in enumerate(system):
                y = self.node_data[alpha][j]
                sq = np.sqrt(iv.weight)
                phi[alpha], phi_dot[alpha] = y[0, 0], -y[0, 1] / sq
                phi[alpha + n], phi_dot[alpha + n] = y[-1, 0], y[-1, 1] / sq
            return BoundaryTrace(phi, phi_dot)
        phi, phi_dot = boundary_traces(system, self.lam, **ode_options)
        P = _trace_matrices(phi[None])[0]
        Pd = _trace_matrices(phi_dot[None])[0]
        c = self.vectors[:, j]
        return BoundaryTrace(P @ c, Pd @ c)

    def evaluate(self, system: IntervalSystem, alpha: int, x, j: int = 0, **ode_options):
        """Eigenfunction on interval ``alpha`` at positions ``x``."""
        x = np.asarray(x, dtype=float)
        iv = system[alpha]
        if self.node_data is None:
            nodes, y = np.array([iv.a, iv.b]), self.coefficients[j, alpha][None]
        else:
            nodes, y = self.nodes[alpha], self.node_data[alpha][j]
        seg = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2)
        out = np.zeros(x.shape, dtype=complex)
        for k in np.unique(seg):
            sub = Interval(nodes[k], nodes[k + 1], iv.weight, iv.potential)
            vals, _ = fundamental_pair(sub, self.lam, **ode_options)(x[seg == k])
            out[seg == k] = y[k, 0] * vals[0] + y[k, 1] * vals[1]
        return out


class Spectrum(list):
    """List of :class:`Eigenpair` plus scan metadata."""

    def __init__(self, pairs=(), warnings=(), grid_points=0, grid_step=0.0):
        super().__init__(pairs)
        self.warnings = list(warnings)
        self.grid_points = grid_points
        self.grid_step = grid_step

    @property
    def values(self) -> np.ndarray:
        return np.array([p.lam for p in self])

    @property
    def multiplicities(self) -> list[int]:
        return [p.multiplicity for p in self]

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(self.values, self.multiplicities)


def _pair_from_shooting(lam, S, nodes, layout, n, rank_tol, drift=0.0):
    _, svals, vh = np.linalg.svd(S)
    mult = _roots.nullity(svals, 1.0, rank_tol)
    z = vh[-mult:].conj().T
    c = z[: 2 * n]
    # prefer orthonormal coefficients; keep unit node data if they carry no weight
    cs = np.linalg.svd(c, compute_uv=False)
    if cs[-1] > 1e-6 * cs[0] and cs[0] > 1e-8:
        z = z @ np.linalg.inv(np.linalg.qr(c)[1])
    return Eigenpair(float(lam), mult, z[: 2 * n], float(svals[-1]), drift,
                     list(nodes), _shooting.node_values(z, layout))


class _Shooter:
    """Scan and certification matrices for one operator and parameter range."""

    def __init__(self, Um, system, lam_floor, ode):
        self.Um, self.system, self.ode = Um, system, ode
        self.nodes = [_shooting.segment_nodes(iv, lam_floor) for iv in system]

    def batch(self, lams):
        S, _ = _shooting.shooting_system(self.Um, self.system, self.nodes, lams)
        return S, np.ones(S.shape[0])

    def single(self, lam):
        S, _ = _shooting.shooting_system(self.Um, self.system, self.nodes, [lam], True, self.ode)
        return S[0], 1.0

    def pair(self, lam, rank_tol, drift=0.0):
        S, layout = _shooting.shooting_system(self.Um, self.system, self.nodes, [lam], True, self.ode)
        return _pair_from_shooting(lam, S[0], self.nodes, layout, self.system.n, rank_tol, drift)


def find_eigenvalues(U, system: IntervalSystem, lambda_range, options: SolverOptions | None = None, **kw) -> Spectrum:
    """Certified eigenvalues of the extension ``U`` in ``lambda_range``."""
    opts = options or SolverOptions(**kw)
    Um = as_matrix(U)
    _check_dims(Um, system)
    lmin, lmax = map(float, lambda_range)
    sh = _Shooter(Um, system, lmin, _ode_kw(opts))
    # det M exp(-i arg det U / 2) is real for real lam
    phase = np.exp(-0.5j * np.angle(np.linalg.det(Um)))
    rep = _roots.find_roots(sh.batch, sh.single, lmin, lmax, opts, det_phase=phase)
    pairs = [sh.pair(r.lam, opts.rank_tol, r.imag_drift) for r in rep.roots]
    return Spectrum(pairs, rep.warnings, rep.grid_points, rep.grid_step)


def eigenfunction(U, system: IntervalSystem, lam, options: SolverOptions | None = None, **kw) -> Eigenpair:
    """Null vectors at ``lam``; raises :class:`NotAnEigenvalue` if ``lam`` is not a root."""
    opts = options or SolverOptions(**kw)
    Um = as_matrix(U)
    _check_dims(Um, system)
    pair = _Shooter(Um, system, float(np.real(lam)), _ode_kw(opts)).pair(lam, opts.rank_tol)
    if not pair.residual < opts.tol_residual:
        raise NotAnEigenvalue(pair.residual)
    return pair


def eigenpair_residual(U, system: IntervalSystem, pair: Eigenpair) -> float:
    """Largest Asorey residual over the eigenspace.

    Relative to the trace size, or to the node data when the eigenfunction
    is much larger inside the intervals than at their ends.
    """
    worst = 0.0
    for j in range(pair.multiplicity):
        t = pair.trace(system, j)
        scale = np.linalg.norm(t.phi) + np.linalg.norm(t.phi_dot)
        if pair.node_data is not None:
            scale = max(scale, max(float(np.max(np.abs(y[j]))) for y in pair.node_data))
        scale = max(scale, 1e-300)
        worst = max(worst, asorey_residual(U, t) / scale)
    return worst


def momentum_spectrum(theta: float, interval: Interval, lambda_range) -> list[float]:
    """Eigenvalues of ``i d/dx`` with ``psi(b) = e^{i theta} psi(a)``.

    Eigenfunctions are ``exp(-i E x)``, so ``E = (2 pi k - theta)/(b - a)``.
    """
    L = interval.length
    lo, hi = lambda_range
    kmin = int(np.ceil((lo * L + theta) / (2 * np.pi) - 1e-12))
    kmax = int(np.floor((hi * L + theta) / (2 * np.pi) + 1e-12))
    out = [(2 * np.pi * k - theta) / L for k in range(kmin, kmax + 1)]
    return [e for e in out if lo - 1e-12 <= e <= hi + 1e-12]
