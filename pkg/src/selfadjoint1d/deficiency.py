"""Deficiency spaces and the von Neumann correspondence ``K <-> U``.

Conventions: ``n_+ = dim ker(H* + i)`` and ``n_- = dim ker(H* - i)``, i.e.
``n_pm = codim Ran(H -+ i)``. Under this reading the momentum operator
``i d/dx`` on the half-line has indices ``(1, 0)``.

For the Laplacian on a compact interval both deficiency spaces are spanned by
the exponentials ``exp(+-kappa x)`` with ``kappa^2 = -+ 2 i eta``. A unitary
``K: N_+ -> N_-`` between orthonormal bases selects the extension with domain
``D_min + {xi + K xi}``; its boundary unitary follows from the traces of the
basis functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryUnitary, as_matrix, unitarity_deviation
from .errors import DimensionMismatch, NonUnitaryK, RankDeficientTraceMap
from .intervals import IntervalSystem

K_UNITARY_TOL = 1e-10
RANK_COND = 1e12


def _roots_for(kind: str, lam: complex):
    """Characteristic exponents ``p`` of ``exp(p x)`` solving ``H* psi = lam psi``."""
    if kind == "laplace":
        # -(1/2) psi'' = lam psi  ->  p^2 = -2 lam
        r = np.sqrt(-2.0 * lam + 0j)
        return [r, -r]
    if kind == "dirac":
        # i psi' = lam psi  ->  p = -i lam
        return [-1j * lam]
    raise ValueError(f"unknown operator kind {kind!r}")


def _half_line_count(kind: str, lam: complex) -> int:
    return sum(1 for p in _roots_for(kind, lam) if p.real < 0)


def deficiency_indices(system_kind, lam: complex = 1j) -> tuple[int, int]:
    """``(n_+, n_-)`` for a compact system or ``"half_line_laplace"`` / ``"half_line_dirac"``.

    Half-line indices count decaying exponentials of ``H* psi = -+ lam psi``.
    Any ``lam`` with positive imaginary part gives the same answer.
    """
    if complex(lam).imag <= 0:
        raise ValueError("lam must lie in the upper half plane")
    if isinstance(system_kind, IntervalSystem):
        return (2 * system_kind.n, 2 * system_kind.n)
    if system_kind == "half_line_laplace":
        kind = "laplace"
    elif system_kind == "half_line_dirac":
        kind = "dirac"
    else:
        raise ValueError(f"unknown system kind {system_kind!r}")
    return (_half_line_count(kind, -lam), _half_line_count(kind, lam))


def has_self_adjoint_extension(system_kind) -> bool:
    n_plus, n_minus = deficiency_indices(system_kind)
    return n_plus == n_minus


@dataclass(frozen=True)
class DeficiencyBasis:
    """Orthonormal basis of ``ker(H* - lam)`` on a compact system.

    Basis function ``j`` is ``sum_i coeffs[i, j] exp(p_i (x - c_i))`` with the
    raw exponential ``i`` living on interval ``owner[i]``.
    """

    lam: complex
    system: IntervalSystem
    exponents: np.ndarray
    anchors: np.ndarray
    owner: np.ndarray
    coeffs: np.ndarray

    @property
    def dimension(self) -> int:
        return self.coeffs.shape[1]

    def raw_gram(self) -> np.ndarray:
        return _gram(self.system, self.exponents, self.anchors, self.owner)

    def gram(self) -> np.ndarray:
        c = self.coeffs
        return c.conj().T @ self.raw_gram() @ c

    def traces(self):
        """``phi``, ``phi_dot`` of shape ``(2n, dim)``, one column per basis function."""
        sys = self.system
        n = sys.n
        phi = np.zeros((2 * n, self.exponents.size), dtype=complex)
        phid = np.zeros_like(phi)
        for i, (p, c, a) in enumerate(zip(self.exponents, self.anchors, self.owner)):
            iv = sys[a]
            sq = np.sqrt(iv.weight)
            ea, eb = np.exp(p * (iv.a - c)), np.exp(p * (iv.b - c))
            phi[a, i], phi[a + n, i] = ea, eb
            phid[a, i], phid[a + n, i] = -p * ea / sq, p * eb / sq
        return phi @ self.coeffs, phid @ self.coeffs

    def __call__(self, alpha: int, x):
        """Values (and second derivatives) of all basis functions on interval ``alpha``."""
        x = np.asarray(x, dtype=float)
        sel = self.owner == alpha
        p = self.exponents[sel]
        e = np.exp(np.multiply.outer(x, p) - p * self.anchors[sel])
        vals = e @ self.coeffs[sel]
        d2 = (e * p**2) @ self.coeffs[sel]
        return vals, d2


def _gram(system, p, c, owner):
    m = p.size
    G = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            if owner[i] != owner[j]:
                continue
            iv = system[owner[i]]
            s = np.conj(p[i]) + p[j]
            shift = -np.conj(p[i]) * c[i] - p[j] * c[j]
            G[i, j] = np.sqrt(iv.weight) * (np.exp(s * iv.b + shift) - np.exp(s * iv.a + shift)) / s
    return G


def deficiency_basis(system: IntervalSystem, sign: int = 1, lam: complex | None = None) -> DeficiencyBasis:
    """Orthonormal basis of solutions of ``H* psi = sign * i psi`` (or ``lam``).

    Each interval carries ``exp(-kappa (x - a))`` and ``exp(kappa (x - b))``
    with ``Re kappa > 0``; both are bounded by one on the interval, which keeps
    the closed-form Gram matrix well scaled. Orthonormalization is by Cholesky
    factorization of that Gram matrix.
    """
    if not system.free:
        raise NotImplementedError("deficiency bases are closed form only for zero potential")
    lam = complex(sign) * 1j if lam is None else complex(lam)
    exps, anchors, owner = [], [], []
    for a, iv in enumerate(system):
        kappa = np.sqrt(-2.0 * iv.weight * lam + 0j)
        if kappa.real < 0:
            kappa = -kappa
        exps += [-kappa, kappa]
        anchors += [iv.a, iv.b]
        owner += [a, a]
    exps, anchors, owner = np.array(exps), np.array(anchors, dtype=float), np.array(owner)
    G = _gram(system, exps, anchors, owner)
    L = np.linalg.cholesky(0.5 * (G + G.conj().T))
    coeffs = np.linalg.inv(L).conj().T
    return DeficiencyBasis(lam, system, exps, anchors, owner, coeffs)


def _plus_minus(basis: DeficiencyBasis):
    phi, phid = basis.traces()
    return phi + 1j * phid, phi - 1j * phid


def K_to_U(K, system: IntervalSystem) -> BoundaryUnitary:
    """Boundary unitary of the extension with domain ``D_min + {xi + K xi : xi in N_+}``.

    With ``X_pm`` the ``psi +- i psi_dot`` traces of the columns ``xi_j + K xi_j``,
    the condition ``X_- = U X_+`` gives ``U = X_- X_+^{-1}``.
    """
    K = np.asarray(K, dtype=complex)
    dim = system.dim
    if K.shape != (dim, dim):
        raise DimensionMismatch(f"K must be {dim}x{dim}, got {K.shape}")
    dev = unitarity_deviation(K)
    if not dev < K_UNITARY_TOL:
        raise NonUnitaryK(f"K is not unitary (max |K*K - I| = {dev:.3e})")
    yp_p, yp_m = _plus_minus(deficiency_basis(system, +1))
    ym_p, ym_m = _plus_minus(deficiency_basis(system, -1))
    x_plus = yp_p + ym_p @ K
    x_minus = yp_m + ym_m @ K
    cond = np.linalg.cond(x_plus)
    if not cond < RANK_COND:
        raise RankDeficientTraceMap(f"boundary traces are not independent (cond {cond:.3e})")
    U = np.linalg.solve(x_plus.T, x_minus.T).T
    return BoundaryUnitary(U, tol=1e-8)


def U_to_K(U, system: IntervalSystem) -> np.ndarray:
    """Inverse of :func:`K_to_U`: ``K = (Y_-^- - U Y_-^+)^{-1} (U Y_+^+ - Y_+^-)``."""
    Um = as_matrix(U)
    if Um.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"U is {Um.shape[0]}-dimensional, system has {system.dim} boundary slots")
    yp_p, yp_m = _plus_minus(deficiency_basis(system, +1))
    ym_p, ym_m = _plus_minus(deficiency_basis(system, -1))
    lhs = ym_m - Um @ ym_p
    cond = np.linalg.cond(lhs)
    if not cond < RANK_COND:
        raise RankDeficientTraceMap(f"trace map is rank deficient (cond {cond:.3e})")
    return np.linalg.solve(lhs, Um @ yp_p - yp_m)
