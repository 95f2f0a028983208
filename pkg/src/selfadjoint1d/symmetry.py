"""Boundary representations of symmetry groups and invariant boundary conditions.

A symmetry acting on the boundary data by unitaries ``v(g)`` preserves the
domain of the extension ``U`` exactly when ``[v(g), U] = 0`` for every group
element. Compact groups are probed on a sample of angles that includes an
irrational multiple of ``pi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import as_matrix, unitarity_deviation
from .errors import DimensionMismatch, NonUnitary
from .intervals import IntervalSystem
from .spectral import Eigenpair, _M_scaled, _trace_matrices, boundary_traces

COMMUTE_TOL = 1e-9
CLOSURE_TOL = 1e-8
IRRATIONAL_ANGLE = np.pi * np.sqrt(2.0)


@dataclass
class BoundaryRep:
    """Unitaries ``v(g)`` on the boundary space, one per element or sampled angle."""

    kind: str
    matrices: list
    labels: list = field(default_factory=list)
    generator: Callable | None = None

    def __post_init__(self):
        self.matrices = [np.asarray(as_matrix(m), dtype=complex) for m in self.matrices]
        if not self.labels:
            self.labels = list(range(len(self.matrices)))
        for m in self.matrices:
            dev = unitarity_deviation(m)
            if not dev < 1e-10:
                raise NonUnitary(dev)
        if self.kind == "finite":
            ok, why = self.closure()
            if not ok:
                raise ValueError(f"not a group: {why}")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def closure(self):
        eye = np.eye(self.dim)
        if not any(np.max(np.abs(m - eye)) < CLOSURE_TOL for m in self.matrices):
            return False, "identity missing"
        for a in self.matrices:
            for b in self.matrices:
                p = a @ b
                if not any(np.max(np.abs(p - c)) < CLOSURE_TOL for c in self.matrices):
                    return False, "not closed under products"
        return True, ""

    @classmethod
    def finite(cls, elements: Sequence, labels=None) -> "BoundaryRep":
        return cls("finite", list(elements), list(labels or []))

    @classmethod
    def circle_sampled(cls, generator: Callable, angles=None) -> "BoundaryRep":
        if angles is None:
            angles = np.linspace(0, 2 * np.pi, 12, endpoint=False)
        angles = list(angles) + [IRRATIONAL_ANGLE]
        return cls("circle_sampled", [generator(a) for a in angles], angles, generator)


def swap_matrix(n: int) -> np.ndarray:
    """Exchange of left and right ends of every interval: ``[[0, I], [I, 0]]``."""
    eye = np.eye(n)
    z = np.zeros((n, n))
    return np.block([[z, eye], [eye, z]])


def parity_rep(n: int = 1) -> BoundaryRep:
    """``x -> -x`` on intervals symmetric about the origin; it swaps each interval's ends."""
    return BoundaryRep.finite([np.eye(2 * n), swap_matrix(n)], ["e", "P"])


def is_invariant(U, rep: BoundaryRep, tol: float = COMMUTE_TOL):
    """``(flag, max commutator norm)`` for ``U`` against every ``v(g)``."""
    Um = as_matrix(U)
    if Um.shape != (rep.dim, rep.dim):
        raise DimensionMismatch(f"U is {Um.shape[0]}-dimensional, representation acts on {rep.dim}")
    worst = max(float(np.max(np.abs(v @ Um - Um @ v))) for v in rep.matrices)
    return worst < tol, worst


def cylinder_rep(v) -> np.ndarray:
    """The swap ``[[0, v], [v^*, 0]]`` exchanging two boundary components."""
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    z = np.zeros_like(v)
    return np.block([[z, v], [v.conj().T, z]])


def cylinder_constraints(U, v):
    """Residuals of ``U12 = v U21 v`` and ``U22 = v^* U11 v``.

    Both vanish exactly when ``U`` commutes with :func:`cylinder_rep` of ``v``.
    """
    Um = as_matrix(U)
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    k = v.shape[0]
    if Um.shape != (2 * k, 2 * k) or v.shape != (k, k):
        raise DimensionMismatch(f"U {Um.shape} and v {v.shape} are not compatible")
    U11, U12, U21, U22 = Um[:k, :k], Um[:k, k:], Um[k:, :k], Um[k:, k:]
    r1 = float(np.max(np.abs(U12 - v @ U21 @ v)))
    r2 = float(np.max(np.abs(U22 - v.conj().T @ U11 @ v)))
    return r1, r2


def so2_fourier_rep(N: int, alpha: float) -> np.ndarray:
    """Rotation by ``alpha`` on Fourier modes ``-N..N``: ``diag(exp(i n alpha))``."""
    if N < 0:
        raise ValueError("mode cutoff must be non-negative")
    return np.diag(np.exp(1j * np.arange(-N, N + 1) * alpha))


def so2_rep(N: int, angles=None) -> BoundaryRep:
    return BoundaryRep.circle_sampled(lambda a: so2_fourier_rep(N, a), angles)


def eigenfunction_symmetry_residual(U, system: IntervalSystem, g, pair: Eigenpair, j: int = 0) -> float:
    """How far ``g`` maps an eigenfunction out of the eigenspace.

    The boundary action ``g`` is applied to the eigenfunction's values and
    normal derivatives; the transformed data are expanded in the fundamental
    basis by least squares and the result is tested against ``M(U, lam)``.
    Returns ``|M c| / (scale |c|)`` plus the relative least-squares misfit,
    where ``scale`` is the size of the trace data making up ``M``.
    """
    g = as_matrix(g)
    Um = as_matrix(U)
    if g.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"g acts on {g.shape[0]} slots, system has {system.dim}")
    t = pair.trace(system, j)
    target = np.concatenate([g @ t.phi, g @ t.phi_dot])
    phi, phi_dot = boundary_traces(system, pair.lam)
    basis = np.concatenate([_trace_matrices(phi[None])[0], _trace_matrices(phi_dot[None])[0]])
    c, *_ = np.linalg.lstsq(basis, target, rcond=None)
    misfit = np.linalg.norm(basis @ c - target) / max(np.linalg.norm(target), 1e-300)
    mats, scale = _M_scaled(Um, system, [pair.lam], accurate=True)
    return float(np.linalg.norm(mats[0] @ c) / (scale[0] * max(np.linalg.norm(c), 1e-300)) + misfit)
