"""Unitary boundary matrices, the boundary Cayley transform and gluing.

A self-adjoint extension is fixed by a unitary ``U`` on the boundary space
``C^{2n}``; its domain is the set of functions whose boundary data satisfy

    psi - i psi_dot = U (psi + i psi_dot).

With this convention ``U = I`` is Neumann, ``U = -I`` is Dirichlet and a
scalar phase ``e^{i beta}`` is the Robin condition ``psi_dot = -tan(beta/2) psi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidMatching,
    NonUnitary,
    NotSelfAdjoint,
    OnCayleySurface,
)

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
CAYLEY_GAP_TOL = 1e-8


def unitarity_deviation(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))) if m.size else 0.0


def hermiticity_deviation(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


class BoundaryUnitary:
    """A ``2n x 2n`` unitary with the ``[[U11, U12], [U21, U22]]`` block view."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: float = UNITARY_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"boundary matrix must be square, got shape {m.shape}")
        if m.shape[0] % 2:
            raise DimensionMismatch(f"boundary dimension must be even, got {m.shape[0]}")
        dev = unitarity_deviation(m)
        if not dev < tol:
            raise NonUnitary(dev)
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def blocks(self):
        n = self.n
        m = self.matrix
        return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"BoundaryUnitary(n={self.n})"


@dataclass(frozen=True)
class BoundaryOperator:
    """The matrix ``A`` of a condition ``psi_dot = A psi``; may be non-self-adjoint."""

    matrix: np.ndarray
    self_adjoint: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"boundary operator must be square, got shape {m.shape}")
        if self.self_adjoint:
            dev = hermiticity_deviation(m)
            if not dev < HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m), initial=0.0))):
                raise NotSelfAdjoint(dev)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class BoundaryTrace:
    """Boundary values ``psi = [psi_l; psi_r]`` and normal derivatives ``psi_dot``."""

    phi: np.ndarray
    phi_dot: np.ndarray

    def __post_init__(self):
        phi = np.atleast_1d(np.array(self.phi, dtype=complex))
        phi_dot = np.atleast_1d(np.array(self.phi_dot, dtype=complex))
        if phi.shape != phi_dot.shape or phi.ndim != 1:
            raise DimensionMismatch(f"trace parts differ: {phi.shape} vs {phi_dot.shape}")
        if phi.size % 2:
            raise DimensionMismatch("trace length must be even")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "phi_dot", phi_dot)

    @property
    def plus(self) -> np.ndarray:
        return self.phi + 1j * self.phi_dot

    @property
    def minus(self) -> np.ndarray:
        return self.phi - 1j * self.phi_dot


def as_matrix(U) -> np.ndarray:
    if isinstance(U, BoundaryUnitary):
        return U.matrix
    if isinstance(U, BoundaryOperator):
        return U.matrix
    return np.asarray(U, dtype=complex)


def as_unitary(U) -> BoundaryUnitary:
    return U if isinstance(U, BoundaryUnitary) else BoundaryUnitary(U)


def _phases(values, size, what):
    arr = np.broadcast_to(np.asarray(values, dtype=float), (size,)) if np.ndim(values) == 0 else np.asarray(values, dtype=float)
    if arr.shape != (size,):
        raise DimensionMismatch(f"{what}: expected {size} phases, got {arr.shape}")
    return arr


def named_bc(name: str, params=None, n: int = 1) -> BoundaryUnitary:
    """Boundary unitary for a named condition on ``n`` intervals.

    ``robin``: ``params`` is one phase per slot (or a scalar), giving
    ``diag(exp(i eps))``. ``diagonal``: ``(eps, gamma)`` for the left and right
    ends, ``diag(exp(i eps), exp(-i gamma))``. ``quasi_periodic``: one phase
    per interval, coupling the two ends of each interval so that
    ``psi(b) = exp(i alpha) psi(a)`` and ``psi'(b) = exp(i alpha) psi'(a)``.
    ``matrix``: ``params`` is the raw matrix.
    """
    name = name.lower().replace("-", "_")
    dim = 2 * n
    if name == "dirichlet":
        return BoundaryUnitary(-np.eye(dim))
    if name == "neumann":
        return BoundaryUnitary(np.eye(dim))
    if name == "robin":
        eps = _phases(0.0 if params is None else params, dim, "robin")
        return BoundaryUnitary(np.diag(np.exp(1j * eps)))
    if name == "diagonal":
        eps, gamma = params
        eps = _phases(eps, n, "diagonal eps")
        gamma = _phases(gamma, n, "diagonal gamma")
        return BoundaryUnitary(np.diag(np.concatenate([np.exp(1j * eps), np.exp(-1j * gamma)])))
    if name in ("quasi_periodic", "periodic"):
        alpha = _phases(0.0 if (params is None or name == "periodic") else params, n, "quasi_periodic")
        m = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(n)
        m[idx, idx + n] = np.exp(-1j * alpha)
        m[idx + n, idx] = np.exp(1j * alpha)
        return BoundaryUnitary(m)
    if name == "matrix":
        m = np.asarray(params, dtype=complex)
        if m.shape != (dim, dim):
            raise DimensionMismatch(f"raw matrix must be {dim}x{dim}, got {m.shape}")
        return BoundaryUnitary(m)
    raise ValueError(f"unknown boundary condition {name!r}")


def asorey_residual(U, trace: BoundaryTrace) -> float:
    """``|(psi - i psi_dot) - U (psi + i psi_dot)|_2``; zero iff the trace is in the domain."""
    m = as_matrix(U)
    if m.shape[0] != trace.phi.size:
        raise DimensionMismatch(f"U is {m.shape[0]}-dimensional, trace has {trace.phi.size} slots")
    return float(np.linalg.norm(trace.minus - m @ trace.plus))


def boundary_form(t1: BoundaryTrace, t2: BoundaryTrace) -> complex:
    """``<psi_dot_1, psi_2> - <psi_1, psi_dot_2>``, conjugate-linear in ``t1``."""
    if t1.phi.size != t2.phi.size:
        raise DimensionMismatch(f"traces have {t1.phi.size} and {t2.phi.size} slots")
    return complex(np.vdot(t1.phi_dot, t2.phi) - np.vdot(t1.phi, t2.phi_dot))


def cayley_surface_distance(U) -> float:
    mu = np.linalg.eigvals(as_matrix(U))
    return float(np.min(np.abs(mu + 1.0)))


def cayley_to_operator(U, gap_tol: float = CAYLEY_GAP_TOL) -> BoundaryOperator:
    """``A = -i (I - U)(I + U)^{-1}``, the operator with ``psi_dot = A psi``."""
    m = as_matrix(U)
    dist = cayley_surface_distance(m)
    if dist < gap_tol:
        raise OnCayleySurface(dist)
    eye = np.eye(m.shape[0])
    # I - U and (I + U)^{-1} commute
    a = -1j * np.linalg.solve(eye + m, eye - m)
    return BoundaryOperator(0.5 * (a + a.conj().T))


def cayley_from_operator(A) -> BoundaryUnitary:
    """``U = (I - iA)(I + iA)^{-1}``, built from the spectral decomposition of ``A``."""
    m = as_matrix(A)
    dev = hermiticity_deviation(m)
    if not dev < HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m), initial=0.0))):
        raise NotSelfAdjoint(dev)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    phases = (1 - 1j * w) / (1 + 1j * w)
    phases /= np.abs(phases)
    return BoundaryUnitary((v * phases) @ v.conj().T)


def _slot(spec, n):
    if isinstance(spec, (int, np.integer)):
        s = int(spec)
    else:
        i, end = spec
        if not 0 <= i < n:
            raise InvalidMatching(f"interval {i} out of range")
        if end not in ("left", "right"):
            raise InvalidMatching(f"bad end {end!r}")
        s = int(i) + (n if end == "right" else 0)
    if not 0 <= s < 2 * n:
        raise InvalidMatching(f"slot {s} out of range for {2 * n} boundary points")
    return s


def _free_phase(cond):
    if isinstance(cond, str):
        c = cond.lower()
        if c == "dirichlet":
            return np.pi
        if c == "neumann":
            return 0.0
        raise InvalidMatching(f"unknown free-end condition {cond!r}")
    return float(cond)


def wire_bc(
    pairing: Iterable[Sequence] = (),
    n: int = 1,
    free="dirichlet",
    junctions: Iterable[Sequence] = (),
    junction_phases: Iterable[Sequence[float]] | None = None,
) -> BoundaryUnitary:
    """Glue boundary points into a quantum wire.

    Each ``(slot1, slot2, phase)`` in ``pairing`` imposes
    ``psi(slot2) = e^{i phase} psi(slot1)`` together with the current balance
    ``psi_dot(slot1) + e^{-i phase} psi_dot(slot2) = 0``. Each entry of
    ``junctions`` is a list of ``d`` slots joined by continuity
    ``psi_j = e^{i phase_j} c`` and ``sum_j e^{-i phase_j} psi_dot_j = 0``
    (phases from ``junction_phases``, zero by default); its block is
    ``D (2/d J - I) D*``. Slots are integers or ``(interval, "left"|"right")``.
    Unused slots take ``free``: a name, a Robin phase, or a mapping slot -> either.
    """
    dim = 2 * n
    groups = []
    for entry in pairing:
        if len(entry) != 3:
            raise InvalidMatching(f"pairing entries are (slot, slot, phase), got {entry!r}")
        s1, s2, beta = entry
        groups.append(([_slot(s1, n), _slot(s2, n)], [0.0, float(beta)]))
    junctions = list(junctions)
    if junction_phases is None:
        junction_phases = [[0.0] * len(j) for j in junctions]
    junction_phases = list(junction_phases)
    if len(junction_phases) != len(junctions):
        raise InvalidMatching("junction_phases must match junctions")
    for slots, phases in zip(junctions, junction_phases):
        if len(phases) != len(slots):
            raise InvalidMatching("one phase per junction slot")
        groups.append(([_slot(s, n) for s in slots], [float(p) for p in phases]))

    used = {}
    for k, (slots, _) in enumerate(groups):
        if len(slots) < 2:
            raise InvalidMatching("a junction needs at least two slots")
        for s in slots:
            if s in used:
                raise InvalidMatching(f"slot {s} used more than once")
            used[s] = k

    m = np.zeros((dim, dim), dtype=complex)
    for slots, phases in groups:
        d = len(slots)
        ph = np.exp(1j * np.asarray(phases))
        block = (2.0 / d) * np.ones((d, d)) - np.eye(d)
        m[np.ix_(slots, slots)] = ph[:, None] * block * ph.conj()[None, :]
    for s in range(dim):
        if s in used:
            continue
        cond = free.get(s, "dirichlet") if isinstance(free, Mapping) else free
        m[s, s] = np.exp(1j * _free_phase(cond))
    return BoundaryUnitary(m)
