"""Unitarization of dissipative boundary conditions by mirror doubling.

A condition ``phi_dot = A phi`` with non-Hermitian ``A`` loses (or gains)
probability through the boundary. Doubling the system with a mirror copy and
imposing

    phi_dot = A phi_m,    phi_dot_m = A^* phi

gives, in the coordinates ``(phi, phi_m)``, the operator
``B = [[0, A], [A^*, 0]]``, which is Hermitian for every ``A``. The doubled
condition is therefore self-adjoint and always off the Cayley surface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import (
    BoundaryOperator,
    BoundaryTrace,
    BoundaryUnitary,
    as_matrix,
    cayley_from_operator,
)
from .errors import DimensionMismatch, TraceNotInDomain
from .intervals import IntervalSystem


@dataclass(frozen=True)
class MirrorSystem:
    base: IntervalSystem
    doubled: IntervalSystem

    @classmethod
    def of(cls, base: IntervalSystem) -> "MirrorSystem":
        return cls(base, IntervalSystem(list(base) + list(base)))

    def permutation(self) -> np.ndarray:
        """Matrix taking ``[phi; phi_m]`` to the slot order of the doubled system.

        ``phi`` is ``[lefts; rights]`` of the base, the doubled system orders
        all ``2n`` lefts (base then mirror) before all ``2n`` rights.
        """
        n = self.base.n
        order = np.concatenate([np.arange(n), 2 * n + np.arange(n), n + np.arange(n), 3 * n + np.arange(n)])
        P = np.zeros((4 * n, 4 * n))
        P[np.arange(4 * n), order] = 1.0
        return P

    def split(self, trace: BoundaryTrace):
        """Base and mirror parts ``(phi, phi_dot, phi_m, phi_dot_m)`` of a doubled trace."""
        n2 = 2 * self.base.n
        P = self.permutation()
        v, vd = P.T @ trace.phi, P.T @ trace.phi_dot
        return v[:n2], vd[:n2], v[n2:], vd[n2:]


def mirror_operator(A) -> np.ndarray:
    A = as_matrix(A)
    z = np.zeros_like(A)
    return np.block([[z, A], [A.conj().T, z]])


def mirror_extend(A, base: IntervalSystem) -> tuple[MirrorSystem, BoundaryUnitary]:
    """Doubled system and the unitary of the coupled condition, in doubled slot order."""
    A = as_matrix(A)
    if A.shape != (base.dim, base.dim):
        raise DimensionMismatch(f"A must be {base.dim}x{base.dim}, got {A.shape}")
    ms = MirrorSystem.of(base)
    Uc = cayley_from_operator(mirror_operator(A)).matrix
    P = ms.permutation()
    U = P @ Uc @ P.T
    # permutation conjugation is exact; re-symmetrize rounding only
    return ms, BoundaryUnitary(U)


def dissipation_rate(A, trace: BoundaryTrace, tol: float = 1e-10) -> float:
    """``2 Im(phi^* A phi)`` for a trace with ``phi_dot = A phi``.

    Positive for ``A = i``; zero whenever ``A`` is Hermitian.
    """
    A = as_matrix(A)
    if A.shape[0] != trace.phi.size:
        raise DimensionMismatch(f"A is {A.shape[0]}-dimensional, trace has {trace.phi.size} slots")
    Aphi = A @ trace.phi
    miss = np.linalg.norm(trace.phi_dot - Aphi)
    if not miss <= tol * max(1.0, np.linalg.norm(Aphi)):
        raise TraceNotInDomain(f"trace violates phi_dot = A phi by {miss:.3e}")
    return float(2.0 * np.imag(np.vdot(trace.phi, Aphi)))
