"""Neumann background resolvent on the boundary and the Krein correction.

``C0_z`` is the kernel of ``(z + H_N)^{-1}`` (Neumann condition, ``U = I``)
restricted to the ``2n`` boundary points. A solution ``u`` of
``(z + H) u = 0`` has boundary data tied by Green's identity,
``phi = (1/2) C0_z phi_dot``; the factor ``1/2`` is the kinetic prefactor of
``H``. Substituting into the boundary condition of ``U`` shows that
``lam = -z`` is an eigenvalue of ``H_U`` exactly when

    D(z) = (I - U) C0_z - 2i (I + U)

is singular, and the boundary-restricted resolvent of ``H_U`` is
``C0 - C0 R C0`` with ``R = D^{-1} (I - U)``. For ``U = -I`` this reduces to
``R = C0^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _roots
from .boundary import as_matrix
from .errors import AtBackgroundPole, DimensionMismatch, SingularDenominator
from .fundamental import endpoint_data, fundamental_pair
from .intervals import IntervalSystem

COND_MAX = 1e12
POLE_MASK = 1e-4


@dataclass(frozen=True)
class BoundaryGreenMatrix:
    z: complex
    entries: np.ndarray


@dataclass(frozen=True)
class KreinCorrection:
    z: complex
    R: np.ndarray
    background: np.ndarray
    corrected: np.ndarray  # C0 - C0 R C0


def _green_blocks(system: IntervalSystem, vals, ders):
    """Neumann boundary Green matrix per interval, assembled on the boundary slots.

    ``vals``/``ders``: ``(m, n, 2, 2)`` ``[lam, interval, solution, end]``.
    With ``psi1'(a) = 0``, ``psi2'(a) = 1`` and unit Wronskian the block
    ``2 Phi Phi_dot^{-1}`` reduces to

        2 sqrt(eta) / psi1'(b) * [[psi2'(b), 1], [1, psi1(b)]]

    which avoids the cancellation of the general product when the
    solutions grow exponentially. The Neumann poles are the zeros of
    ``psi1'(b)``; the second return value is ``|psi1'(b)|`` relative to the
    size of the other entries, per sample (smallest over intervals).
    """
    m, n = vals.shape[:2]
    sq = np.sqrt(np.array([iv.weight for iv in system]))[None, :]
    p1 = vals[..., 0, 1]
    d1, d2 = ders[..., 0, 1], ders[..., 1, 1]
    with np.errstate(all="ignore"):
        f = 2.0 * sq / d1
        gap = np.min(np.abs(d1) / (np.abs(d1) + np.abs(d2) + np.abs(p1) + 1.0), axis=1)
    out = np.zeros((m, 2 * n, 2 * n), dtype=complex)
    for i in range(n):
        a, b = i, i + n
        out[:, a, a] = f[:, i] * d2[:, i]
        out[:, a, b] = out[:, b, a] = f[:, i]
        out[:, b, b] = f[:, i] * p1[:, i]
    return out, gap


def _green_stack(system, zs, accurate, ode_options=None):
    lams = -np.atleast_1d(np.asarray(zs, dtype=complex))
    if accurate:
        pairs = [[fundamental_pair(iv, lam, **(ode_options or {})) for iv in system] for lam in lams]
        vals = np.array([[p.values for p in row] for row in pairs])
        ders = np.array([[p.derivs for p in row] for row in pairs])
    else:
        parts = [endpoint_data(iv, lams) for iv in system]
        vals = np.stack([p[0] for p in parts], axis=1)
        ders = np.stack([p[1] for p in parts], axis=1)
    return _green_blocks(system, vals, ders)


def neumann_boundary_green(system: IntervalSystem, z: complex, gap_tol: float = 1e-12, **ode_options) -> BoundaryGreenMatrix:
    """Neumann Green kernel of ``z + H`` at the boundary points."""
    g, gap = _green_stack(system, [z], True, ode_options)
    if not gap[0] > gap_tol or not np.all(np.isfinite(g[0])):
        raise AtBackgroundPole(z, 1.0 / max(gap[0], 1e-300))
    return BoundaryGreenMatrix(complex(z), g[0])


def _denominator(Um, C0):
    eye = np.eye(Um.shape[0])
    return (eye - Um) @ C0 - 2j * (eye + Um)


def krein_correction(U, system: IntervalSystem, z: complex, **ode_options) -> KreinCorrection:
    Um = as_matrix(U)
    if Um.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"U is {Um.shape[0]}-dimensional, system has {system.dim} boundary slots")
    C0 = neumann_boundary_green(system, z, **ode_options).entries
    D = _denominator(Um, C0)
    cond = np.linalg.cond(D)
    if not cond < COND_MAX:
        raise SingularDenominator(z, cond)
    R = np.linalg.solve(D, np.eye(Um.shape[0]) - Um)
    return KreinCorrection(complex(z), R, C0, C0 - C0 @ R @ C0)


def neumann_eigenvalues(system: IntervalSystem, lambda_range, **kw) -> np.ndarray:
    """Eigenvalues of the Neumann background in a window."""
    lo, hi = lambda_range
    if system.free:
        out = []
        for iv in system:
            m = np.arange(0, int(np.ceil(iv.length * np.sqrt(2 * iv.weight * max(hi, 0)) / np.pi)) + 2)
            lam = (m * np.pi / iv.length) ** 2 / (2 * iv.weight)
            out.extend(lam[(lam >= lo - 1) & (lam <= hi + 1)])
        return np.unique(np.array(out, dtype=float))
    from .spectral import find_eigenvalues

    return find_eigenvalues(np.eye(system.dim), system, (lo - 1, hi + 1), **kw).values


def pole_scan(U, system: IntervalSystem, lambda_range, grid: float = 2000.0, mask: float = POLE_MASK,
              options: _roots.RootOptions | None = None) -> list[float]:
    """Parameters ``lam = -z`` in ``lambda_range`` where the Krein denominator is singular.

    The scan follows the unnormalized smallest singular value of ``D(-lam)``;
    candidates are certified relative to the size of the two terms of ``D``.
    Points within ``mask`` of a Neumann background eigenvalue are dropped.
    """
    Um = as_matrix(U)
    if Um.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"U is {Um.shape[0]}-dimensional, system has {system.dim} boundary slots")
    opts = options or _roots.RootOptions(grid_density=grid)
    eye = np.eye(Um.shape[0])
    a, b = eye - Um, 2.0 * np.linalg.norm(eye + Um)

    def stack(lams, accurate):
        C0, _ = _green_stack(system, -np.asarray(lams, dtype=complex), accurate)
        D = a[None] @ C0 - 2j * (eye + Um)[None]
        scale = np.linalg.norm(a[None] @ C0, axis=(1, 2)) + b
        return D, scale

    def batch(lams):
        with np.errstate(all="ignore"):
            return stack(lams, False)

    def single(lam):
        with np.errstate(all="ignore"):
            D, s = stack([lam], True)
        return D[0], s[0]

    poles = neumann_eigenvalues(system, lambda_range)

    def exclude(lam):
        return poles.size > 0 and np.min(np.abs(poles - lam)) < mask

    rep = _roots.find_roots(batch, single, *map(float, lambda_range), opts,
                            scan_measure=lambda sv, scale: sv[..., -1], exclude=exclude)
    return [r.lam for r in rep.roots]
