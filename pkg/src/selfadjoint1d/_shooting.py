"""Multiple shooting for the eigenvalue condition.

Below the potential, solutions grow like ``exp(int kappa)`` with
``kappa = sqrt(2 eta (V - lam))``, and data propagated across a whole
interval lose the decaying component to rounding. Each interval is therefore
cut at nodes chosen so that the growth exponent per segment stays below
``GROWTH_BUDGET``. The unknowns are ``(psi, psi')`` at every node; segment
transfer matrices link consecutive nodes and the boundary condition acts on
the end nodes. Rows are scaled to unit length, so the smallest singular value
is a scale-free measure of how far ``lam`` is from the spectrum.

Unknown ``alpha`` and ``alpha + n`` are ``(psi, psi')`` at the left end of
interval ``alpha``, i.e. the coefficients ``(A1, A2)`` of the fundamental
basis; the remaining unknowns follow, interval by interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .fundamental import endpoint_data, fundamental_pair
from .intervals import Interval, IntervalSystem

GROWTH_BUDGET = 4.0
SAMPLES = 1025
CHUNK = 2048


def segment_nodes(interval: Interval, lam_floor: float, budget: float = GROWTH_BUDGET) -> np.ndarray:
    """Nodes ``a = x0 < ... < xK = b`` with WKB growth at most ``budget`` per segment at ``lam_floor``."""
    x = np.linspace(interval.a, interval.b, SAMPLES)
    v = np.broadcast_to(interval.potential(x), x.shape)
    kappa = np.sqrt(np.clip(2.0 * interval.weight * (v - lam_floor), 0.0, None))
    growth = cumulative_trapezoid(kappa, x, initial=0.0)
    K = max(1, int(np.ceil(growth[-1] / budget)))
    if K == 1:
        return np.array([interval.a, interval.b])
    inner = np.interp(growth[-1] * np.arange(1, K) / K, growth, x)
    return np.concatenate([[interval.a], inner, [interval.b]])


def _segments(interval: Interval, nodes):
    return [Interval(x0, x1, interval.weight, interval.potential) for x0, x1 in zip(nodes[:-1], nodes[1:])]


def transfer_stack(interval: Interval, nodes, lams, accurate: bool, ode_options=None) -> np.ndarray:
    """Segment transfer matrices ``(m, K, 2, 2)`` taking ``(psi, psi')`` across each segment."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    segs = _segments(interval, nodes)
    F = np.empty((lams.size, len(segs), 2, 2), dtype=complex)
    for k, seg in enumerate(segs):
        if accurate:
            pairs = [fundamental_pair(seg, lam, **(ode_options or {})) for lam in lams]
            vals = np.array([p.values for p in pairs])
            ders = np.array([p.derivs for p in pairs])
        else:
            vals, ders = endpoint_data(seg, lams)
        F[:, k, 0, :] = vals[:, :, 1]
        F[:, k, 1, :] = ders[:, :, 1]
    return F


@dataclass(frozen=True)
class Layout:
    """Positions of the node unknowns of every interval."""

    n: int
    counts: tuple  # segments per interval

    @property
    def size(self) -> int:
        return 2 * self.n + 2 * sum(self.counts)

    def index(self, alpha: int, k: int):
        if k == 0:
            return alpha, alpha + self.n
        start = 2 * self.n + 2 * sum(self.counts[:alpha]) + 2 * (k - 1)
        return start, start + 1


def boundary_rows(Um, system: IntervalSystem, layout: Layout) -> np.ndarray:
    """``(Lv - i Ld) - U (Lv + i Ld)`` where ``Lv``/``Ld`` pick values / normal derivatives."""
    n, N = system.n, layout.size
    Lv = np.zeros((2 * n, N))
    Ld = np.zeros((2 * n, N))
    for alpha, iv in enumerate(system):
        sq = np.sqrt(iv.weight)
        left = layout.index(alpha, 0)
        right = layout.index(alpha, layout.counts[alpha])
        Lv[alpha, left[0]], Ld[alpha, left[1]] = 1.0, -1.0 / sq
        Lv[alpha + n, right[0]], Ld[alpha + n, right[1]] = 1.0, 1.0 / sq
    return (Lv - 1j * Ld) - Um @ (Lv + 1j * Ld)


def shooting_system(Um, system: IntervalSystem, nodes, lams, accurate=False, ode_options=None):
    """Row-normalized shooting matrices ``(m, N, N)`` and their layout."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    n, m = system.n, lams.size
    layout = Layout(n, tuple(len(x) - 1 for x in nodes))
    N = layout.size
    S = np.zeros((m, N, N), dtype=complex)
    S[:, : 2 * n] = boundary_rows(Um, system, layout)[None]
    row = 2 * n
    for alpha, iv in enumerate(system):
        F = transfer_stack(iv, nodes[alpha], lams, accurate, ode_options)
        for k in range(1, layout.counts[alpha] + 1):
            cur, prev = layout.index(alpha, k), layout.index(alpha, k - 1)
            rows = [row, row + 1]
            S[:, rows, cur[0]] += [1.0, 0.0]
            S[:, rows, cur[1]] += [0.0, 1.0]
            S[:, rows, prev[0]] -= F[:, k - 1, :, 0]
            S[:, rows, prev[1]] -= F[:, k - 1, :, 1]
            row += 2
    with np.errstate(invalid="ignore", over="ignore"):
        norms = np.linalg.norm(S, axis=2, keepdims=True)
        S = S / np.where(norms > 0, norms, 1.0)
    return S, layout


def node_values(z, layout: Layout):
    """Split null vectors ``z`` ``(N, mult)`` into per-interval ``(mult, K + 1, 2)`` node data."""
    out = []
    for alpha, K in enumerate(layout.counts):
        idx = np.array([layout.index(alpha, k) for k in range(K + 1)])
        out.append(np.moveaxis(z[idx], -1, 0))
    return out
