"""Spectral flow through -1 along curves of boundary unitaries.

Eigenphases are followed from sample to sample by optimal matching on the
circle and lifted to continuous real functions of ``t``. A track contributes
one crossing each time its lifted phase passes an odd multiple of ``pi``
upwards, minus one for each downward pass. Independently, the winding number
of ``det U_t`` is read off from its unwrapped argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .boundary import BoundaryUnitary, as_matrix, unitarity_deviation
from .errors import NonUnitary, OpenCurve, UnresolvedCrossing

MAX_JUMP = np.pi / 4
MAX_BISECT = 30
CLOSE_TOL = 1e-10


@dataclass
class UnitaryCurve:
    """Samples ``(t_k, U_k)``; ``generator(t)`` (optional) allows refinement."""

    ts: np.ndarray
    mats: np.ndarray
    closed: bool = False
    generator: Callable | None = None

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.mats = np.asarray([as_matrix(m) for m in self.mats], dtype=complex)
        if self.ts.ndim != 1 or self.ts.size != self.mats.shape[0] or self.ts.size < 2:
            raise ValueError("need at least two samples, one matrix per parameter value")
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("curve parameters must be strictly increasing")
        for m in self.mats:
            dev = unitarity_deviation(m)
            if not dev < 1e-10:
                raise NonUnitary(dev)
        if self.closed and np.max(np.abs(self.mats[0] - self.mats[-1])) > CLOSE_TOL:
            raise OpenCurve("first and last samples differ; the curve is not closed")

    @classmethod
    def from_function(cls, fn: Callable, t0: float, t1: float, samples: int = 200, closed: bool | None = None):
        ts = np.linspace(t0, t1, samples)
        mats = [as_matrix(fn(t)) for t in ts]
        if closed is None:
            closed = bool(np.max(np.abs(mats[0] - mats[-1])) <= CLOSE_TOL)
        return cls(ts, mats, closed, fn)

    def at(self, t: float) -> np.ndarray:
        if self.generator is None:
            raise UnresolvedCrossing(f"cannot refine at t={t}: curve has no generator")
        m = as_matrix(self.generator(t))
        return m

    def concat(self, other: "UnitaryCurve") -> "UnitaryCurve":
        if np.max(np.abs(self.mats[-1] - other.mats[0])) > CLOSE_TOL:
            raise ValueError("curves do not join")
        shift = self.ts[-1] - other.ts[0]
        ts = np.concatenate([self.ts, other.ts[1:] + shift])
        mats = np.concatenate([self.mats, other.mats[1:]])
        closed = bool(np.max(np.abs(mats[0] - mats[-1])) <= CLOSE_TOL)
        return UnitaryCurve(ts, mats, closed)


def _phases(m):
    return np.angle(np.linalg.eigvals(m))


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def _match(prev, new):
    """Increments taking each previous phase to its matched new phase."""
    d = _wrap(new[None, :] - prev[:, None])
    rows, cols = linear_sum_assignment(np.abs(d))
    out = np.empty_like(prev)
    out[rows] = d[rows, cols]
    return out


def _segment(curve, t0, p0, t1, m1, depth=0):
    """Increments of the tracked phases ``p0`` (at ``t0``) up to ``t1``.

    Jumps larger than ``MAX_JUMP`` are resolved by bisection through the
    curve's generator.
    """
    inc = _match(_wrap(p0), _phases(m1))
    if np.max(np.abs(inc), initial=0.0) <= MAX_JUMP:
        return inc
    if depth >= MAX_BISECT:
        raise UnresolvedCrossing(f"eigenphase jump {np.max(np.abs(inc)):.3f} not resolved near t={t0}")
    tm = 0.5 * (t0 + t1)
    first = _segment(curve, t0, p0, tm, curve.at(tm), depth + 1)
    second = _segment(curve, tm, p0 + first, t1, m1, depth + 1)
    return first + second


def lifted_phases(curve: UnitaryCurve) -> np.ndarray:
    """Continuous eigenphase tracks, shape ``(samples, dim)``."""
    ph = _phases(curve.mats[0])
    out = [ph.copy()]
    for k in range(len(curve.ts) - 1):
        ph = ph + _segment(curve, curve.ts[k], ph, curve.ts[k + 1], curve.mats[k + 1])
        out.append(ph.copy())
    return np.array(out)


def _count(phi):
    # number of odd multiples of pi strictly below phi, offset so that a
    # phase sitting exactly at pi has not crossed yet
    return np.ceil((phi - np.pi) / (2 * np.pi))


def crossing_count(curve: UnitaryCurve) -> int:
    """Signed number of eigenvalues passing through ``-1``."""
    tracks = lifted_phases(curve)
    return int(np.sum(_count(tracks[-1]) - _count(tracks[0])))


def det_winding(curve: UnitaryCurve) -> int:
    if not curve.closed:
        raise OpenCurve("winding number needs a closed curve")
    args = np.angle(np.linalg.det(curve.mats))
    total = 0.0
    for k in range(len(args) - 1):
        step = _wrap(args[k + 1] - args[k])
        if abs(step) > MAX_JUMP and curve.generator is not None:
            tm = np.linspace(curve.ts[k], curve.ts[k + 1], 65)
            sub = np.angle([np.linalg.det(curve.at(t)) for t in tm])
            step = float(np.sum(_wrap(np.diff(sub))))
        total += step
    return int(np.round(total / (2 * np.pi)))


@dataclass(frozen=True)
class IndexReport:
    crossings: int
    winding: int

    @property
    def difference(self) -> int:
        return self.crossings - self.winding

    @property
    def agree(self) -> bool:
        return self.difference == 0

    def line(self) -> str:
        return f"crossings={self.crossings} winding={self.winding} agree={str(self.agree).lower()}"


def index_agreement(curve: UnitaryCurve) -> IndexReport:
    return IndexReport(crossing_count(curve), det_winding(curve))


def hermitian_loop(H: Callable, multipliers, samples: int = 400) -> UnitaryCurve:
    """Closed loop ``t -> expm(i H(t)) diag(exp(i m_j t))`` on ``[0, 2 pi]``.

    ``H`` must be ``2 pi``-periodic and Hermitian; integer ``multipliers`` set
    the winding of the determinant.
    """
    m = np.asarray(multipliers, dtype=float)

    def gen(t):
        w, v = np.linalg.eigh(H(t))
        return (v * np.exp(1j * w)) @ v.conj().T @ np.diag(np.exp(1j * m * t))

    return UnitaryCurve.from_function(gen, 0.0, 2 * np.pi, samples, closed=True)


def as_unitary_curve(samples, closed=None) -> UnitaryCurve:
    ts, mats = zip(*samples)
    mats = [m.matrix if isinstance(m, BoundaryUnitary) else m for m in mats]
    if closed is None:
        closed = bool(np.max(np.abs(np.asarray(mats[0]) - np.asarray(mats[-1]))) <= CLOSE_TOL)
    return UnitaryCurve(np.array(ts), mats, closed)
