"""Configuration space: a finite disjoint union of closed intervals.

Boundary data are always ordered with every left endpoint first (in interval
order) followed by every right endpoint, so a boundary vector has the block
form ``[psi_l; psi_r]`` of length ``2n``.

The Hamiltonian on interval ``alpha`` is

    H_alpha = -(1 / (2 eta_alpha)) d^2/dx^2 + V(x)

with a constant metric weight ``eta_alpha > 0`` (hbar = m = 1). The inner
product carries the Riemannian measure ``sqrt(eta_alpha) dx`` and the normal
derivative at an endpoint is the outward derivative measured in arc length,
``+-(1/sqrt(eta)) dpsi/dx``. For ``eta = 1`` this is the familiar
``psi_dot_l = -psi'(a)``, ``psi_dot_r = +psi'(b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class PotentialSpec:
    """A potential that is zero, a polynomial in ``x``, or tabulated.

    Polynomial coefficients are in ascending powers of the absolute position:
    ``(0, 0, 1)`` is ``V(x) = x**2``. Tabulated potentials are interpolated
    with a natural cubic spline through ``(position, value)`` nodes.
    """

    kind: str = "zero"
    coefficients: tuple = ()
    grid: tuple = ()

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero")

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> "PotentialSpec":
        return cls("polynomial", coefficients=tuple(float(c) for c in coefficients))

    @classmethod
    def tabulated(cls, grid: Iterable[tuple[float, float]]) -> "PotentialSpec":
        return cls("tabulated", grid=tuple((float(x), float(v)) for x, v in grid))

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "polynomial":
            return all(c == 0.0 for c in self.coefficients)
        return False

    @cached_property
    def _spline(self) -> CubicSpline:
        xs, vs = np.array(self.grid, dtype=float).T
        return CubicSpline(xs, vs, bc_type="natural")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "polynomial":
            # np.polyval wants descending powers
            return np.polyval(self.coefficients[::-1], x) if self.coefficients else np.zeros_like(x)
        if self.kind == "tabulated":
            return self._spline(x)
        raise ValueError(f"unknown potential kind {self.kind!r}")

    def problems(self, a: float, b: float) -> list[str]:
        out = []
        if self.kind not in ("zero", "polynomial", "tabulated"):
            out.append(f"unknown potential kind {self.kind!r}")
        elif self.kind == "polynomial":
            if not all(np.isfinite(self.coefficients)):
                out.append("non-finite polynomial coefficient")
        elif self.kind == "tabulated":
            if len(self.grid) < 2:
                out.append("tabulated potential needs at least two nodes")
                return out
            xs, vs = np.array(self.grid, dtype=float).T
            if np.any(np.diff(xs) <= 0):
                out.append("grid not increasing")
            if xs[0] > a or xs[-1] < b:
                out.append("grid does not cover the interval")
            if not np.all(np.isfinite(vs)):
                out.append("non-finite potential value")
        return out


ZERO = PotentialSpec.zero()


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    weight: float = 1.0
    potential: PotentialSpec = field(default=ZERO)

    @property
    def length(self) -> float:
        return self.b - self.a

    def problems(self) -> list[str]:
        out = []
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            out.append("non-finite endpoint")
        elif self.a == self.b:
            out.append("degenerate interval")
        elif self.a > self.b:
            out.append("reversed interval (a > b)")
        if not (np.isfinite(self.weight) and self.weight > 0):
            out.append("weight must be a positive constant")
        out.extend(self.potential.problems(self.a, self.b))
        return out


@dataclass(frozen=True)
class IntervalSystem:
    intervals: tuple

    def __init__(self, intervals: Iterable[Interval]):
        object.__setattr__(self, "intervals", tuple(intervals))

    @classmethod
    def single(cls, a: float, b: float, weight: float = 1.0, potential: PotentialSpec = ZERO) -> "IntervalSystem":
        return cls([Interval(a, b, weight, potential)])

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def dim(self) -> int:
        """Dimension of the boundary space, ``2n``."""
        return 2 * len(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    def __iter__(self):
        return iter(self.intervals)

    @property
    def free(self) -> bool:
        return all(iv.potential.is_zero for iv in self.intervals)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def messages(self) -> list[str]:
        return [msg for _, msg in self.violations]


def validate(system: IntervalSystem) -> ValidationReport:
    """Collect every invariant violation as ``(interval index or None, message)``."""
    report = ValidationReport()
    if not system.intervals:
        report.violations.append((None, "system has no intervals"))
    for i, iv in enumerate(system.intervals):
        if not isinstance(iv, Interval):
            report.violations.append((i, f"not an Interval: {type(iv).__name__}"))
            continue
        for msg in iv.problems():
            report.violations.append((i, msg))
    return report


def boundary_labels(system: IntervalSystem) -> list[tuple[int, str]]:
    """Slot labels, all left ends first, then all right ends (0-based intervals)."""
    n = system.n
    return [(i, LEFT) for i in range(n)] + [(i, RIGHT) for i in range(n)]


def slot_index(system: IntervalSystem, label) -> int:
    """Inverse of :func:`boundary_labels`; integer slots pass through after a range check."""
    n = system.n
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < 2 * n:
            raise IndexError(f"slot {label} out of range for {2 * n} boundary points")
        return int(label)
    i, end = label
    if not 0 <= i < n:
        raise IndexError(f"interval {i} out of range")
    if end == LEFT:
        return int(i)
    if end == RIGHT:
        return int(i) + n
    raise ValueError(f"end must be {LEFT!r} or {RIGHT!r}, got {end!r}")
