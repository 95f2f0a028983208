"""Fundamental solutions of the eigenvalue equation on one interval.

On ``[a, b]`` with weight ``eta`` and potential ``V`` the equation
``H psi = lam psi`` reads ``psi'' = 2 eta (V(x) - lam) psi``. The basis is
fixed by ``psi1(a) = 1, psi1'(a) = 0, psi2(a) = 0, psi2'(a) = 1``, which makes
every quantity an entire function of ``lam`` (no square-root branch) and the
Wronskian ``psi1 psi2' - psi1' psi2`` identically one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegratorFailure
from .intervals import Interval

RTOL = 1e-10
ATOL = 1e-12
MAX_STEPS = 10**6


def _cos_sinc(w):
    """``cos(sqrt(w))`` and ``sin(sqrt(w))/sqrt(w)``; both entire in ``w``."""
    k = np.sqrt(np.asarray(w, dtype=complex))
    return np.cos(k), np.sinc(k / np.pi)


@dataclass(frozen=True)
class FundamentalPair:
    """Basis ``psi1, psi2`` at spectral parameter ``lam``.

    ``values[s, e]`` and ``derivs[s, e]`` hold solution ``s`` (0 or 1) and its
    x-derivative at end ``e`` (0 = a, 1 = b).
    """

    lam: complex
    interval: Interval
    values: np.ndarray
    derivs: np.ndarray
    evaluator: Callable
    index: int | None = None

    @property
    def trace1(self):
        """``(psi1(a), psi1(b), psi1'(a), psi1'(b))``."""
        return (self.values[0, 0], self.values[0, 1], self.derivs[0, 0], self.derivs[0, 1])

    @property
    def trace2(self):
        return (self.values[1, 0], self.values[1, 1], self.derivs[1, 0], self.derivs[1, 1])

    def __call__(self, x):
        """Values and x-derivatives, each of shape ``(2,) + shape(x)``."""
        return self.evaluator(x)

    def wronskian(self, x=None):
        if x is None:
            v, d = self.values, self.derivs
            return v[0] * d[1] - d[0] * v[1]
        v, d = self.evaluator(x)
        return v[0] * d[1] - d[0] * v[1]


def free_basis(interval: Interval, lam: complex, index: int | None = None) -> FundamentalPair:
    """Closed-form basis ``cos(k(x-a))``, ``sin(k(x-a))/k`` with ``k^2 = 2 eta lam``."""
    lam = complex(lam)
    a, eta = interval.a, interval.weight
    k2 = 2.0 * eta * lam

    def evaluate(x):
        t = np.asarray(x, dtype=float) - a
        c, sn = _cos_sinc(k2 * t * t)
        vals = np.stack([c, t * sn])
        ders = np.stack([-k2 * t * sn, c])
        return vals, ders

    vals, ders = evaluate(np.array([interval.a, interval.b]))
    return FundamentalPair(lam, interval, vals, ders, evaluate, index)


def _rhs_factory(interval: Interval, lams: np.ndarray):
    eta = interval.weight
    pot = interval.potential
    m = lams.size

    def rhs(x, y):
        q = 2.0 * eta * (float(pot(x)) - lams)
        y = y.reshape(4, m)
        return np.concatenate([y[1], q * y[0], y[3], q * y[2]])

    return rhs


def _check_potential(interval: Interval):
    probs = interval.potential.problems(interval.a, interval.b)
    if probs:
        raise IntegratorFailure(f"potential cannot be integrated: {', '.join(probs)}")


def ode_basis(
    interval: Interval,
    lam: complex,
    rtol: float = RTOL,
    atol: float = ATOL,
    method: str = "RK45",
    index: int | None = None,
) -> FundamentalPair:
    """Integrate the basis with adaptive Runge-Kutta stepping."""
    _check_potential(interval)
    lam = complex(lam)
    # real parameters integrate in real arithmetic, roughly halving the cost
    dtype = float if lam.imag == 0.0 else complex
    lams = np.array([lam.real if dtype is float else lam])
    y0 = np.array([1, 0, 0, 1], dtype=dtype)
    sol = solve_ivp(
        _rhs_factory(interval, lams),
        (interval.a, interval.b),
        y0,
        method=method,
        rtol=rtol,
        atol=atol,
        dense_output=True,
    )
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        raise IntegratorFailure(f"integration failed at lam={lam}: {sol.message}")
    if sol.t.size > MAX_STEPS:
        raise IntegratorFailure(f"step count {sol.t.size} exceeds cap {MAX_STEPS}")
    dense = sol.sol
    lo, hi = interval.a, interval.b

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        y = dense(np.clip(x, lo, hi).ravel())
        y = y.reshape((4,) + x.shape).astype(complex)
        return np.stack([y[0], y[2]]), np.stack([y[1], y[3]])

    yb = sol.y[:, -1]
    vals = np.array([[1.0, yb[0]], [0.0, yb[2]]], dtype=complex)
    ders = np.array([[0.0, yb[1]], [1.0, yb[3]]], dtype=complex)
    return FundamentalPair(complex(lam), interval, vals, ders, evaluate, index)


def fundamental_pair(interval: Interval, lam: complex, index: int | None = None, **ode_options) -> FundamentalPair:
    if interval.potential.is_zero:
        return free_basis(interval, lam, index)
    return ode_basis(interval, lam, index=index, **ode_options)


def endpoint_data(interval: Interval, lams, rtol: float = 1e-8, atol: float = 1e-10, method: str = "DOP853"):
    """Values and derivatives at both ends for many ``lam`` at once.

    Returns two complex arrays of shape ``(len(lams), 2, 2)`` indexed
    ``[lam, solution, end]``. The ODE path integrates all parameters as one
    coupled system; it is meant for scans, not certified values.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    m = lams.size
    if interval.potential.is_zero:
        t = interval.length
        k2 = 2.0 * interval.weight * lams
        c, sn = _cos_sinc(k2 * t * t)
        vals = np.empty((m, 2, 2), dtype=complex)
        ders = np.empty((m, 2, 2), dtype=complex)
        vals[:, 0, 0], vals[:, 1, 0] = 1.0, 0.0
        ders[:, 0, 0], ders[:, 1, 0] = 0.0, 1.0
        vals[:, 0, 1], ders[:, 0, 1] = c, -k2 * t * sn
        vals[:, 1, 1], ders[:, 1, 1] = t * sn, c
        return vals, ders
    _check_potential(interval)
    if np.all(lams.imag == 0.0):
        lams = lams.real
    y0 = np.concatenate([np.ones(m), np.zeros(m), np.zeros(m), np.ones(m)]).astype(lams.dtype)
    sol = solve_ivp(
        _rhs_factory(interval, lams), (interval.a, interval.b), y0, method=method, rtol=rtol, atol=atol
    )
    if sol.status != 0:
        raise IntegratorFailure(f"batched integration failed: {sol.message}")
    yb = sol.y[:, -1].reshape(4, m)
    vals = np.empty((m, 2, 2), dtype=complex)
    ders = np.empty((m, 2, 2), dtype=complex)
    vals[:, 0, 0], vals[:, 1, 0] = 1.0, 0.0
    ders[:, 0, 0], ders[:, 1, 0] = 0.0, 1.0
    vals[:, 0, 1], ders[:, 0, 1] = yb[0], yb[1]
    vals[:, 1, 1], ders[:, 1, 1] = yb[2], yb[3]
    return vals, ders


def certified_endpoint_data(interval: Interval, lam: complex, **ode_options):
    """Endpoint data of a single ``lam`` at full integration accuracy."""
    pair = fundamental_pair(interval, lam, **ode_options)
    return pair.values, pair.derivs
