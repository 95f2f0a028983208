"""Locate real parameters where a matrix-valued function becomes singular.

Shared by the spectral solver and the Krein pole scan. The scan runs on a grid
uniform in ``s = sign(lam) sqrt(2 |lam|)``, which samples oscillatory
determinants evenly. The two grid cells around every local minimum of the scan
measure is searched by bounded minimization. When the caller knows a phase
making ``det F`` real on the axis, every cell where it changes sign is also
searched, by bracketed root finding. Each candidate is then polished by Newton
steps on ``det F`` taken from the generalized eigenvalues of ``(F, -F')``. A
root is accepted when the smallest singular value, relative to a
caller-supplied scale, drops below the certification tolerance. The scale is
not the norm of ``F`` itself: at a root of full multiplicity ``F`` vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvals
from scipy.optimize import brentq, minimize_scalar


@dataclass
class RootOptions:
    grid_density: float = 2000.0  # points per unit of s
    min_points: int = 256
    tol_residual: float = 1e-8
    rank_tol: float = 1e-6
    newton_steps: int = 8
    brent_xtol: float = 1e-7


@dataclass
class Root:
    lam: float
    residual: float
    imag_drift: float
    singular_values: np.ndarray
    scale: float


@dataclass
class RootReport:
    roots: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    grid_points: int = 0
    grid_step: float = 0.0


def to_s(lam):
    lam = np.asarray(lam, dtype=float)
    return np.sign(lam) * np.sqrt(2.0 * np.abs(lam))


def from_s(s):
    s = np.asarray(s, dtype=float)
    return np.sign(s) * s * s / 2.0


def scan_grid(lmin: float, lmax: float, opts: RootOptions):
    s0, s1 = float(to_s(lmin)), float(to_s(lmax))
    npts = max(opts.min_points, int(np.ceil((s1 - s0) * opts.grid_density)) + 1)
    s = np.linspace(s0, s1, npts)
    return s, from_s(s)


def relative_sigma(sv, scale):
    scale = np.asarray(scale, dtype=float)
    return np.where(scale > 0, sv[..., -1] / np.where(scale > 0, scale, 1.0), 0.0)


def _local_minima(f):
    m = f.size
    idx = []
    for i in range(m):
        left = f[i - 1] if i > 0 else np.inf
        right = f[i + 1] if i < m - 1 else np.inf
        # strict on the left so flat stretches do not count as minima
        if f[i] < left and f[i] <= right and not (left == np.inf and right == np.inf):
            idx.append(i)
    return idx


def _newton(single, lam0: complex, opts: RootOptions):
    """Newton iteration on ``det F``; returns the final complex parameter."""
    lam = complex(lam0)
    for _ in range(opts.newton_steps):
        h = 1e-6 * max(1.0, abs(lam))
        f0 = single(lam)[0]
        fp = (single(lam + h)[0] - single(lam - h)[0]) / (2 * h)
        if not (np.all(np.isfinite(f0)) and np.all(np.isfinite(fp))):
            break
        with np.errstate(all="ignore"):
            w = eigvals(f0, -fp)
        w = w[np.isfinite(w)]
        if w.size == 0:
            break
        step = w[np.argmin(np.abs(w))]
        if abs(step) > 1e-3 * max(1.0, abs(lam)):
            # not in the quadratic regime; leave it to the bracketing result
            break
        lam = lam + step
        if abs(step) < 1e-13 * max(1.0, abs(lam)):
            break
    return lam


def _real_det(mats, phase):
    """``Re(det F * phase)`` compressed to ``|det F|^(1/N)`` so it neither under- nor overflows."""
    sign, logabs = np.linalg.slogdet(mats)
    with np.errstate(under="ignore"):
        return np.real(sign * phase) * np.exp(logabs / mats.shape[-1])


def _scan(batch, lams, measure, phase=None, chunk: int = 2048):
    # chunked so large scan matrices stay within memory
    fs, dets, bads = [], [], []
    for i in range(0, lams.size, chunk):
        mats, scales = batch(lams[i : i + chunk])
        bad = ~(np.all(np.isfinite(mats), axis=(1, 2)) & np.isfinite(scales))
        mats = np.where(bad[:, None, None], 0.0, mats)
        fs.append(measure(np.linalg.svd(mats, compute_uv=False), scales))
        dets.append(_real_det(mats, phase) if phase is not None else np.zeros(mats.shape[0]))
        bads.append(bad)
    return np.concatenate(fs), np.concatenate(dets), np.concatenate(bads)


def find_roots(batch, single, lmin: float, lmax: float, opts: RootOptions | None = None,
               scan_measure=None, exclude=None, det_phase: complex | None = None) -> RootReport:
    """Roots of ``F`` on ``[lmin, lmax]``.

    ``batch(lams)`` returns stacked matrices and their scales on the scan grid
    (it may be less accurate); ``single(lam)`` returns one accurate matrix and
    its scale and accepts complex ``lam``. ``scan_measure(sv, scale)`` maps
    singular values (descending, last axis) to the scanned quantity, the
    relative smallest singular value by default.
    ``exclude(lam)`` returns True for parameters that must not be reported.
    When ``det F * det_phase`` is known to be real on the real axis, every
    grid cell where it changes sign is refined as well; this separates
    simple roots that are too close to show up as distinct minima.
    """
    opts = opts or RootOptions()
    measure = scan_measure or relative_sigma
    report = RootReport()
    if not lmax > lmin:
        report.warnings.append("empty parameter range")
        return report
    s, lams = scan_grid(lmin, lmax, opts)
    report.grid_points = s.size
    report.grid_step = float(s[1] - s[0])
    f, rdet, bad = _scan(batch, lams, measure, det_phase)
    bad |= ~np.isfinite(f)
    if bad.any():
        report.warnings.append(f"{int(bad.sum())} scan points were not finite")
        f = np.where(bad, np.inf, f)

    def fs(x):
        # bracketing only needs scan accuracy; the Newton polish uses ``single``
        mats, scales = batch(np.array([float(from_s(x))]))
        if not (np.all(np.isfinite(mats)) and np.isfinite(scales[0])):
            return np.inf
        val = measure(np.linalg.svd(mats[0], compute_uv=False), scales[0])
        return float(val) if np.isfinite(val) else np.inf

    def fdet(x):
        mats, _ = batch(np.array([float(from_s(x))]))
        return float(_real_det(mats, det_phase)[0])

    def refine(lo, hi, xatol, bracketed=False):
        if bracketed:
            x = brentq(fdet, lo, hi, xtol=1e-15 * max(1.0, abs(lo)), rtol=4 * np.finfo(float).eps)
        else:
            x = minimize_scalar(fs, bounds=(lo, hi), method="bounded", options={"xatol": xatol}).x
        lam_b = float(from_s(x))
        lam_c = _newton(single, lam_b, opts)
        cands = [lam_b]
        # keep the polished value only if it stayed in the bracket
        if from_s(lo) - 1e-12 <= lam_c.real <= from_s(hi) + 1e-12:
            cands.insert(0, lam_c.real)
        best = None
        for lam in cands:
            mat, scale = single(lam)
            if not (np.all(np.isfinite(mat)) and np.isfinite(scale)):
                continue
            svals = np.linalg.svd(mat, compute_uv=False)
            rel = float(relative_sigma(svals, scale))
            if best is None or rel < best.residual:
                drift = abs(lam_c.imag) if lam == lam_c.real else 0.0
                best = Root(float(lam), rel, float(drift), svals, float(scale))
        return best

    # (lo index, hi index, bracketed); simple roots show up as sign changes,
    # minima catch the rest (even multiplicity, or no known phase)
    cells = []
    changes = set()
    if det_phase is not None:
        ok = ~bad[:-1] & ~bad[1:]
        changes = set(np.nonzero(ok & (rdet[:-1] * rdet[1:] < 0))[0].tolist())
        cells += [(j, j + 1, True) for j in sorted(changes)]
    for i in _local_minima(f):
        if (i - 1) in changes or i in changes:
            continue
        cells.append((max(i - 1, 0), min(i + 1, s.size - 1), False))

    found = []
    for jlo, jhi, bracketed in cells:
        lo, hi = s[jlo], s[jhi]
        if bracketed and not fdet(lo) * fdet(hi) < 0:
            # the coarse evaluator disagrees with the scan; fall back to minimization
            bracketed = False
        r = refine(lo, hi, opts.brent_xtol * max(1.0, abs(lo)), bracketed)
        if r is None or not (lmin <= r.lam <= lmax):
            continue
        if exclude is not None and exclude(r.lam):
            continue
        if r.residual < opts.tol_residual:
            found.append(r)
        elif r.residual < 1e-4:
            report.warnings.append(f"uncertified near-root at lam={r.lam:.12g} (relative sigma_min {r.residual:.2e})")

    found.sort(key=lambda r: r.lam)
    merged = []
    for r in found:
        # the same root reached from neighbouring cells
        if merged and abs(to_s(r.lam) - to_s(merged[-1].lam)) < 0.05 * report.grid_step:
            if r.residual < merged[-1].residual:
                merged[-1] = r
            continue
        merged.append(r)
    report.roots = merged
    return report


def nullity(svals, scale: float, rank_tol: float) -> int:
    svals = np.asarray(svals)
    return max(1, int(np.sum(svals <= rank_tol * scale)))
