"""Batch front end: read a JSON run configuration, run one command, write CSV.

Usage::

    selfadjoint1d run.json [--lmin X] [--lmax X] [--grid X] [--tol X] [--out PATH]

The configuration is a JSON document::

    {
      "system": {"intervals": [{"a": 0, "b": 3.14159, "weight": 1,
                                "potential": {"kind": "zero"}}]},
      "bc": {"type": "dirichlet"},
      "command": "spectrum",
      "options": {"lambda_min": 0, "lambda_max": 13}
    }

``bc.type`` is a named condition (``params`` as for :func:`named_bc`) or
``matrix`` with parallel ``re``/``im`` arrays. Results go to ``--out`` (or
``output`` in the file) as CSV, else to stdout; the last stdout line is always
a one-line JSON summary. Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .boundary import (
    BoundaryUnitary,
    cayley_surface_distance,
    cayley_to_operator,
    named_bc,
    unitarity_deviation,
    wire_bc,
)
from .errors import BoundaryError, OnCayleySurface, SchemaError
from .intervals import Interval, IntervalSystem, PotentialSpec, validate

COMMANDS = ("spectrum", "scan", "krein", "check_bc", "wire", "flow", "deficiency", "mirror")
DEFAULTS = {
    "lambda_min": 0.0,
    "lambda_max": 10.0,
    "grid": 2000.0,
    "tol_residual": 1e-8,
    "tol_unitary": 1e-10,
}
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    system: IntervalSystem
    bc: BoundaryUnitary | None
    command: str
    options: dict = field(default_factory=dict)
    output: str | None = None


def _complex_matrix(node, where, errors):
    try:
        re = np.asarray(node["re"], dtype=float)
        im = np.asarray(node.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"{where}: needs numeric 're' (and optional 'im') arrays ({exc})")
        return None
    if re.shape != im.shape or re.ndim != 2:
        errors.append(f"{where}: 're' and 'im' must be matching 2-d arrays")
        return None
    return re + 1j * im


def _parse_potential(node, where, errors):
    if node is None:
        return PotentialSpec.zero()
    if not isinstance(node, dict):
        errors.append(f"{where}: potential must be an object")
        return PotentialSpec.zero()
    kind = node.get("kind", "zero")
    if kind == "zero":
        return PotentialSpec.zero()
    if kind == "polynomial":
        coeffs = node.get("coeffs")
        if not isinstance(coeffs, list):
            errors.append(f"{where}: polynomial potential needs 'coeffs'")
            return PotentialSpec.zero()
        return PotentialSpec.polynomial(coeffs)
    if kind == "tabulated":
        table = node.get("table")
        if not isinstance(table, list) or not all(isinstance(r, list) and len(r) == 2 for r in table):
            errors.append(f"{where}: tabulated potential needs 'table' of [x, V] pairs")
            return PotentialSpec.zero()
        return PotentialSpec.tabulated(table)
    errors.append(f"{where}: unknown potential kind {kind!r}")
    return PotentialSpec.zero()


def _parse_bc(node, n, tol, errors):
    if node is None:
        return None
    if not isinstance(node, dict) or "type" not in node:
        errors.append("bc: needs a 'type'")
        return None
    kind = str(node["type"])
    try:
        if kind == "matrix":
            m = _complex_matrix(node, "bc", errors)
            if m is None:
                return None
            if m.shape != (2 * n, 2 * n):
                errors.append(f"bc: matrix must be {2 * n}x{2 * n}, got {m.shape[0]}x{m.shape[1]}")
                return None
            dev = unitarity_deviation(m)
            if not dev < tol:
                errors.append(f"bc: non-unitary boundary matrix (deviation {dev:.3e})")
                return None
            return BoundaryUnitary(m, tol=tol)
        return named_bc(kind, node.get("params"), n)
    except (BoundaryError, ValueError, TypeError) as exc:
        errors.append(f"bc: {exc}")
        return None


def _line_of(text, key):
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


def parse_config(text: str) -> RunConfig:
    """Validate a JSON configuration; raises :class:`SchemaError` listing every problem."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise SchemaError(["top level must be a JSON object"])
    errors = []

    def located(msg, key):
        line = _line_of(text, key)
        return f"line {line}: {msg}" if line else msg

    command = doc.get("command")
    if command not in COMMANDS:
        errors.append(located(f"command: unknown command {command!r} (expected one of {', '.join(COMMANDS)})", "command"))

    opts = dict(DEFAULTS)
    user_opts = doc.get("options", {})
    if not isinstance(user_opts, dict):
        errors.append(located("options: must be an object", "options"))
        user_opts = {}
    opts.update(user_opts)
    for key in ("grid", "tol_residual", "tol_unitary"):
        try:
            if not float(opts[key]) > 0:
                errors.append(located(f"options.{key}: must be positive", key))
        except (TypeError, ValueError):
            errors.append(located(f"options.{key}: must be a number", key))
    for key in ("lambda_min", "lambda_max"):
        try:
            opts[key] = float(opts[key])
        except (TypeError, ValueError):
            errors.append(located(f"options.{key}: must be a number", key))

    intervals = []
    sys_node = doc.get("system")
    if not isinstance(sys_node, dict) or not isinstance(sys_node.get("intervals"), list):
        errors.append(located("system: needs an 'intervals' list", "system"))
    else:
        for i, iv in enumerate(sys_node["intervals"]):
            where = f"system.intervals[{i}]"
            if not isinstance(iv, dict) or "a" not in iv or "b" not in iv:
                errors.append(f"{where}: needs 'a' and 'b'")
                continue
            try:
                intervals.append(Interval(float(iv["a"]), float(iv["b"]), float(iv.get("weight", 1.0)),
                                          _parse_potential(iv.get("potential"), where, errors)))
            except (TypeError, ValueError) as exc:
                errors.append(f"{where}: {exc}")
    system = IntervalSystem(intervals)
    for idx, msg in validate(system).violations:
        errors.append(f"system.intervals[{idx}]: {msg}" if idx is not None else f"system: {msg}")

    bc = None
    if intervals:
        tol = float(opts["tol_unitary"]) if isinstance(opts.get("tol_unitary"), (int, float)) else 1e-10
        n_errors = len(errors)
        bc = _parse_bc(doc.get("bc"), system.n, tol, errors)
        errors[n_errors:] = [located(e, "bc") for e in errors[n_errors:]]
    if command in ("spectrum", "scan", "krein", "check_bc") and doc.get("bc") is None:
        errors.append("bc: required for this command")

    if errors:
        raise SchemaError(errors)
    return RunConfig(system, bc, command, opts, doc.get("output"))


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".16e")
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _solver_opts(cfg):
    from .spectral import SolverOptions

    o = cfg.options
    return SolverOptions(grid_density=float(o["grid"]), tol_residual=float(o["tol_residual"]))


def _spectrum_rows(U, system, cfg):
    from .spectral import eigenpair_residual, find_eigenvalues

    sp = find_eigenvalues(U, system, (cfg.options["lambda_min"], cfg.options["lambda_max"]), _solver_opts(cfg))
    rows = [(p.lam, p.multiplicity, p.residual, eigenpair_residual(U, system, p)) for p in sp]
    summary = {"count": len(sp), "min_residual": min((p.residual for p in sp), default=None)}
    if sp.warnings:
        summary["warnings"] = sp.warnings
    return ["lambda", "multiplicity", "residual", "asorey_residual"], rows, summary


def _cmd_spectrum(cfg):
    return _spectrum_rows(cfg.bc, cfg.system, cfg)


def _cmd_scan(cfg):
    from . import _roots
    from ._shooting import segment_nodes, shooting_system
    from .spectral import _M_scaled

    opts = _solver_opts(cfg)
    _, lams = _roots.scan_grid(cfg.options["lambda_min"], cfg.options["lambda_max"], opts)
    dets = np.linalg.det(_M_scaled(cfg.bc.matrix, cfg.system, lams)[0])
    nodes = [segment_nodes(iv, cfg.options["lambda_min"]) for iv in cfg.system]
    sig = np.concatenate([
        np.linalg.svd(shooting_system(cfg.bc.matrix, cfg.system, nodes, lams[i : i + 2048])[0], compute_uv=False)[:, -1]
        for i in range(0, lams.size, 2048)
    ])
    rows = list(zip(lams, dets.real, dets.imag, sig))
    return ["lambda", "re_Lambda", "im_Lambda", "sigma_min"], rows, {"count": len(rows)}


def _cmd_krein(cfg):
    from .krein import neumann_eigenvalues, pole_scan
    from .spectral import find_eigenvalues

    lo, hi = cfg.options["lambda_min"], cfg.options["lambda_max"]
    mask = float(cfg.options.get("mask", 1e-4))
    poles = pole_scan(cfg.bc, cfg.system, (lo, hi), grid=float(cfg.options["grid"]), mask=mask)
    eigs = find_eigenvalues(cfg.bc, cfg.system, (lo, hi), _solver_opts(cfg)).values
    bg = neumann_eigenvalues(cfg.system, (lo, hi))
    eigs = [e for e in eigs if bg.size == 0 or np.min(np.abs(bg - e)) >= mask]
    tol = float(cfg.options.get("match_tol", 1e-6))
    rows = [(p, any(abs(p - e) <= tol for e in eigs)) for p in poles]
    agree = len(poles) == len(eigs) and all(r[1] for r in rows)
    return ["lambda", "matches_spectrum"], rows, {"count": len(poles), "agree": agree}


def _cmd_check_bc(cfg):
    U = cfg.bc.matrix
    rows = [("unitarity_deviation", unitarity_deviation(U)), ("cayley_surface_distance", cayley_surface_distance(U))]
    try:
        A = cayley_to_operator(U).matrix
        rows.append(("operator_norm_A", float(np.linalg.norm(A, 2))))
    except OnCayleySurface:
        rows.append(("operator_norm_A", float("inf")))
    return ["quantity", "value"], rows, {"count": len(rows)}


def _slot(x):
    return x if isinstance(x, int) else tuple(x)


def _cmd_wire(cfg):
    o = cfg.options
    pairing = [(_slot(p[0]), _slot(p[1]), float(p[2]) if len(p) > 2 else 0.0) for p in o.get("pairing", [])]
    junctions = [[_slot(s) for s in j] for j in o.get("junctions", [])]
    free = o.get("free", "dirichlet")
    if isinstance(free, dict):
        free = {int(k): v for k, v in free.items()}
    U = wire_bc(pairing, cfg.system.n, free=free, junctions=junctions, junction_phases=o.get("junction_phases"))
    return _spectrum_rows(U, cfg.system, cfg)


def _cmd_flow(cfg):
    from .flow import UnitaryCurve, index_agreement

    o = cfg.options
    dim = cfg.system.dim
    U0 = cfg.bc.matrix if cfg.bc is not None else np.eye(dim)
    curve = o.get("curve", {})
    H = _complex_matrix(curve["H"], "options.curve.H", []) if "H" in curve else np.eye(dim)
    if H is None or H.shape != (dim, dim):
        raise SchemaError([f"options.curve.H: must be a {dim}x{dim} matrix"])
    w, v = np.linalg.eigh(0.5 * (H + H.conj().T))

    def gen(t):
        return U0 @ (v * np.exp(1j * w * t)) @ v.conj().T

    c = UnitaryCurve.from_function(gen, 0.0, 2 * np.pi, int(curve.get("samples", 200)))
    rep = index_agreement(c)
    print(rep.line())
    rows = [(rep.crossings, rep.winding, rep.agree)]
    return ["crossings", "winding", "agree"], rows, {"crossings": rep.crossings, "winding": rep.winding, "agree": rep.agree}


def _cmd_deficiency(cfg):
    from .deficiency import K_to_U, U_to_K, deficiency_indices

    kind = cfg.options.get("kind", "compact")
    target = cfg.system if kind == "compact" else kind
    n_plus, n_minus = deficiency_indices(target)
    summary = {"n_plus": n_plus, "n_minus": n_minus, "self_adjoint_extensions": n_plus == n_minus}
    rows = [(n_plus, n_minus, n_plus == n_minus)]
    if kind == "compact" and cfg.bc is not None and cfg.system.free:
        K = U_to_K(cfg.bc, cfg.system)
        summary["round_trip_deviation"] = float(np.max(np.abs(K_to_U(K, cfg.system).matrix - cfg.bc.matrix)))
    return ["n_plus", "n_minus", "self_adjoint_extensions"], rows, summary


def _cmd_mirror(cfg):
    from .dissipative import mirror_extend

    dim = cfg.system.dim
    node = cfg.options.get("A")
    A = _complex_matrix(node, "options.A", []) if node else np.zeros((dim, dim))
    if A is None or A.shape != (dim, dim):
        raise SchemaError([f"options.A: must be a {dim}x{dim} matrix"])
    ms, U = mirror_extend(A, cfg.system)
    header, rows, summary = _spectrum_rows(U, ms.doubled, cfg)
    summary["unitarity_deviation"] = unitarity_deviation(U.matrix)
    return header, rows, summary


HANDLERS = {
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "krein": _cmd_krein,
    "check_bc": _cmd_check_bc,
    "wire": _cmd_wire,
    "flow": _cmd_flow,
    "deficiency": _cmd_deficiency,
    "mirror": _cmd_mirror,
}


def run(cfg: RunConfig, out=None, stdout=None) -> int:
    """Execute ``cfg``; writes the CSV and the JSON summary line. Returns the exit code."""
    stdout = stdout or sys.stdout
    t0 = time.perf_counter()
    try:
        header, rows, summary = HANDLERS[cfg.command](cfg)
    except SchemaError as exc:
        print(json.dumps({"command": cfg.command, "status": "config_error", "errors": exc.errors}), file=stdout)
        return EXIT_CONFIG
    except (BoundaryError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(json.dumps({"command": cfg.command, "status": "numerical_failure", "error": str(exc)}), file=stdout)
        return EXIT_NUMERIC
    text = _csv(header, rows)
    path = out or cfg.output
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    summary = {"command": cfg.command, "status": "ok", **summary, "wall_time": round(time.perf_counter() - t0, 6)}
    print(json.dumps(summary, default=float), file=stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selfadjoint1d", description="Spectra of 1D self-adjoint extensions from a JSON run file.")
    p.add_argument("config", help="JSON configuration file, or '-' for stdin")
    p.add_argument("--lmin", type=float, help="override options.lambda_min")
    p.add_argument("--lmax", type=float, help="override options.lambda_max")
    p.add_argument("--grid", type=float, help="override options.grid (scan points per unit of sqrt(2 lambda))")
    p.add_argument("--tol", type=float, help="override options.tol_residual")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.config == "-" else open(args.config, encoding="utf-8").read()
    except OSError as exc:
        print(json.dumps({"status": "config_error", "errors": [str(exc)]}))
        return EXIT_CONFIG
    try:
        doc = json.loads(text)
        if isinstance(doc, dict):
            opts = doc.setdefault("options", {})
            for flag, key in (("lmin", "lambda_min"), ("lmax", "lambda_max"), ("grid", "grid"), ("tol", "tol_residual")):
                if getattr(args, flag) is not None and isinstance(opts, dict):
                    opts[key] = getattr(args, flag)
            text = json.dumps(doc)
    except json.JSONDecodeError:
        pass  # parse_config reports it with line context
    try:
        cfg = parse_config(text)
    except SchemaError as exc:
        print(json.dumps({"status": "config_error", "errors": exc.errors}))
        return EXIT_CONFIG
    return run(cfg, out=args.out)


if __name__ == "__main__":
    sys.exit(main())
