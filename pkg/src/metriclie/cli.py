"""Command-line front end.

Exit codes: 0 success, 1 the analysis found a mathematical violation
(invalid algebra, non-parallel designated tensor, failed verification),
2 usage or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings

import numpy as np

from .algebra import AlgebraError, InvalidLieAlgebra, MetricLieAlgebra, load_spec, validate_lie_algebra
from .catalog import ParamOutOfRange, UnknownEntry, catalog_build, catalog_list, verify_table_entry
from .connection import levi_civita
from .holonomy import NotStabilized
from .parallel import NotParallel, compare_fingerprints, fingerprint
from .report import (
    AnalysisReport,
    check_section,
    connection_section,
    curvature_section,
    derham_section,
    fingerprint_section,
    fmt_num,
    holonomy_section,
    parallel_section,
    render_text,
)
from .tolerance import DEFAULT_TOL, Tolerance

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _kv(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"--param {k}: {v!r} is not a number") from None
    return out


def _input_args(p, prefix=""):
    dest = prefix.replace("-", "_")
    p.add_argument(f"--{prefix}file", dest=f"{dest}file", metavar="PATH", help="algebra description (JSON)")
    p.add_argument(f"--{prefix}entry", dest=f"{dest}entry", metavar="NAME", help="catalog entry name")
    p.add_argument(f"--{prefix}param", dest=f"{dest}param", action="append", metavar="K=V", help="catalog parameter (repeatable)")
    p.add_argument(f"--{prefix}tensor", dest=f"{dest}tensor", metavar="NAME", help="designated tensor to use")


def _common(p):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-rel", type=float, default=None)
    p.add_argument("--tol-abs", type=float, default=None)
    p.add_argument("--max-level", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metriclie", description="Analyse metric Lie algebras.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("check", "validate brackets and metric"),
        ("connection", "Levi-Civita connection"),
        ("parallel", "parallel skew-symmetric endomorphisms"),
        ("curvature", "curvature, Ricci and scalar curvature"),
        ("fingerprint", "isometry invariants of (algebra, tensor)"),
        ("holonomy", "holonomy algebra"),
        ("derham", "de Rham factors"),
        ("report", "all sections"),
    ]:
        p = sub.add_parser(name, help=help_)
        _input_args(p)
        _common(p)
    p = sub.add_parser("distinguish", help="compare fingerprints of two (algebra, tensor) pairs")
    _input_args(p)
    _input_args(p, "other-")
    _common(p)
    cat = sub.add_parser("catalog", help="built-in catalog")
    csub = cat.add_subparsers(dest="catalog_command", required=True)
    p = csub.add_parser("list", help="list entries")
    p.add_argument("--json", action="store_true")
    p = csub.add_parser("verify", help="verify designated tensors of an entry")
    p.add_argument("--entry", required=True)
    p.add_argument("--param", action="append", metavar="K=V")
    _common(p)
    return ap


def _tolerance(args) -> Tolerance:
    rel = DEFAULT_TOL.rel if args.tol_rel is None else args.tol_rel
    abs_ = DEFAULT_TOL.abs if args.tol_abs is None else args.tol_abs
    try:
        return Tolerance(rel, abs_)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _load(args, tol, prefix=""):
    file = getattr(args, f"{prefix}file")
    entry = getattr(args, f"{prefix}entry")
    params = getattr(args, f"{prefix}param")
    if (file is None) == (entry is None):
        raise UsageError(f"give exactly one of --{prefix}file or --{prefix}entry".replace("_", "-"))
    if file is not None:
        if params:
            raise UsageError("--param only applies to catalog entries")
        try:
            with open(file, "rb") as fh:
                digest = hashlib.sha256(fh.read()).hexdigest()
        except OSError as e:
            raise UsageError(f"cannot read {file}: {e.strerror}") from None
        mla, tensors = load_spec(file)
        echo = {"file": file, "sha256": digest}
        tol = mla.tol if args.tol_rel is None and args.tol_abs is None else tol
    else:
        b = catalog_build(entry, _kv(params))
        mla, tensors = b.mla, b.tensors
        echo = {"entry": b.name, "params": b.params}
    mla = MetricLieAlgebra(mla.algebra, mla.gram, tol)
    return mla, tensors, echo


def _pick_tensor(mla, tensors, name):
    if name is not None:
        if name not in tensors:
            raise UsageError(f"no designated tensor {name!r} (available: {sorted(tensors) or 'none'})")
        return name, tensors[name]
    if tensors:
        k = next(iter(tensors))
        return k, tensors[k]
    return "zero", np.zeros((mla.dim, mla.dim))


def _emit(report: AnalysisReport, as_json: bool, out):
    out.write(report.to_json() + "\n" if as_json else render_text(report))


def _analyse(args, out) -> int:
    tol = _tolerance(args)
    mla, tensors, echo = _load(args, tol)
    report = AnalysisReport(echo)
    chk = check_section(mla)
    cmd = args.command
    if cmd in ("check", "report") or not chk["valid"]:
        report.sections["check"] = chk
    if not chk["valid"]:
        _emit(report, args.json, out)
        return EXIT_VIOLATION
    status = EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NotStabilized)
        conn = levi_civita(mla)
        if cmd in ("connection", "report"):
            report.sections["connection"] = connection_section(conn)
        if cmd in ("parallel", "report"):
            report.sections["parallel"] = parallel_section(conn, tensors, args.seed)
        if cmd in ("curvature", "report"):
            report.sections["curvature"] = curvature_section(conn)
        if cmd in ("fingerprint", "report"):
            name, H = _pick_tensor(mla, tensors, args.tensor)
            try:
                report.sections["fingerprint"] = fingerprint_section(mla, H, name)
            except NotParallel as e:
                report.diagnostics["warnings"].append(f"fingerprint: {e}")
                status = EXIT_VIOLATION
        if cmd in ("holonomy", "report"):
            report.sections["holonomy"] = holonomy_section(conn, args.max_level)
        if cmd in ("derham", "report"):
            report.sections["derham"] = derham_section(mla, args.seed, args.max_level)
    report.diagnostics["warnings"] += sorted({str(w.message) for w in caught})
    report.diagnostics["residuals"] = {
        "jacobi": chk["jacobi_residual"],
        "connection_skew": conn.skew_residual(),
        "torsion": conn.torsion_residual(),
    }
    if "parallel" in report.sections:
        for name, d in report.sections["parallel"]["designated"].items():
            if not d["in_parallel_space"]:
                report.diagnostics["warnings"].append(f"designated tensor {name} is not parallel")
                status = EXIT_VIOLATION
    _emit(report, args.json, out)
    return status


def _distinguish(args, out) -> int:
    tol = _tolerance(args)
    a, ta, ea = _load(args, tol)
    b, tb, eb = _load(args, tol, "other_")
    na, Ha = _pick_tensor(a, ta, args.tensor)
    nb, Hb = _pick_tensor(b, tb, args.other_tensor)
    try:
        res = compare_fingerprints(fingerprint(a, Ha), fingerprint(b, Hb), tol)
    except NotParallel as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    verdict = type(res).__name__
    if args.json:
        doc = {"first": {**ea, "tensor": na}, "second": {**eb, "tensor": nb}, "verdict": verdict, "reason": res.reason}
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        out.write(f"{res}\n")
    return EXIT_OK


def _catalog(args, out) -> int:
    if args.catalog_command == "list":
        entries = [e.describe() for e in catalog_list()]
        if args.json:
            out.write(json.dumps(entries, sort_keys=True, indent=2) + "\n")
        else:
            for e in entries:
                ps = ", ".join(f"{k} ({v['constraint']}, default {fmt_num(v['default'])})" for k, v in e["params"].items())
                out.write(f"{e['name']:18s} {e['group']:12s} {e['symbol']:18s} {ps}\n")
        return EXIT_OK
    tol = _tolerance(args)
    rep = verify_table_entry(args.entry, _kv(args.param), tol)
    if args.json:
        out.write(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n")
    else:
        ps = ", ".join(f"{k}={fmt_num(v)}" for k, v in sorted(rep.params.items()))
        out.write(f"{rep.name} ({ps})\n")
        out.write(f"  valid Lie algebra: {fmt_num(rep.jacobi_ok)}\n")
        for k, r in rep.tensor_residuals.items():
            out.write(f"  tensor {k}: parallel residual {fmt_num(r)}\n")
        for k, r in rep.complex_residuals.items():
            out.write(f"  tensor {k}: |J^2 + I| = {fmt_num(r)}\n")
        for k, r in rep.generator_residuals.items():
            out.write(f"  {k}: distance to parallel space {fmt_num(r)}\n")
        exp = "" if rep.expected_parallel_dim is None else f" (expected {rep.expected_parallel_dim})"
        out.write(f"  parallel space dimension: {rep.parallel_dim}{exp}\n")
        out.write(f"  result: {'ok' if rep.ok else 'FAILED'}\n")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        if args.command == "catalog":
            return _catalog(args, out)
        if args.command == "distinguish":
            return _distinguish(args, out)
        return _analyse(args, out)
    except InvalidLieAlgebra as e:
        err.write(f"error: {e}\n")
        return EXIT_VIOLATION
    except (UsageError, UnknownEntry, ParamOutOfRange, AlgebraError) as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
