"""Analysis sections as plain JSON-compatible data, plus text rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    MetricLieAlgebra,
    center,
    derived_subalgebra,
    jacobi_residual,
    lie_algebra_violations,
)
from .connection import Connection
from .curvature import curvature, ricci
from .holonomy import (
    covariant_derivative_form,
    covariant_derivative_tensor,
    derham_report,
    holonomy_algebra,
    matrix_to_two_form,
)
from .parallel import (
    classify_element,
    commutation_residual,
    contains_non_complex_multiple,
    fingerprint,
    parallel_space,
)

SECTIONS = ("check", "connection", "parallel", "curvature", "fingerprint", "holonomy", "derham")


@dataclass
class AnalysisReport:
    input: dict
    sections: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=lambda: {"warnings": [], "residuals": {}})

    def to_json(self) -> str:
        doc = {"input": self.input, "sections": self.sections, "diagnostics": self.diagnostics}
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        doc = json.loads(text)
        return cls(doc["input"], doc["sections"], doc["diagnostics"])


def _m(M) -> list:
    return (np.asarray(M, dtype=float) + 0.0).tolist()


def _poly(p):
    return p if isinstance(p, str) else _m(p)


def _form(M) -> dict:
    w = matrix_to_two_form(M)
    return {f"{a}{b}": v for (a, b), v in w.terms().items()}


def check_section(mla: MetricLieAlgebra) -> dict:
    bad = lie_algebra_violations(mla.algebra, mla.tol)
    return {
        "valid": not bad,
        "jacobi_residual": jacobi_residual(mla.algebra),
        "violations": [
            {"kind": type(v).__name__, "i": v.i, "j": v.j, "k": v.k, "residual": v.residual} for v in bad
        ],
        "dim": mla.dim,
    }


def connection_section(conn: Connection) -> dict:
    return {
        "frame": _m(conn.frame.matrix),
        "gamma": [_m(g) for g in conn.gamma],
        "gamma_input_basis": [_m(g) for g in conn.in_input_frame()],
        "skew_residual": conn.skew_residual(),
        "torsion_residual": conn.torsion_residual(),
    }


def parallel_section(conn: Connection, tensors: dict, seed: int = 0) -> dict:
    par = parallel_space(conn)
    found, witness = contains_non_complex_multiple(par, seed=seed)
    classes = []
    for H in par.elements:
        sc = classify_element(H, conn.tol)
        classes.append(
            {
                "angles": sc.angles,
                "kernel_dim": sc.kernel.dim,
                "is_complex_multiple": sc.is_complex_multiple,
                "is_complex_structure": sc.is_complex_structure,
            }
        )
    designated = {}
    for name, T in tensors.items():
        To = conn.frame.operator_to_frame(T)
        sc = classify_element(To, conn.tol)
        designated[name] = {
            "matrix_orthonormal": _m(To),
            "commutation_residual": commutation_residual(conn, To),
            "in_parallel_space": par.contains(To),
            "angles": sc.angles,
            "is_complex_structure": sc.is_complex_structure,
        }
    return {
        "dimension": par.dim,
        "basis": [_m(H) for H in par.elements],
        "classes": classes,
        "contains_non_complex_multiple": found,
        "witness": None if witness is None else _m(witness),
        "designated": designated,
    }


def curvature_section(conn: Connection) -> dict:
    curv = curvature(conn)
    ric = ricci(curv)
    n = conn.dim
    ops = {}
    forms = {}
    dforms = {}
    dtensor = {}
    D = covariant_derivative_tensor(conn, curv.operators)
    for i in range(n):
        for j in range(i + 1, n):
            ops[f"{i},{j}"] = _m(curv.operators[i, j])
            forms[f"{i},{j}"] = _form(curv.operators[i, j])
            for k in range(n):
                dforms[f"{k};{i},{j}"] = _form(covariant_derivative_form(conn, curv.operators[i, j], k))
                dtensor[f"{k};{i},{j}"] = _form(D[i, j, k])
    return {
        "operators": ops,
        "two_forms": forms,
        "form_derivatives": dforms,
        "tensor_derivatives": dtensor,
        "ricci": _m(ric.operator),
        "ricci_eigenvalues": _m(ric.eigenvalues()),
        "scalar": ric.scalar,
        "flat": curv.is_flat(),
        "bianchi_residual": curv.bianchi_residual(),
        "pair_symmetry_residual": curv.pair_symmetry_residual(),
    }


def fingerprint_section(mla: MetricLieAlgebra, H, name: str) -> dict:
    fp = fingerprint(mla, H)
    return {
        "tensor": name,
        "dims": list(fp.dims),
        "ric_charpoly": _poly(fp.ric_charpoly),
        "killing_charpoly": _poly(fp.killing_charpoly),
        "h_charpoly": _poly(fp.h_charpoly),
        "h_on_derived_charpoly": _poly(fp.h_on_derived_charpoly),
        "h_on_center_charpoly": _poly(fp.h_on_center_charpoly),
    }


def holonomy_section(conn: Connection, max_level=None) -> dict:
    hol = holonomy_algebra(conn, max_level=max_level)
    return {
        "dimension": hol.dim,
        "basis": [_m(B) for B in hol.basis],
        "two_forms": [_form(B) for B in hol.basis],
        "level_reached": hol.level_reached,
        "stabilized": hol.stabilized,
        "closure_residual": hol.closure_residual(),
    }


def derham_section(mla: MetricLieAlgebra, seed: int = 0, max_level=None) -> dict:
    d = derham_report(mla, seed=seed, max_level=max_level)
    return {
        "label": d.label(),
        "factors": [
            {"kind": f.kind, "dim": f.dim, "curvature": f.curvature, "basis": _m(f.subspace.basis)}
            for f in d.factors
        ],
        "holonomy_dimension": d.holonomy.dim,
        "note": d.note,
    }


def structure_summary(mla: MetricLieAlgebra) -> dict:
    return {
        "dim": mla.dim,
        "derived_dim": derived_subalgebra(mla.algebra, mla.tol).dim,
        "center_dim": center(mla.algebra, mla.tol).dim,
    }


# ---------------------------------------------------------------- rendering


def fmt_num(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if abs(v) < 1e-12:
        v = 0.0
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def fmt_matrix(M, indent: str = "  ") -> str:
    rows = [[fmt_num(x) for x in row] for row in M]
    if not rows:
        return indent + "(empty)"
    w = max(len(x) for r in rows for x in r)
    return "\n".join(indent + "  ".join(x.rjust(w) for x in r) for r in rows)


def fmt_form(terms: dict) -> str:
    parts = [f"{fmt_num(v)} e^{k}" for k, v in terms.items() if fmt_num(v) != "0"]
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def fmt_poly(p) -> str:
    if isinstance(p, str):
        return p
    return "[" + ", ".join(fmt_num(x) for x in p) + "]"


def render_text(report: AnalysisReport) -> str:
    out = []
    inp = report.input
    if "entry" in inp:
        ps = ", ".join(f"{k}={fmt_num(v)}" for k, v in sorted(inp.get("params", {}).items()))
        out.append(f"input: catalog entry {inp['entry']}" + (f" ({ps})" if ps else ""))
    else:
        out.append(f"input: file {inp.get('file')} sha256 {inp.get('sha256', '')[:16]}")
    for name in SECTIONS:
        if name not in report.sections:
            continue
        s = report.sections[name]
        out.append(f"\n== {name} ==")
        out.append(_RENDER[name](s))
    for w in report.diagnostics.get("warnings", []):
        out.append(f"\nwarning: {w}")
    return "\n".join(out) + "\n"


def _r_check(s):
    lines = [f"valid Lie algebra: {fmt_num(s['valid'])}", f"max Jacobi residual: {fmt_num(s['jacobi_residual'])}"]
    for v in s["violations"]:
        lines.append(f"  {v['kind']} at ({v['i']},{v['j']},{v['k']}): residual {fmt_num(v['residual'])}")
    return "\n".join(lines)


def _r_connection(s):
    lines = ["orthonormal frame (columns, input coordinates):", fmt_matrix(s["frame"])]
    for i, g in enumerate(s["gamma"]):
        lines += [f"nabla_{i}:", fmt_matrix(g)]
    lines.append(f"skew residual {fmt_num(s['skew_residual'])}, torsion residual {fmt_num(s['torsion_residual'])}")
    return "\n".join(lines)


def _r_parallel(s):
    lines = [f"dimension: {s['dimension']}"]
    for i, (H, c) in enumerate(zip(s["basis"], s["classes"])):
        tag = "complex structure" if c["is_complex_structure"] else (
            "multiple of a complex structure" if c["is_complex_multiple"] else "not a complex multiple")
        lines += [f"H{i}: angles {', '.join(fmt_num(a) for a in c['angles'])}; kernel dim {c['kernel_dim']}; {tag}", fmt_matrix(H)]
    lines.append(f"contains an element that is not a multiple of a complex structure: {fmt_num(s['contains_non_complex_multiple'])}")
    for name, d in s["designated"].items():
        lines.append(
            f"designated {name}: commutation residual {fmt_num(d['commutation_residual'])}, "
            f"in parallel space {fmt_num(d['in_parallel_space'])}, complex structure {fmt_num(d['is_complex_structure'])}"
        )
    return "\n".join(lines)


def _r_curvature(s):
    lines = []
    for key, M in s["operators"].items():
        lines.append(f"R({key}) = {fmt_form(s['two_forms'][key])}")
    lines += ["Ricci:", fmt_matrix(s["ricci"]), f"scalar curvature: {fmt_num(s['scalar'])}"]
    lines.append(f"Bianchi residual {fmt_num(s['bianchi_residual'])}, pair-symmetry residual {fmt_num(s['pair_symmetry_residual'])}")
    return "\n".join(lines)


def _r_fingerprint(s):
    return "\n".join(
        [
            f"tensor: {s['tensor']}",
            f"dims (g, [g,g], z, [[g,g],[g,g]], parallel): {tuple(s['dims'])}",
            f"Ricci charpoly: {fmt_poly(s['ric_charpoly'])}",
            f"Killing charpoly: {fmt_poly(s['killing_charpoly'])}",
            f"H charpoly: {fmt_poly(s['h_charpoly'])}",
            f"H on [g,g]: {fmt_poly(s['h_on_derived_charpoly'])}",
            f"H on center: {fmt_poly(s['h_on_center_charpoly'])}",
        ]
    )


def _r_holonomy(s):
    lines = [f"dimension: {s['dimension']} (levels {s['level_reached']}, stabilized {fmt_num(s['stabilized'])})"]
    for i, w in enumerate(s["two_forms"]):
        lines.append(f"  b{i} = {fmt_form(w)}")
    return "\n".join(lines)


def _r_derham(s):
    lines = [s["label"], "factor bases in orthonormal-frame coordinates:"]
    for f in s["factors"]:
        vecs = ["(" + ", ".join(fmt_num(x) for x in col) + ")" for col in np.asarray(f["basis"]).T]
        lines.append(f"  {f['kind']} dim {f['dim']}: span " + ", ".join(vecs))
    if s["note"]:
        lines.append(s["note"])
    return "\n".join(lines)


_RENDER = {
    "check": _r_check,
    "connection": _r_connection,
    "parallel": _r_parallel,
    "curvature": _r_curvature,
    "fingerprint": _r_fingerprint,
    "holonomy": _r_holonomy,
    "derham": _r_derham,
}
