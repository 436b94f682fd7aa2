"""Plain-text and CSV rendering of verdicts, symbol reports and tables."""

from __future__ import annotations

from fractions import Fraction

from .classify import CLASSES, Verdict, Witness, rule_name
from .hardy import SymbolReport
from .operators import BlockOperator, StructuredOperator
from .truncation import ConvergenceRow, rows_to_csv

LABELS = {"an": "AN", "am": "AM", "closure": "closure(AN)"}


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def describe(obj) -> str:
    if isinstance(obj, StructuredOperator):
        return f"structured operator on {obj.space}: diag {obj.diag!r}, correction {obj.N}x{obj.N}"
    if isinstance(obj, BlockOperator):
        return (f"block [[A1, X], [X*, A2]]\n  A1: {describe(obj.a1)}\n  A2: {describe(obj.a2)}\n"
                f"  X: {obj.x.kind} coupling\n  positivity: {obj.positivity.state} ({obj.positivity.rule})")
    return repr(obj)


def _witness_lines(w: Witness) -> list[str]:
    names = {"AN": ("K", "F"), "AM": ("K", "F"), "Closure": ("K1", "K2")}[w.kind]
    lines = [f"  witness: alpha={w.alpha}"]
    for name, part in zip(names, (w.first, w.second)):
        lines.append(f"    {name}: {_part_summary(part)}")
    return lines


def _part_summary(part) -> str:
    if isinstance(part, StructuredOperator):
        return f"leading block {part.N}x{part.N}, diag {part.diag!r}"
    return (f"block with A1 diag {part.a1.diag!r}, A2 diag {part.a2.diag!r}, "
            f"X {part.x.kind}")


def verdict_lines(v: Verdict, title: str | None = None) -> list[str]:
    lines = [title] if title else []
    for cls in CLASSES:
        cv = v[cls]
        lines.append(f"{LABELS[cls]}: {cv.label()} (rule {cv.rule})")
        lines.append(f"  rule: {cv.rule} - {rule_name(cv.rule)}")
        if cv.reason:
            lines.append(f"  reason: {cv.reason}")
        if cv.witness is not None:
            lines.extend(_witness_lines(cv.witness))
    for note in v.notes:
        lines.append(f"note: {note}")
    return lines


def table_lines(rows: list[ConvergenceRow]) -> list[str]:
    out = [f"{'n':>6} {'norm':>22} {'min_modulus':>22} {'min_eigenvalue':>22} {'gap':>22}"]
    for r in rows:
        out.append(f"{r.n:>6} " + " ".join(f"{_fmt(float(x)):>22}" for x in r.as_tuple()[1:]))
    return out


def header(job: str, seed: int, ns) -> list[str]:
    return ["# opclass report", f"# job: {job}", f"# seed: {seed}",
            f"# truncation sizes: {', '.join(str(n) for n in ns)}", ""]


def symbol_lines(r: SymbolReport) -> list[str]:
    uni = r.unimodular
    lines = [f"symbol: {r.symbol}",
             f"|phi| constant: {'yes, |phi|^2 = ' + str(uni.modulus_squared) if uni.constant else 'no'}",
             f"M_phi: {r.multiplication_status}",
             f"  rule: {r.multiplication_rule}",
             f"Hankel rank (Kronecker): {r.kronecker_rank}",
             f"Hankel norm: {_fmt(r.hankel_norm)}"]
    lines += verdict_lines(r.hankel_verdict, "block [[I, H*], [H, I]]:")
    lines += [f"note: {n}" for n in r.notes]
    return lines


def csv_text(rows: list[ConvergenceRow]) -> str:
    return rows_to_csv(rows)
