"""Membership verdicts for the AN, AM and closure-of-AN classes.

Positive operators are decided from their spectral skeleton: with
essential spectrum ``{alpha}``, AN means finitely many spectral points
below ``alpha`` and AM finitely many above.  Blocks go through a decision
tree of necessity and sufficiency results; general operators go through
``T*T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import BorderlineError, NotInClass, NotPositive
from .operators import (TOL, BlockOperator, Coupling, IdempotentOperator,
                        SpaceDim, SpectralSplit, StructuredOperator, block_split,
                        buckholtz_square, essential_spectrum, gram_general,
                        gram_idempotent, spectral_split)
from .spectra import INFINITE, SpectralSequence

YES, NO, INDETERMINATE = "yes", "no", "indeterminate"
CLASSES = ("an", "am", "closure")

RULES = {
    "FINITE_DIMENSIONAL": "operators on finite-dimensional spaces lie in every class",
    "AN_STRUCTURE": "positive AN structure theorem: T = K - F + alpha I, F finite rank, F <= alpha I, KF = 0",
    "AN_INFINITE_BELOW": "positive AN structure theorem: infinitely many spectral points below alpha",
    "AM_STRUCTURE": "positive AM structure theorem: T = alpha I - K + F, ||K|| <= alpha, F finite rank, KF = 0",
    "AM_INFINITE_ABOVE": "positive AM structure theorem: infinitely many spectral points above alpha",
    "CLOSURE_STRUCTURE": "closure structure theorem: T = alpha I - K1 + K2 with K1 = (T - alpha)^-, K2 = (T - alpha)^+",
    "ESSENTIAL_SPECTRUM_NOT_SINGLETON": "every class needs a one-point essential spectrum",
    "AN_NECESSARY_COMPACT_X": "AN block necessity: the coupling must be compact",
    "AM_NECESSARY_COMPACT_X": "AM block necessity: the coupling must be compact",
    "CLOSURE_NECESSARY_COMPACT_X": "closure block characterization: the coupling must be compact",
    "AN_NECESSARY_COMPONENTS": "AN block necessity: both diagonal entries must be AN",
    "AM_NECESSARY_COMPONENTS": "AM block necessity: both diagonal entries must be AM",
    "CLOSURE_NECESSARY_COMPONENTS": "closure block characterization: both diagonal entries must lie in the closure",
    "NECESSARY_EQUAL_ESSENTIAL_SPECTRA": "block necessity: diagonal entries must share their essential spectrum",
    "AN_SUFFICIENT_FINITE_RANK_X": "AN block sufficiency: AN entries, equal essential spectra, finite-rank coupling",
    "AM_SUFFICIENT_FINITE_RANK_X": "AM block sufficiency: AM entries, equal essential spectra, finite-rank coupling",
    "AN_IDENTITY_BLOCK": "identity diagonal entry: AN iff the other entry is AN with essential spectrum {1} and X has finite rank",
    "AM_IDENTITY_BLOCK": "identity diagonal entry: AM iff the other entry is AM with essential spectrum {1} and X has finite rank",
    "CLOSED_RANGE_X": "closed-range coupling: membership forces X to have finite rank",
    "CLOSURE_MATRIX": "closure block characterization: closure entries, equal essential spectra, compact coupling",
    "RECOGNIZED_PATTERN_EQUAL_DIAGONAL": "equal diagonal entries with a real diagonal coupling split as diag(a + x) (+) diag(a - x)",
    "OPEN_COMPACT_COUPLING_GAP": "compact infinite-rank coupling outside every known criterion (open problem)",
    "AN_GRAM_TRANSFER": "T is AN iff T*T is AN",
    "AM_GRAM_TRANSFER": "T is AM iff T*T is AM",
    "CLOSURE_GRAM_TRANSFER": "T lies in the closure iff T*T does",
    "IDEMPOTENT_FINITE_DIMENSION": "an idempotent lies in any of the classes iff its range or kernel is finite dimensional",
    "BUCKHOLTZ_SQUARE": "B = T + T* - I is self-adjoint, so B is in a class iff B^2 = diag(I + XX*, I + X*X) is",
}


def rule_name(rule: str) -> str:
    return RULES.get(rule, rule)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitParts:
    """Positive and negative parts of ``T - alpha`` in a diagonalizing frame."""

    pos_lead: np.ndarray
    neg_lead: np.ndarray
    pos_tails: tuple[SpectralSequence, ...]
    neg_tails: tuple[SpectralSequence, ...]


@dataclass(frozen=True, eq=False)
class Witness:
    """Decomposition of a positive operator.

    kind AN: ``T = alpha I + K - F``; kind AM: ``T = alpha I - K + F``;
    kind closure: ``T = alpha I - K1 + K2``.  ``first`` is K (K1),
    ``second`` is F (K2).
    """

    kind: str
    alpha: Fraction
    first: Any
    second: Any
    parts: SplitParts = field(repr=False)

    @property
    def _pos_neg(self):
        return (self.first, self.second) if self.kind == "AN" else (self.second, self.first)

    def reconstruct(self):
        pos, neg = self._pos_neg
        if isinstance(pos, BlockOperator):
            base = BlockOperator.scalar(self.alpha, pos.spaces)
        else:
            base = StructuredOperator.scalar(self.alpha, pos.space)
        return base + pos - neg

    def constraints(self) -> dict[str, bool]:
        """Checks of the structural constraints (exact on tails, 1e-10 on leads)."""
        p = self.parts
        a = self.alpha

        def lead_eigs(m):
            return np.linalg.eigvalsh(m) if m.size else np.zeros(0)

        def nonneg(lead, tails):
            ok = lead_eigs(lead).min(initial=0) >= -TOL
            return ok and all(t.infimum()[0] >= 0 for t in tails if t.head or t.strands)

        def bounded_by_alpha(lead, tails):
            ok = lead_eigs(lead).max(initial=0) <= float(a) + TOL
            return ok and all(t.supremum()[0] <= a for t in tails if t.head or t.strands)

        def finite_rank(tails):
            return all(t.count_nonzero() != INFINITE for t in tails)

        def compact(tails):
            return all(t.accumulation_points() <= {Fraction(0)} for t in tails)

        lead_prod = p.pos_lead @ p.neg_lead if p.pos_lead.size else np.zeros(0)
        disjoint = (not lead_prod.size or np.max(np.abs(lead_prod)) <= TOL) and all(
            (x * y).is_identically(0) for x, y in zip(p.pos_tails, p.neg_tails) if x.head or x.strands)
        out = {
            "pos_nonnegative": nonneg(p.pos_lead, p.pos_tails),
            "neg_nonnegative": nonneg(p.neg_lead, p.neg_tails),
            "orthogonal": disjoint,
            "compact_parts": compact(p.pos_tails) and compact(p.neg_tails),
        }
        if self.kind == "AN":
            out["F_le_alpha"] = bounded_by_alpha(p.neg_lead, p.neg_tails)
            out["F_finite_rank"] = finite_rank(p.neg_tails)
        elif self.kind == "AM":
            out["K_norm_le_alpha"] = bounded_by_alpha(p.neg_lead, p.neg_tails)
            out["F_finite_rank"] = finite_rank(p.pos_tails)
        else:
            out["K1_le_alpha"] = bounded_by_alpha(p.neg_lead, p.neg_tails)
        return out


def _lead_parts(split: SpectralSplit, alpha: Fraction) -> tuple[np.ndarray, np.ndarray]:
    n = split.lead.shape[0]
    if not n:
        z = np.zeros((0, 0), complex)
        return z, z
    eigs, vecs = split.eigen()
    d = np.array([float(e - alpha) if isinstance(e, Fraction) else e - float(alpha) for e in eigs])
    d[np.abs(d) <= TOL] = 0.0
    pos = (vecs * np.maximum(d, 0)) @ vecs.conj().T
    neg = (vecs * np.maximum(-d, 0)) @ vecs.conj().T
    return pos, neg


def _split_parts(split: SpectralSplit, alpha: Fraction) -> SplitParts:
    pos, neg = _lead_parts(split, alpha)
    return SplitParts(pos, neg, tuple(t.positive_part(alpha) for t in split.tails),
                      tuple(t.negative_part(alpha) for t in split.tails))


def _op_from(lead, tail: SpectralSequence, space: SpaceDim) -> StructuredOperator:
    if space.is_finite:
        return StructuredOperator.from_lead(lead, None, space)
    return StructuredOperator.from_lead(lead, tail, space)


def _witness(kind: str, alpha: Fraction, pos, neg, parts: SplitParts) -> Witness:
    if kind == "AN":
        return Witness(kind, alpha, pos, neg, parts)
    return Witness(kind, alpha, neg, pos, parts)


def _operator_witnesses(op: StructuredOperator, alpha: Fraction) -> dict[str, Witness]:
    if op.is_diagonal:
        seq = op.diagonal_sequence()
        pos_s, neg_s = seq.positive_part(alpha), seq.negative_part(alpha)
        z = np.zeros((0, 0), complex)
        parts = SplitParts(z, z, (pos_s,), (neg_s,))
        pos = StructuredOperator.diagonal(pos_s, op.space)
        neg = StructuredOperator.diagonal(neg_s, op.space)
    else:
        parts = _split_parts(spectral_split(op), alpha)
        pos = _op_from(parts.pos_lead, parts.pos_tails[0], op.space)
        neg = _op_from(parts.neg_lead, parts.neg_tails[0], op.space)
    return {k: _witness(k, alpha, pos, neg, parts) for k in ("AN", "AM", "Closure")}


def _block_witnesses(t: BlockOperator, alpha: Fraction) -> dict[str, Witness]:
    split = block_split(t)
    parts = _split_parts(split, alpha)
    n1 = split.sizes[0]

    def assemble(lead, tails):
        return BlockOperator(_op_from(lead[:n1, :n1], tails[0], t.a1.space),
                             _op_from(lead[n1:, n1:], tails[1], t.a2.space),
                             Coupling.finite(lead[:n1, n1:]))

    pos = assemble(parts.pos_lead, parts.pos_tails)
    neg = assemble(parts.neg_lead, parts.neg_tails)
    return {k: _witness(k, alpha, pos, neg, parts) for k in ("AN", "AM", "Closure")}


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassVerdict:
    status: str
    rule: str
    reason: str = ""
    witness: Witness | None = field(default=None, repr=False)
    conditional: bool = False

    @property
    def is_yes(self) -> bool:
        return self.status == YES

    def label(self) -> str:
        text = {YES: "Yes", NO: "No", INDETERMINATE: "IndeterminateGap"}[self.status]
        return text + (" (conditional on positivity)" if self.conditional else "")


@dataclass(frozen=True)
class Verdict:
    an: ClassVerdict
    am: ClassVerdict
    closure: ClassVerdict
    notes: tuple[str, ...] = ()
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.an.is_yes or self.am.is_yes:
            assert self.closure.is_yes or self.closure.status == INDETERMINATE, \
                "AN or AM membership implies closure membership"
        if self.an.is_yes and self.am.is_yes and self.an.witness and self.am.witness:
            assert self.an.witness.alpha == self.am.witness.alpha

    def __getitem__(self, cls: str) -> ClassVerdict:
        return getattr(self, cls)

    @property
    def rules_cited(self) -> list[str]:
        out: list[str] = []
        for cls in CLASSES:
            r = self[cls].rule
            if r not in out:
                out.append(r)
        return out

    def statuses(self) -> tuple[str, str, str]:
        return self.an.status, self.am.status, self.closure.status

    def with_conditional(self, flag: bool) -> "Verdict":
        if not flag:
            return self
        return Verdict(*(ClassVerdict(v.status, v.rule, v.reason, v.witness, True)
                         for v in (self.an, self.am, self.closure)), self.notes, self.details)


def _all(status: str, rule: str, reason: str = "", witnesses: dict | None = None, **kw) -> Verdict:
    w = witnesses or {}
    return Verdict(ClassVerdict(status, rule, reason, w.get("AN")),
                   ClassVerdict(status, rule, reason, w.get("AM")),
                   ClassVerdict(status, rule, reason, w.get("Closure")), **kw)


def _count_text(c) -> str:
    return "infinitely many" if c == INFINITE else str(c)


# ---------------------------------------------------------------------------
# positive structured operators
# ---------------------------------------------------------------------------

def classify_positive(op: StructuredOperator) -> Verdict:
    if op.positivity == "borderline":
        raise BorderlineError("leading-block eigenvalue within tolerance of 0", op.lead_eigenvalues[0])
    if op.positivity != "positive":
        raise NotPositive("operator is not positive")
    if op.space.is_finite:
        return _all(YES, "FINITE_DIMENSIONAL", "finite-dimensional space",
                    _operator_witnesses(op, Fraction(0)))
    ess = essential_spectrum(op)
    if len(ess) != 1:
        pts = ", ".join(str(x) for x in sorted(ess))
        return _all(NO, "ESSENTIAL_SPECTRUM_NOT_SINGLETON", f"essential spectrum {{{pts}}}")
    (alpha,) = ess
    split = spectral_split(op)
    below, above = split.count(alpha, "below"), split.count(alpha, "above")
    w = _operator_witnesses(op, alpha)
    an = (ClassVerdict(YES, "AN_STRUCTURE", f"alpha={alpha}, {below} points below", w["AN"])
          if below != INFINITE else
          ClassVerdict(NO, "AN_INFINITE_BELOW", f"infinitely many spectral points below alpha={alpha}"))
    am = (ClassVerdict(YES, "AM_STRUCTURE", f"alpha={alpha}, {above} points above", w["AM"])
          if above != INFINITE else
          ClassVerdict(NO, "AM_INFINITE_ABOVE", f"infinitely many spectral points above alpha={alpha}"))
    cl = ClassVerdict(YES, "CLOSURE_STRUCTURE", f"essential spectrum {{{alpha}}}", w["Closure"])
    return Verdict(an, am, cl)


def decompose(op: StructuredOperator, cls: str) -> Witness:
    key = {"AN": "an", "AM": "am", "Closure": "closure", "closure": "closure"}[cls]
    v = classify_positive(op)[key]
    if not v.is_yes:
        raise NotInClass(f"operator is not in {cls}: {v.reason or rule_name(v.rule)}")
    return v.witness


# ---------------------------------------------------------------------------
# positive blocks
# ---------------------------------------------------------------------------

def equal_diagonal_pattern(t: BlockOperator) -> tuple[SpectralSequence, SpectralSequence] | None:
    """``(a + x, a - x)`` when ``t = [[diag a, diag x], [diag x, diag a]]`` with real x."""
    if t.a1.space.is_finite or t.a2.space.is_finite:
        return None
    if not (t.a1.is_diagonal and t.a2.is_diagonal and t.x.is_diagonal):
        return None
    if t.x.lead.size and np.any(np.diag(t.x.lead).imag):
        return None
    a, b = t.a1.diagonal_sequence(), t.a2.diagonal_sequence()
    if not (a - b).is_identically(0):
        return None
    x = t.x.diagonal_sequence()
    return a + x, a - x


def _pattern_verdict(plus: SpectralSequence, minus: SpectralSequence, spaces) -> dict[str, ClassVerdict]:
    ess = plus.accumulation_points() | minus.accumulation_points()
    rule = "RECOGNIZED_PATTERN_EQUAL_DIAGONAL"
    if len(ess) != 1:
        v = ClassVerdict(NO, rule, "split essential spectrum is not a single point")
        return {"an": v, "am": v, "closure": v}
    (alpha,) = ess
    below = plus.count_relative(alpha, "below") + minus.count_relative(alpha, "below")
    above = plus.count_relative(alpha, "above") + minus.count_relative(alpha, "above")
    pp, pm = plus.positive_part(alpha), minus.positive_part(alpha)
    mp, mm = plus.negative_part(alpha), minus.negative_part(alpha)
    half = Fraction(1, 2)

    def rotated(p, q):
        # per coordinate pair: R diag(p, q) R^T with R the 45 degree rotation
        d = (p + q).scale(half)
        return BlockOperator(StructuredOperator.diagonal(d), StructuredOperator.diagonal(d),
                             Coupling.diagonal((p - q).scale(half)))

    z = np.zeros((0, 0), complex)
    parts = SplitParts(z, z, (pp, pm), (mp, mm))
    pos, neg = rotated(pp, pm), rotated(mp, mm)
    w = {k: _witness(k, alpha, pos, neg, parts) for k in ("AN", "AM", "Closure")}
    return {
        "an": ClassVerdict(YES, rule, f"alpha={alpha}, {below} points below", w["AN"])
        if below != INFINITE else ClassVerdict(NO, rule, "infinitely many points below alpha after the split"),
        "am": ClassVerdict(YES, rule, f"alpha={alpha}, {above} points above", w["AM"])
        if above != INFINITE else ClassVerdict(NO, rule, "infinitely many points above alpha after the split"),
        "closure": ClassVerdict(YES, rule, f"essential spectrum {{{alpha}}}", w["Closure"]),
    }


def classify_block_positive(t: BlockOperator) -> Verdict:
    status = t.positivity
    if status.disproved:
        raise NotPositive(f"block is not positive ({status.rule})")
    conditional = status.state == "numeric_only"
    s1, s2 = t.spaces
    if s1.is_finite and s2.is_finite:
        return _all(YES, "FINITE_DIMENSIONAL", "finite-dimensional space",
                    _block_witnesses(t, Fraction(0))).with_conditional(conditional)
    if not t.x.is_compact:
        v = Verdict(ClassVerdict(NO, "AN_NECESSARY_COMPACT_X", "coupling is not compact"),
                    ClassVerdict(NO, "AM_NECESSARY_COMPACT_X", "coupling is not compact"),
                    ClassVerdict(NO, "CLOSURE_NECESSARY_COMPACT_X", "coupling is not compact"))
        return v.with_conditional(conditional)

    infinite = [op for op in (t.a1, t.a2) if not op.space.is_finite]
    comps = [classify_positive(op) for op in infinite]
    spectra = {essential_spectrum(op) for op in infinite}
    equal_ess = len(spectra) == 1
    ess = next(iter(spectra))
    alpha = next(iter(ess)) if len(ess) == 1 else None
    finite_rank = t.x.is_finite_rank
    identity = len(infinite) == 2 and (t.a1.is_identity or t.a2.is_identity)
    pattern = None
    witnesses = None

    def block_witnesses():
        nonlocal witnesses
        if witnesses is None:
            witnesses = _block_witnesses(t, alpha)
        return witnesses

    def pattern_verdicts():
        nonlocal pattern
        if pattern is None:
            pair = equal_diagonal_pattern(t)
            pattern = {} if pair is None else _pattern_verdict(*pair, t.spaces)
        return pattern

    out = {}
    for cls, tag, wkey in (("an", "AN", "AN"), ("am", "AM", "AM")):
        if identity:
            k = 1 if t.a1.is_identity else 0
            other, other_ess = comps[k], essential_spectrum(infinite[k])
            ok = other[cls].is_yes and other_ess == {Fraction(1)} and finite_rank
            if ok:
                out[cls] = ClassVerdict(YES, f"{tag}_IDENTITY_BLOCK", "other entry qualifies, X finite rank",
                                        block_witnesses()[wkey])
            else:
                why = ("other entry fails" if not other[cls].is_yes else
                       "essential spectrum differs from {1}" if other_ess != {Fraction(1)} else "X has infinite rank")
                out[cls] = ClassVerdict(NO, f"{tag}_IDENTITY_BLOCK", why)
        elif not all(c[cls].is_yes for c in comps):
            out[cls] = ClassVerdict(NO, f"{tag}_NECESSARY_COMPONENTS", "a diagonal entry is not in the class")
        elif not equal_ess:
            out[cls] = ClassVerdict(NO, "NECESSARY_EQUAL_ESSENTIAL_SPECTRA", "diagonal entries have different essential spectra")
        elif finite_rank:
            out[cls] = ClassVerdict(YES, f"{tag}_SUFFICIENT_FINITE_RANK_X", "entries qualify, X finite rank",
                                    block_witnesses()[wkey])
        elif t.x.has_closed_range():
            out[cls] = ClassVerdict(NO, "CLOSED_RANGE_X", "X has closed range and infinite rank")
        elif pattern_verdicts():
            out[cls] = pattern_verdicts()[cls]
        else:
            out[cls] = ClassVerdict(INDETERMINATE, "OPEN_COMPACT_COUPLING_GAP",
                                    "compact infinite-rank coupling without closed range")

    if not all(c.closure.is_yes for c in comps):
        out["closure"] = ClassVerdict(NO, "CLOSURE_NECESSARY_COMPONENTS", "a diagonal entry is outside the closure")
    elif not equal_ess:
        out["closure"] = ClassVerdict(NO, "NECESSARY_EQUAL_ESSENTIAL_SPECTRA", "diagonal entries have different essential spectra")
    else:
        w = None
        if finite_rank:
            w = block_witnesses()["Closure"]
        elif pattern_verdicts():
            w = pattern_verdicts()["closure"].witness
        out["closure"] = ClassVerdict(YES, "CLOSURE_MATRIX", "entries in the closure, equal essential spectra, X compact", w)
    notes = ()
    if pattern_verdicts() and not finite_rank:
        pv = pattern_verdicts()
        notes = tuple(f"{c}: exact split agrees" for c in CLASSES
                      if out[c].rule != "RECOGNIZED_PATTERN_EQUAL_DIAGONAL"
                      and out[c].status != INDETERMINATE and pv[c].status == out[c].status)
    return Verdict(out["an"], out["am"], out["closure"], notes).with_conditional(conditional)


# ---------------------------------------------------------------------------
# general blocks, idempotents, Buckholtz operators
# ---------------------------------------------------------------------------

def _transfer(v: ClassVerdict, rule: str) -> ClassVerdict:
    reason = f"via T*T: {v.reason or rule_name(v.rule)} [{v.rule}]"
    return ClassVerdict(v.status, rule, reason, v.witness, v.conditional)


def classify_block_general(a11, a12, a21, a22,
                           spaces=(SpaceDim(None), SpaceDim(None))) -> Verdict:
    """Verdict for ``[[a11, a12], [a21, a22]]`` through its Gram operator.

    Witnesses in the result decompose ``T*T``, not ``T``.
    """
    gram = gram_general(a11, a12, a21, a22, spaces)
    gv = classify_block_positive(gram)
    v = Verdict(_transfer(gv.an, "AN_GRAM_TRANSFER"), _transfer(gv.am, "AM_GRAM_TRANSFER"),
                _transfer(gv.closure, "CLOSURE_GRAM_TRANSFER"), gv.notes, {"gram": gram, "gram_verdict": gv})
    # sufficiency cross-check: |A11|, |A22| AN with equal essential spectra and finite-rank off-diagonals
    def cp(x):
        return x.as_coupling() if isinstance(x, StructuredOperator) else x
    off_fr = cp(a12).is_finite_rank and cp(a21).is_finite_rank
    if off_fr and not any(s.is_finite for s in spaces):
        m1 = StructuredOperator.from_coupling(cp(a11).H @ cp(a11), spaces[0], known_positive=True)
        m2 = StructuredOperator.from_coupling(cp(a22).H @ cp(a22), spaces[1], known_positive=True)
        c1, c2 = classify_positive(m1), classify_positive(m2)
        if c1.an.is_yes and c2.an.is_yes and essential_spectrum(m1) == essential_spectrum(m2):
            assert v.an.is_yes, "sufficiency for general blocks contradicts the Gram route"
            v.details["sufficiency"] = "diagonal moduli AN with equal essential spectra; off-diagonals finite rank"
    return v


def classify_idempotent(t: IdempotentOperator) -> Verdict:
    finite = t.range_dim.is_finite or t.cokernel_dim.is_finite
    status = YES if finite else NO
    reason = ("range or kernel is finite dimensional" if finite
              else "range and kernel are both infinite dimensional")
    gram = gram_idempotent(t)
    gv = classify_block_positive(gram)
    agree = all(gv[c].status == status for c in CLASSES)
    if not agree:
        raise AssertionError(f"idempotent routes disagree: dimension rule {status}, T*T route {gv.statuses()}")
    w = {"AN": gv.an.witness, "AM": gv.am.witness, "Closure": gv.closure.witness}
    return _all(status, "IDEMPOTENT_FINITE_DIMENSION", reason, w,
                notes=(f"T*T route agrees ({', '.join(gv.rules_cited)})",),
                details={"gram": gram, "gram_verdict": gv})


def classify_buckholtz(t: IdempotentOperator) -> Verdict:
    sq = buckholtz_square(t)
    sv = classify_block_positive(sq)
    v = Verdict(*(ClassVerdict(sv[c].status, "BUCKHOLTZ_SQUARE",
                               f"via B^2: {sv[c].reason or rule_name(sv[c].rule)} [{sv[c].rule}]",
                               sv[c].witness, sv[c].conditional) for c in CLASSES),
                details={"square": sq, "square_verdict": sv})
    if t.range_dim.is_finite or t.cokernel_dim.is_finite:
        assert v.an.is_yes, "an AN idempotent must have an AN Buckholtz operator"
    return v
