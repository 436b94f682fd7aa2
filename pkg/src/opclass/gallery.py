"""Worked examples with known verdicts, each rebuilt and re-checked."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .classify import (Verdict, classify_block_positive, classify_buckholtz,
                       classify_idempotent)
from .operators import (BlockOperator, Coupling, IdempotentOperator, StructuredOperator,
                        buckholtz_operator_matrix, buckholtz_square)
from .spectra import SpectralSequence, TailStrand, TailTerm
from .truncation import ConvergenceRow, contraction_factor, convergence_table, hermitian_eigen

PROBE_N = 128


class GalleryMismatch(AssertionError):
    pass


def harmonic() -> SpectralSequence:
    """K = diag(1/n)."""
    return SpectralSequence.power(0, 1, 1)


def odd_slot_coupling() -> Coupling:
    """x_n = 1/n for odd n and 0 for even n."""
    odd = TailStrand(0, (TailTerm(1, 1, ((2, -1, 1),)),))
    return Coupling.diagonal(SpectralSequence((), (odd, TailStrand(0))))


@dataclass
class GalleryItem:
    key: str
    title: str
    expected: dict[str, str]
    verdicts: dict[str, Verdict]
    probes: dict[str, float] = field(default_factory=dict)
    tables: dict[str, list[ConvergenceRow]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def check(self) -> None:
        for label, want in self.expected.items():
            name, cls = label.split(".")
            got = self.verdicts[name][cls].status
            if got != want:
                raise GalleryMismatch(f"{self.key}: {label} expected {want}, got {got}")
        for label, value in self.probes.items():
            if label.startswith("min_eig") and value < -1e-10:
                raise GalleryMismatch(f"{self.key}: positivity probe {label} = {value}")


def _min_eig(m: np.ndarray) -> float:
    return float(hermitian_eigen(m)[0][0])


def _block_item(key, title, block, expected, ns) -> GalleryItem:
    v = classify_block_positive(block)
    item = GalleryItem(key, title, expected, {"T": v})
    item.probes[f"min_eig_n{PROBE_N}"] = _min_eig(block.matrix(PROBE_N))
    item.probes["contraction_factor_n50"] = contraction_factor(block, 50)
    item.tables["T"] = convergence_table(block, ns)
    return item


def an_pattern_example(ns=(8, 32, 128)) -> GalleryItem:
    k = harmonic()
    a = StructuredOperator.diagonal(k.shift(1))
    t = BlockOperator(a, a, Coupling.diagonal(k.scale(-1)))
    item = _block_item("an_infinite_rank_coupling",
                       "[[K+I, -K], [-K, K+I]] with K = diag(1/n): AN although X has infinite rank",
                       t, {"T.an": "yes"}, ns)
    w = item.verdicts["T"].an.witness
    err = np.max(np.abs(w.reconstruct().matrix(PROBE_N) - t.matrix(PROBE_N)))
    item.probes["witness_reconstruction_error"] = float(err)
    item.notes.append(f"direct witness: alpha = {w.alpha}, K has essential spectrum {{0}}, F = 0")
    return item


def am_pattern_example(ns=(8, 32, 128)) -> GalleryItem:
    k = harmonic().scale(Fraction(1, 2))
    a = StructuredOperator.diagonal(k.scale(-1).shift(1))
    t = BlockOperator(a, a, Coupling.diagonal(k.scale(-1)))
    item = _block_item("am_infinite_rank_coupling",
                       "[[I-K, -K], [-K, I-K]] with K = diag(1/(2n)), ||K|| = 1/2: AM although X has infinite rank",
                       t, {"T.am": "yes"}, ns)
    w = item.verdicts["T"].am.witness
    norm = max(s.sup_abs()[0] for s in w.parts.neg_tails)
    item.notes.append(f"witness: alpha = {w.alpha}, K = (T - alpha)^- has norm {norm} <= alpha")
    return item


def idempotent_example(ns=(8, 32, 128)) -> GalleryItem:
    t = IdempotentOperator(odd_slot_coupling())
    vi, vb = classify_idempotent(t), classify_buckholtz(t)
    item = GalleryItem("idempotent_counterexample",
                       "[[I, X], [0, 0]] with X e_n = (1/n) e_n on odd n: not AN, Buckholtz operator AN",
                       {"idempotent.an": "no", "idempotent.am": "no", "idempotent.closure": "no",
                        "buckholtz.an": "yes"},
                       {"idempotent": vi, "buckholtz": vb})
    b = buckholtz_operator_matrix(t, PROBE_N)
    sq = buckholtz_square(t).matrix(PROBE_N)
    item.probes["buckholtz_square_identity_error"] = float(np.max(np.abs(b @ b - sq)))
    item.probes[f"min_eig_square_n{PROBE_N}"] = _min_eig(sq)
    item.tables["buckholtz_square"] = convergence_table(buckholtz_square(t), ns)
    return item


def contraction_examples(ns=(8, 32, 128)) -> list[GalleryItem]:
    ident = StructuredOperator.identity()
    u = np.array([0.6, 0.8, 0.0])
    rank_one = Coupling.finite(0.9 * np.outer(u, u))
    fin = _block_item("contraction_finite_rank",
                      "[[I, C], [C*, I]] with C rank one, ||C|| = 0.9: AN and AM",
                      BlockOperator(ident, ident, rank_one),
                      {"T.an": "yes", "T.am": "yes", "T.closure": "yes"}, ns)
    comp = _block_item("contraction_compact",
                       "[[I, C], [C*, I]] with C = diag(1/n): compact, not finite rank, so only the closure",
                       BlockOperator(ident, ident, Coupling.diagonal(harmonic())),
                       {"T.an": "no", "T.am": "no", "T.closure": "yes"}, ns)
    return [fin, comp]


BUILDERS: tuple[Callable[..., object], ...] = (an_pattern_example, am_pattern_example,
                                               idempotent_example, contraction_examples)


def gallery(ns=(8, 32, 128)) -> list[GalleryItem]:
    items: list[GalleryItem] = []
    for build in BUILDERS:
        out = build(ns)
        items.extend(out if isinstance(out, list) else [out])
    for item in items:
        item.check()
    return items
