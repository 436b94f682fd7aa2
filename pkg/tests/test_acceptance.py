"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines
inline; they are also collected in the terminal summary.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np

from builders import (OperatorCase, diagonal_operator, harmonic, hermitian, monomial_symbol,
                      random_finite_coupling, random_idempotent, random_positive_operator,
                      random_symbol)
from opclass import (BlockOperator, Coupling, IdempotentOperator, StructuredOperator,
                     classify_block_positive, classify_buckholtz, classify_idempotent,
                     classify_positive, essential_spectrum, gram_idempotent)
from opclass.gallery import gallery, odd_slot_coupling
from opclass.hardy import (anti_unitary_check, hankel_truncation, is_unimodular_constant,
                           kronecker_rank, multiplication_block_deviation, numeric_rank)
from opclass.spectra import SpectralSequence
from opclass.truncation import brute_force_extrema, hermitian_eigen, singular_values

SEED = 0xA11


def _rng(offset: int) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def _operator_cases(count: int, offset: int) -> list[OperatorCase]:
    rng = _rng(offset)
    return [random_positive_operator(rng) for _ in range(count)]


# 1 -------------------------------------------------------------------------

def test_criterion_1_structure_round_trip(criterion):
    start = time.perf_counter()
    failures = []
    worst = 0.0
    for i, case in enumerate(_operator_cases(100, 1)):
        v = classify_positive(case.op)
        if v.statuses() != case.hand_rule():
            failures.append(f"case {i}: {v.statuses()} vs hand rule {case.hand_rule()}")
        target = case.op.matrix(256)
        for cls in ("an", "am", "closure"):
            w = v[cls].witness
            if v[cls].is_yes:
                err = float(np.max(np.abs(w.reconstruct().matrix(256) - target)))
                worst = max(worst, err)
                if err > 1e-10:
                    failures.append(f"case {i} {cls}: reconstruction error {err:.2e}")
    elapsed = time.perf_counter() - start
    if elapsed >= 10:
        failures.append(f"runtime {elapsed:.1f}s")
    criterion(1, not failures, f"100 operators, worst reconstruction {worst:.1e}, {elapsed:.2f}s")
    assert not failures, failures[:5]


# 2 -------------------------------------------------------------------------

def _strand_parts_match(op: StructuredOperator, alpha: Fraction, w) -> bool:
    """K1/K2 tails equal max(alpha - x, 0) and max(x - alpha, 0) entry by entry."""
    source = op.diagonal_sequence() if op.is_diagonal else op.tail
    xs = source.entries(400)
    want_neg = [max(alpha - x, Fraction(0)) for x in xs]
    want_pos = [max(x - alpha, Fraction(0)) for x in xs]
    return (w.parts.neg_tails[0].entries(400) == want_neg
            and w.parts.pos_tails[0].entries(400) == want_pos)


def _block_cases():
    rng = _rng(2)
    out = []
    for _ in range(40):
        a1 = random_positive_operator(rng, limits=(Fraction(3),), max_strands=1).op
        a2 = random_positive_operator(rng, limits=(Fraction(3),), max_strands=1).op
        rank = int(rng.integers(0, 4))
        x = random_finite_coupling(rng, 4, 4, rank, 0.3)
        out.append(BlockOperator(a1, a2, x))
    k = harmonic()
    a = StructuredOperator.diagonal(k.shift(1))
    out.append(BlockOperator(a, a, Coupling.diagonal(k.scale(-1))))
    k2 = harmonic(Fraction(1, 2))
    b = StructuredOperator.diagonal(k2.scale(-1).shift(1))
    out.append(BlockOperator(b, b, Coupling.diagonal(k2.scale(-1))))
    return out


def test_criterion_2_witness_constraints(criterion):
    failures = []
    checked = 0
    for i, case in enumerate(_operator_cases(100, 1)):
        v = classify_positive(case.op)
        for cls in ("an", "am", "closure"):
            if not v[cls].is_yes:
                continue
            w = v[cls].witness
            bad = [k for k, ok in w.constraints().items() if not ok]
            if bad:
                failures.append(f"operator {i} {cls}: {bad}")
            if cls == "closure" and not _strand_parts_match(case.op, w.alpha, w):
                failures.append(f"operator {i}: closure strands differ from (T - alpha)^-/+")
            checked += 1
    for i, t in enumerate(_block_cases()):
        v = classify_block_positive(t)
        for cls in ("an", "am", "closure"):
            w = v[cls].witness
            if v[cls].is_yes and w is not None:
                bad = [k for k, ok in w.constraints().items() if not ok]
                if bad:
                    failures.append(f"block {i} {cls}: {bad}")
                checked += 1
    criterion(2, not failures, f"{checked} witnesses checked")
    assert not failures, failures[:5]


# 3 -------------------------------------------------------------------------

def test_criterion_3_block_consistency(criterion):
    start = time.perf_counter()
    rng = _rng(3)
    failures = []
    yes_seen = no_seen = 0
    for i in range(100):
        c1 = random_positive_operator(rng)
        c2 = random_positive_operator(rng)
        rank = int(rng.integers(0, 4))
        x = random_finite_coupling(rng, 5, 5, rank, 0.3)
        t = BlockOperator(c1.op, c2.op, x)
        assert t.positivity.proved, t.positivity
        v = classify_block_positive(t)
        h1, h2 = c1.hand_rule(), c2.hand_rule()
        equal_ess = c1.limits == c2.limits and len(c1.limits) == 1
        for j, cls in enumerate(("an", "am")):
            want = "yes" if (h1[j] == "yes" and h2[j] == "yes" and equal_ess) else "no"
            got = v[cls].status
            yes_seen += got == "yes"
            no_seen += got == "no"
            if got != want:
                failures.append(f"block {i} {cls}: {got} ({v[cls].rule}) vs {want}")
    for i in range(20):
        lim = Fraction(int(rng.integers(1, 4)), 2)
        a = diagonal_operator(lim + 2, 1, 1, int(rng.choice([-1, 1])))
        x = Coupling.diagonal(SpectralSequence.power(lim, Fraction(1, 4), 1, int(rng.choice([-1, 1]))))
        v = classify_block_positive(BlockOperator(a, a, x))
        if v.statuses() != ("no", "no", "no"):
            failures.append(f"non-compact coupling {i}: {v.statuses()}")
    elapsed = time.perf_counter() - start
    if elapsed >= 10:
        failures.append(f"runtime {elapsed:.1f}s")
    criterion(3, not failures, f"{yes_seen} yes / {no_seen} no verdicts, {elapsed:.2f}s")
    assert yes_seen and no_seen
    assert not failures, failures[:5]


# 4 -------------------------------------------------------------------------

def _identity_grid():
    """30 cases [[I, X], [X*, A]] (and mirrored), with the expected verdicts."""
    a_choices = [
        # (operator, AN, AM, ess == {1})
        (diagonal_operator(1, Fraction(1, 2), 1, 1), True, False, True),
        (diagonal_operator(1, Fraction(1, 2), 2, -1), False, True, True),
        (diagonal_operator(1, head=(2, 3)), True, True, True),
        (diagonal_operator(2, Fraction(1, 2), 1, 1), True, False, False),
        (diagonal_operator(2), True, True, False),
    ]
    rng = _rng(4)
    x_choices = [
        ("zero", Coupling.zero(), True),
        ("rank-one", random_finite_coupling(rng, 3, 3, 1, 0.4), True),
        ("diag 1/(4n)", Coupling.diagonal(harmonic(Fraction(1, 4))), False),
    ]
    cases = []
    for a, an, am, ess1 in a_choices:
        for name, x, fr in x_choices:
            for mirrored in (False, True):
                ident = StructuredOperator.identity()
                t = BlockOperator(a, ident, x.H) if mirrored else BlockOperator(ident, a, x)
                want = ("yes" if an and ess1 and fr else "no", "yes" if am and ess1 and fr else "no")
                cases.append((f"{name}, AN={an}, AM={am}, ess1={ess1}, mirrored={mirrored}", t, want))
    return cases


def test_criterion_4_identity_blocks(criterion):
    cases = _identity_grid()
    assert len(cases) == 30
    failures = []
    for label, t, want in cases:
        v = classify_block_positive(t)
        got = (v.an.status, v.am.status)
        if got != want:
            failures.append(f"{label}: {got} vs {want}")
        if v.an.rule != "AN_IDENTITY_BLOCK" or v.am.rule != "AM_IDENTITY_BLOCK":
            failures.append(f"{label}: rules {v.an.rule}, {v.am.rule}")
    criterion(4, not failures, f"{len(cases)} cases")
    assert not failures, failures[:5]


# 5 -------------------------------------------------------------------------

GALLERY_EXPECTED = {
    "an_infinite_rank_coupling": {"T.an": "yes"},
    "am_infinite_rank_coupling": {"T.am": "yes"},
    "idempotent_counterexample": {"idempotent.an": "no", "buckholtz.an": "yes"},
    "contraction_finite_rank": {"T.an": "yes"},
    "contraction_compact": {"T.an": "no"},
}


def test_criterion_5_gallery(criterion):
    start = time.perf_counter()
    items = {item.key: item for item in gallery()}
    failures = []
    for key, expected in GALLERY_EXPECTED.items():
        item = items[key]
        for label, want in expected.items():
            name, cls = label.split(".")
            if item.verdicts[name][cls].status != want:
                failures.append(f"{key} {label}")
        for label, value in item.probes.items():
            if label.startswith("min_eig") and value < -1e-10:
                failures.append(f"{key} {label} = {value}")
    elapsed = time.perf_counter() - start
    if elapsed >= 30:
        failures.append(f"runtime {elapsed:.1f}s")
    criterion(5, not failures, f"{len(items)} items, {elapsed:.2f}s")
    assert not failures, failures


# 6 -------------------------------------------------------------------------

def test_criterion_6_eigensolver_oracle(criterion):
    rng = _rng(6)
    worst_ext = worst_gram = 0.0
    failures = []
    for i in range(200):
        n = int(rng.integers(1, 7))
        m = hermitian(rng, n, float(rng.uniform(0.5, 3))) if rng.random() < 0.5 else \
            (lambda a: (a + a.T) / 2)(rng.standard_normal((n, n)))
        w, v = hermitian_eigen(m)
        hi, lo = brute_force_extrema(m, samples=5_000, seed=SEED + i)
        err = max(abs(hi - np.max(np.abs(w))), abs(lo - np.min(np.abs(w))))
        worst_ext = max(worst_ext, err)
        if err > 1e-4:
            failures.append(f"matrix {i}: extrema error {err:.2e}")
        t = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        s2 = np.sort(singular_values(t) ** 2)
        g = np.sort(hermitian_eigen(t.conj().T @ t)[0])
        gerr = float(np.max(np.abs(s2 - g)))
        worst_gram = max(worst_gram, gerr)
        if gerr > 1e-8:
            failures.append(f"matrix {i}: gram error {gerr:.2e}")
    criterion(6, not failures, f"200 matrices, extrema error {worst_ext:.1e}, gram error {worst_gram:.1e}")
    assert not failures, failures[:5]


# 7 -------------------------------------------------------------------------

def _grid_modulus(phi, points=10_000):
    z = np.exp(2j * np.pi * np.arange(points) / points)
    return np.abs(phi(z)) ** 2


def test_criterion_7_hardy(criterion):
    start = time.perf_counter()
    rng = _rng(7)
    failures = []
    symbols = [random_symbol(rng) for _ in range(30)]
    for i, phi in enumerate(symbols):
        n = 2 * phi.degree + 8
        r = kronecker_rank(phi)
        nr = numeric_rank(hankel_truncation(phi, n))
        if r != nr:
            failures.append(f"symbol {i} ({phi}): kronecker {r} vs numeric {nr}")
        au = anti_unitary_check(phi, n)
        if au > 1e-12:
            failures.append(f"symbol {i}: anti-unitary deviation {au:.2e}")
        dev = multiplication_block_deviation(phi, n)
        if dev > 1e-12:
            failures.append(f"symbol {i}: multiplication block deviation {dev:.2e}")
    uni_symbols = symbols[:15] + [monomial_symbol(rng) for _ in range(15)]
    uni_count = 0
    for i, phi in enumerate(uni_symbols):
        u = is_unimodular_constant(phi)
        mod = _grid_modulus(phi)
        flat = float(mod.max() - mod.min()) <= 1e-8
        uni_count += u.constant
        if u.constant != flat:
            failures.append(f"symbol {phi}: exact {u.constant} vs grid {flat}")
        elif u.constant and abs(float(u.modulus_squared) - float(mod.mean())) > 1e-8:
            failures.append(f"symbol {phi}: |phi|^2 {u.modulus_squared} vs grid {mod.mean()}")
    elapsed = time.perf_counter() - start
    if elapsed >= 20:
        failures.append(f"runtime {elapsed:.1f}s")
    criterion(7, not failures, f"30 rank symbols, 30 modulus symbols ({uni_count} unimodular), {elapsed:.2f}s")
    assert uni_count and uni_count < 30
    assert not failures, failures[:5]


# 8 -------------------------------------------------------------------------

def test_criterion_8_idempotents(criterion):
    rng = _rng(8)
    failures = []
    yes = 0
    for i in range(50):
        t, finite = random_idempotent(rng)
        rank_rule = "yes" if finite else "no"
        gram = classify_block_positive(gram_idempotent(t))
        v = classify_idempotent(t)
        routes = {"rank": rank_rule, "gram_an": gram.an.status, "gram_am": gram.am.status,
                  "closure": gram.closure.status, "verdict_an": v.an.status, "verdict_closure": v.closure.status}
        if len(set(routes.values())) != 1:
            failures.append(f"idempotent {i}: {routes}")
        if v.an.is_yes:
            yes += 1
            if not classify_buckholtz(t).an.is_yes:
                failures.append(f"idempotent {i}: Buckholtz operator not AN")
    counter = IdempotentOperator(odd_slot_coupling())
    if classify_idempotent(counter).an.is_yes or not classify_buckholtz(counter).an.is_yes:
        failures.append("counterexample: expected idempotent No, Buckholtz Yes")
    criterion(8, not failures, f"50 idempotents ({yes} in the classes) plus the counterexample")
    assert 0 < yes < 50
    assert not failures, failures[:5]


# 9 -------------------------------------------------------------------------

def test_criterion_9_weyl_invariance(criterion):
    rng = _rng(9)
    failures = []
    for i, case in enumerate(_operator_cases(50, 9)):
        base = essential_spectrum(case.op)
        for j in range(20):
            k = int(rng.integers(1, 7))
            f = StructuredOperator(SpectralSequence.constant(0), hermitian(rng, k, float(rng.uniform(0.1, 5))))
            perturbed = case.op + f
            if essential_spectrum(perturbed) != base:
                failures.append(f"operator {i}, correction {j}")
    criterion(9, not failures, "50 operators x 20 finite-rank corrections")
    assert not failures, failures[:5]
