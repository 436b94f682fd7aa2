from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import harmonic, hermitian, random_finite_coupling, random_positive_operator
from opclass import (BlockOperator, BorderlineError, Coupling, FiniteSpaceError, IdempotentOperator,
                     NonCompactCoupling, SpaceDim, SpaceMismatch, StructuredOperator,
                     UnrepresentableProduct, add, buckholtz_square, essential_spectrum,
                     essential_spectrum_block, gram_general, gram_idempotent, has_closed_range,
                     is_positive, is_positive_block, min_modulus, multiply, operator_norm, scale)
from opclass.gallery import odd_slot_coupling
from opclass.spectra import SpectralSequence, TailStrand

ONE_PLUS = SpectralSequence.power(1, 1, 1)  # 1 + 1/n


def diag(seq):
    return StructuredOperator.diagonal(seq)


# -- algebra ------------------------------------------------------------------

def test_multiply_square_expands():
    t = diag(ONE_PLUS)
    sq = multiply(t, t)
    n = np.arange(1, 101)
    np.testing.assert_allclose(np.diag(sq.matrix(100)).real, 1 + 2 / n + 1 / n ** 2, rtol=0, atol=1e-14)
    assert sq.diag.entries(100) == [(1 + Fraction(1, k)) ** 2 for k in range(1, 101)]


def test_add_zero_and_scale_identity():
    t = diag(ONE_PLUS)
    assert np.array_equal(add(t, StructuredOperator.zero()).matrix(20), t.matrix(20))
    s = scale(StructuredOperator.identity(), Fraction(3, 2))
    assert essential_spectrum(s) == {Fraction(3, 2)}
    assert operator_norm(s).value == min_modulus(s).value == Fraction(3, 2)


def test_multiply_non_commuting_is_unrepresentable():
    a = StructuredOperator(SpectralSequence.constant(0), np.array([[1, 0], [0, -1]]))
    b = StructuredOperator(SpectralSequence.constant(0), np.array([[0, 1], [1, 0]]))
    with pytest.raises(UnrepresentableProduct):
        multiply(a, b)


def test_multiply_with_correction_matches_matrices():
    rng = np.random.default_rng(1)
    a = random_positive_operator(rng).op
    b = StructuredOperator(a.diag, a.corr)  # commutes with a
    np.testing.assert_allclose(multiply(a, b).matrix(40), a.matrix(40) @ b.matrix(40), atol=1e-12)


def test_space_mismatch():
    with pytest.raises(SpaceMismatch):
        StructuredOperator.identity() + StructuredOperator.identity(SpaceDim.finite(3))
    with pytest.raises(SpaceMismatch):
        StructuredOperator(SpectralSequence.finite([1, 2]), space=SpaceDim.finite(3))


def test_correction_must_be_hermitian():
    with pytest.raises(ValueError):
        StructuredOperator(SpectralSequence.constant(1), np.array([[0, 1], [0, 0]]))


# -- essential spectrum ---------------------------------------------------------

def test_essential_spectrum_examples():
    rng = np.random.default_rng(2)
    t = StructuredOperator(SpectralSequence.constant(1), hermitian(rng, 4, 3.0))
    assert essential_spectrum(t) == {1}
    two = diag(SpectralSequence((), (TailStrand(1), TailStrand(2))))
    assert essential_spectrum(two) == {1, 2}
    assert essential_spectrum(StructuredOperator.identity()) == {1}
    with pytest.raises(FiniteSpaceError):
        essential_spectrum(StructuredOperator.finite(np.eye(2)))


def test_block_essential_spectrum():
    one = diag(ONE_PLUS)
    two = diag(SpectralSequence.power(2, 1, 1))
    rank1 = random_finite_coupling(np.random.default_rng(3), 3, 3, 1, 0.2)
    assert essential_spectrum_block(BlockOperator(one, one, rank1)) == {1}
    assert essential_spectrum_block(BlockOperator(one, two, Coupling.diagonal(harmonic(Fraction(1, 4))))) == {1, 2}
    big = BlockOperator(diag(SpectralSequence.constant(3)), diag(SpectralSequence.constant(3)),
                        Coupling.diagonal(SpectralSequence.constant(Fraction(1, 2))))
    with pytest.raises(NonCompactCoupling):
        essential_spectrum_block(big)


# -- positivity ---------------------------------------------------------------

def test_positivity_examples():
    assert is_positive(diag(harmonic()))
    assert not is_positive(diag(SpectralSequence.power(1, 1, 1, head=(Fraction(-1, 10),))))
    swap = StructuredOperator(SpectralSequence((0, 0), (TailStrand(1),)),
                              np.array([[0, 1], [1, 0]]))
    assert not is_positive(swap)


def test_borderline_positivity():
    m = np.array([[1, 1], [1, 1]]) * 0.5  # eigenvalues 0, 1 in floating point
    t = StructuredOperator(SpectralSequence((0, 0), (TailStrand(1),)), m + 1e-13 * np.eye(2))
    assert t.positivity in ("borderline", "positive")
    tb = StructuredOperator(SpectralSequence((0, 0), (TailStrand(1),)), m - 1e-13 * np.eye(2))
    assert tb.positivity == "borderline"
    with pytest.raises(BorderlineError):
        is_positive(tb)


def test_block_positivity_examples():
    ident = StructuredOperator.identity()
    c = random_finite_coupling(np.random.default_rng(4), 3, 3, 2, 1.0)
    assert is_positive_block(BlockOperator(ident, ident, c)).proved
    k = harmonic()
    a = diag(k.shift(1))
    st_ = is_positive_block(BlockOperator(a, a, Coupling.diagonal(k.scale(-1))))
    assert st_.proved and st_.rule == "DIAGONAL_ENTRYWISE"
    bad = BlockOperator(diag(k), diag(k), Coupling.diagonal(SpectralSequence.constant(1)))
    assert bad.positivity.disproved
    assert np.linalg.eigvalsh(bad.matrix(2))[0] < 0


def test_block_positivity_agrees_with_truncations():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a1 = random_positive_operator(rng).op
        a2 = random_positive_operator(rng).op
        x = random_finite_coupling(rng, 4, 4, int(rng.integers(1, 4)), float(rng.uniform(0.1, 4)))
        t = BlockOperator(a1, a2, x)
        lo = np.linalg.eigvalsh(t.matrix(64))[0]
        if t.positivity.proved:
            assert lo >= -1e-10
        elif t.positivity.disproved:
            assert lo < 0


# -- norm, minimum modulus, closed range -------------------------------------------

def test_norm_and_min_modulus_examples():
    k = diag(harmonic())
    assert min_modulus(k) == (0, False)
    assert operator_norm(k) == (1, True)
    ident = StructuredOperator.identity()
    assert operator_norm(ident) == (1, True) and min_modulus(ident) == (1, True)
    t = diag(ONE_PLUS)
    assert operator_norm(t) == (2, True)
    assert min_modulus(t) == (1, False)


def test_norm_with_correction_matches_truncation():
    rng = np.random.default_rng(6)
    for _ in range(20):
        t = random_positive_operator(rng).op
        w = np.linalg.eigvalsh(t.matrix(300))
        assert abs(float(operator_norm(t).value) - np.max(np.abs(w))) < 1e-9
        assert float(min_modulus(t).value) <= np.min(np.abs(w)) + 1e-9


def test_closed_range_examples():
    assert not has_closed_range(diag(harmonic()))
    assert has_closed_range(diag(ONE_PLUS))
    blk = BlockOperator(diag(ONE_PLUS), diag(harmonic()))
    assert not has_closed_range(blk)
    assert has_closed_range(Coupling.finite(np.ones((2, 2))))
    assert not has_closed_range(Coupling.diagonal(harmonic()))


# -- couplings ------------------------------------------------------------------

@given(st.integers(0, 4), st.integers(1, 5), st.integers(0, 2**16))
@settings(max_examples=40)
def test_coupling_algebra_matches_matrices(s, n_extra, seed):
    rng = np.random.default_rng(seed)
    lead = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
    a = Coupling(lead, SpectralSequence.power(0, Fraction(int(rng.integers(1, 5))), 1))
    b = random_finite_coupling(rng, 3, 3, 2, 1.0)
    n = s + n_extra + 3
    am, bm = a.matrix(n, n), b.matrix(n, n)
    np.testing.assert_allclose((a + b).matrix(n, n), am + bm, atol=1e-12)
    np.testing.assert_allclose((a @ b).matrix(n, n), am @ bm, atol=1e-12)
    np.testing.assert_allclose((a.H @ a).matrix(n, n), am.conj().T @ am, atol=1e-12)
    np.testing.assert_allclose(a.H.matrix(n, n), am.conj().T, atol=1e-15)


def test_coupling_kinds():
    assert Coupling.zero().is_zero and Coupling.zero().is_finite_rank
    d = Coupling.diagonal(harmonic())
    assert d.is_compact and not d.is_finite_rank and d.kind == "diagonal"
    c = Coupling.diagonal(SpectralSequence.constant(Fraction(1, 2)))
    assert not c.is_compact
    padded = Coupling.diagonal(SpectralSequence((1, 2), (TailStrand(0),)))
    assert padded.is_finite_rank


# -- Gram products -------------------------------------------------------------------

def test_gram_off_diagonal():
    rng = np.random.default_rng(7)
    a = Coupling.diagonal(SpectralSequence.power(2, 1, 1))
    b = random_finite_coupling(rng, 3, 3, 2, 1.0) + Coupling.diagonal(SpectralSequence.constant(1))
    g = gram_general(Coupling.zero(), a, b, Coupling.zero())
    n = 30
    bm, am = b.matrix(n, n), a.matrix(n, n)
    np.testing.assert_allclose(g.a1.matrix(n), bm.conj().T @ bm, atol=1e-12)
    np.testing.assert_allclose(g.a2.matrix(n), am.conj().T @ am, atol=1e-12)
    assert g.x.is_zero


def test_gram_idempotent_and_identity():
    x = random_finite_coupling(np.random.default_rng(8), 3, 3, 2, 1.5)
    t = IdempotentOperator(x)
    g = gram_idempotent(t)
    n = 20
    m = t.matrix(n)
    np.testing.assert_allclose(g.matrix(n), m.conj().T @ m, atol=1e-12)
    ident = StructuredOperator.identity()
    gi = gram_general(ident, Coupling.zero(), Coupling.zero(), ident)
    assert gi.a1.is_identity and gi.a2.is_identity and gi.x.is_zero


def test_buckholtz_square_examples():
    zero = buckholtz_square(IdempotentOperator(Coupling.zero()))
    assert zero.a1.is_identity and zero.a2.is_identity
    odd = buckholtz_square(IdempotentOperator(odd_slot_coupling()))
    want = [1 + (Fraction(1, n) ** 2 if n % 2 else 0) for n in range(1, 41)]
    assert odd.a2.diagonal_sequence().entries(40) == want
    u, v = np.array([3.0, 4.0]) / 5, np.array([0.6, 0.0, 0.8])
    s = 1.7
    rank1 = buckholtz_square(IdempotentOperator(Coupling.finite(s * np.outer(u, v))))
    for op in (rank1.a1, rank1.a2):
        assert abs(np.linalg.eigvalsh(op.matrix(6))[-1] - (1 + s * s)) < 1e-12
