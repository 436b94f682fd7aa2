import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import harmonic, hermitian
from opclass import BlockOperator, Coupling, StructuredOperator
from opclass.spectra import SpectralSequence, TailStrand
from opclass.truncation import (CSV_HEADER, CutoffWarning, attainment_probe, brute_force_extrema,
                                contraction_evidence, contraction_factor, convergence_table,
                                hermitian_eigen, numeric_min_modulus, numeric_norm, rows_to_csv,
                                singular_values, truncate, truncate_block)

IDENT = StructuredOperator.identity()
ONE_PLUS = StructuredOperator.diagonal(SpectralSequence.power(1, 1, 1))
K = StructuredOperator.diagonal(harmonic())


def test_truncate_examples():
    assert np.array_equal(truncate(IDENT, 3), np.eye(3))
    np.testing.assert_array_equal(truncate(K, 2), np.diag([1, 0.5]))
    c = Coupling.finite(np.diag([0.3, 0.4]))
    m = truncate_block(BlockOperator(IDENT, IDENT, c), 2)
    assert m.shape == (4, 4)
    np.testing.assert_array_equal(m[:2, 2:], np.diag([0.3, 0.4]))
    np.testing.assert_array_equal(m[2:, :2], np.diag([0.3, 0.4]))


def test_eigen_examples():
    w, _ = hermitian_eigen(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(w, [1, 3])
    w, _ = hermitian_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
    u, v = np.array([1.0, 2.0, 2.0]), np.array([3.0, 4.0])
    s = singular_values(np.outer(u, v))
    np.testing.assert_allclose(s, [15, 0], atol=1e-12)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_norm_min_modulus_examples():
    assert (numeric_norm(np.eye(4)), numeric_min_modulus(np.eye(4))) == pytest.approx((1, 1))
    d = np.diag([1, 1 / 2, 1 / 3])
    assert (numeric_norm(d), numeric_min_modulus(d)) == pytest.approx((1, 1 / 3))
    m = truncate(ONE_PLUS, 100)
    assert numeric_norm(m) == pytest.approx(2.0)
    assert numeric_min_modulus(m) == pytest.approx(1.01)


def test_brute_force_examples():
    assert brute_force_extrema(np.eye(2), samples=2000) == pytest.approx((1, 1), abs=1e-6)
    assert brute_force_extrema(np.diag([2.0, 1.0]), samples=2000) == pytest.approx((2, 1), abs=1e-4)
    j = np.array([[1.0, 1.0], [0.0, 1.0]])
    s = singular_values(j)
    assert s[0] == pytest.approx((1 + math.sqrt(5)) / 2)
    assert brute_force_extrema(j, samples=2000) == pytest.approx((s[0], s[-1]), abs=1e-4)


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_extrema(np.eye(7))


@given(st.integers(1, 6), st.integers(0, 2**20))
@settings(max_examples=25)
def test_eigen_properties(n, seed):
    rng = np.random.default_rng(seed)
    m = hermitian(rng, n, 2.0)
    w, v = hermitian_eigen(m)
    np.testing.assert_allclose(m @ v, v * w, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(np.sort(np.abs(w))[::-1], singular_values(m), atol=1e-10)


def test_contraction_examples():
    c = np.diag([0.5, 0.25, 0.9])
    t = BlockOperator(IDENT, IDENT, Coupling.finite(c))
    assert contraction_factor(t, 10) == pytest.approx(0.9)
    k = harmonic()
    a = StructuredOperator.diagonal(k.shift(1))
    pattern = BlockOperator(a, a, Coupling.diagonal(k.scale(-1)))
    f = contraction_factor(pattern, 50)
    assert f <= 1 + 1e-6 and contraction_evidence(f) == "corroborates positivity"
    bad = BlockOperator(K, K, Coupling.diagonal(SpectralSequence.constant(1)))
    assert contraction_factor(bad, 10) > 1 + 1e-3


def test_contraction_cutoff_warning():
    z = StructuredOperator.diagonal(SpectralSequence((0,), (TailStrand(1),)))
    t = BlockOperator(z, IDENT)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        contraction_factor(t, 5)
    assert any(issubclass(w.category, CutoffWarning) for w in caught)


def test_convergence_examples():
    rows = convergence_table(IDENT, [2, 4, 8])
    assert all(r.gap == 0 for r in rows)
    rows = convergence_table(ONE_PLUS, [4, 64, 512])
    assert all(r.gap == 0 and r.norm == 2.0 for r in rows)
    t = BlockOperator(IDENT, IDENT, Coupling.diagonal(harmonic()))
    for r in convergence_table(t, [1, 8, 32]):
        assert r.norm == pytest.approx(2.0)


def test_convergence_requires_ascending():
    with pytest.raises(ValueError):
        convergence_table(IDENT, [8, 4])


def test_csv_header():
    text = rows_to_csv(convergence_table(ONE_PLUS, [4, 8]))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) == "n,norm,min_modulus,min_eigenvalue,gap"
    assert len(lines) == 3 and lines[1].startswith("4,")


def test_attainment_examples():
    assert attainment_probe(IDENT, [1, 3, 4], 6).norm == pytest.approx(1)
    assert attainment_probe(K, [5], 8).norm == pytest.approx(1 / 5)
    assert attainment_probe(ONE_PLUS, [2, 3], 8).norm == pytest.approx(1.5)
    with pytest.raises(ValueError):
        attainment_probe(K, [], 8)
