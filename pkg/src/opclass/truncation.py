"""Finite sections of structured operators and numeric oracles on them."""

from __future__ import annotations

import io
import csv
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import OpClassError, UnrepresentableProduct
from .operators import (BlockOperator, IdempotentOperator, StructuredOperator,
                        block_split, operator_norm)

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10
PINV_CUTOFF = 1e-8
CSV_HEADER = ("n", "norm", "min_modulus", "min_eigenvalue", "gap")


class EigenConvergenceError(OpClassError):
    """Eigen pairs failed the residual contract."""


class CutoffWarning(UserWarning):
    """Singular values dropped by the pseudo-inverse cutoff."""


def truncate(op: StructuredOperator, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    return op.matrix(n)


def truncate_block(t: BlockOperator | IdempotentOperator, n: int) -> np.ndarray:
    """Stacked layout: H1 coordinates first, then H2 (finite spaces capped at their dimension)."""
    if n < 1:
        raise ValueError("n must be positive")
    return t.matrix(n)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and (m.size == 0 or np.max(np.abs(m - m.conj().T)) <= tol)


def hermitian_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors, residual-checked."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if m.size:
        scale = max(float(np.linalg.norm(m, 2)), np.finfo(float).tiny)
        resid = np.linalg.norm(m @ v - v * w, axis=0)
        if np.max(resid) > RESIDUAL_TOL * scale:
            raise EigenConvergenceError(f"eigen residual {np.max(resid):.3e} exceeds contract")
    return w, v


def singular_values(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def numeric_norm(m: np.ndarray) -> float:
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def numeric_min_modulus(m: np.ndarray) -> float:
    """inf ||Mx|| over unit x; zero when M has more columns than rows."""
    m = np.asarray(m)
    if m.shape[1] > m.shape[0]:
        return 0.0
    s = singular_values(m)
    return float(s[-1]) if s.size else 0.0


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _unit(rng: np.random.Generator, k: int, n: int, complex_: bool) -> np.ndarray:
    x = rng.standard_normal((k, n))
    if complex_:
        x = x + 1j * rng.standard_normal((k, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _climb(m: np.ndarray, x: np.ndarray, sign: int, rng, complex_: bool) -> float:
    """Shrinking-step random search on the sphere, matrix-vector products only."""
    best = np.linalg.norm(m @ x)
    step = 0.5
    while step > 1e-9:
        improved = False
        for _ in range(8):
            cand = x + step * _unit(rng, 32, x.size, complex_)
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            vals = np.linalg.norm(cand @ m.T, axis=1)
            i = int(np.argmax(sign * vals))
            if sign * vals[i] > sign * best:
                best, x, improved = vals[i], cand[i], True
                break
        if not improved:
            step /= 2
    return float(best)


def brute_force_extrema(m: np.ndarray, samples: int = 10**6, seed: int = 0xA11) -> tuple[float, float]:
    """(max, min) of ||Mx|| over sampled unit vectors, refined by local search.

    Independent of the eigensolver: only products ``M x`` are evaluated.
    """
    m = np.asarray(m)
    n = m.shape[1]
    if n > 6:
        raise ValueError("brute force oracle is limited to n <= 6")
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(m) and np.any(np.imag(m))
    mt = m.T
    hi_x = lo_x = None
    hi, lo = -np.inf, np.inf
    left = samples
    while left > 0:
        k = min(left, 100_000)
        xs = _unit(rng, k, n, complex_)
        vals = np.linalg.norm(xs @ mt, axis=1)
        i, j = int(np.argmax(vals)), int(np.argmin(vals))
        if vals[i] > hi:
            hi, hi_x = vals[i], xs[i]
        if vals[j] < lo:
            lo, lo_x = vals[j], xs[j]
        left -= k
    return _climb(m, hi_x, 1, rng, complex_), _climb(m, lo_x, -1, rng, complex_)


# ---------------------------------------------------------------------------
# contraction probe
# ---------------------------------------------------------------------------

def _pinv_sqrt(a: np.ndarray) -> tuple[np.ndarray, int]:
    w, v = hermitian_eigen(a)
    if w.size and w[0] < -1e-10:
        raise ValueError("diagonal block is not positive on the truncation")
    s = np.sqrt(np.clip(w, 0, None))
    keep = s > PINV_CUTOFF
    inv = np.where(keep, 1 / np.where(keep, s, 1), 0)
    return (v * inv) @ v.conj().T, int(np.count_nonzero(~keep))


def contraction_candidate(t: BlockOperator, n: int) -> tuple[np.ndarray, int]:
    """Minimal-norm ``C`` with ``X_n = A1^{1/2} C A2^{1/2}`` on the truncation, and the dropped count."""
    n1, n2 = t.sizes(n)
    p1, d1 = _pinv_sqrt(t.a1.matrix(n1))
    p2, d2 = _pinv_sqrt(t.a2.matrix(n2))
    return p1 @ t.x.matrix(n1, n2) @ p2, d1 + d2


def contraction_factor(t: BlockOperator, n: int) -> float:
    """Evidence only: <= 1 + 1e-6 corroborates positivity, > 1 + 1e-3 suggests failure."""
    c, dropped = contraction_candidate(t, n)
    if dropped:
        warnings.warn(f"{dropped} singular square-root directions below {PINV_CUTOFF} were dropped",
                      CutoffWarning, stacklevel=2)
    return numeric_norm(c)


def contraction_evidence(factor: float) -> str:
    if factor <= 1 + 1e-6:
        return "corroborates positivity"
    if factor > 1 + 1e-3:
        return "suggests non-positivity"
    return "inconclusive"


# ---------------------------------------------------------------------------
# convergence tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    norm: float
    min_modulus: float
    min_eigenvalue: float
    gap: float

    def as_tuple(self) -> tuple:
        return (self.n, self.norm, self.min_modulus, self.min_eigenvalue, self.gap)


def structured_norm(obj) -> float:
    """Exact operator norm where the representation decides it, NaN otherwise."""
    if isinstance(obj, StructuredOperator):
        return float(operator_norm(obj).value)
    if isinstance(obj, BlockOperator):
        try:
            return float(block_split(obj).norm().value)
        except UnrepresentableProduct:
            from .classify import equal_diagonal_pattern
            pair = equal_diagonal_pattern(obj)
            if pair is None:
                return math.nan
            return float(max(s.sup_abs()[0] for s in pair))
    return math.nan


def _section(obj, n: int) -> np.ndarray:
    return truncate(obj, n) if isinstance(obj, StructuredOperator) else truncate_block(obj, n)


def convergence_table(obj, ns: Sequence[int]) -> list[ConvergenceRow]:
    ns = list(ns)
    if ns != sorted(ns):
        raise ValueError("ns must be ascending")
    if isinstance(obj, StructuredOperator) and obj.space.is_finite:
        ns = [min(n, obj.space.dim) for n in ns]
    exact = structured_norm(obj)
    rows = []
    for n in ns:
        m = _section(obj, n)
        norm = numeric_norm(m)
        mineig = float(hermitian_eigen(m)[0][0]) if is_hermitian(m) else math.nan
        rows.append(ConvergenceRow(n, norm, numeric_min_modulus(m), mineig,
                                   abs(exact - norm) if not math.isnan(exact) else math.nan))
    for a, b in zip(rows, rows[1:]):
        assert b.norm >= a.norm - 1e-12, "truncation norms must be nondecreasing"
    return rows


def rows_to_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.n] + [repr(float(v)) for v in r.as_tuple()[1:]])
    return buf.getvalue()


@dataclass(frozen=True)
class AttainmentProbe:
    norm: float
    indices: tuple[int, ...]
    maximizer: np.ndarray


def attainment_probe(obj, subset: Iterable[int], n: int) -> AttainmentProbe:
    """Norm of the truncation restricted to coordinates ``subset`` (1-based)."""
    idx = tuple(sorted(set(int(i) for i in subset)))
    if not idx:
        raise ValueError("empty coordinate subset")
    m = _section(obj, n)
    if idx[0] < 1 or idx[-1] > m.shape[1]:
        raise ValueError("subset outside the truncation")
    cols = m[:, [i - 1 for i in idx]]
    _, s, vh = np.linalg.svd(cols)
    return AttainmentProbe(float(s[0]), idx, vh[0].conj())
