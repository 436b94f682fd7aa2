"""Structured operators on coordinatized Hilbert spaces.

Every operator here is "finite leading block plus diagonal tail": the first
``N`` coordinates carry an arbitrary matrix, every later coordinate ``e_n``
is scaled by an exact sequence entry.  Tails are exact
(:mod:`opclass.spectra`); leading blocks are floating point and every
decision that depends on one of their eigenvalues uses the tolerance
``TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (BorderlineError, FiniteSpaceError, NonCompactCoupling,
                     SpaceMismatch, UnrepresentableProduct)
from .spectra import INFINITE, SpectralSequence, exact

TOL = 1e-10
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SpaceDim:
    dim: int | None = None

    def __post_init__(self):
        if self.dim is not None and self.dim < 1:
            raise ValueError("finite spaces need a positive dimension")

    @classmethod
    def finite(cls, n: int) -> "SpaceDim":
        return cls(int(n))

    @property
    def is_finite(self) -> bool:
        return self.dim is not None

    def __str__(self) -> str:
        return "infinite" if self.dim is None else f"finite({self.dim})"


INFINITE_SPACE = SpaceDim(None)


class Extremum(NamedTuple):
    value: Fraction | float
    attained: bool


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return np.zeros((0, 0) if a.ndim != 2 else a.shape, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return a.copy()


def _pad(m: np.ndarray, rows: int, cols: int) -> np.ndarray:
    out = np.zeros((rows, cols), dtype=complex)
    r, c = min(rows, m.shape[0]), min(cols, m.shape[1])
    out[:r, :c] = m[:r, :c]
    return out


def _is_hermitian(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and (m.size == 0 or np.max(np.abs(m - m.conj().T)) <= HERMITIAN_TOL)


def _offdiag_zero(m: np.ndarray) -> bool:
    return m.size == 0 or not np.any(m - np.diag(np.diag(m)))


def _cmp(value, t, tol: float = TOL) -> int:
    """Sign of value - t; floats within ``tol`` count as equal."""
    if isinstance(value, Fraction):
        d = value - t
        return (d > 0) - (d < 0)
    d = value - float(t)
    if abs(d) <= tol:
        return 0
    return 1 if d > 0 else -1


# ---------------------------------------------------------------------------
# couplings (general bounded maps in the family)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Coupling:
    """``X = lead + diag(x_n)`` for n beyond the leading block.

    ``lead`` is an ``r x c`` complex matrix on the leading coordinates.  When
    ``diag`` is present the lead is square (``s x s``) and every ``e_n`` with
    ``n > s`` maps to ``x_n e_n``; entries of ``diag`` at ``n <= s`` are
    ignored.  ``diag is None`` means a finite matrix.
    """

    lead: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    diag: SpectralSequence | None = None

    def __post_init__(self):
        lead = _as_matrix(self.lead)
        if self.diag is not None:
            if self.diag.is_finite:
                raise ValueError("diagonal coupling sequences must be infinite")
            s = max(lead.shape)
            lead = _pad(lead, s, s)
        object.__setattr__(self, "lead", lead)

    @classmethod
    def zero(cls) -> "Coupling":
        return cls()

    @classmethod
    def finite(cls, matrix) -> "Coupling":
        return cls(_as_matrix(matrix), None)

    @classmethod
    def diagonal(cls, seq: SpectralSequence) -> "Coupling":
        if seq.is_finite:
            return cls(np.diag([complex(float(v)) for v in seq.head]), None)
        return cls(np.zeros((0, 0), complex), seq)

    @property
    def split(self) -> int:
        return max(self.lead.shape) if self.lead.size else 0

    @property
    def tail(self) -> SpectralSequence | None:
        return None if self.diag is None else self.diag.drop(self.split)

    def expanded(self, s: int) -> "Coupling":
        """Same operator with a square leading block of size ``max(s, split)``."""
        s = max(s, self.split)
        lead = _pad(self.lead, s, s)
        if self.diag is not None and s > self.split:
            vals = self.diag.entries_float(s)
            idx = np.arange(self.split, s)
            lead[idx, idx] = vals[self.split:s]
        return Coupling(lead, self.diag)

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        if self.diag is None:
            return _pad(self.lead, rows, cols)
        return self.expanded(max(rows, cols)).lead[:rows, :cols].copy()

    # -- structure ----------------------------------------------------------

    @property
    def is_compact(self) -> bool:
        return self.diag is None or all(l == 0 for l in self.diag.accumulation_points())

    @property
    def is_finite_rank(self) -> bool:
        return self.diag is None or self.tail.count_nonzero() != INFINITE

    @property
    def is_zero(self) -> bool:
        return not np.any(self.lead) and (self.diag is None or self.tail.is_identically(0))

    @property
    def is_diagonal(self) -> bool:
        return _offdiag_zero(self.lead) if self.lead.shape[0] == self.lead.shape[1] else not np.any(self.lead)

    @property
    def kind(self) -> str:
        if self.is_zero:
            return "zero"
        if self.is_finite_rank:
            return "finite"
        return "diagonal" if self.is_diagonal else "mixed"

    def has_closed_range(self) -> bool:
        if self.diag is None:
            return True
        return all(s.limit != 0 or s.is_identically(0) for s in self.diag.strands)

    def finite_form(self) -> "Coupling":
        """Equivalent pure matrix; requires finite rank."""
        if self.diag is None:
            return self
        if not self.is_finite_rank:
            raise UnrepresentableProduct("coupling has infinite rank")
        stable = self.tail.sign_stable(0)
        e = self.expanded(self.split + len(stable.head))
        return Coupling(e.lead, None)

    def diagonal_sequence(self) -> SpectralSequence:
        """Exact x_n for a real diagonal coupling between infinite spaces."""
        if not self.is_diagonal or np.any(np.diag(self.lead).imag):
            raise ValueError("coupling is not real diagonal")
        s = self.split
        head = [exact(float(v)) for v in np.diag(self.lead).real[:s]]
        base = self.diag if self.diag is not None else SpectralSequence.constant(0)
        return base.with_head(head)

    def abs_sq_sequence(self) -> SpectralSequence:
        """Exact |x_n|^2 for a diagonal coupling between infinite spaces."""
        if not self.is_diagonal:
            raise ValueError("coupling is not diagonal")
        s = self.split
        d = np.diag(self.lead)[:s]
        head = [exact(float(v.real)) ** 2 + exact(float(v.imag)) ** 2 for v in d]
        base = self.diag if self.diag is not None else SpectralSequence.constant(0)
        return (base * base).with_head(head)

    def norm(self) -> float:
        lead = float(np.linalg.norm(self.lead, 2)) if self.lead.size else 0.0
        if self.diag is None:
            return lead
        return max(lead, float(self.tail.sup_abs()[0]))

    # -- algebra ------------------------------------------------------------

    def adjoint(self) -> "Coupling":
        return Coupling(self.lead.conj().T, self.diag)

    @property
    def H(self) -> "Coupling":
        return self.adjoint()

    def scale(self, lam) -> "Coupling":
        lam = exact(lam)
        return Coupling(self.lead * float(lam), None if self.diag is None else self.diag.scale(lam))

    def __neg__(self) -> "Coupling":
        return self.scale(-1)

    def __add__(self, other: "Coupling") -> "Coupling":
        if self.diag is None and other.diag is None:
            r = max(self.lead.shape[0], other.lead.shape[0])
            c = max(self.lead.shape[1], other.lead.shape[1])
            return Coupling(_pad(self.lead, r, c) + _pad(other.lead, r, c), None)
        s = max(self.split, other.split)
        a, b = self.expanded(s), other.expanded(s)
        if a.diag is None:
            diag = b.diag
        elif b.diag is None:
            diag = a.diag
        else:
            diag = a.diag + b.diag
        return Coupling(a.lead + b.lead, diag)

    def __sub__(self, other: "Coupling") -> "Coupling":
        return self + (-other)

    def __matmul__(self, other: "Coupling") -> "Coupling":
        if self.diag is None and other.diag is None:
            inner = max(self.lead.shape[1], other.lead.shape[0])
            a = _pad(self.lead, self.lead.shape[0], inner)
            b = _pad(other.lead, inner, other.lead.shape[1])
            return Coupling(a @ b, None)
        s = max(self.split, other.split)
        a, b = self.expanded(s), other.expanded(s)
        diag = None if a.diag is None or b.diag is None else a.diag * b.diag
        return Coupling(a.lead @ b.lead, diag)

    def fitted(self, rows: SpaceDim, cols: SpaceDim) -> "Coupling":
        """Restrict to the given spaces; diagonal parts become matrices on finite sides."""
        if not rows.is_finite and not cols.is_finite:
            return self
        if self.diag is None:
            r, c = self.lead.shape
            if (rows.is_finite and r > rows.dim and np.any(self.lead[rows.dim:, :])) or \
               (cols.is_finite and c > cols.dim and np.any(self.lead[:, cols.dim:])):
                raise SpaceMismatch("coupling matrix exceeds a finite space")
            return Coupling(self.lead[: rows.dim if rows.is_finite else r, : cols.dim if cols.is_finite else c], None)
        k = min(d.dim for d in (rows, cols) if d.is_finite)
        lead = self.expanded(k).lead
        r = rows.dim if rows.is_finite else lead.shape[0]
        c = cols.dim if cols.is_finite else lead.shape[1]
        return Coupling(_pad(lead[:max(k, r if rows.is_finite else lead.shape[0]),
                                  :max(k, c if cols.is_finite else lead.shape[1])], r, c), None)

    def __repr__(self) -> str:
        return f"Coupling(kind={self.kind}, lead={self.lead.shape}, diag={self.diag!r})"


# ---------------------------------------------------------------------------
# self-adjoint structured operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StructuredOperator:
    """Self-adjoint ``diag(seq) + corr`` with ``corr`` on the first ``N`` coordinates.

    ``positivity`` is one of ``"positive"``, ``"not_positive"`` or
    ``"borderline"`` and is fixed at construction; pass ``known_positive``
    when positivity holds structurally (Gram products).
    """

    diag: SpectralSequence
    corr: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    space: SpaceDim = INFINITE_SPACE
    known_positive: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        corr = _as_matrix(self.corr)
        if corr.shape[0] != corr.shape[1]:
            raise ValueError("correction must be square")
        if not _is_hermitian(corr):
            raise ValueError("correction must be Hermitian")
        corr = (corr + corr.conj().T) / 2
        n = corr.shape[0]
        diag = self.diag
        if self.space.is_finite:
            if not diag.is_finite or len(diag.head) != self.space.dim:
                raise SpaceMismatch(f"finite space {self.space} needs a finite diagonal of that length")
            if n > self.space.dim:
                raise SpaceMismatch("correction larger than the space")
        else:
            if diag.is_finite:
                raise SpaceMismatch("infinite space needs a sequence with tail strands")
            diag = diag.padded(n)
        object.__setattr__(self, "corr", corr)
        object.__setattr__(self, "diag", diag)
        eigs, exact_lead = self._lead_spectrum()
        object.__setattr__(self, "_lead_eigs", eigs)
        object.__setattr__(self, "_lead_exact", exact_lead)
        object.__setattr__(self, "positivity", self._positivity())

    # -- constructors -------------------------------------------------------

    @classmethod
    def diagonal(cls, seq: SpectralSequence, space: SpaceDim | None = None) -> "StructuredOperator":
        if space is None:
            space = SpaceDim.finite(len(seq.head)) if seq.is_finite else INFINITE_SPACE
        return cls(seq, np.zeros((0, 0), complex), space)

    @classmethod
    def scalar(cls, alpha, space: SpaceDim = INFINITE_SPACE) -> "StructuredOperator":
        if space.is_finite:
            return cls(SpectralSequence.finite([exact(alpha)] * space.dim), space=space)
        return cls(SpectralSequence.constant(alpha), space=space)

    @classmethod
    def identity(cls, space: SpaceDim = INFINITE_SPACE) -> "StructuredOperator":
        return cls.scalar(1, space)

    @classmethod
    def zero(cls, space: SpaceDim = INFINITE_SPACE) -> "StructuredOperator":
        return cls.scalar(0, space)

    @classmethod
    def finite(cls, matrix) -> "StructuredOperator":
        m = _as_matrix(matrix)
        return cls.from_lead(m, None, SpaceDim.finite(m.shape[0]))

    @classmethod
    def from_lead(cls, lead, tail: SpectralSequence | None, space: SpaceDim = INFINITE_SPACE,
                  known_positive: bool | None = None) -> "StructuredOperator":
        """Operator with leading block ``lead`` followed by the entries of ``tail``."""
        lead = _as_matrix(lead)
        if not _is_hermitian(lead):
            raise UnrepresentableProduct("leading block is not Hermitian")
        d = np.diag(lead).real
        head = tuple(exact(float(v)) for v in d)
        corr = lead.copy()
        corr[np.diag_indices_from(corr)] = 0
        if tail is None:
            seq = SpectralSequence.finite(head)
        else:
            seq = SpectralSequence(head + tail.head, tail.strands)
        if not _offdiag_zero(corr):
            pass
        elif corr.size:
            corr = np.zeros((0, 0), complex)
        return cls(seq, corr, space, known_positive)

    @classmethod
    def from_coupling(cls, c: Coupling, space: SpaceDim = INFINITE_SPACE,
                      known_positive: bool | None = None) -> "StructuredOperator":
        if space.is_finite:
            c = c.fitted(space, space)
            lead = _pad(c.lead, space.dim, space.dim)
            return cls.from_lead(lead, None, space, known_positive)
        if c.diag is None:
            s = c.split
            return cls.from_lead(_pad(c.lead, s, s), SpectralSequence.constant(0), space, known_positive)
        return cls.from_lead(c.lead, c.tail, space, known_positive)

    # -- structure ----------------------------------------------------------

    @property
    def N(self) -> int:
        return self.corr.shape[0]

    @property
    def lead(self) -> np.ndarray:
        return np.diag([complex(float(h)) for h in self.diag.head[:self.N]]) + self.corr

    @property
    def tail(self) -> SpectralSequence:
        return self.diag.drop(self.N)

    @property
    def lead_eigenvalues(self) -> tuple:
        """Exact Fractions when the correction is diagonal, floats otherwise."""
        return self._lead_eigs

    @property
    def lead_is_exact(self) -> bool:
        return self._lead_exact

    @property
    def is_diagonal(self) -> bool:
        return _offdiag_zero(self.corr)

    def diagonal_sequence(self) -> SpectralSequence:
        if not self.is_diagonal:
            raise ValueError("operator has an off-diagonal correction")
        if not self.N:
            return self.diag
        return self.diag.with_head([self.diag.head[i] + exact(float(self.corr[i, i].real)) for i in range(self.N)])

    @property
    def is_identity(self) -> bool:
        """Syntactic test: unit diagonal, no tail terms, no correction."""
        return (not np.any(self.corr) and all(h == 1 for h in self.diag.head)
                and all(s.limit == 1 and not s.terms for s in self.diag.strands))

    def _lead_spectrum(self):
        if not self.N:
            return (), True
        if self.is_diagonal:
            vals = sorted(self.diag.head[i] + exact(float(self.corr[i, i].real)) for i in range(self.N))
            return tuple(vals), True
        return tuple(float(v) for v in np.linalg.eigvalsh(self.lead)), False

    def _positivity(self) -> str:
        if self.known_positive:
            return "positive"
        if self.tail.count_relative(0, "below"):
            return "not_positive"
        if not self._lead_eigs:
            return "positive"
        lo = self._lead_eigs[0]
        c = _cmp(lo, 0)
        if c < 0:
            return "not_positive"
        if c == 0 and not self._lead_exact:
            return "borderline"
        return "positive"

    def matrix(self, n: int) -> np.ndarray:
        if self.space.is_finite and n > self.space.dim:
            raise ValueError(f"truncation size {n} exceeds dimension {self.space.dim}")
        N = self.N
        if n <= N:
            return self.lead[:n, :n].copy()
        out = np.zeros((n, n), dtype=complex)
        out[:N, :N] = self.lead
        vals = self.diag.entries_float(n)
        idx = np.arange(N, n)
        out[idx, idx] = vals[N:]
        return out

    def as_coupling(self) -> Coupling:
        if self.space.is_finite:
            return Coupling(self.matrix(self.space.dim), None)
        return Coupling(self.lead, self.diag)

    # -- algebra ------------------------------------------------------------

    def _check_space(self, other: "StructuredOperator"):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def __add__(self, other: "StructuredOperator") -> "StructuredOperator":
        return add(self, other)

    def __sub__(self, other: "StructuredOperator") -> "StructuredOperator":
        return add(self, scale(other, -1))

    def __neg__(self) -> "StructuredOperator":
        return scale(self, -1)

    def __matmul__(self, other: "StructuredOperator") -> "StructuredOperator":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"StructuredOperator(space={self.space}, N={self.N}, diag={self.diag!r})"


def add(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    a._check_space(b)
    if a.space.is_finite:
        return StructuredOperator.from_lead(a.matrix(a.space.dim) + b.matrix(b.space.dim), None, a.space)
    n = max(a.N, b.N)
    corr = _pad(a.corr, n, n) + _pad(b.corr, n, n)
    return StructuredOperator(a.diag + b.diag, corr, a.space)


def scale(a: StructuredOperator, lam) -> StructuredOperator:
    lam = exact(lam)
    return StructuredOperator(a.diag.scale(lam), a.corr * float(lam), a.space)


def multiply(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    """Product of commuting structured operators (squares always qualify)."""
    a._check_space(b)
    if a.space.is_finite:
        m = a.matrix(a.space.dim) @ b.matrix(b.space.dim)
        return StructuredOperator.from_lead(m, None, a.space)
    n = max(a.N, b.N)
    la = _pad(a.lead, n, n) if a.N == n else a.as_coupling().expanded(n).lead
    lb = _pad(b.lead, n, n) if b.N == n else b.as_coupling().expanded(n).lead
    prod = la @ lb
    if not _is_hermitian(prod):
        raise UnrepresentableProduct("product of non-commuting self-adjoint operators is not self-adjoint")
    if not n:
        return StructuredOperator(a.diag * b.diag, space=a.space)
    da, db = a.diag.padded(n), b.diag.padded(n)
    tail = da.drop(n) * db.drop(n)
    return StructuredOperator.from_lead(prod, tail, a.space)


def essential_spectrum(op: StructuredOperator) -> frozenset[Fraction]:
    """Strand limits; the finite-rank correction never matters (Weyl)."""
    if op.space.is_finite:
        raise FiniteSpaceError("essential spectrum is empty/undefined on a finite-dimensional space")
    return op.diag.accumulation_points()


def is_positive(op: StructuredOperator) -> bool:
    if op.positivity == "borderline":
        raise BorderlineError("leading-block eigenvalue within tolerance of 0", op.lead_eigenvalues[0])
    return op.positivity == "positive"


def operator_norm(op: StructuredOperator) -> Extremum:
    return spectral_split(op).norm()


def min_modulus(op: StructuredOperator) -> Extremum:
    return spectral_split(op).min_modulus()


def has_closed_range(op) -> bool:
    """Closed range for structured operators, diagonal blocks and couplings."""
    if isinstance(op, BlockOperator):
        if not op.x.is_zero:
            raise ValueError("closed-range test for blocks needs a zero coupling")
        return has_closed_range(op.a1) and has_closed_range(op.a2)
    if isinstance(op, Coupling):
        return op.has_closed_range()
    if op.space.is_finite:
        return True
    return all(s.limit != 0 or s.is_identically(0) for s in op.diag.strands)


# ---------------------------------------------------------------------------
# spectral splits: finite Hermitian block + exact diagonal tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralSplit:
    """Self-adjoint operator equal to ``lead`` (dense) direct-sum diagonal ``tails``.

    ``sizes`` records how the leading block splits across components and
    ``spaces`` whether each tail is finite.
    """

    lead: np.ndarray
    tails: tuple[SpectralSequence, ...]
    exact_eigs: tuple[Fraction, ...] | None = None
    sizes: tuple[int, ...] = ()

    def eigen(self):
        """Lead eigenvalues and eigenvectors; exact values come in diagonal order."""
        if self.lead.shape[0] == 0:
            return (), np.zeros((0, 0), complex)
        if self.exact_eigs is not None:
            return self.exact_eigs, np.eye(self.lead.shape[0], dtype=complex)
        w, v = np.linalg.eigh(self.lead)
        return tuple(float(x) for x in w), v

    @property
    def lead_eigenvalues(self) -> tuple:
        return self.eigen()[0]

    def essential_spectrum(self) -> frozenset[Fraction]:
        out: set[Fraction] = set()
        for t in self.tails:
            out |= t.accumulation_points()
        return frozenset(out)

    @property
    def is_finite_dimensional(self) -> bool:
        return all(t.is_finite for t in self.tails)

    def count(self, t, side: str, tol: float = TOL) -> int | float:
        want = {"below": -1, "above": 1, "equal": 0}[side]
        total: int | float = sum(1 for v in self.lead_eigenvalues if _cmp(v, t, tol) == want)
        for tail in self.tails:
            total += tail.count_relative(t, side)
        return total

    def _points(self):
        return list(self.lead_eigenvalues)

    def norm(self) -> Extremum:
        cands = [Extremum(abs(v), True) for v in self._points()]
        cands += [Extremum(*t.sup_abs()) for t in self.tails if t.head or t.strands]
        return _pick(cands, max)

    def min_modulus(self) -> Extremum:
        cands = [Extremum(abs(v), True) for v in self._points()]
        cands += [Extremum(*t.inf_abs()) for t in self.tails if t.head or t.strands]
        return _pick(cands, min)

    def minimum(self) -> Extremum:
        cands = [Extremum(v, True) for v in self._points()]
        cands += [Extremum(*t.infimum()) for t in self.tails if t.head or t.strands]
        return _pick(cands, min)


def _pick(cands: list[Extremum], fn) -> Extremum:
    if not cands:
        return Extremum(Fraction(0), True)
    best = fn(float(c.value) for c in cands)
    close = [c for c in cands if abs(float(c.value) - best) <= TOL]
    exact_close = [c for c in close if isinstance(c.value, Fraction)]
    value = fn(c.value for c in exact_close) if exact_close and all(
        isinstance(c.value, Fraction) for c in close) else best
    return Extremum(value, any(c.attained for c in close))


def spectral_split(op: StructuredOperator) -> SpectralSplit:
    exact_eigs = op.diagonal_sequence().head[:op.N] if op.is_diagonal else None
    return SpectralSplit(op.lead, (op.tail,), exact_eigs, (op.N,))


# ---------------------------------------------------------------------------
# 2x2 block operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityStatus:
    state: str  # proved_positive | proved_not_positive | numeric_only
    rule: str
    min_eigenvalue: float | None = None
    n: int | None = None

    @property
    def proved(self) -> bool:
        return self.state == "proved_positive"

    @property
    def disproved(self) -> bool:
        return self.state == "proved_not_positive"


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """``[[a1, x], [x*, a2]]`` on ``H1 (+) H2``; the (2,1) entry is always ``x*``."""

    a1: StructuredOperator
    a2: StructuredOperator
    x: Coupling = field(default_factory=Coupling.zero)
    n_probe: int = field(default=64, repr=False)
    known_positive: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "x", self.x.fitted(self.a1.space, self.a2.space))
        if self.known_positive:
            status = PositivityStatus("proved_positive", "GRAM_STRUCTURE")
        else:
            status = is_positive_block(self, self.n_probe)
        object.__setattr__(self, "positivity", status)

    @property
    def spaces(self) -> tuple[SpaceDim, SpaceDim]:
        return self.a1.space, self.a2.space

    def sizes(self, n: int) -> tuple[int, int]:
        return tuple(n if not s.is_finite else min(n, s.dim) for s in self.spaces)

    def matrix(self, n: int) -> np.ndarray:
        n1, n2 = self.sizes(n)
        xm = self.x.matrix(n1, n2)
        return np.block([[self.a1.matrix(n1), xm], [xm.conj().T, self.a2.matrix(n2)]])

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.a1 + other.a1, self.a2 + other.a2, self.x + other.x)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.a1 - other.a1, self.a2 - other.a2, self.x - other.x)

    def scale(self, lam) -> "BlockOperator":
        return BlockOperator(scale(self.a1, lam), scale(self.a2, lam), self.x.scale(lam))

    @classmethod
    def scalar(cls, alpha, spaces=(INFINITE_SPACE, INFINITE_SPACE)) -> "BlockOperator":
        return cls(StructuredOperator.scalar(alpha, spaces[0]), StructuredOperator.scalar(alpha, spaces[1]))


def block_split(t: BlockOperator) -> SpectralSplit:
    """Split of a block with finite-rank coupling into lead + two tails."""
    if not t.x.is_finite_rank:
        raise UnrepresentableProduct("coupling has infinite rank; no finite leading block exists")
    x = t.x.finite_form()
    r, c = x.lead.shape if x.lead.size else (0, 0)
    sizes = []
    leads = []
    tails = []
    for op, need in ((t.a1, r), (t.a2, c)):
        if op.space.is_finite:
            n = op.space.dim
            leads.append(op.matrix(n))
            tails.append(SpectralSequence.finite(()))
        else:
            n = max(op.N, need)
            leads.append(op.as_coupling().expanded(n).lead if n > op.N else op.lead)
            tails.append(op.diag.drop(n))
        sizes.append(n)
    xm = _pad(x.lead, sizes[0], sizes[1])
    lead = np.block([[leads[0], xm], [xm.conj().T, leads[1]]]) if sum(sizes) else np.zeros((0, 0), complex)
    exact_eigs = None
    if x.is_zero and t.a1.is_diagonal and t.a2.is_diagonal:
        exact_eigs = tuple(
            [t.a1.diagonal_sequence().entry(i + 1) for i in range(sizes[0])]
            + [t.a2.diagonal_sequence().entry(i + 1) for i in range(sizes[1])])
    return SpectralSplit(lead, tuple(tails), exact_eigs, tuple(sizes))


def essential_spectrum_block(t: BlockOperator) -> frozenset[Fraction]:
    if not t.x.is_compact:
        raise NonCompactCoupling("coupling is not compact; the Weyl reduction does not apply")
    out: set[Fraction] = set()
    for op in (t.a1, t.a2):
        if not op.space.is_finite:
            out |= essential_spectrum(op)
    return frozenset(out)


def _diagonal_pair_positive(t: BlockOperator) -> bool:
    """Exact test of |x_n|^2 <= a_n b_n for simultaneously diagonal blocks."""
    d1, d2 = t.a1.diagonal_sequence(), t.a2.diagonal_sequence()
    if t.a1.space.is_finite or t.a2.space.is_finite:
        k = min(s.dim for s in t.spaces if s.is_finite)
        xm = np.diag(t.x.matrix(k, k))
        for i in range(k):
            x2 = exact(float(xm[i].real)) ** 2 + exact(float(xm[i].imag)) ** 2
            if x2 > d1.entry(i + 1) * d2.entry(i + 1):
                return False
        return True
    gap = d1 * d2 - t.x.abs_sq_sequence()
    return gap.count_relative(0, "below") == 0


def is_positive_block(t: BlockOperator, n_probe: int = 64) -> PositivityStatus:
    if t.a1.positivity == "not_positive" or t.a2.positivity == "not_positive":
        return PositivityStatus("proved_not_positive", "COMPONENT_NOT_POSITIVE")
    if "borderline" in (t.a1.positivity, t.a2.positivity):
        m = t.matrix(n_probe)
        return PositivityStatus("numeric_only", "COMPONENT_BORDERLINE",
                                float(np.linalg.eigvalsh(m)[0]), n_probe)
    if t.a1.is_diagonal and t.a2.is_diagonal and t.x.is_diagonal:
        ok = _diagonal_pair_positive(t)
        return PositivityStatus("proved_positive" if ok else "proved_not_positive", "DIAGONAL_ENTRYWISE")
    if t.a1.is_identity and t.a2.is_identity:
        lead = float(np.linalg.norm(t.x.lead, 2)) if t.x.lead.size else 0.0
        tail_ok = t.x.diag is None or t.x.tail.sup_abs()[0] <= 1
        if lead <= 1 + TOL and tail_ok:
            return PositivityStatus("proved_positive", "CONTRACTION_COUPLING")
        return PositivityStatus("proved_not_positive", "CONTRACTION_COUPLING")
    if t.x.is_finite_rank:
        sp = block_split(t)
        lo = float(np.linalg.eigvalsh(sp.lead)[0]) if sp.lead.size else 0.0
        if lo >= TOL or not sp.lead.size:
            return PositivityStatus("proved_positive", "FINITE_RANK_SPLIT", lo)
        if lo < -TOL:
            return PositivityStatus("proved_not_positive", "FINITE_RANK_SPLIT", lo)
        return PositivityStatus("numeric_only", "FINITE_RANK_SPLIT", lo)
    m = t.matrix(n_probe)
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < -TOL:
        return PositivityStatus("proved_not_positive", "TRUNCATION_DISPROOF", lo, n_probe)
    return PositivityStatus("numeric_only", "TRUNCATION_EVIDENCE", lo, n_probe)


# ---------------------------------------------------------------------------
# general 2x2 entries, Gram products, idempotents
# ---------------------------------------------------------------------------

def _as_coupling(op) -> Coupling:
    return op.as_coupling() if isinstance(op, StructuredOperator) else op


def gram_general(a11, a12, a21, a22, spaces: Sequence[SpaceDim] = (INFINITE_SPACE, INFINITE_SPACE)) -> BlockOperator:
    """``T*T`` for ``T = [[a11, a12], [a21, a22]]`` with entries in the family."""
    s1, s2 = spaces
    a11, a12, a21, a22 = (_as_coupling(a) for a in (a11, a12, a21, a22))
    g11 = a11.H @ a11 + a21.H @ a21
    g12 = a11.H @ a12 + a21.H @ a22
    g22 = a12.H @ a12 + a22.H @ a22
    return BlockOperator(StructuredOperator.from_coupling(g11, s1, known_positive=True),
                         StructuredOperator.from_coupling(g22, s2, known_positive=True),
                         g12, known_positive=True)


def gram_block(t: BlockOperator) -> BlockOperator:
    """``T*T = T^2`` for a self-adjoint block."""
    return gram_general(t.a1, t.x, t.x.H, t.a2, t.spaces)


@dataclass(frozen=True, eq=False)
class IdempotentOperator:
    """``[[I, X], [0, 0]]`` on ``R(T) (+) N(T*)``."""

    x: Coupling
    range_dim: SpaceDim = INFINITE_SPACE
    cokernel_dim: SpaceDim = INFINITE_SPACE

    def __post_init__(self):
        object.__setattr__(self, "x", self.x.fitted(self.range_dim, self.cokernel_dim))

    @property
    def spaces(self) -> tuple[SpaceDim, SpaceDim]:
        return self.range_dim, self.cokernel_dim

    def sizes(self, n: int) -> tuple[int, int]:
        return tuple(n if not s.is_finite else min(n, s.dim) for s in self.spaces)

    def matrix(self, n: int) -> np.ndarray:
        n1, n2 = self.sizes(n)
        return np.block([[np.eye(n1), self.x.matrix(n1, n2)],
                         [np.zeros((n2, n1)), np.zeros((n2, n2))]]).astype(complex)


def gram_idempotent(t: IdempotentOperator) -> BlockOperator:
    """``T*T = [[I, X], [X*, X*X]]``."""
    ident = StructuredOperator.identity(t.range_dim)
    zero1 = Coupling.zero()
    return gram_general(ident, t.x, zero1, zero1, t.spaces)


def buckholtz_square(t: IdempotentOperator) -> BlockOperator:
    """``(T + T* - I)^2 = diag(I + XX*, I + X*X)``."""
    x = t.x
    a1 = StructuredOperator.identity(t.range_dim).as_coupling() + x @ x.H
    a2 = StructuredOperator.identity(t.cokernel_dim).as_coupling() + x.H @ x
    return BlockOperator(StructuredOperator.from_coupling(a1, t.range_dim, known_positive=True),
                         StructuredOperator.from_coupling(a2, t.cokernel_dim, known_positive=True),
                         Coupling.zero(), known_positive=True)


def buckholtz_operator_matrix(t: IdempotentOperator, n: int) -> np.ndarray:
    m = t.matrix(n)
    return m + m.conj().T - np.eye(m.shape[0])
