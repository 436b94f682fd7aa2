"""Exact arithmetic for eventually-convergent real sequences.

A :class:`SpectralSequence` is a finite head of exact rationals followed by
one or more *strands* enumerated round-robin.  Every strand has the closed
form

    entry(m) = limit + sum_i sign_i * c_i / prod_j (a_ij * m + b_ij) ** p_ij

with integer ``a >= 1``, ``a + b >= 1`` and ``p >= 1``, so every factor is
at least ``m`` for ``m >= 1``.  The family is closed under sums, products and
affine re-indexing ``m -> a*m + b``, which is what round-robin realignment
needs.

Sign questions (``entry(m) < t``?) reduce to the sign of an integer
polynomial in ``m``; beyond a Cauchy root bound that sign is constant, so
counts below/above a threshold are decided exactly by finite enumeration.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

INFINITE = math.inf

_SIDES = ("below", "above", "equal")


def exact(x) -> Fraction:
    """Convert a number (or a string such as ``"1/3"``) to a Fraction.

    Floats are read through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Real):
        xf = float(x)
        if not math.isfinite(xf):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(xf))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact number")


# ---------------------------------------------------------------------------
# integer polynomials, coefficient lists low -> high
# ---------------------------------------------------------------------------

def _ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(p, q):
    n = max(len(p), len(q))
    return _ptrim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _pmul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _ptrim(out)


def _ppow(p, k):
    out = [1]
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _peval(p, m):
    acc = 0
    for c in reversed(p):
        acc = acc * m + c
    return acc


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# terms and strands
# ---------------------------------------------------------------------------

def _normalize_factors(factors) -> tuple[tuple[Fraction, tuple[tuple[int, int, int], ...]]]:
    """Pull gcds out of (a, b, p) factors and merge equal bases.

    Returns the scalar pulled out (to divide the coefficient by) and the
    canonical factor tuple.
    """
    merged: dict[tuple[int, int], int] = {}
    scalar = Fraction(1)
    for a, b, p in factors:
        a, b, p = int(a), int(b), int(p)
        if a < 1 or a + b < 1 or p < 1:
            raise ValueError(f"invalid factor (a={a}, b={b}, p={p}): need a >= 1, a + b >= 1, p >= 1")
        g = math.gcd(a, b)
        if g > 1:
            scalar *= g ** p
            a, b = a // g, b // g
        merged[(a, b)] = merged.get((a, b), 0) + p
    return scalar, tuple(sorted((a, b, p) for (a, b), p in merged.items()))


@dataclass(frozen=True)
class TailTerm:
    """``sign * coefficient / prod (scale*m + shift) ** power`` over the factors."""

    coefficient: Fraction
    sign: int = 1
    factors: tuple[tuple[int, int, int], ...] = ((1, 0, 1),)

    def __post_init__(self):
        c = exact(self.coefficient)
        s = int(self.sign)
        if s not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if c < 0:
            c, s = -c, -s
        if not self.factors:
            raise ValueError("a tail term needs at least one decaying factor")
        scalar, factors = _normalize_factors(self.factors)
        c = c / scalar
        if c == 0 or s == 0:
            c, s = Fraction(0), 0
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "sign", s)
        object.__setattr__(self, "factors", factors)

    @classmethod
    def power(cls, c, p: int = 1, sign: int = 1, scale: int = 1, shift: int = 0) -> "TailTerm":
        return cls(exact(c), sign, ((scale, shift, p),))

    @property
    def exponent(self) -> int:
        return sum(p for _, _, p in self.factors)

    @property
    def signed(self) -> Fraction:
        return self.sign * self.coefficient

    def value(self, m: int) -> Fraction:
        den = 1
        for a, b, p in self.factors:
            den *= (a * m + b) ** p
        return self.signed / den

    def values_float(self, m: np.ndarray) -> np.ndarray:
        out = np.full(m.shape, float(self.signed))
        for a, b, p in self.factors:
            out /= (a * m.astype(float) + b) ** p
        return out

    def reindexed(self, a: int, b: int) -> "TailTerm":
        """Substitute m -> a*m + b."""
        return TailTerm(self.coefficient, self.sign,
                        tuple((fa * a, fa * b + fb, p) for fa, fb, p in self.factors))

    def __mul__(self, other: "TailTerm") -> "TailTerm":
        return TailTerm(self.coefficient * other.coefficient, self.sign * other.sign,
                        self.factors + other.factors)


def _merge_terms(terms: Iterable[TailTerm]) -> tuple[TailTerm, ...]:
    acc: dict[tuple, Fraction] = {}
    for t in terms:
        if t.sign:
            acc[t.factors] = acc.get(t.factors, Fraction(0)) + t.signed
    return tuple(TailTerm(v, 1, f) for f, v in sorted(acc.items()) if v != 0)


@dataclass(frozen=True)
class TailStrand:
    limit: Fraction
    terms: tuple[TailTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "limit", exact(self.limit))
        object.__setattr__(self, "terms", _merge_terms(self.terms))

    @classmethod
    def power(cls, limit, c=1, p: int = 1, sign: int = 1, scale: int = 1, shift: int = 0) -> "TailStrand":
        return cls(limit, (TailTerm.power(c, p, sign, scale, shift),))

    @property
    def decay_constant(self) -> Fraction:
        # |entry(m) - limit| <= decay_constant / m for m >= 1
        return sum((t.coefficient for t in self.terms), Fraction(0))

    def entry(self, m: int) -> Fraction:
        if m < 1:
            raise IndexError("strand-local indices start at 1")
        return self.limit + sum((t.value(m) for t in self.terms), Fraction(0))

    def entries_float(self, m: np.ndarray) -> np.ndarray:
        out = np.full(m.shape, float(self.limit))
        for t in self.terms:
            out += t.values_float(m)
        return out

    def __add__(self, other: "TailStrand") -> "TailStrand":
        return TailStrand(self.limit + other.limit, self.terms + other.terms)

    def __neg__(self) -> "TailStrand":
        return self.scale(-1)

    def __sub__(self, other: "TailStrand") -> "TailStrand":
        return self + (-other)

    def scale(self, lam) -> "TailStrand":
        lam = exact(lam)
        s = _sign(lam)
        return TailStrand(self.limit * lam,
                          tuple(TailTerm(t.coefficient * abs(lam), t.sign * s, t.factors) for t in self.terms))

    def shift(self, lam) -> "TailStrand":
        return TailStrand(self.limit + exact(lam), self.terms)

    def __mul__(self, other: "TailStrand") -> "TailStrand":
        terms = [t for t in other.scale(self.limit).terms]
        terms += [t for t in self.scale(other.limit).terms]
        terms += [a * b for a in self.terms for b in other.terms]
        return TailStrand(self.limit * other.limit, tuple(terms))

    def reindexed(self, a: int, b: int) -> "TailStrand":
        if a < 1 or a + b < 1:
            raise ValueError("re-indexing must keep a*m + b >= 1")
        return TailStrand(self.limit, tuple(t.reindexed(a, b) for t in self.terms))

    # -- exact sign analysis ------------------------------------------------

    def deviation_poly(self, t) -> list[int]:
        """Integer polynomial N with sign(N(m)) == sign(entry(m) - t) for m >= 1."""
        t = exact(t)
        bases: dict[tuple[int, int], int] = {}
        for term in self.terms:
            for a, b, p in term.factors:
                bases[(a, b)] = max(bases.get((a, b), 0), p)
        scalars = [self.limit - t] + [term.signed for term in self.terms]
        lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (s.denominator for s in scalars), 1)
        denom = [1]
        for (a, b), p in bases.items():
            denom = _pmul(denom, _ppow([b, a], p))
        num = [int(c * ((self.limit - t) * lcm)) for c in denom]
        for term in self.terms:
            own = dict(((a, b), p) for a, b, p in term.factors)
            part = [int(term.signed * lcm)]
            for (a, b), p in bases.items():
                part = _pmul(part, _ppow([b, a], p - own.get((a, b), 0)))
            num = _padd(num, part)
        return _ptrim(num)

    def sign_profile(self, t) -> tuple[int, int]:
        """Return ``(eventual_sign, bound)``.

        For every ``m > bound`` the sign of ``entry(m) - t`` equals
        ``eventual_sign``.  ``eventual_sign == 0`` means the strand is
        identically ``t``.
        """
        num = self.deviation_poly(t)
        if not num:
            return 0, 0
        lead = num[-1]
        if len(num) == 1:
            return _sign(lead), 0
        bound = 1 + max(Fraction(abs(c), abs(lead)) for c in num[:-1])
        return _sign(lead), math.floor(bound)

    def count_relative(self, t, side: str) -> int | float:
        if side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}")
        num = self.deviation_poly(t)
        eventual, bound = self.sign_profile(t)
        want = {"below": -1, "above": 1, "equal": 0}[side]
        if eventual == want:
            return INFINITE
        return sum(1 for m in range(1, bound + 1) if _sign(_peval(num, m)) == want)

    def is_identically(self, value) -> bool:
        return not self.deviation_poly(value)

    def infimum_of(self, kind: str = "value") -> tuple[Fraction, bool]:
        """Infimum over m of g(entry(m)), limit included, for g in {value, neg, abs}.

        Returns ``(inf, attained)`` where *attained* means some finite index
        achieves it.
        """
        g = {"value": lambda x: x, "neg": lambda x: -x, "abs": abs}[kind]
        alpha = self.limit
        g_alpha = g(alpha)
        eventual, bound = self.sign_profile(alpha)
        if eventual == 0:
            return g_alpha, True
        if kind == "value":
            dips = eventual < 0
        elif kind == "neg":
            dips = eventual > 0
        else:
            dips = (alpha > 0 and eventual < 0) or (alpha < 0 and eventual > 0)
        if dips:
            # entries eventually dip below g(limit); find one, then stop once
            # the decay bound keeps every later entry above the best so far
            best = min(g(self.entry(m)) for m in range(1, bound + 2))
            m = bound + 1
            while best >= g_alpha:
                m += 1
                best = min(best, g(self.entry(m)))
            cutoff = math.ceil(self.decay_constant / (g_alpha - best))
            for m in range(m + 1, cutoff + 1):
                best = min(best, g(self.entry(m)))
            return best, True
        if bound == 0:
            return g_alpha, False
        best = min(g(self.entry(m)) for m in range(1, bound + 1))
        if best <= g_alpha:
            return best, True
        return g_alpha, False


ZERO_STRAND = TailStrand(0)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralSequence:
    """Finite exact head followed by round-robin strands.

    With no strands the sequence is finite (length ``len(head)``); that form
    is only used for finite-dimensional operators.
    """

    head: tuple[Fraction, ...] = ()
    strands: tuple[TailStrand, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(exact(h) for h in self.head))
        object.__setattr__(self, "strands", tuple(self.strands))

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value) -> "SpectralSequence":
        return cls((), (TailStrand(value),))

    @classmethod
    def power(cls, limit, c=1, p: int = 1, sign: int = 1, head: Sequence = ()) -> "SpectralSequence":
        """``limit + sign*c/n**p`` after an optional head."""
        return cls(tuple(head), (TailStrand.power(limit, c, p, sign),))

    @classmethod
    def finite(cls, values: Sequence) -> "SpectralSequence":
        return cls(tuple(values), ())

    # -- basic access -------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return not self.strands

    def __len__(self) -> int:
        if self.strands:
            raise TypeError("infinite sequence has no len(); use is_finite")
        return len(self.head)

    def _locate(self, n: int) -> tuple[int, int]:
        k = n - len(self.head) - 1
        r = len(self.strands)
        return k % r, k // r + 1

    def entry(self, n: int) -> Fraction:
        if n < 1:
            raise IndexError("sequence indices start at 1")
        if n <= len(self.head):
            return self.head[n - 1]
        if not self.strands:
            raise IndexError(f"index {n} beyond finite sequence of length {len(self.head)}")
        r, m = self._locate(n)
        return self.strands[r].entry(m)

    def entries(self, count: int) -> list[Fraction]:
        return [self.entry(n) for n in range(1, count + 1)]

    def entries_float(self, count: int) -> np.ndarray:
        out = np.empty(count)
        h = min(count, len(self.head))
        out[:h] = [float(x) for x in self.head[:h]]
        if count > h:
            if not self.strands:
                raise IndexError(f"index {count} beyond finite sequence of length {len(self.head)}")
            n = np.arange(h + 1, count + 1)
            k = n - len(self.head) - 1
            r = len(self.strands)
            for j, strand in enumerate(self.strands):
                sel = (k % r) == j
                out[n[sel] - 1] = strand.entries_float(k[sel] // r + 1)
        return out

    def accumulation_points(self) -> frozenset[Fraction]:
        return frozenset(s.limit for s in self.strands)

    # -- structure changes --------------------------------------------------

    def realign(self, head_len: int, n_strands: int | None = None) -> "SpectralSequence":
        """Equivalent sequence with a head of ``head_len`` and ``n_strands`` strands.

        ``n_strands`` must be a multiple of the current strand count.
        """
        if not self.strands:
            if head_len != len(self.head):
                raise ValueError("cannot realign a finite sequence")
            return self
        h, r = len(self.head), len(self.strands)
        L = r if n_strands is None else n_strands
        if head_len < h or L % r:
            raise ValueError(f"cannot realign (head {h}, strands {r}) to ({head_len}, {L})")
        if head_len == h and L == r:
            return self
        head = self.head + tuple(self.entry(n) for n in range(h + 1, head_len + 1))
        q = L // r
        strands = []
        for j in range(L):
            off = j + head_len - h
            strands.append(self.strands[off % r].reindexed(q, off // r + 1 - q))
        return SpectralSequence(head, tuple(strands))

    def padded(self, head_len: int) -> "SpectralSequence":
        if head_len <= len(self.head):
            return self
        return self.realign(head_len)

    def drop(self, k: int) -> "SpectralSequence":
        """The sequence of entries k+1, k+2, ..."""
        if k <= 0:
            return self
        if not self.strands:
            return SpectralSequence(self.head[k:], ())
        s = self.padded(k)
        return SpectralSequence(s.head[k:], s.strands)

    def _aligned(self, other: "SpectralSequence") -> tuple["SpectralSequence", "SpectralSequence"]:
        if self.is_finite or other.is_finite:
            if not (self.is_finite and other.is_finite) or len(self.head) != len(other.head):
                raise ValueError("finite sequences combine only with finite sequences of equal length")
            return self, other
        H = max(len(self.head), len(other.head))
        L = math.lcm(len(self.strands), len(other.strands))
        return self.realign(H, L), other.realign(H, L)

    def _combine(self, other, head_op, strand_op) -> "SpectralSequence":
        a, b = self._aligned(other)
        return SpectralSequence(tuple(head_op(x, y) for x, y in zip(a.head, b.head)),
                                tuple(strand_op(x, y) for x, y in zip(a.strands, b.strands)))

    def __add__(self, other: "SpectralSequence") -> "SpectralSequence":
        return self._combine(other, lambda x, y: x + y, lambda x, y: x + y)

    def __sub__(self, other: "SpectralSequence") -> "SpectralSequence":
        return self + other.scale(-1)

    def __mul__(self, other: "SpectralSequence") -> "SpectralSequence":
        return self._combine(other, lambda x, y: x * y, lambda x, y: x * y)

    def __neg__(self) -> "SpectralSequence":
        return self.scale(-1)

    def scale(self, lam) -> "SpectralSequence":
        lam = exact(lam)
        return SpectralSequence(tuple(lam * h for h in self.head), tuple(s.scale(lam) for s in self.strands))

    def shift(self, lam) -> "SpectralSequence":
        lam = exact(lam)
        return SpectralSequence(tuple(lam + h for h in self.head), tuple(s.shift(lam) for s in self.strands))

    def with_head(self, values: Sequence) -> "SpectralSequence":
        """Replace the first ``len(values)`` entries."""
        s = self.padded(len(values)) if self.strands else self
        if len(values) > len(s.head):
            raise ValueError("too many head values for a finite sequence")
        return SpectralSequence(tuple(values) + s.head[len(values):], s.strands)

    def sign_stable(self, t) -> "SpectralSequence":
        """Equivalent sequence whose strands each sit entirely on one side of ``t``."""
        if not self.strands:
            return self
        h, r = len(self.head), len(self.strands)
        need = h
        for j, s in enumerate(self.strands):
            _, bound = s.sign_profile(t)
            if bound:
                need = max(need, h + (bound - 1) * r + j + 1)
        return self.padded(need)

    def positive_part(self, t=0) -> "SpectralSequence":
        """Entrywise max(x - t, 0)."""
        t = exact(t)
        s = self.sign_stable(t)
        strands = tuple(st.shift(-t) if st.sign_profile(t)[0] > 0 else ZERO_STRAND for st in s.strands)
        return SpectralSequence(tuple(max(x - t, Fraction(0)) for x in s.head), strands)

    def negative_part(self, t=0) -> "SpectralSequence":
        """Entrywise max(t - x, 0)."""
        return self.scale(-1).positive_part(-exact(t))

    # -- exact queries ------------------------------------------------------

    def count_relative(self, t, side: str) -> int | float:
        """Number of indices with entry < t, > t or == t (``INFINITE`` if unbounded)."""
        if side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}")
        t = exact(t)
        cmp = {"below": lambda x: x < t, "above": lambda x: x > t, "equal": lambda x: x == t}[side]
        total: int | float = sum(1 for x in self.head if cmp(x))
        for s in self.strands:
            total += s.count_relative(t, side)
        return total

    def count_nonzero(self) -> int | float:
        return self.count_relative(0, "below") + self.count_relative(0, "above")

    def is_identically(self, value) -> bool:
        value = exact(value)
        return all(h == value for h in self.head) and all(s.is_identically(value) for s in self.strands)

    def _infimum_of(self, kind: str) -> tuple[Fraction, bool]:
        g = {"value": lambda x: x, "neg": lambda x: -x, "abs": abs}[kind]
        cands = [(g(h), True) for h in self.head]
        cands += [s.infimum_of(kind) for s in self.strands]
        if not cands:
            raise ValueError("empty sequence")
        best = min(v for v, _ in cands)
        return best, any(att for v, att in cands if v == best)

    def infimum(self) -> tuple[Fraction, bool]:
        return self._infimum_of("value")

    def supremum(self) -> tuple[Fraction, bool]:
        v, att = self._infimum_of("neg")
        return -v, att

    def inf_abs(self) -> tuple[Fraction, bool]:
        return self._infimum_of("abs")

    def sup_abs(self) -> tuple[Fraction, bool]:
        lo, lo_att = self.infimum()
        hi, hi_att = self.supremum()
        if -lo > hi:
            return -lo, lo_att
        if hi > -lo:
            return hi, hi_att
        return hi, lo_att or hi_att

    def __repr__(self) -> str:
        head = ", ".join(str(h) for h in self.head[:6]) + (", ..." if len(self.head) > 6 else "")
        lims = ", ".join(str(s.limit) for s in self.strands)
        return f"SpectralSequence(head=[{head}], strand_limits=[{lims}])"


def seq_infimum(seq: SpectralSequence) -> tuple[Fraction, bool]:
    return seq.infimum()


def seq_supremum(seq: SpectralSequence) -> tuple[Fraction, bool]:
    return seq.supremum()
