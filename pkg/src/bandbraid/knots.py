"""Braid-closure invariants: reduced Burau, Alexander, Kauffman bracket, Jones.

All polynomial arithmetic is exact over the integers. Exponents live on a
quarter-integer lattice: a LaurentPoly term (q -> c) means c * s^(q/4). The
bracket variable A maps onto the same lattice through A = s^(-1/4), i.e.
A^e has quarter-exponent -e, so brackets, Jones values (half-integer powers
of s) and Burau entries (integer powers) share one representation.

Reduced Burau convention for B_N ((N-1) x (N-1)):

    rho(sigma_i) = I  except row i:  (i, i-1) = s,  (i, i) = -s,  (i, i+1) = 1
    rho(sigma_i)^-1 = I except row i: (i, i-1) = 1, (i, i) = -1/s, (i, i+1) = 1/s

Alexander of a closed braid: (1 - s)/(1 - s^N) det(I - rho(word)), an exact
division, canonicalized to lowest exponent 0 with positive leading
coefficient (the invariant is defined up to units +-s^a). The Kauffman
bracket is an exhaustive smoothing sum over the braid closure with loop
weight -(A^2 + A^-2); Jones is (-A^3)^(-writhe) times the bracket at
A = s^(-1/4).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .braidtrace import BraidWord, WINDING_MATRICES
from .errors import DivisionFailure, InvalidDimension, Unclassified, WordTooLong
from .twister import KnotClass

BRACKET_CROSSING_CAP = 24


class LaurentPoly:
    """Integer-coefficient Laurent polynomial on the quarter-exponent lattice."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | None = None):
        self.terms = {int(q): int(c) for q, c in (terms or {}).items() if c != 0}

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    @classmethod
    def s_power(cls, p: int | Fraction, coeff: int = 1) -> "LaurentPoly":
        """coeff * s^p with p an integer or quarter-integer Fraction."""
        q = Fraction(p) * 4
        if q.denominator != 1:
            raise InvalidDimension(f"exponent {p} is not a quarter integer")
        return cls({int(q): coeff})

    @classmethod
    def a_power(cls, e: int, coeff: int = 1) -> "LaurentPoly":
        """coeff * A^e on the s-lattice (A = s^(-1/4))."""
        return cls({-int(e): coeff})

    @classmethod
    def from_s_coeffs(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        """Whole-power-of-s polynomial from {power: coeff}."""
        return cls({4 * p: c for p, c in coeffs.items()})

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for q, c in other.terms.items():
            out[q] = out.get(q, 0) + c
        return LaurentPoly(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({q: -c for q, c in self.terms.items()})

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly({q: c * other for q, c in self.terms.items()})
        out: dict[int, int] = {}
        for q1, c1 in self.terms.items():
            for q2, c2 in other.terms.items():
                q = q1 + q2
                out[q] = out.get(q, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise InvalidDimension("negative polynomial powers are not defined")
        out = LaurentPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def shift(self, q: int) -> "LaurentPoly":
        return LaurentPoly({qq + q: c for qq, c in self.terms.items()})

    def mirror(self) -> "LaurentPoly":
        """Substitute s -> 1/s (negate all exponents)."""
        return LaurentPoly({-q: c for q, c in self.terms.items()})

    def min_exponent(self) -> int:
        return min(self.terms) if self.terms else 0

    def canonical(self) -> "LaurentPoly":
        """Representative of the +-s^a equivalence class: lowest exponent 0,
        lowest-order coefficient positive."""
        if not self.terms:
            return LaurentPoly.zero()
        shifted = self.shift(-self.min_exponent())
        if shifted.terms[0] < 0:
            shifted = -shifted
        return shifted

    def equivalent(self, other: "LaurentPoly") -> bool:
        """Equality up to a unit +-s^a."""
        return self.canonical() == other.canonical()

    def divide_exact(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises DivisionFailure on a nonzero remainder."""
        if divisor.is_zero():
            raise DivisionFailure("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        num = dict(self.shift(-self.min_exponent()).terms)
        den = divisor.shift(-divisor.min_exponent()).terms
        den_deg = max(den)
        den_lead = den[den_deg]
        quot: dict[int, int] = {}
        while num:
            deg = max(num)
            lead = num[deg]
            if deg < den_deg or lead % den_lead != 0:
                raise DivisionFailure("inexact Laurent division")
            factor = lead // den_lead
            qdeg = deg - den_deg
            quot[qdeg] = quot.get(qdeg, 0) + factor
            for q, c in den.items():
                key = q + qdeg
                num[key] = num.get(key, 0) - factor * c
                if num[key] == 0:
                    del num[key]
        shift_back = self.min_exponent() - divisor.min_exponent()
        return LaurentPoly(quot).shift(shift_back)

    def _render(self, var: str, exponents) -> str:
        parts = []
        for q, e in exponents:
            c = self.terms[q]
            if e == 0:
                base = str(abs(c))
            else:
                if e.denominator == 1:
                    expo = str(e) if e != 1 else ""
                else:
                    expo = f"({e})"
                mag = "" if abs(c) == 1 else str(abs(c))
                base = f"{mag}{var}" + (f"^{expo}" if expo else "")
            sign = "-" if c < 0 else ("+" if parts else "")
            parts.append(sign + base)
        return "".join(parts) if parts else "0"

    def __str__(self) -> str:
        """s-notation, e.g. "-s^(3/2)-s^(7/2)+s^(9/2)-s^(11/2)"."""
        return self._render("s", ((q, Fraction(q, 4)) for q in sorted(self.terms)))

    def str_a(self) -> str:
        """A-notation (A = s^(-1/4)), e.g. "-A^11-2A^3-A^-5"."""
        return self._render("A", ((q, Fraction(-q)) for q in sorted(self.terms)))

    __repr__ = __str__


def _s() -> LaurentPoly:
    return LaurentPoly.from_s_coeffs({1: 1})


@dataclass(frozen=True)
class BurauMatrix:
    entries: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, dim: int) -> "BurauMatrix":
        return cls(tuple(tuple(LaurentPoly.one() if i == j else LaurentPoly.zero()
                               for j in range(dim)) for i in range(dim)))

    def __matmul__(self, other: "BurauMatrix") -> "BurauMatrix":
        n = self.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = LaurentPoly.zero()
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return BurauMatrix(tuple(rows))

    def det(self) -> LaurentPoly:
        return _det(list(list(r) for r in self.entries))


def _det(m: list[list[LaurentPoly]]) -> LaurentPoly:
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = LaurentPoly.zero()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def burau_generator(n: int, i: int, inverse: bool = False) -> BurauMatrix:
    """Reduced Burau matrix of sigma_i (or its exact inverse) in B_n."""
    if not 1 <= i <= n - 1:
        raise InvalidDimension(f"generator index {i} outside 1..{n - 1}")
    dim = n - 1
    s = _s()
    rows = [[LaurentPoly.one() if a == b else LaurentPoly.zero() for b in range(dim)]
            for a in range(dim)]
    r = i - 1
    if not inverse:
        rows[r][r] = LaurentPoly.from_s_coeffs({1: -1})
        if r - 1 >= 0:
            rows[r][r - 1] = s
        if r + 1 < dim:
            rows[r][r + 1] = LaurentPoly.one()
    else:
        rows[r][r] = LaurentPoly.from_s_coeffs({-1: -1})
        if r - 1 >= 0:
            rows[r][r - 1] = LaurentPoly.one()
        if r + 1 < dim:
            rows[r][r + 1] = LaurentPoly.from_s_coeffs({-1: 1})
    return BurauMatrix(tuple(tuple(row) for row in rows))


def burau(word: BraidWord) -> BurauMatrix:
    """Ordered product of generator matrices for the word."""
    out = BurauMatrix.identity(word.strand_count - 1)
    for idx, sign in word.generators:
        out = out @ burau_generator(word.strand_count, idx, inverse=sign < 0)
    return out


def alexander(word: BraidWord, *, reduced_only: bool = False) -> LaurentPoly:
    """Alexander polynomial of the braid closure, canonicalized.

    Default normalization divides det(I - B) by (1 - s^N)/(1 - s); the
    alternative (reduced_only) divides by (1 - s) only.
    """
    n = word.strand_count
    b = burau(word)
    diff = BurauMatrix.identity(n - 1).entries
    m = [[diff[i][j] - b.entries[i][j] for j in range(n - 1)] for i in range(n - 1)]
    det = _det(m)
    if det.is_zero():
        return LaurentPoly.zero()
    if reduced_only:
        divisor = LaurentPoly.from_s_coeffs({0: 1, 1: -1})
    else:
        divisor = LaurentPoly.from_s_coeffs({p: 1 for p in range(n)})
    return det.divide_exact(divisor).canonical()


def writhe(word: BraidWord) -> int:
    return sum(sign for _, sign in word.generators)


def braid_permutation_cycles(word: BraidWord) -> int:
    """Number of components of the braid closure (cycles of the permutation)."""
    pos = word.permutation()
    perm = [pos.index(p) for p in range(word.strand_count)]
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycles += 1
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
    return cycles


def kauffman_bracket(word: BraidWord, *, max_crossings: int = BRACKET_CROSSING_CAP) -> LaurentPoly:
    """Kauffman bracket of the braid closure by exhaustive smoothing.

    Each crossing smooths to the identity pairing (weight A for sigma_i,
    A^-1 for sigma_i^-1) or the cup-cap pairing (the opposite weight); loops
    of the closed diagram are counted by union-find and weighted by
    delta = -(A^2 + A^-2) per loop beyond the first.
    """
    m = len(word.generators)
    if m > max_crossings:
        raise WordTooLong(f"{m} crossings exceeds the cap of {max_crossings}")
    n = word.strand_count
    delta = LaurentPoly.a_power(2, -1) + LaurentPoly.a_power(-2, -1)  # -(A^2 + A^-2)
    total = LaurentPoly.zero()
    n_nodes = (m + 1) * n

    def node(level: int, position: int) -> int:
        return level * n + position

    for state in range(2 ** m):
        parent = list(range(n_nodes))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        a_exp = 0
        for t, (idx, sign) in enumerate(word.generators):
            cupcap = bool((state >> t) & 1)
            # weight: identity smoothing of sigma^+ carries A, cup-cap A^-1;
            # reversed for sigma^-
            if cupcap:
                a_exp += -sign
            else:
                a_exp += sign
            p = idx - 1
            for pos in range(n):
                if cupcap and pos in (p, p + 1):
                    continue
                union(node(t, pos), node(t + 1, pos))
            if cupcap:
                union(node(t, p), node(t, p + 1))
                union(node(t + 1, p), node(t + 1, p + 1))
        for pos in range(n):
            union(node(m, pos), node(0, pos))
        loops = len({find(x) for x in range(n_nodes)})
        total = total + LaurentPoly.a_power(a_exp) * (delta ** (loops - 1))
    return total


def jones(word: BraidWord, *, max_crossings: int = BRACKET_CROSSING_CAP) -> LaurentPoly:
    """V = (-A^3)^(-w) <closure> at A = s^(-1/4); exact quarter-exponent form."""
    w = writhe(word)
    bracket = kauffman_bracket(word, max_crossings=max_crossings)
    sign = -1 if (w % 2) else 1
    return sign * bracket.shift(3 * w)  # A^(-3w) = s^(3w/4): shift +3w quarter units


# -- classification table --------------------------------------------------------

def _jones_table() -> dict[KnotClass, LaurentPoly]:
    half = Fraction(1, 2)
    tbl = {
        KnotClass.HOPF_LINK: (LaurentPoly.s_power(half, -1)
                              + LaurentPoly.s_power(5 * half, -1)),
        KnotClass.UNKNOT: LaurentPoly.one(),
        KnotClass.UNLINK: (LaurentPoly.s_power(-half, -1)
                           + LaurentPoly.s_power(half, -1)),
        KnotClass.SOLOMON_KNOT: (LaurentPoly.s_power(3 * half, -1)
                                 + LaurentPoly.s_power(7 * half, -1)
                                 + LaurentPoly.s_power(9 * half, 1)
                                 + LaurentPoly.s_power(11 * half, -1)),
        KnotClass.HOPF_CHAIN: LaurentPoly.from_s_coeffs({1: 1, 3: 2, 5: 1}),
        KnotClass.HOPF_LINK_PLUS_UNLINK: LaurentPoly(
            {q: c for q, c in zip((-2, 2, 6, 10, 14), (-1, -2, -2, -2, -1))}),
        KnotClass.UNKNOT_PLUS_UNLINK: LaurentPoly.from_s_coeffs({-1: 1, 0: 2, 1: 1}),
        KnotClass.DOUBLE_UNLINKS: LaurentPoly(
            {q: c for q, c in zip((-6, -2, 2, 6), (-1, -3, -3, -1))}),
    }
    return tbl


JONES_TABLE = _jones_table()

ALEXANDER_TABLE = {
    KnotClass.HOPF_LINK: LaurentPoly.from_s_coeffs({0: 1, 1: -1}),
    KnotClass.UNKNOT: LaurentPoly.one(),
    KnotClass.UNLINK: LaurentPoly.zero(),
    KnotClass.SOLOMON_KNOT: LaurentPoly.from_s_coeffs({0: 1, 1: -1, 2: 1, 3: -1}),
    KnotClass.HOPF_CHAIN: LaurentPoly.from_s_coeffs({0: 1, 1: -2, 2: 1}),
    KnotClass.HOPF_LINK_PLUS_UNLINK: LaurentPoly.zero(),
    KnotClass.UNKNOT_PLUS_UNLINK: LaurentPoly.zero(),
    KnotClass.DOUBLE_UNLINKS: LaurentPoly.zero(),
}

# closure component counts per (class, strand count)
COMPONENTS = {
    (KnotClass.HOPF_LINK, 2): 2, (KnotClass.UNKNOT, 2): 1, (KnotClass.UNLINK, 2): 2,
    (KnotClass.SOLOMON_KNOT, 4): 2, (KnotClass.HOPF_CHAIN, 4): 3,
    (KnotClass.HOPF_LINK, 4): 2, (KnotClass.UNKNOT, 4): 1, (KnotClass.UNLINK, 4): 2,
    (KnotClass.HOPF_LINK_PLUS_UNLINK, 4): 4, (KnotClass.UNKNOT_PLUS_UNLINK, 4): 3,
    (KnotClass.DOUBLE_UNLINKS, 4): 4,
}


def classify_link(word: BraidWord, winding=None) -> KnotClass:
    """Match (Jones polynomial, closure component count) against the table.

    When a winding matrix is supplied it must agree with the class's table
    entry (up to simultaneous band reversal), otherwise the match is
    rejected.
    """
    value = jones(word)
    comps = braid_permutation_cycles(word)
    candidates = [cls for cls, poly in JONES_TABLE.items()
                  if poly == value and COMPONENTS.get((cls, word.strand_count)) == comps]
    if not candidates:
        raise Unclassified(
            f"no table row matches Jones {value} with {comps} component(s)")
    label = candidates[0]
    if winding is not None and word.strand_count == 4:
        expect = WINDING_MATRICES[label]
        rev = expect[::-1, ::-1]
        if not (np.allclose(winding, expect) or np.allclose(winding, rev)):
            raise Unclassified(
                f"winding matrix inconsistent with Jones match {label.value}")
    return label
