"""Exact real roots of rational-coefficient polynomials in one variable.

Root finding delegates to sympy (certified isolation via CRootOf);
this layer adds what the wall scanner needs on top: rational
enclosures of prescribed width, exact signs of other polynomials at an
isolated algebraic point, and dedup/ordering of root collections drawn
from several polynomials. Rational roots come back exactly.

Polynomials are lists of fractions.Fraction in ascending powers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import List, Optional, Sequence

import sympy

_T = sympy.Symbol("t")

DEFAULT_ENCLOSURE_WIDTH = Fraction(1, 10**10)


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def poly_is_zero(coeffs: Sequence[Fraction]) -> bool:
    return all(c == 0 for c in coeffs)


def poly_degree(coeffs: Sequence[Fraction]) -> int:
    for d in range(len(coeffs) - 1, -1, -1):
        if coeffs[d] != 0:
            return d
    return -1


def _to_sympy(coeffs: Sequence[Fraction]) -> sympy.Poly:
    desc = [sympy.Rational(c.numerator, c.denominator) for c in reversed(list(coeffs))]
    return sympy.Poly(desc, _T, domain="QQ")


def _to_fraction(r: sympy.Rational) -> Fraction:
    return Fraction(int(r.p), int(r.q))


@dataclass
class RootPoint:
    """One isolated real root with a certified rational enclosure.

    exact is set for rational roots (then lo == hi == exact); otherwise
    the root is the unique root of its (irreducible) minimal polynomial
    inside [lo, hi], and refine() shrinks the enclosure on demand.
    """

    value: object                     # sympy Rational or CRootOf
    exact: Optional[Fraction]
    lo: Fraction
    hi: Fraction
    _minpoly: Optional[sympy.Poly] = field(default=None, repr=False)

    def is_rational(self) -> bool:
        return self.exact is not None

    def approx(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    def refine(self) -> None:
        """Halve the enclosure width (no-op for rational points)."""
        if self.exact is not None:
            return
        mid = (self.lo + self.hi) / 2
        lo_s = sympy.Rational(self.lo.numerator, self.lo.denominator)
        mid_s = sympy.Rational(mid.numerator, mid.denominator)
        if self._minpoly.count_roots(lo_s, mid_s) == 1:
            self.hi = mid
        else:
            self.lo = mid

    def refine_to(self, width: Fraction) -> None:
        while self.hi - self.lo > width:
            self.refine()

    def excludes(self, x: Fraction) -> bool:
        return x < self.lo or x > self.hi

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return f"[{self.lo}, {self.hi}]"


def _enclose(root, minpoly: sympy.Poly, width: Fraction) -> tuple[Fraction, Fraction]:
    dx = sympy.Rational(width.numerator, 2 * width.denominator)
    while True:
        approx = root.eval_rational(dx=dx)
        lo, hi = approx - dx, approx + dx
        if minpoly.count_roots(lo, hi) == 1:
            return _to_fraction(sympy.Rational(lo)), _to_fraction(sympy.Rational(hi))
        dx = dx / 2


def roots_in_range(
    coeffs: Sequence[Fraction],
    lo: Fraction,
    hi: Fraction,
    width: Fraction = DEFAULT_ENCLOSURE_WIDTH,
) -> List[RootPoint]:
    """All distinct real roots of the polynomial in [lo, hi], sorted.

    The zero polynomial is rejected (every point would be a root).
    """
    if poly_is_zero(coeffs):
        raise ValueError("zero polynomial has no isolated roots")
    if poly_degree(coeffs) == 0:
        return []
    poly = _to_sympy(coeffs)
    lo_s = sympy.Rational(lo.numerator, lo.denominator)
    hi_s = sympy.Rational(hi.numerator, hi.denominator)
    out: List[RootPoint] = []
    seen = []
    for r in poly.real_roots(radicals=False):
        if any(r == s for s in seen):
            continue  # multiple root listed again
        seen.append(r)
        if bool(r < lo_s) or bool(r > hi_s):
            continue
        if r.is_rational:
            x = _to_fraction(sympy.Rational(r))
            out.append(RootPoint(r, x, x, x))
        else:
            raw = getattr(r, "poly", None)
            if raw is None:
                minpoly = sympy.Poly(sympy.minimal_polynomial(r, _T), _T)
            else:
                # rebuild in our generator so later gcds against query
                # polynomials stay univariate
                minpoly = sympy.Poly(raw.all_coeffs(), _T, domain="QQ")
            enc_lo, enc_hi = _enclose(r, minpoly, width)
            out.append(RootPoint(r, None, max(enc_lo, lo), min(enc_hi, hi), minpoly))
    # real_roots already yields ascending order
    return out


def sign_at(coeffs: Sequence[Fraction], point: RootPoint) -> int:
    """Exact sign of the polynomial at the isolated point (-1, 0, +1)."""
    if point.exact is not None:
        v = poly_eval(coeffs, point.exact)
        return (v > 0) - (v < 0)
    if poly_is_zero(coeffs):
        return 0
    q = _to_sympy(coeffs)
    g = sympy.gcd(point._minpoly, q)
    if sympy.Poly(g, _T).degree() >= 1:
        # the minimal polynomial is irreducible, so a nontrivial gcd
        # means the query polynomial vanishes at this root
        return 0
    while True:
        lo_s = sympy.Rational(point.lo.numerator, point.lo.denominator)
        hi_s = sympy.Rational(point.hi.numerator, point.hi.denominator)
        if q.count_roots(lo_s, hi_s) == 0:
            v = poly_eval(coeffs, point.approx())
            return (v > 0) - (v < 0)
        point.refine()


def dedup_roots(points: List[RootPoint]) -> List[RootPoint]:
    """Merge root collections from several polynomials: exact-equal
    points collapse to one, the rest come back sorted with pairwise
    disjoint enclosures."""
    unique: List[RootPoint] = []
    for p in points:
        if not any(bool(p.value == u.value) for u in unique):
            unique.append(p)
    # order by exact comparison; overlapping enclosures can misorder
    # approximate midpoints
    unique.sort(key=cmp_to_key(lambda a, b: -1 if bool(a.value < b.value) else 1))
    for a, b in zip(unique, unique[1:]):
        while not a.hi < b.lo:
            # distinct numbers separate after finitely many halvings;
            # rational points have zero-width enclosures already
            if a.exact is not None:
                b.refine()
            elif b.exact is not None:
                a.refine()
            elif a.hi - a.lo >= b.hi - b.lo:
                a.refine()
            else:
                b.refine()
    return unique
