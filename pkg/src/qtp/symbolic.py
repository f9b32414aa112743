"""Affine size expressions and low-degree polynomials in the family parameter.

Families of representations depend on one natural parameter n.  Sizes of
blocks and entries of symbolic dimension vectors are affine expressions
a*n + b (DimExpr); values of bilinear forms on such vectors are polynomials
of degree at most two (PolyN).  Both are exact integer objects.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import QtpError


@dataclass(frozen=True, order=False)
class DimExpr:
    """The affine expression a*n + b.

    The slope a is kept non-negative (sizes never shrink as the family
    grows); b may be negative as long as the expression is non-negative
    from the enclosing formula's base parameter onward, e.g. n-1 with
    n0 = 1.
    """

    a: int = 0
    b: int = 0

    @staticmethod
    def const(b):
        return DimExpr(0, b)

    @staticmethod
    def coerce(value):
        if isinstance(value, DimExpr):
            return value
        if isinstance(value, int):
            return DimExpr(0, value)
        raise TypeError("cannot coerce %r to DimExpr" % (value,))

    def eval(self, n):
        return self.a * n + self.b

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_const(self):
        return self.a == 0

    def valid_from(self, n0):
        """True when the expression is a legal size for every n >= n0."""
        return self.a >= 0 and self.eval(n0) >= 0

    def leq_from(self, other, n0):
        """True when self(n) <= other(n) for every n >= n0."""
        d = other - self
        return d.a >= 0 and d.eval(n0) >= 0

    def shift(self, c):
        """Substitute n -> n - c."""
        return DimExpr(self.a, self.b - self.a * c)

    def __add__(self, other):
        other = DimExpr.coerce(other)
        return DimExpr(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        other = DimExpr.coerce(other)
        return DimExpr(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return DimExpr(-self.a, -self.b)

    def to_poly(self):
        return PolyN(self.b, self.a, 0)

    def __str__(self):
        if self.a == 0:
            return str(self.b)
        if self.a == 1:
            head = "n"
        else:
            head = "%dn" % self.a
        if self.b == 0:
            return head
        return "%s%+d" % (head, self.b)


@dataclass(frozen=True)
class PolyN:
    """The polynomial c0 + c1*n + c2*n^2 with integer coefficients.

    Degree two suffices: bilinear forms of affine dimension vectors are
    quadratic in n.  Products that would exceed degree two raise.
    """

    c0: int = 0
    c1: int = 0
    c2: int = 0

    @staticmethod
    def const(c):
        return PolyN(c, 0, 0)

    @staticmethod
    def coerce(value):
        if isinstance(value, PolyN):
            return value
        if isinstance(value, DimExpr):
            return value.to_poly()
        if isinstance(value, int):
            return PolyN(value, 0, 0)
        raise TypeError("cannot coerce %r to PolyN" % (value,))

    def eval(self, n):
        return self.c0 + self.c1 * n + self.c2 * n * n

    def is_zero(self):
        return self.c0 == 0 and self.c1 == 0 and self.c2 == 0

    def is_const(self):
        return self.c1 == 0 and self.c2 == 0

    def __add__(self, other):
        other = PolyN.coerce(other)
        return PolyN(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        other = PolyN.coerce(other)
        return PolyN(self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self):
        return PolyN(-self.c0, -self.c1, -self.c2)

    def __mul__(self, other):
        other = PolyN.coerce(other)
        coeffs = [0] * 5
        mine = (self.c0, self.c1, self.c2)
        theirs = (other.c0, other.c1, other.c2)
        for i, ci in enumerate(mine):
            for j, cj in enumerate(theirs):
                coeffs[i + j] += ci * cj
        if coeffs[3] or coeffs[4]:
            raise QtpError("polynomial degree overflow (degree > 2)")
        return PolyN(coeffs[0], coeffs[1], coeffs[2])

    def nonneg_from(self, n0):
        """True when the polynomial is >= 0 for every integer n >= n0.

        Exact for degree <= 1; for degree 2 uses the vertex of the parabola,
        still exact over the integers.
        """
        if self.c2 == 0:
            return self.c1 >= 0 and self.eval(n0) >= 0
        if self.c2 < 0:
            return False
        # upward parabola: minimum at -c1/(2 c2); check the integers around it
        lo = -self.c1 // (2 * self.c2)
        candidates = [n0, max(n0, lo), max(n0, lo + 1)]
        return all(self.eval(n) >= 0 for n in candidates)

    def nonzero_from(self, n0):
        """True when the polynomial has no integer root n >= n0."""
        if self.is_const():
            return self.c0 != 0
        if self.c2 == 0:
            # affine: single rational root
            if self.c0 % self.c1 != 0:
                return True
            root = -self.c0 // self.c1
            return root < n0
        return all(self.eval(n) != 0 for n in self._integer_root_candidates(n0))

    def _integer_root_candidates(self, n0):
        disc = self.c1 * self.c1 - 4 * self.c2 * self.c0
        if disc < 0:
            return []
        r = int(disc ** 0.5)
        while r * r > disc:
            r -= 1
        while (r + 1) * (r + 1) <= disc:
            r += 1
        out = []
        for num in (-self.c1 - r, -self.c1 + r):
            den = 2 * self.c2
            for cand in (num // den, -(-num // den)):
                if cand >= n0:
                    out.append(cand)
        return out

    def __str__(self):
        parts = []
        if self.c2:
            parts.append("%dn^2" % self.c2 if self.c2 != 1 else "n^2")
        if self.c1:
            parts.append("%dn" % self.c1 if self.c1 != 1 else "n")
        if self.c0 or not parts:
            parts.append(str(self.c0))
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out
