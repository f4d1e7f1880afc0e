"""Univariate polynomials over a finite field.

Engine code works on bare coefficient tuples (low-to-high, no trailing zeros;
the zero polynomial is the empty tuple) with the field passed explicitly; the
thin PolyGF wrapper carries its field for the public gcd contract.  Laurent
polynomials, needed by the two-chart bundle calculus, are (valuation, coeffs)
pairs with the same normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FieldMismatch
from .gf import GF

MINUS_INF = float("-inf")


def pnorm(c) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def pdeg(a):
    """Degree; the zero polynomial gets the -inf sentinel."""
    return len(a) - 1 if a else MINUS_INF


def padd(F: GF, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = F.add(out[i], x)
    return pnorm(out)


def pneg(F: GF, a):
    return tuple(F.neg(x) for x in a)


def psub(F: GF, a, b):
    return padd(F, a, pneg(F, b))


def pmul(F: GF, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return pnorm(out)


def pscale(F: GF, a, c):
    if c == 0:
        return ()
    return pnorm(tuple(F.mul(x, c) for x in a))


def pshift(a, n: int):
    """Multiply by t^n (n >= 0)."""
    if not a:
        return ()
    return (0,) * n + tuple(a)


def pdivmod(F: GF, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv = F.inv(b[-1])
    db = len(b) - 1
    while len(a) >= len(b) and a:
        coef = F.mul(a[-1], inv)
        shift = len(a) - len(b)
        q[shift] = coef
        for i, y in enumerate(b):
            a[i + shift] = F.sub(a[i + shift], F.mul(coef, y))
        while a and a[-1] == 0:
            a.pop()
    return pnorm(q), pnorm(a)


def pmonic(F: GF, a):
    if not a:
        return ()
    return pscale(F, a, F.inv(a[-1]))


def pgcd(F: GF, a, b):
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = pnorm(a), pnorm(b)
    while b:
        _, r = pdivmod(F, a, b)
        a, b = b, r
    return pmonic(F, a)


def pxgcd(F: GF, a, b):
    """Extended gcd: (g, s, t) with s*a + t*b = g, g monic or zero."""
    a, b = pnorm(a), pnorm(b)
    r0, r1 = a, b
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(F, s0, pmul(F, q, s1))
        t0, t1 = t1, psub(F, t0, pmul(F, q, t1))
    if r0 and r0[-1] != 1:
        u = F.inv(r0[-1])
        r0, s0, t0 = pscale(F, r0, u), pscale(F, s0, u), pscale(F, t0, u)
    return r0, s0, t0


def peval(F: GF, a, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def pmap(a, f):
    """Apply an element map (e.g. a field embedding) coefficient-wise."""
    return tuple(f(c) for c in a)


@dataclass(frozen=True)
class PolyGF:
    """Field-carrying polynomial, the public face of the bare-tuple helpers."""

    field: GF
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", pnorm(self.coeffs))

    @property
    def degree(self):
        return pdeg(self.coeffs)

    def __add__(self, other):
        self._same_field(other)
        return PolyGF(self.field, padd(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._same_field(other)
        return PolyGF(self.field, psub(self.field, self.coeffs, other.coeffs))

    def __mul__(self, other):
        self._same_field(other)
        return PolyGF(self.field, pmul(self.field, self.coeffs, other.coeffs))

    def __call__(self, x: int) -> int:
        return peval(self.field, self.coeffs, x)

    def _same_field(self, other):
        if self.field != other.field:
            raise FieldMismatch("polynomials live over different fields")


def poly_gcd(a: PolyGF, b: PolyGF) -> PolyGF:
    if a.field != b.field:
        raise FieldMismatch("gcd arguments live over different fields")
    return PolyGF(a.field, pgcd(a.field, a.coeffs, b.coeffs))


# -- Laurent polynomials ----------------------------------------------------


def lnorm(lo: int, coeffs) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    while c and c[0] == 0:
        c.pop(0)
        lo += 1
    if not c:
        return (0, ())
    return (lo, tuple(c))


def lfrom_poly(a) -> tuple:
    return lnorm(0, a)


def lis_zero(a) -> bool:
    return not a[1]


def lval(a):
    """t-adic valuation; +inf for zero."""
    return a[0] if a[1] else float("inf")


def ldeg(a):
    return a[0] + len(a[1]) - 1 if a[1] else MINUS_INF


def ladd(F: GF, a, b):
    if lis_zero(a):
        return b
    if lis_zero(b):
        return a
    lo = min(a[0], b[0])
    hi = max(a[0] + len(a[1]), b[0] + len(b[1]))
    out = [0] * (hi - lo)
    for i, x in enumerate(a[1]):
        out[a[0] - lo + i] = x
    for i, x in enumerate(b[1]):
        out[b[0] - lo + i] = F.add(out[b[0] - lo + i], x)
    return lnorm(lo, out)


def lneg(F: GF, a):
    return (a[0], tuple(F.neg(x) for x in a[1]))


def lsub(F: GF, a, b):
    return ladd(F, a, lneg(F, b))


def lmul(F: GF, a, b):
    if lis_zero(a) or lis_zero(b):
        return (0, ())
    return lnorm(a[0] + b[0], pmul(F, a[1], b[1]))


def lscale(F: GF, a, c: int):
    if c == 0:
        return (0, ())
    return (a[0], tuple(F.mul(x, c) for x in a[1]))


def lshift(a, n: int):
    """Multiply by t^n (any sign)."""
    if lis_zero(a):
        return a
    return (a[0] + n, a[1])


def lcoeff(a, n: int) -> int:
    """Coefficient of t^n."""
    lo, c = a
    if not c or n < lo or n >= lo + len(c):
        return 0
    return c[n - lo]


def lmap(a, f):
    return (a[0], tuple(f(c) for c in a[1]))


def lmonomial(c: int, n: int) -> tuple:
    return (n, (c,)) if c else (0, ())
