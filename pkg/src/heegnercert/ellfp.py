"""Elliptic curves over F_p and F_{p^2}.

Counting is naive (one quadratic-character evaluation per x), which is plenty
for p up to 10^6.  The quadratic extension is F_p[w]/(w^2 - n) with n the
least positive non-residue; elements are (u, v) pairs meaning u + v*w.
Curves keep the long Weierstrass shape so reduction of a global minimal model
is coefficient-wise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import NO_ROOT, factorize, kronecker, sqrt_mod


class SingularCurve(ValueError):
    pass


class BadReduction(ValueError):
    pass


class FieldTooLarge(ValueError):
    pass


class PrimeField:
    """F_p; elements are plain ints in [0, p)."""

    def __init__(self, p):
        self.p = p
        self.zero = 0
        self.one = 1

    def size(self):
        return self.p

    def make(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def sqrt(self, a):
        """A square root in F_p, or None."""
        a %= self.p
        if self.p == 2:
            return a  # x -> x^2 is the identity on F_2
        r = sqrt_mod(a, self.p)
        return None if r is NO_ROOT else r

    def elements(self):
        return range(self.p)


def least_nonresidue(p):
    for n in range(2, p):
        if kronecker(n, p) == -1:
            return n
    raise ValueError("no non-residue mod %d" % p)


class QuadExtField:
    """F_{p^2} = F_p[w]/(w^2 - n), p odd, n the least positive non-residue."""

    def __init__(self, p, n=None):
        self.p = p
        self.n = least_nonresidue(p) if n is None else n
        self.zero = (0, 0)
        self.one = (1, 0)

    def size(self):
        return self.p * self.p

    def make(self, n):
        if isinstance(n, tuple):
            return (n[0] % self.p, n[1] % self.p)
        return (n % self.p, 0)

    def add(self, a, b):
        return ((a[0] + b[0]) % self.p, (a[1] + b[1]) % self.p)

    def sub(self, a, b):
        return ((a[0] - b[0]) % self.p, (a[1] - b[1]) % self.p)

    def mul(self, a, b):
        return (
            (a[0] * b[0] + self.n * a[1] * b[1]) % self.p,
            (a[0] * b[1] + a[1] * b[0]) % self.p,
        )

    def neg(self, a):
        return ((-a[0]) % self.p, (-a[1]) % self.p)

    def inv(self, a):
        nrm = (a[0] * a[0] - self.n * a[1] * a[1]) % self.p
        ninv = pow(nrm, -1, self.p)
        return ((a[0] * ninv) % self.p, (-a[1] * ninv) % self.p)

    def is_zero(self, a):
        return a[0] % self.p == 0 and a[1] % self.p == 0

    def sqrt(self, z):
        """A square root of z = a + b*w in F_{p^2}, or None."""
        p = self.p
        a, b = z[0] % p, z[1] % p
        if b == 0:
            r = sqrt_mod(a, p)
            if r is not NO_ROOT:
                return (r, 0)
            # a is a non-residue: a/n is a residue, sqrt = sqrt(a/n) * w
            r = sqrt_mod(a * pow(self.n, -1, p) % p, p)
            return None if r is NO_ROOT else (0, r)
        # (u + v*w)^2 = z:  u^2 + n v^2 = a,  2uv = b
        s = sqrt_mod((a * a - self.n * b * b) % p, p)
        if s is NO_ROOT:
            return None
        for t in ((a + s) * pow(2, -1, p) % p, (a - s) * pow(2, -1, p) % p):
            u = sqrt_mod(t, p)
            if u is not NO_ROOT and u != 0:
                v = b * pow(2 * u, -1, p) % p
                return (u, v)
        return None

    def elements(self):
        return ((u, v) for u in range(self.p) for v in range(self.p))


@dataclass
class CurveFp:
    """Long Weierstrass curve over a PrimeField or QuadExtField."""

    field: object
    a1: object
    a2: object
    a3: object
    a4: object
    a6: object

    @classmethod
    def from_ainvs(cls, field, ainvs):
        a1, a2, a3, a4, a6 = (field.make(a) for a in ainvs)
        return cls(field, a1, a2, a3, a4, a6)

    def b_invariants(self):
        F = self.field
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = F.add(F.mul(a1, a1), F.mul(F.make(4), a2))
        b4 = F.add(F.mul(F.make(2), a4), F.mul(a1, a3))
        b6 = F.add(F.mul(a3, a3), F.mul(F.make(4), a6))
        b8 = F.sub(
            F.add(
                F.add(F.mul(F.mul(a1, a1), a6), F.mul(F.mul(F.make(4), a2), a6)),
                F.mul(a2, F.mul(a3, a3)),
            ),
            F.add(F.mul(a1, F.mul(a3, a4)), F.mul(a4, a4)),
        )
        return b2, b4, b6, b8

    def discriminant(self):
        F = self.field
        b2, b4, b6, b8 = self.b_invariants()
        t1 = F.neg(F.mul(F.mul(b2, b2), b8))
        t2 = F.neg(F.mul(F.make(8), F.mul(b4, F.mul(b4, b4))))
        t3 = F.neg(F.mul(F.make(27), F.mul(b6, b6)))
        t4 = F.mul(F.make(9), F.mul(b2, F.mul(b4, b6)))
        return F.add(F.add(t1, t2), F.add(t3, t4))

    def is_singular(self):
        return self.field.is_zero(self.discriminant())

    def on_curve(self, P):
        if P is None:
            return True
        F = self.field
        x, y = P
        lhs = F.add(F.mul(y, y), F.add(F.mul(self.a1, F.mul(x, y)), F.mul(self.a3, y)))
        rhs = F.add(
            F.mul(x, F.mul(x, x)),
            F.add(F.mul(self.a2, F.mul(x, x)), F.add(F.mul(self.a4, x), self.a6)),
        )
        return F.is_zero(F.sub(lhs, rhs))

    def neg_point(self, P):
        if P is None:
            return None
        F = self.field
        x, y = P
        return (x, F.sub(F.neg(y), F.add(F.mul(self.a1, x), self.a3)))

    def add_points(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.field
        x1, y1 = P
        x2, y2 = Q
        if F.is_zero(F.sub(x1, x2)):
            # opposite or equal
            if F.is_zero(
                F.add(F.add(y1, y2), F.add(F.mul(self.a1, x2), self.a3))
            ):
                return None
            num = F.sub(
                F.add(
                    F.mul(F.make(3), F.mul(x1, x1)),
                    F.add(F.mul(F.make(2), F.mul(self.a2, x1)), self.a4),
                ),
                F.mul(self.a1, y1),
            )
            den = F.add(F.mul(F.make(2), y1), F.add(F.mul(self.a1, x1), self.a3))
            lam = F.mul(num, F.inv(den))
        else:
            lam = F.mul(F.sub(y2, y1), F.inv(F.sub(x2, x1)))
        nu = F.sub(y1, F.mul(lam, x1))
        x3 = F.sub(
            F.sub(F.add(F.mul(lam, lam), F.mul(self.a1, lam)), self.a2),
            F.add(x1, x2),
        )
        y3 = F.sub(
            F.neg(F.add(F.mul(F.add(lam, self.a1), x3), nu)),
            self.a3,
        )
        return (x3, y3)

    def mul_point(self, k, P):
        if k < 0:
            return self.mul_point(-k, self.neg_point(P))
        R = None
        Q = P
        while k:
            if k & 1:
                R = self.add_points(R, Q)
            Q = self.add_points(Q, Q)
            k >>= 1
        return R

    def points(self):
        """All affine points plus the identity (None first)."""
        F = self.field
        yield None
        two_inv = None
        for x in F.elements():
            x = F.make(x) if not isinstance(x, tuple) else x
            t = F.add(F.mul(self.a1, x), self.a3)
            rhs = F.add(
                F.mul(x, F.mul(x, x)),
                F.add(F.mul(self.a2, F.mul(x, x)), F.add(F.mul(self.a4, x), self.a6)),
            )
            if isinstance(F, PrimeField) and F.p == 2:
                for y in F.elements():
                    if self.on_curve((x, y)):
                        yield (x, y)
                continue
            # complete the square: (2y + t)^2 = 4 rhs + t^2
            d = F.add(F.mul(F.make(4), rhs), F.mul(t, t))
            s = F.sqrt(d)
            if s is None:
                continue
            if two_inv is None:
                two_inv = F.inv(F.make(2))
            y1 = F.mul(F.sub(s, t), two_inv)
            yield (x, y1)
            if not F.is_zero(s):
                yield (x, F.mul(F.sub(F.neg(s), t), two_inv))


def count_points_naive(ainvs, p):
    """#E(F_p) by per-x quadratic character sums (numpy-accelerated)."""
    a1, a2, a3, a4, a6 = (a % p for a in ainvs)
    if p == 2:
        E = CurveFp.from_ainvs(PrimeField(2), ainvs)
        if E.is_singular():
            raise SingularCurve("singular at 2")
        return sum(1 for _ in E.points())
    E = CurveFp.from_ainvs(PrimeField(p), ainvs)
    if E.is_singular():
        raise SingularCurve("singular at %d" % p)
    x = np.arange(p, dtype=np.int64)
    # chi lookup: chi[v] in {-1, 0, 1}
    chi = np.full(p, -1, dtype=np.int64)
    sq = (x * x) % p
    chi[sq] = 1
    chi[0] = 0
    rhs = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p
    t = (a1 * x + a3) % p
    d = (4 * rhs + t * t) % p
    return int(p + 1 + chi[d].sum())


def count_points(E):
    """#E(F) for a CurveFp over F_p (naive) or F_{p^2} (enumeration)."""
    if E.is_singular():
        raise SingularCurve("curve is singular")
    if isinstance(E.field, PrimeField):
        return count_points_naive((E.a1, E.a2, E.a3, E.a4, E.a6), E.field.p)
    return sum(1 for _ in E.points())


def trace_ap(curve, p):
    """a_p = p + 1 - #E~(F_p) for a global curve with good reduction at p."""
    cache = getattr(curve, "_ap_cache", None)
    if cache is None:
        try:
            cache = curve._ap_cache = {}
        except AttributeError:  # curve object may not accept attributes
            cache = {}
    if p not in cache:
        if curve.conductor % p == 0:
            raise BadReduction("p = %d divides the conductor" % p)
        cache[p] = p + 1 - count_points_naive(curve.ainvs, p)
    return cache[p]


def order_fp2(a_p, p):
    """#E(F_{p^2}) from a_p: p^2 + 1 - (a_p^2 - 2p)."""
    return p * p + 1 - (a_p * a_p - 2 * p)


def is_supersingular(curve, p):
    if p < 5:
        raise ValueError("supersingularity test implemented for p >= 5 only")
    return trace_ap(curve, p) == 0


def point_order(E, P, group_order):
    """Order of P in E(F), given a multiple of it (the group order)."""
    o = group_order
    for q, _ in factorize(group_order).factors:
        while o % q == 0 and E.mul_point(o // q, P) is None:
            o //= q
    return o


def divisible_by_p_in_reduction(E, Q, p, scan_bound=20000):
    """True iff Q = p*X has a solution X in E(F); exhaustive scan."""
    if E.field.size() > scan_bound:
        raise FieldTooLarge("field size %d exceeds scan bound" % E.field.size())
    if Q is None:
        return True
    for X in E.points():
        if E.mul_point(p, X) == Q:
            return True
    return False
