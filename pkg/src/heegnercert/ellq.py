"""Exact elliptic curve arithmetic over Q and over imaginary quadratic K.

CurveQ is a globally minimal integral long Weierstrass model with cached
invariants and local data from Tate's algorithm.  Points carry coordinates
that are either Fraction (points over Q) or QuadElem (points over K); the
chord-tangent group law is generic over both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import factorize, kronecker, primes_up_to
from .ellfp import (
    BadReduction,
    CurveFp,
    PrimeField,
    QuadExtField,
    divisible_by_p_in_reduction,
    order_fp2,
    trace_ap,
)
from .quadfield import INERT, RAMIFIED, SPLIT, QuadElem, splitting_type

# Kodaira types are plain strings: "I0", "I5", "II", ..., "I2*", "II*"
SPLIT_MULT = "split"
NONSPLIT_MULT = "nonsplit"
NOT_MULT = "not-multiplicative"


class NonMinimalModel(ValueError):
    def __init__(self, prime):
        self.prime = prime
        super().__init__("model is not minimal at %d" % prime)


class SingularModel(ValueError):
    pass


@dataclass(frozen=True)
class LocalData:
    ell: int
    kodaira: str
    f: int
    c: int
    mult_split: str

    def __post_init__(self):
        if self.kodaira[0] == "I" and self.kodaira[1:].isdigit():
            n = int(self.kodaira[1:])
            if n == 0:
                assert self.f == 0 and self.c == 1
            else:
                assert self.f == 1
                if self.mult_split == SPLIT_MULT:
                    assert self.c == n
                else:
                    assert self.c == (2 if n % 2 == 0 else 1)


def _b_invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _c_invariants(a):
    b2, b4, b6, _ = _b_invariants(a)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    return c4, c6


def _discriminant(a):
    b2, b4, b6, b8 = _b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _translate(a, r, s, t):
    """Coordinate change x -> x + r, y -> y + s*x + t (u = 1)."""
    a1, a2, a3, a4, a6 = a
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def _vp(n, p):
    if n == 0:
        return 10**9  # effectively infinite
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _quadratic_has_root(b, c, p):
    """Does T^2 + b*T + c have a root mod p?"""
    if p == 2:
        return c % 2 == 0 or (1 + b + c) % 2 == 0
    disc = (b * b - 4 * c) % p
    return disc == 0 or kronecker(disc, p) == 1


def _cubic_roots(b, c, d, p):
    """Roots of T^3 + b*T^2 + c*T + d mod p, with multiplicity info."""
    roots = []
    for t in range(p):
        if (((t + b) * t + c) * t + d) % p == 0:
            # multiplicity via derivative / second derivative
            d1 = (3 * t * t + 2 * b * t + c) % p
            if d1 != 0:
                roots.append((t, 1))
            else:
                d2 = (6 * t + 2 * b) % p
                roots.append((t, 2 if d2 != 0 else 3))
    return roots


def tate_algorithm(a_invariants, p):
    """Kodaira type, conductor exponent and Tamagawa number at p.

    Classical step-by-step procedure on a minimal integral model; raises
    NonMinimalModel if the final step is reached.
    """
    a = tuple(a_invariants)
    delta = _discriminant(a)
    if delta == 0:
        raise SingularModel("discriminant is zero")
    n = _vp(delta, p)
    if n == 0:
        return LocalData(p, "I0", 0, 1, NOT_MULT)
    c4, c6 = _c_invariants(a)
    if _vp(c4, p) == 0:
        # multiplicative: type In; split iff -c6 is a square unit
        if p == 2:
            split = (-c6) % 8 == 1
        else:
            split = kronecker(-c6, p) == 1
        if split:
            cp = n
        else:
            cp = 2 if n % 2 == 0 else 1
        return LocalData(p, "I%d" % n, 1, cp, SPLIT_MULT if split else NONSPLIT_MULT)

    # additive: move the singular point to the origin
    a = _translate(a, *_singular_shift(a, p))
    a1, a2, a3, a4, a6 = a
    assert a3 % p == 0 and a4 % p == 0 and a6 % p == 0

    if _vp(a6, p) < 2:
        return LocalData(p, "II", n, 1, NOT_MULT)
    _, _, _, b8 = _b_invariants(a)
    if _vp(b8, p) < 3:
        return LocalData(p, "III", n - 1, 2, NOT_MULT)
    _, _, b6, _ = _b_invariants(a)
    if _vp(b6, p) < 3:
        cp = 3 if _quadratic_has_root(a3 // p, -(a6 // (p * p)), p) else 1
        return LocalData(p, "IV", n - 2, cp, NOT_MULT)

    # arrange p | a1, a2; p^2 | a3, a4; p^3 | a6
    a = _translate(a, 0, *_step6_shift(a, p))
    a1, a2, a3, a4, a6 = a
    assert a1 % p == 0 and a2 % p == 0
    assert a3 % p**2 == 0 and a4 % p**2 == 0 and a6 % p**3 == 0

    b = (a2 // p) % p
    cc = (a4 // (p * p)) % p
    d = (a6 // p**3) % p
    roots = _cubic_roots(b, cc, d, p)
    mults = sorted(m for _, m in roots)
    if not mults or mults[-1] == 1:
        # distinct roots (a multiple root of a cubic over F_p is always
        # rational, so absence of rational multiple roots means distinct)
        return LocalData(p, "I0*", n - 4, 1 + len(roots), NOT_MULT)
    if mults[-1] == 2:
        # one double root: type Im*; translate the double root to the origin
        alpha = next(r for r, m in roots if m == 2)
        a = _translate(a, p * alpha, 0, 0)
        return _im_star_loop(a, p, n)
    # triple root: translate it to the origin
    alpha = roots[0][0]
    a = _translate(a, p * alpha, 0, 0)
    a1, a2, a3, a4, a6 = a
    assert _vp(a2, p) >= 2 and _vp(a4, p) >= 3 and _vp(a6, p) >= 4

    a3t = a3 // (p * p)
    a6t = a6 // p**4
    if (a3t * a3t + 4 * a6t) % p != 0:
        cp = 3 if _quadratic_has_root(a3t % p, (-a6t) % p, p) else 1
        return LocalData(p, "IV*", n - 6, cp, NOT_MULT)
    # translate y by p^2 times the double root, giving p^3 | a3, p^5 | a6
    t = _quadratic_root(a3t % p, (-a6t) % p, p)
    a = _translate(a, 0, 0, t * p * p)
    a1, a2, a3, a4, a6 = a
    assert _vp(a3, p) >= 3 and _vp(a6, p) >= 5
    if _vp(a4, p) < 4:
        return LocalData(p, "III*", n - 7, 2, NOT_MULT)
    if _vp(a6, p) < 6:
        return LocalData(p, "II*", n - 8, 1, NOT_MULT)
    raise NonMinimalModel(p)


def _quadratic_root(b, c, p):
    """A root of T^2 + b*T + c mod p (caller guarantees existence)."""
    for t in range(p):
        if (t * t + b * t + c) % p == 0:
            return t
    raise ArithmeticError("no root of T^2 + %d T + %d mod %d" % (b, c, p))


def _singular_shift(a, p):
    """(r, 0, t) moving the singular point of the reduction to the origin."""
    a1, a2, a3, a4, a6 = a
    if p in (2, 3):
        for r in range(p):
            for t in range(p):
                n = _translate(a, r, 0, t)
                if n[2] % p == 0 and n[3] % p == 0 and n[4] % p == 0:
                    return r, 0, t
        raise ArithmeticError("no singular shift found at %d" % p)
    b2, _, _, _ = _b_invariants(a)
    inv12 = pow(12, -1, p)
    r = (-b2 * inv12) % p
    t = (-(a1 * r + a3) * pow(2, -1, p)) % p
    return r, 0, t


def _step6_shift(a, p):
    """(s, t) giving p | a1', a2'; p^2 | a3', a4'; p^3 | a6'."""
    a1, a2, a3, a4, a6 = a
    if p in (2, 3):
        for s in range(p):
            for t in range(p * p):
                n = _translate(a, 0, s, t)
                if (
                    n[0] % p == 0
                    and n[1] % p == 0
                    and n[2] % p**2 == 0
                    and n[3] % p**2 == 0
                    and n[4] % p**3 == 0
                ):
                    return s, t
        raise ArithmeticError("no step-6 shift found at %d" % p)
    s = (-a1 * pow(2, -1, p)) % p
    a_s = _translate(a, 0, s, 0)
    t = (-a_s[2] * pow(2, -1, p * p)) % (p * p)
    return s, t


def _im_star_loop(a, p, n):
    """Subprocedure determining m and c for type Im*."""
    m = 1
    mx = p * p
    my = p * p
    while True:
        a1, a2, a3, a4, a6 = a
        a2t = a2 // p
        a3t = a3 // my
        a4t = a4 // (p * mx)
        a6t = a6 // (mx * my)
        # quadratic in Y: Y^2 + a3t*Y - a6t
        if (a3t * a3t + 4 * a6t) % p != 0:
            cp = 4 if _quadratic_has_root(a3t % p, (-a6t) % p, p) else 2
            break
        t = my * _quadratic_root(a3t % p, (-a6t) % p, p)
        a = _translate(a, 0, 0, t)
        assert _vp(a[2], p) >= _vp(my, p) + 1
        my *= p
        m += 1
        a1, a2, a3, a4, a6 = a
        a2t = a2 // p
        a4t = a4 // (p * mx)
        a6t = a6 // (mx * my)
        # quadratic in X: a2t*X^2 + a4t*X + a6t
        if (a4t * a4t - 4 * a2t * a6t) % p != 0:
            if p == 2:
                has = any(
                    (a2t * x * x + a4t * x + a6t) % p == 0 for x in range(p)
                )
            else:
                has = kronecker((a4t * a4t - 4 * a2t * a6t) % p, p) == 1
            cp = 4 if has else 2
            break
        r = mx * _quadratic_x_root(a2t, a4t, a6t, p)
        a = _translate(a, r, 0, 0)
        assert _vp(a[3], p) >= _vp(p * mx, p) + 1
        assert _vp(a[4], p) >= _vp(mx * my, p) + 1
        mx *= p
        m += 1
    return LocalData(p, "I%d*" % m, n - 4 - m, cp, NOT_MULT)


def _quadratic_x_root(a2t, a4t, a6t, p):
    for x in range(p):
        if (a2t * x * x + a4t * x + a6t) % p == 0:
            return x
    raise ArithmeticError("no root of quadratic in x mod %d" % p)


class CurveQ:
    """Minimal integral Weierstrass model over Q with derived invariants."""

    def __init__(self, a1, a2, a3, a4, a6, label=None):
        self.ainvs = (a1, a2, a3, a4, a6)
        self.a1, self.a2, self.a3, self.a4, self.a6 = self.ainvs
        self.label = label
        self.b2, self.b4, self.b6, self.b8 = _b_invariants(self.ainvs)
        self.c4, self.c6 = _c_invariants(self.ainvs)
        self.discriminant = _discriminant(self.ainvs)
        if self.discriminant == 0:
            raise SingularModel("discriminant is zero")
        assert self.c4**3 - self.c6**2 == 1728 * self.discriminant
        self._validate_minimal()
        self._local_data = {}
        self._conductor = None

    def _validate_minimal(self):
        for ell, e in factorize(abs(self.discriminant)).factors:
            if e >= 12 and _vp(self.c4, ell) >= 4:
                raise NonMinimalModel(ell)

    def local_data(self, ell):
        if ell not in self._local_data:
            self._local_data[ell] = tate_algorithm(self.ainvs, ell)
        return self._local_data[ell]

    @property
    def conductor(self):
        if self._conductor is None:
            N = 1
            for ell, _ in factorize(abs(self.discriminant)).factors:
                N *= ell ** self.local_data(ell).f
            self._conductor = N
        return self._conductor

    def bad_primes(self):
        return [ell for ell, _ in factorize(abs(self.discriminant)).factors
                if self.local_data(ell).f > 0]

    @property
    def j_invariant(self):
        return Fraction(self.c4**3, self.discriminant)

    def identity(self):
        return PointK(self, None, None, True)

    def point(self, x, y):
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(y, int):
            y = Fraction(y)
        P = PointK(self, x, y, False)
        if not P.on_curve():
            raise ValueError("(%r, %r) is not on %r" % (x, y, self))
        return P

    def __repr__(self):
        lab = " (%s)" % self.label if self.label else ""
        return "CurveQ%r%s" % (self.ainvs, lab)


@dataclass(frozen=True)
class PointK:
    """A point with Fraction or QuadElem coordinates, or the identity."""

    curve: CurveQ
    x: object
    y: object
    infinity: bool = False

    def on_curve(self):
        if self.infinity:
            return True
        E, x, y = self.curve, self.x, self.y
        lhs = y * y + E.a1 * x * y + E.a3 * y
        rhs = x * x * x + E.a2 * x * x + E.a4 * x + E.a6
        diff = lhs - rhs
        if isinstance(diff, QuadElem):
            return diff.is_zero()
        return diff == 0

    def __neg__(self):
        if self.infinity:
            return self
        E = self.curve
        return PointK(E, self.x, -self.y - E.a1 * self.x - E.a3, False)

    def __add__(self, other):
        if self.infinity:
            return other
        if other.infinity:
            return self
        E = self.curve
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        dx = x2 - x1
        dx_zero = dx.is_zero() if isinstance(dx, QuadElem) else dx == 0
        if dx_zero:
            ys = y1 + y2 + E.a1 * x2 + E.a3
            ys_zero = ys.is_zero() if isinstance(ys, QuadElem) else ys == 0
            if ys_zero:
                return E.identity()
            lam = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) / (
                2 * y1 + E.a1 * x1 + E.a3
            )
        else:
            lam = (y2 - y1) / dx
        nu = y1 - lam * x1
        x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
        y3 = -(lam + E.a1) * x3 - nu - E.a3
        return PointK(E, x3, y3, False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        P = self if k >= 0 else -self
        k = abs(k)
        R = self.curve.identity()
        while k:
            if k & 1:
                R = R + P
            P = P + P
            k >>= 1
        return R

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PointK):
            return NotImplemented
        if self.infinity or other.infinity:
            return self.infinity and other.infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash(("PointK", self.infinity, self.x, self.y))

    def field(self):
        """The QuadField of the coordinates, or None for rational points."""
        if self.infinity:
            return None
        return self.x.field if isinstance(self.x, QuadElem) else None

    def __repr__(self):
        if self.infinity:
            return "PointK(identity)"
        return "PointK(%r, %r)" % (self.x, self.y)


# ---------------------------------------------------------------------------
# reduction of exact points at primes of K


def frac_val(q, ell):
    """ell-adic valuation of a Fraction / int."""
    q = Fraction(q)
    if q == 0:
        return 10**9
    return _vp(q.numerator, ell) - _vp(q.denominator, ell)


def _hensel_sqrt(D, ell, prec):
    """Lift a root of x^2 = D to mod ell^prec (ell odd, ell coprime to D)."""
    from .arith import sqrt_mod, NO_ROOT

    r = sqrt_mod(D, ell)
    if r is NO_ROOT:
        raise ValueError("%d is not a square mod %d" % (D, ell))
    mod = ell
    x = r
    while mod < ell**prec:
        mod *= ell
        x = (x - (x * x - D) * pow(2 * x, -1, mod)) % mod
    return x % ell**prec


def split_valuation(elem, ell, beta_hint=None):
    """Valuation of r + s*sqrt(D) at the split place of ell given by beta.

    beta_hint is a Hensel-lifted root of D; precision is raised until the
    valuation is certain.
    """
    if isinstance(elem, (int, Fraction)):
        return frac_val(elem, ell)
    if elem.is_zero():
        return 10**9
    D = elem.field.D
    prec = 8
    while True:
        beta = _hensel_sqrt(D, ell, prec) if beta_hint is None else beta_hint
        t = Fraction(elem.r) + Fraction(elem.s) * beta
        v = frac_val(t, ell)
        s_val = frac_val(elem.s, ell) if elem.s else 10**9
        if v < prec + min(s_val, 0) or elem.s == 0:
            return v
        if beta_hint is not None:
            beta_hint = None  # hint precision insufficient; re-lift
        prec *= 2
        if prec > 4096:
            raise ArithmeticError("valuation did not stabilize")


class Place:
    """A prime of K above ell with residue degree 1 (split) or 2 (inert)."""

    def __init__(self, K, ell, conjugate=False):
        self.K = K
        self.ell = ell
        self.type = splitting_type(K, ell) if K is not None else SPLIT
        self.conjugate = conjugate
        if self.type == RAMIFIED:
            raise ValueError("ramified places are out of scope")
        if self.type == SPLIT and K is not None:
            beta = _hensel_sqrt(K.D, ell, 24)
            self.beta = (ell**24 - beta) if conjugate else beta
        if self.type == INERT:
            self.res_field = QuadExtField(ell)
            # image of sqrt(D): c*w with c = sqrt(D/n) mod ell
            from .arith import sqrt_mod

            n = self.res_field.n
            self.sqrtD_image = (0, sqrt_mod(K.D * pow(n, -1, ell) % ell, ell))

    def residue_field(self):
        if self.type == INERT:
            return self.res_field
        return PrimeField(self.ell)

    def valuation(self, elem):
        if self.type == INERT:
            if isinstance(elem, (int, Fraction)):
                return frac_val(elem, self.ell)
            return min(frac_val(elem.r, self.ell) if elem.r else 10**9,
                       frac_val(elem.s, self.ell) if elem.s else 10**9)
        return split_valuation(elem, self.ell, getattr(self, "beta", None))

    def residue(self, elem):
        """Image of a place-integral element in the residue field."""
        ell = self.ell
        if self.type == INERT:
            F = self.res_field
            r = _frac_mod(Fraction(elem.r if isinstance(elem, QuadElem) else elem), ell)
            if isinstance(elem, QuadElem):
                s = _frac_mod(Fraction(elem.s), ell)
                return F.add((r, 0), F.mul((s, 0), self.sqrtD_image))
            return (r, 0)
        if isinstance(elem, QuadElem):
            t = Fraction(elem.r) + Fraction(elem.s) * self.beta
        else:
            t = Fraction(elem)
        return _frac_mod(t, ell)


def _frac_mod(q, ell):
    q = Fraction(q)
    if q.denominator % ell == 0:
        raise BadReduction("denominator divisible by %d" % ell)
    return q.numerator * pow(q.denominator, -1, ell) % ell


def reduce_point(P, place):
    """Reduce an exact point at a place of good reduction.

    Points with a pole at the place (negative x-valuation) reduce to the
    identity; everything else reduces coordinate-wise.
    """
    E = P.curve
    if E.conductor % place.ell == 0:
        raise BadReduction("bad reduction at %d" % place.ell)
    F = place.residue_field()
    Ered = CurveFp.from_ainvs(F, E.ainvs)
    if P.infinity:
        return Ered, None
    if place.valuation(P.x) < 0:
        return Ered, None
    Q = (place.residue(P.x), place.residue(P.y))
    assert Ered.on_curve(Q)
    return Ered, Q


# ---------------------------------------------------------------------------
# torsion bounds and certificates


def good_auxiliary_primes(E, K=None, count=10, start=3, skip=()):
    """Good primes (unramified in K when given), residue char >= 3."""
    out = []
    ell = start - 1
    while len(out) < count:
        ell += 1
        while not _is_prime_cached(ell):
            ell += 1
        if E.conductor % ell == 0 or ell in skip:
            continue
        if K is not None and splitting_type(K, ell) == RAMIFIED:
            continue
        out.append(ell)
    return out


_prime_cache = {}


def _is_prime_cached(n):
    if n not in _prime_cache:
        from .arith import is_prime

        _prime_cache[n] = is_prime(n)
    return _prime_cache[n]


def residue_group_order(E, K, ell):
    """#E(k_w) for a place w of K above a good prime ell (K may be None)."""
    ap = trace_ap(E, ell)
    if K is None or splitting_type(K, ell) == SPLIT:
        return ell + 1 - ap
    if splitting_type(K, ell) == INERT:
        return order_fp2(ap, ell)
    raise ValueError("ramified prime")


def torsion_bound(E, K=None, aux_primes=10):
    """gcd of residue group orders: a multiple of #E(K)_tors."""
    B = 0
    for ell in good_auxiliary_primes(E, K, count=aux_primes):
        B = gcd(B, residue_group_order(E, K, ell))
        if B == 1:
            break
    return max(B, 1)


@dataclass(frozen=True)
class InfiniteOrder:
    certified: bool
    torsion_order: int = 0  # annihilating multiple when not certified
    bound: int = 0


def infinite_order_certificate(P, aux_primes=10):
    """Certified iff k*P != O for all k up to the torsion bound."""
    if P.infinity:
        raise ValueError("identity has order 1; not a valid input")
    B = torsion_bound(P.curve, P.field(), aux_primes)
    Q = P.curve.identity()
    for k in range(1, B + 1):
        Q = Q + P
        if Q.infinity:
            return InfiniteOrder(False, k, B)
    return InfiniteOrder(True, 0, B)


@dataclass(frozen=True)
class ConditionB:
    status: str  # "not-divisible" or "inconclusive"
    witness: tuple = None  # (ell, place-kind) when not-divisible
    bound: int = 0


def condition_b_certificate(E, K, p, y_K, aux_bound=10000, inert_cap=97):
    """One-sided certificate that p does not divide y_K in E(K)/tors.

    Scans places w with p | #E(k_w) and tests p-divisibility of the reduction
    of m*y_K (m = prime-to-p part of the torsion bound) by exhaustive search.
    """
    B = torsion_bound(E, K)
    m = B
    while m % p == 0:
        m //= p
    y = m * y_K
    if y.infinity:
        return ConditionB("inconclusive", None, 0)
    for ell in primes_up_to(aux_bound):
        if ell < 3 or E.conductor % ell == 0 or ell == p or K.D % ell == 0:
            continue
        st = splitting_type(K, ell)
        if st == SPLIT:
            M = ell + 1 - trace_ap(E, ell)
            if M % p:
                continue
            places = [Place(K, ell, conjugate=False), Place(K, ell, conjugate=True)]
        elif st == INERT and ell <= inert_cap:
            M = residue_group_order(E, K, ell)
            if M % p:
                continue
            places = [Place(K, ell)]
        else:
            continue
        for place in places:
            Ered, Q = reduce_point(y, place)
            if Q is None:
                continue  # identity is always p-divisible; no information
            if not divisible_by_p_in_reduction(Ered, Q, p):
                kind = "split" if st == SPLIT else "inert"
                return ConditionB(
                    "not-divisible", (ell, kind, place.conjugate), aux_bound
                )
    return ConditionB("inconclusive", None, aux_bound)
