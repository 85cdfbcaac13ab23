"""Imaginary quadratic fields K = Q(sqrt(D)).

Class numbers come from exhaustive enumeration of reduced binary quadratic
forms, element arithmetic is exact (r + s*sqrt(D) with rational r, s), and the
Heegner machinery (splitting, the hypothesis, square roots of D mod 4N, and
one form per ideal class at level N) lives here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .arith import NO_ROOT, crt, factorize, kronecker, sqrt_mod

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


class NotFundamental(ValueError):
    pass


class ExcludedDiscriminant(ValueError):
    pass


class NoSquareRoot(ValueError):
    pass


def is_fundamental_discriminant(D):
    if D >= 0:
        return False
    if D % 4 == 1:
        return _squarefree(-D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(-m)
    return False


def _squarefree(n):
    for q, e in factorize(n).factors:
        if e > 1:
            return False
    return True


def reduce_form(a, b, c):
    """Reduce a primitive positive definite form to its canonical representative.

    Conventions: |b| <= a <= c, and b >= 0 whenever |b| == a or a == c.
    """
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form is not positive definite")
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            b2 = b + 2 * k * a
            c = c + k * (b + k * a)
            b = b2
            continue
        break
    if (b < 0) and (a == c or b == -a):
        b = -b
    return a, b, c


def reduced_forms(D):
    """All reduced primitive forms of discriminant D < 0, sorted by (a, b)."""
    forms = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        # -a < b <= a excludes b = -a; the other boundary tie is a == c
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
    return sorted(forms)


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt(D)) for a fundamental discriminant D < 0, D not in {-3, -4}."""

    D: int
    h: int

    def sqrt_disc(self):
        return QuadElem(Fraction(0), Fraction(1), self)

    def element(self, r, s=0):
        return QuadElem(Fraction(r), Fraction(s), self)


def make_field(D):
    if D in (-3, -4):
        raise ExcludedDiscriminant("discriminant %d is excluded" % D)
    if not is_fundamental_discriminant(D):
        raise NotFundamental("%d is not a fundamental discriminant < 0" % D)
    return QuadField(D, len(reduced_forms(D)))


@dataclass(frozen=True)
class QuadElem:
    """r + s*sqrt(D), with exact rational r, s."""

    r: Fraction
    s: Fraction
    field: QuadField

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.field.D != self.field.D:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(Fraction(other), Fraction(0), self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadElem(self.r + o.r, self.s + o.s, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.r, -self.s, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        D = self.field.D
        return QuadElem(
            self.r * o.r + D * self.s * o.s,
            self.r * o.s + self.s * o.r,
            self.field,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return QuadElem(self.r, -self.s, self.field)

    def norm(self):
        return self.r * self.r - self.field.D * self.s * self.s

    def trace(self):
        return 2 * self.r

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.r / n, -self.s / n, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.s == 0 and self.r == other
        if isinstance(other, QuadElem):
            return (
                self.field.D == other.field.D
                and self.r == other.r
                and self.s == other.s
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.r, self.s, self.field.D))

    def is_zero(self):
        return self.r == 0 and self.s == 0

    def __repr__(self):
        return "(%s + %s*sqrt(%d))" % (self.r, self.s, self.field.D)


def splitting_type(K, ell):
    """Behavior of the rational prime ell in K/Q."""
    sym = kronecker(K.D, ell)
    if sym == 1:
        return SPLIT
    if sym == -1:
        return INERT
    return RAMIFIED


def heegner_hypothesis(K, N):
    """True iff every prime dividing N splits in K/Q; returns (ok, witnesses)."""
    witnesses = []
    ok = True
    for ell in factorize(N).primes():
        t = splitting_type(K, ell)
        witnesses.append((ell, t))
        if t != SPLIT:
            ok = False
    return ok, witnesses


def sqrt_disc_mod(K, N):
    """Smallest beta with 0 <= beta < 2N and beta^2 = D (mod 4N).

    Exists when every prime dividing N splits and gcd(N, D) = 1.  Assembled by
    CRT across the prime powers of 4N, then verified; falls back to a direct
    scan (cheap at this scale) if assembly fails.
    """
    D = K.D
    ok, _ = heegner_hypothesis(K, N)
    if not ok or gcd(N, D) != 1:
        raise NoSquareRoot("no square root of %d mod %d" % (D, 4 * N))
    # roots mod each prime power of 4N, combined by CRT; smallest combination
    root_lists = []
    moduli = []
    good = True
    for q, e in factorize(4 * N).factors:
        qe = q**e
        roots = sorted({x % qe for x in _prime_power_roots(D, q, e)})
        if not roots:
            good = False
            break
        root_lists.append(roots)
        moduli.append(qe)
    best = None
    if good:
        combos = [[]]
        for roots in root_lists:
            combos = [c + [r] for c in combos for r in roots]
        for combo in combos:
            beta, _ = crt(combo, moduli)
            beta %= 4 * N
            if beta < 2 * N and (best is None or beta < best):
                best = beta
    if best is None:
        # exhaustive fallback; also the oracle the CRT path is tested against
        for beta in range(2 * N):
            if (beta * beta - D) % (4 * N) == 0:
                best = beta
                break
    if best is None:
        raise NoSquareRoot("no square root of %d mod %d" % (D, 4 * N))
    return best


def _prime_power_roots(a, q, e):
    """All solutions of x^2 = a mod q^e (q^e small: the 2-part of 4N, or an
    odd prime power, where Hensel lifting gives the two roots)."""
    qe = q**e
    a %= qe
    if q == 2 or a % q == 0:
        return [x for x in range(qe) if (x * x - a) % qe == 0]
    r = sqrt_mod(a, q)
    if r is NO_ROOT:
        return []
    x = r
    mod = q
    while mod < qe:
        mod *= q
        # Newton step: x <- x - (x^2 - a)/(2x)
        x = (x - (x * x - a) * pow(2 * x, -1, mod)) % mod
    return [x, qe - x]


def heegner_forms(K, N, beta):
    """One form [a, b, c] per ideal class, with N | a and b = beta (mod 2N).

    The forms returned are the *unreduced* level-N representatives (their root
    tau = (-b + sqrt(D))/(2a) is a Heegner point of level N); each reduces to a
    distinct reduced form, and together they cover the class group.  Scanning
    order makes the selection deterministic and favors small a, which keeps
    |q| = exp(-pi*sqrt(|D|)/a) small for the analytic step.
    """
    D = K.D
    if (beta * beta - D) % (4 * N) != 0:
        raise ValueError("beta^2 != D mod 4N")
    found = {}
    a_mult = 0
    while len(found) < K.h:
        a_mult += 1
        if a_mult > 100 * K.h * (abs(D) + 4 * N):
            raise RuntimeError("class group coverage scan did not terminate")
        a = N * a_mult
        for b in range(beta % (2 * N), 2 * a, 2 * N):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if gcd(gcd(a, b), c) != 1:
                continue
            key = reduce_form(a, b, c)
            if key not in found:
                found[key] = (a, b, c)
                if len(found) == K.h:
                    break
    return sorted(found.values())
