"""Exact integer and modular arithmetic primitives.

Everything here is deterministic and works on plain Python ints.  Inputs are
desk-scale (factorization targets fit in 64 bits), so trial division and
small-base deterministic primality testing are enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

import sympy


class NoRoot:
    """Sentinel: the requested modular square root does not exist."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoRoot"


NO_ROOT = NoRoot()


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple  # ((prime, exponent), ...) with primes strictly increasing

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("Factorization is defined for positive integers")
        prod = 1
        prev = 1
        for q, e in self.factors:
            if q <= prev or e < 1 or not is_prime(q):
                raise ValueError("invalid factor list %r" % (self.factors,))
            prev = q
            prod *= q**e
        if prod != self.value:
            raise ValueError("factors do not multiply back to %d" % self.value)

    def primes(self):
        return [q for q, _ in self.factors]


def is_prime(n):
    """Deterministic primality for |n| <= 2**63."""
    if n < 2:
        return False
    # sympy.isprime is a deterministic BPSW test below 2^64
    return sympy.isprime(n)


def factorize(n):
    """Factor a positive integer by trial division (desk-scale inputs)."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    m = n
    factors = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def euler_phi(n):
    """Euler totient, computed from the factorization."""
    if n < 1:
        raise ValueError("euler_phi requires n >= 1")
    result = n
    for q, _ in factorize(n).factors:
        result = result // q * (q - 1)
    return result


def kronecker(a, n):
    """Kronecker symbol (a|n), the standard extension of the Legendre symbol."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # pull out the 2-part of n
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    # Jacobi symbol (a|n) for odd n > 0 by quadratic reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod(a, p):
    """Square root of a mod an odd prime p, or NO_ROOT.

    Returns the smallest nonnegative root (deterministic).
    """
    a %= p
    if a == 0:
        return 0
    if kronecker(a, p) == -1:
        return NO_ROOT
    r = sympy.ntheory.sqrt_mod(a, p)
    if r is None:  # pragma: no cover - kronecker check already rules this out
        return NO_ROOT
    return min(r, p - r)


def crt(residues, moduli):
    """Chinese remainder lift; moduli must be pairwise coprime."""
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        g = gcd(m, q)
        if g != 1:
            raise ValueError("moduli not coprime")
        # solve x' = x mod m, x' = r mod q
        t = ((r - x) * pow(m, -1, q)) % q
        x += m * t
        m *= q
    return x % m, m


def primes_up_to(n):
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for q in range(2, isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytearray(len(sieve[q * q :: q]))
    return [i for i, v in enumerate(sieve) if v]
