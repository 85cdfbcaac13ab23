"""Surjectivity certificates for the mod-p Galois image.

The image of Gal(Qbar/Q) on the p-torsion is certified to be all of
GL_2(F_p) by a sieve over Frobenius samples (a_ell, ell) mod p: three
sample conditions jointly rule out every maximal subgroup class (Borel,
split/nonsplit Cartan normalizers, exceptional projective images).  The
certificate is one-sided; failure to certify is Inconclusive unless a
constructive obstruction (rational p-torsion) is found.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import is_prime, kronecker, primes_up_to
from .ellfp import trace_ap
from .ellq import torsion_bound

SURJECTIVE = "surjective"
NOT_SURJECTIVE = "not-surjective"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FrobeniusSample:
    ell: int
    trace: int  # a_ell mod p
    det: int  # ell mod p

    def __post_init__(self):
        assert self.det != 0, "sample at a prime dividing p"


@dataclass(frozen=True)
class SurjectivityResult:
    status: str
    witnesses: dict = None  # criterion name -> witnessing ell
    reason: str = None
    ell_max: int = 0


def frobenius_samples(E, p, ell_max):
    """Samples (a_ell mod p, ell mod p) for good primes ell != p."""
    out = []
    for ell in primes_up_to(ell_max):
        if E.conductor % ell == 0 or ell == p:
            continue
        out.append(FrobeniusSample(ell, trace_ap(E, ell) % p, ell % p))
    return out


def rational_p_torsion_point(E, p, x_bound=200):
    """A rational point of exact order p, if a small-height one exists.

    Scans integral x (torsion points on a minimal model have integral
    coordinates away from 2, 3 by Lutz-Nagell; the scan is a bounded
    constructive search, not a completeness claim).
    """
    from .ellq import PointK

    for x in range(-x_bound, x_bound + 1):
        # y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6) = 0
        t = E.a1 * x + E.a3
        rhs = x**3 + E.a2 * x * x + E.a4 * x + E.a6
        disc = t * t + 4 * rhs
        if disc < 0:
            continue
        from math import isqrt

        s = isqrt(disc)
        if s * s != disc:
            continue
        for y2 in (s, -s):
            if (y2 - t) % 2:
                continue
            y = (y2 - t) // 2
            P = PointK(E, Fraction(x), Fraction(y), False)
            if not P.on_curve():
                continue
            if (p * P).infinity and not P.infinity:
                # exact order p (p prime, P nonzero)
                return P
    return None


def surjectivity_certificate(E, p, ell_max=1000):
    """Certify Gal(Q(E[p])/Q) = GL_2(F_p) from Frobenius data.

    Criteria on samples (t, d) = (a_ell, ell) mod p:
      (1) x^2 - t x + d irreducible mod p      (no Borel / split Cartan)
      (2) t != 0 and t^2 - 4d a nonzero square (with (1): no Cartan normalizer)
      (3) t != 0 and t^2/d not in {0, 1, 2, 4} (no exceptional projective image)
    """
    if not is_prime(p) or p < 5:
        raise ValueError("p must be a prime >= 5")
    if E.conductor % p == 0:
        raise ValueError("p divides the conductor")
    w1 = w2 = w3 = None
    for ell in primes_up_to(ell_max):
        if E.conductor % ell == 0 or ell == p:
            continue
        t = trace_ap(E, ell) % p
        d = ell % p
        disc = (t * t - 4 * d) % p
        if w1 is None and kronecker(disc, p) == -1:
            w1 = ell
        if w2 is None and t != 0 and disc != 0 and kronecker(disc, p) == 1:
            w2 = ell
        if w3 is None and t != 0:
            u = t * t * pow(d, -1, p) % p
            if u not in (0, 1, 2, 4):
                w3 = ell
        if w1 is not None and w2 is not None and w3 is not None:
            return SurjectivityResult(
                SURJECTIVE,
                {"irreducible": w1, "split-square": w2, "projective-order": w3},
                None,
                ell_max,
            )
    # no certificate; look for a constructive reason
    if torsion_bound(E) % p == 0:
        P = rational_p_torsion_point(E, p)
        if P is not None:
            return SurjectivityResult(
                NOT_SURJECTIVE,
                None,
                "rational %d-torsion point (%s, %s) forces a reducible image"
                % (p, P.x, P.y),
                ell_max,
            )
    return SurjectivityResult(INCONCLUSIVE, None, None, ell_max)
