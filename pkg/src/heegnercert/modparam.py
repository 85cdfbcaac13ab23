"""Modular parametrization and Heegner points.

The analytic pipeline: newform coefficients by point counting plus Hecke
recursions, evaluation of z(tau) = sum a_n q^n / n at Heegner points, the
period lattice (Carlson symmetric integrals, validated against Eisenstein
series), Weierstrass functions by u,q-series, and exact recognition of the
trace point in E(K).  The decisive gate is exact: the recognized point must
satisfy the curve equation in K, so floating error can never certify.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd, log

import mpmath as mp

from .arith import primes_up_to
from .ellfp import trace_ap
from .ellq import NOT_MULT, SPLIT_MULT, PointK
from .quadfield import QuadElem, heegner_forms, sqrt_disc_mod


class PrecisionUnreachable(RuntimeError):
    pass


class NearLatticePoint(ArithmeticError):
    pass


class RecognitionFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class Newform:
    """Integral q-expansion coefficients a_1..a_{n_max} of the level-N newform."""

    N: int
    coeffs: tuple  # coeffs[n] = a_n; coeffs[0] = 0 placeholder

    def __post_init__(self):
        assert self.coeffs[1] == 1

    @property
    def n_max(self):
        return len(self.coeffs) - 1


def newform_coeffs(E, n_max):
    """a_n for n <= n_max: counting for good primes, local data for bad ones,
    Hecke recursions for prime powers, multiplicativity for the rest."""
    N = E.conductor
    a = [0] * (n_max + 1)
    if n_max >= 1:
        a[1] = 1
    spf = list(range(n_max + 1))  # smallest prime factor sieve
    for q in range(2, n_max + 1):
        if spf[q] == q:
            for mult in range(q * q, n_max + 1, q):
                if spf[mult] == mult:
                    spf[mult] = q
    for ell in primes_up_to(n_max):
        if N % ell == 0:
            ld = E.local_data(ell)
            if ld.mult_split == NOT_MULT:
                aell = 0
            elif ld.mult_split == SPLIT_MULT:
                aell = 1
            else:
                aell = -1
            a[ell] = aell
            pk = ell * ell
            while pk <= n_max:
                a[pk] = a[pk // ell] * aell
                pk *= ell
        else:
            aell = trace_ap(E, ell)
            a[ell] = aell
            pk = ell * ell
            prev2, prev1 = 1, aell
            while pk <= n_max:
                cur = aell * prev1 - ell * prev2
                a[pk] = cur
                prev2, prev1 = prev1, cur
                pk *= ell
    for n in range(2, n_max + 1):
        q = spf[n]
        if q == n:
            continue
        pk = q
        m = n // q
        while m % q == 0:
            m //= q
            pk *= q
        if m > 1:
            a[n] = a[pk] * a[m]
    return Newform(N, tuple(a))


def heegner_taus(N, K, beta):
    """Upper-half-plane roots tau = (-b + sqrt(D))/(2a) of the Heegner forms."""
    forms = heegner_forms(K, N, beta)
    sD = mp.sqrt(abs(K.D)) * 1j
    return [(-b + sD) / (2 * a) for a, b, _ in forms]


def param_z(f, tau, target_digits):
    """z(tau) = sum a_n q^n / n truncated with a certified tail bound.

    With |a_n| <= n the tail after M terms is below |q|^(M+1)/(1-|q|).
    """
    q = mp.e ** (2j * mp.pi * tau)
    absq = abs(q)
    if absq >= 1:
        raise ValueError("tau not in the upper half plane")
    tol = mp.mpf(10) ** (-target_digits)
    M = int(ceil((target_digits + 5) * log(10) / -log(absq))) + 2
    if M > f.n_max:
        raise PrecisionUnreachable(
            "needs %d coefficients, newform carries %d" % (M, f.n_max)
        )
    z = mp.mpc(0)
    qn = mp.mpc(1)
    for n in range(1, M + 1):
        qn *= q
        c = f.coeffs[n]
        if c:
            z += mp.mpf(c) / n * qn
    assert absq ** (M + 1) / (1 - absq) < tol
    return z


@dataclass
class PeriodLattice:
    omega1: object  # real period (mpf, positive)
    omega2: object  # complex period, Im(omega2/omega1) > 0
    tau: object  # omega2/omega1, normalized


def period_lattice(E, target_digits):
    """Basis (omega1, omega2) of the period lattice with E(C) = C/Lambda.

    omega1 from the Carlson integral over the unbounded real component;
    omega2 chosen from candidate symmetric integrals and certified by
    reconstructing c4 = (2pi/omega1)^4 E4(tau) and the matching c6.
    """
    with mp.workdps(target_digits + 15):
        rts = mp.polyroots(
            [4, E.b2, 2 * E.b4, E.b6], maxsteps=400, extraprec=120
        )
        rts = sorted(rts, key=lambda r: (abs(mp.im(r)), -mp.re(r)))
        e1, e2, e3 = rts
        om1 = 2 * mp.elliprf(0, e1 - e2, e1 - e3)
        assert abs(mp.im(om1)) < mp.mpf(10) ** (-target_digits + 5)
        om1 = abs(mp.re(om1))
        cands = []
        for f1, f2, f3 in ((e2, e1, e3), (e3, e1, e2)):
            B = 2 * mp.elliprf(0, f1 - f2, f1 - f3)
            for s in (B, -B):
                for k in (0, 1, -1):
                    cands.append(s + k * om1)
        tol = mp.mpf(10) ** (-(target_digits - 5))
        for om2 in cands:
            tau = om2 / om1
            if mp.im(tau) < 0.03:
                continue
            tau = tau - mp.nint(mp.re(tau))
            q = mp.e ** (2j * mp.pi * tau)
            E4 = 1 + 240 * mp.nsum(
                lambda n: n**3 * q**n / (1 - q**n), [1, mp.inf]
            )
            E6 = 1 - 504 * mp.nsum(
                lambda n: n**5 * q**n / (1 - q**n), [1, mp.inf]
            )
            c4r = (2 * mp.pi / om1) ** 4 * E4
            c6r = (2 * mp.pi / om1) ** 6 * E6
            if abs(c4r - E.c4) < tol and abs(c6r - E.c6) < tol:
                return PeriodLattice(om1, tau * om1, tau)
        raise ArithmeticError("no certified period basis found")


def complex_to_curve(z, L, E):
    """(x, y) on the long Weierstrass model for z mod the lattice.

    Weierstrass functions by the u,q-series; x = p(z) - b2/12 and
    2y + a1 x + a3 = p'(z).
    """
    dps = mp.mp.dps
    om1, tau = L.omega1, L.tau
    q = mp.e ** (2j * mp.pi * tau)
    w = z / om1
    w = w - mp.nint(mp.im(w) / mp.im(tau)) * tau
    w = w - mp.nint(mp.re(w))
    u = mp.e ** (2j * mp.pi * w)
    if abs(1 - u) < mp.mpf(10) ** (-dps // 3):
        raise NearLatticePoint("z is too close to the lattice")
    X = u / (1 - u) ** 2
    Y = u * (1 + u) / (1 - u) ** 3
    tol = mp.mpf(10) ** (-dps - 5)
    qn = mp.mpc(1)
    for _ in range(10 * dps + 100):
        qn *= q
        if abs(qn) < tol:
            break
        for v in (qn * u, qn / u):
            X += v / (1 - v) ** 2
        X -= 2 * qn / (1 - qn) ** 2
        Y += qn * u * (1 + qn * u) / (1 - qn * u) ** 3
        Y -= (qn / u) * (1 + qn / u) / (1 - qn / u) ** 3
    wp = (2j * mp.pi / om1) ** 2 * (X + mp.mpf(1) / 12)
    wpp = (2j * mp.pi / om1) ** 3 * Y
    x = wp - mp.mpf(E.b2) / 12
    y = (wpp - E.a1 * x - E.a3) / 2
    return x, y


@dataclass
class HeegnerResult:
    tau_list: list
    z_sum: object
    point: PointK
    on_curve_exact: bool
    infinite_order: bool


def _recognize_rational(v, denom_bound, tol):
    """Nearest rational of bounded denominator, or None if not close."""
    fr = Fraction(mp.nstr(v, mp.mp.dps, strip_zeros=False)).limit_denominator(
        denom_bound
    )
    if abs(v - mp.mpf(fr.numerator) / fr.denominator) < tol:
        return fr
    return None


def heegner_trace(E, K, target_digits=40, denom_bound=10**12, coeff_budget=200000):
    """The trace y_K of the Heegner point, recognized exactly in E(K).

    Computes z = sum over the h Heegner taus of z(tau) (the analytic trace),
    maps it to E(C), and reconstructs x, y as r + s*sqrt(D); the result is
    only returned when it satisfies the curve equation exactly over K.
    Automatically retries at doubled precision.
    """
    from .ellq import infinite_order_certificate

    N = E.conductor
    beta = sqrt_disc_mod(K, N)
    forms = heegner_forms(K, N, beta)
    digits = target_digits
    last_error = None
    for _ in range(3):
        with mp.workdps(digits + 15):
            taus = heegner_taus(N, K, beta)
            worst = max(abs(mp.e ** (2j * mp.pi * t)) for t in taus)
            M = int(ceil((digits + 10) * log(10) / -log(worst))) + 2
            if M > coeff_budget:
                raise PrecisionUnreachable(
                    "coefficient budget %d exceeded (need %d)" % (coeff_budget, M)
                )
            f = newform_coeffs(E, M)
            z_sum = sum(param_z(f, t, digits + 5) for t in taus)
            L = period_lattice(E, digits)
            try:
                xc, yc = complex_to_curve(z_sum, L, E)
            except NearLatticePoint as err:
                last_error = err
                digits *= 2
                continue
            sqrtabsD = mp.sqrt(abs(K.D))
            tol = mp.mpf(10) ** (-(digits - 12))
            parts = []
            for v in (xc, yc):
                parts.append(_recognize_rational(mp.re(v), denom_bound, tol))
                parts.append(
                    _recognize_rational(mp.im(v) / sqrtabsD, denom_bound, tol)
                )
            if all(pr is not None for pr in parts):
                x = QuadElem(parts[0], parts[1], K)
                y = QuadElem(parts[2], parts[3], K)
                P = PointK(E, x, y, False)
                if P.on_curve():
                    conj = PointK(E, x.conjugate(), y.conjugate(), False)
                    assert conj.on_curve()
                    cert = infinite_order_certificate(P)
                    return HeegnerResult(
                        taus, z_sum, P, True, cert.certified
                    )
            last_error = RecognitionFailed(
                "no bounded-denominator point at %d digits" % digits
            )
        digits *= 2
    raise RecognitionFailed(str(last_error))
