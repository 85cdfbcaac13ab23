"""Global curves: local data, minimality, K-points, certificates."""

import random
from fractions import Fraction

import pytest

from heegnercert.ellq import (
    CurveQ,
    NonMinimalModel,
    Place,
    PointK,
    condition_b_certificate,
    infinite_order_certificate,
    reduce_point,
    tate_algorithm,
    torsion_bound,
)
from heegnercert.quadfield import make_field

CURVES = {
    "11a1": (0, -1, 1, -10, -20),
    "17a1": (1, -1, 1, -1, -14),
    "43a1": (0, 1, 1, 0, 0),
    "53a1": (1, -1, 1, 0, 0),
    "57a1": (0, -1, 1, -2, 2),
    "58a1": (1, -1, 0, -1, 1),
    "75a1": (0, -1, 1, -8, -7),
    "99a1": (1, -1, 1, -2, 0),
}


def discriminant(ainvs):
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def transform(ainvs, r, s, t):
    """Integral coordinate change with u = 1 (preserves minimality)."""
    a1, a2, a3, a4, a6 = ainvs
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def test_conductors_match_labels():
    for label, ainvs in CURVES.items():
        assert CurveQ(*ainvs).conductor == int(label[:-2]), label


def test_local_data_11a1_oracle():
    d = CurveQ(0, -1, 1, -10, -20).local_data(11)
    assert (d.kodaira, d.f, d.c, d.mult_split) == ("I5", 1, 5, "split")


def test_local_data_spot_checks():
    checks = {
        ("75a1", 5): ("IV", 2, 1),
        ("75a1", 3): ("I1", 1, 1),
        ("99a1", 3): ("III", 2, 2),
        ("58a1", 2): ("I2", 1, 2),
        # Delta(57a1) = -171 = -3^2 * 19, multiplicative at both primes
        ("57a1", 3): ("I2", 1, 2),
        ("57a1", 19): ("I1", 1, 1),
    }
    for (label, p), (kod, f, c) in checks.items():
        d = CurveQ(*CURVES[label]).local_data(p)
        assert (d.kodaira, d.f, d.c) == (kod, f, c), (label, p)


def test_ogg_formula():
    # ord_p(Delta) = f + m - 1 with m the number of fiber components, p >= 5
    components = {
        "I0": 1, "II": 1, "III": 2, "IV": 3,
        "I0*": 5, "IV*": 7, "III*": 8, "II*": 9,
    }
    for label, ainvs in CURVES.items():
        E = CurveQ(*ainvs)
        delta = discriminant(ainvs)
        for p in E.bad_primes():
            if p < 5:
                continue
            d = E.local_data(p)
            v = 0
            dd = abs(delta)
            while dd % p == 0:
                dd //= p
                v += 1
            if d.kodaira.startswith("I") and d.kodaira[1:].isdigit():
                m = int(d.kodaira[1:])
            elif d.kodaira.endswith("*") and d.kodaira[1:-1].isdigit():
                m = int(d.kodaira[1:-1]) + 5
            else:
                m = components[d.kodaira]
            assert v == d.f + m - 1, (label, p)


def test_tate_invariance_under_coordinate_change():
    rng = random.Random(5)
    for label, ainvs in CURVES.items():
        E = CurveQ(*ainvs)
        for _ in range(5):
            r, s, t = (rng.randrange(-6, 7) for _ in range(3))
            moved = transform(ainvs, r, s, t)
            for p in E.bad_primes():
                assert tate_algorithm(moved, p) == tate_algorithm(ainvs, p)


def test_non_minimal_model_rejected_with_witness():
    # 11a1 scaled by u = 2
    with pytest.raises(NonMinimalModel) as err:
        CurveQ(0, -4, 8, -160, -1280).conductor
    assert "2" in str(err.value)


class _StubCurve:
    """Bare curve holding (possibly non-integral) coefficients for group-law tests."""

    def __init__(self, a1, a2, a3, a4, a6):
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6

    def identity(self):
        return PointK(self, None, None, True)


def _det3(M):
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def _curve_through(a1, a3, pts):
    """Fit a2, a4, a6 so the curve passes through three given points."""
    one = a1 - a1 + 1
    rows = [[x * x, x, one] for x, _ in pts]
    rhs = [y * y + a1 * x * y + a3 * y - x * x * x for x, y in pts]
    det = _det3(rows)
    if det.is_zero():
        return None
    sols = []
    for j in range(3):
        M = [list(r) for r in rows]
        for i in range(3):
            M[i][j] = rhs[i]
        sols.append(_det3(M) / det)
    return _StubCurve(a1, sols[0], a3, sols[1], sols[2])


def test_group_law_associativity_random_quadratic_points():
    # 1000 random triples of points with coordinates in Q(sqrt(D))
    rng = random.Random(6)
    discs = (-7, -8, -11, -23, -35)
    done = 0
    while done < 1000:
        K = make_field(discs[done % len(discs)])
        def rand_elem():
            return K.element(
                Fraction(rng.randrange(-9, 10), rng.randrange(1, 5)),
                Fraction(rng.randrange(-9, 10), rng.randrange(1, 5)),
            )
        pts = [(rand_elem(), rand_elem()) for _ in range(3)]
        a1 = K.element(Fraction(rng.randrange(-2, 3)), Fraction(0))
        a3 = K.element(Fraction(rng.randrange(-2, 3)), Fraction(0))
        E = _curve_through(a1, a3, pts)
        if E is None:
            continue
        P, Q, R = (PointK(E, x, y, False) for x, y in pts)
        assert (P + Q) + R == P + (Q + R)
        assert P + (-P) == E.identity()
        assert (P + Q) == (Q + P)
        done += 1


def test_reduction_homomorphism_100_pairs():
    E = CurveQ(0, -1, 1, -10, -20)
    K = make_field(-7)
    G = E.point(
        K.element(Fraction(1, 2), Fraction(-1, 2)),
        K.element(Fraction(-2), Fraction(-2)),
    )
    T = E.point(5, 5)
    pool = {}
    for m in range(-4, 5):
        for t in range(3):
            pool[(m, t)] = m * G + t * T
    keys = sorted(pool)
    rng = random.Random(7)
    place = Place(K, 23, False)  # split, good reduction
    place_inert = Place(K, 13, False)  # inert, good reduction
    for pl in (place, place_inert):
        Ered, _ = reduce_point(pool[(0, 0)], pl)
        for _ in range(50):
            P = pool[rng.choice(keys)]
            Q = pool[rng.choice(keys)]
            _, rP = reduce_point(P, pl)
            _, rQ = reduce_point(Q, pl)
            _, rPQ = reduce_point(P + Q, pl)
            assert Ered.add_points(rP, rQ) == rPQ


def test_torsion_bounds():
    assert torsion_bound(CurveQ(0, -1, 1, -10, -20)) == 5
    assert torsion_bound(CurveQ(0, -1, 1, -10, -20), make_field(-7)) == 5
    assert torsion_bound(CurveQ(0, 1, 1, 0, 0)) == 1  # 43a1 is torsion-free


def test_infinite_order_certificates():
    E = CurveQ(0, -1, 1, -10, -20)
    K = make_field(-7)
    G = E.point(
        K.element(Fraction(1, 2), Fraction(-1, 2)),
        K.element(Fraction(-2), Fraction(-2)),
    )
    cert = infinite_order_certificate(G)
    assert cert.certified
    T = E.point(5, 5)
    cert = infinite_order_certificate(T)
    assert not cert.certified and cert.torsion_order == 5


def test_condition_b_certificates():
    E = CurveQ(0, -1, 1, -10, -20)
    K = make_field(-7)
    G = E.point(
        K.element(Fraction(1, 2), Fraction(-1, 2)),
        K.element(Fraction(-2), Fraction(-2)),
    )
    cert = condition_b_certificate(E, K, 13, G)
    assert cert.status == "not-divisible"
    assert cert.witness[0] == 31
    cert = condition_b_certificate(E, K, 29, G)
    assert cert.status == "not-divisible"


def test_condition_b_soundness_p_times_z_is_divisible():
    # p * Z is always locally p-divisible, so the certificate must never
    # report a not-divisible witness for it: 100 trials
    E = CurveQ(0, -1, 1, -10, -20)
    K = make_field(-7)
    G = E.point(
        K.element(Fraction(1, 2), Fraction(-1, 2)),
        K.element(Fraction(-2), Fraction(-2)),
    )
    from heegnercert.ellq import good_auxiliary_primes
    from heegnercert.ellfp import divisible_by_p_in_reduction

    rng = random.Random(8)
    trials = 0
    for p in (3, 7, 13):
        pG = p * G
        for ell in good_auxiliary_primes(E, K, count=40):
            if trials >= 100:
                break
            pl = Place(K, ell, rng.random() < 0.5)
            Ered, Q = reduce_point(pG, pl)
            if Ered.field.size() > 20000:
                continue
            assert divisible_by_p_in_reduction(Ered, Q, p), (p, ell)
            trials += 1
    assert trials >= 100
