"""Imaginary quadratic fields: class numbers, forms, splitting, elements."""

from fractions import Fraction

import pytest

from heegnercert.arith import kronecker
from heegnercert.quadfield import (
    INERT,
    RAMIFIED,
    SPLIT,
    NotFundamental,
    heegner_forms,
    heegner_hypothesis,
    is_fundamental_discriminant,
    make_field,
    reduced_forms,
    splitting_type,
    sqrt_disc_mod,
)


def class_number_oracle(D):
    """Count reduced primitive forms by direct enumeration.

    A reduced positive definite form a x^2 + b x y + c y^2 of discriminant
    D = b^2 - 4ac satisfies -a < b <= a <= c with b >= 0 whenever a == c.
    Written independently of the package internals.
    """
    assert D < 0 and D % 4 in (0, 1)
    count = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            from math import gcd

            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            count += 1
        a += 1
    return count


def test_class_numbers_against_oracle():
    expected = {-7: 1, -8: 1, -11: 1, -23: 3, -35: 2}
    for D, h in expected.items():
        assert class_number_oracle(D) == h
        assert make_field(D).h == h


def test_class_numbers_wider_sweep():
    for D in range(-7, -200, -1):
        if D % 4 in (0, 1) and is_fundamental_discriminant(D):
            K = make_field(D)
            assert K.h == class_number_oracle(D), D


def test_reduced_forms_are_reduced_and_distinct():
    for D in (-7, -8, -11, -23, -35, -47, -71):
        forms = reduced_forms(D)
        assert len(forms) == len(set(forms))
        for a, b, c in forms:
            assert b * b - 4 * a * c == D
            assert -a < b <= a <= c
            assert not (a == c and b < 0)


def test_non_fundamental_rejected():
    for D in (-12, -27, -28, -44, -45, -75):
        with pytest.raises(NotFundamental):
            make_field(D)


def test_excluded_small_discriminants():
    for D in (-3, -4):
        with pytest.raises(Exception):
            make_field(D)


def test_splitting_type_matches_kronecker():
    for D in (-7, -8, -11, -23, -35):
        K = make_field(D)
        for p in (2, 3, 5, 7, 11, 13, 17, 29, 751):
            t = splitting_type(K, p)
            s = kronecker(D, p)
            assert t == {1: SPLIT, -1: INERT, 0: RAMIFIED}[s]


def test_heegner_hypothesis():
    ok, splittings = heegner_hypothesis(make_field(-7), 11)
    assert ok and splittings == [(11, SPLIT)]
    ok, splittings = heegner_hypothesis(make_field(-11), 11)
    assert not ok  # 11 ramifies
    ok, _ = heegner_hypothesis(make_field(-35), 99)
    assert ok


def test_sqrt_disc_mod_and_heegner_forms():
    for D, N in ((-7, 11), (-8, 17), (-23, 58), (-35, 99)):
        K = make_field(D)
        beta = sqrt_disc_mod(K, N)
        assert (beta * beta - D) % (4 * N) == 0
        forms = heegner_forms(K, N, beta)
        assert len(forms) == K.h
        for a, b, c in forms:
            assert b * b - 4 * a * c == D
            assert a % N == 0
            assert (b - beta) % (2 * N) == 0


def test_quad_elem_field_axioms_sample():
    K = make_field(-23)
    u = K.element(Fraction(1, 2), Fraction(-3, 7))
    v = K.element(Fraction(2), Fraction(5, 3))
    w = K.element(Fraction(-1, 4), Fraction(1))
    assert ((u + v) + w) == (u + (v + w))
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert (u / v) * v == u
    assert (u - u).is_zero()
    assert u.norm() == Fraction(1, 4) + 23 * Fraction(9, 49)
    assert u.trace() == 1
    assert (u * v).norm() == u.norm() * v.norm()
    assert (u * v).conjugate() == u.conjugate() * v.conjugate()
