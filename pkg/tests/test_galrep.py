"""Mod-p representation surjectivity certificates."""

from heegnercert.ellfp import trace_ap
from heegnercert.ellq import CurveQ
from heegnercert.galrep import (
    frobenius_samples,
    rational_p_torsion_point,
    surjectivity_certificate,
)


def test_surjective_11a1_p13():
    res = surjectivity_certificate(CurveQ(0, -1, 1, -10, -20), 13)
    assert res.status == "surjective"
    assert set(res.witnesses) == {"irreducible", "split-square", "projective-order"}


def test_not_surjective_11a1_p5_rational_torsion():
    E = CurveQ(0, -1, 1, -10, -20)
    P = rational_p_torsion_point(E, 5)
    assert P is not None and (P.x, P.y) == (5, 5)
    res = surjectivity_certificate(E, 5)
    assert res.status == "not-surjective"
    assert "torsion" in res.reason


def test_surjective_53a1_p751_default_bound():
    res = surjectivity_certificate(CurveQ(1, -1, 1, 0, 0), 751, ell_max=1000)
    assert res.status == "surjective"


def test_surjective_all_table_pairs(golden, curves):
    for label, D, p, _, _ in golden:
        res = surjectivity_certificate(CurveQ(*curves[label]), p)
        assert res.status == "surjective", (label, p)


def test_frobenius_samples_match_traces():
    E = CurveQ(0, -1, 1, -10, -20)
    for s in frobenius_samples(E, 13, 200):
        assert s.ell % 13 != 0 and E.conductor % s.ell != 0
        assert s.trace == trace_ap(E, s.ell) % 13
        assert s.det == s.ell % 13


def test_no_rational_torsion_43a1():
    E = CurveQ(0, 1, 1, 0, 0)
    for p in (2, 3, 5, 7):
        assert rational_p_torsion_point(E, p) is None
