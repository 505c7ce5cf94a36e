import math
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from huygens.errors import ModeMismatchError, NearSingularEvaluation
from huygens.scalars import float_mode
from huygens.trig import (
    COS,
    SIN,
    TrigPoly,
    TrigPoly2,
    TrigRational,
    compile_rational,
    cos_difference,
    separable,
)
from huygens.wronskian import wronskian

from strategies import trig_polys, trig_polys2, unit_rationals

c1, s1 = TrigPoly.cos(1), TrigPoly.sin(1)


def P(text):
    return TrigPoly.parse(text)


def test_construction_examples():
    assert TrigPoly.from_terms([(COS, 0, 1)]) == TrigPoly.one()
    assert TrigPoly.from_terms([(COS, 2, 1), (COS, 2, -1)]).is_zero()
    shifted = TrigPoly.from_terms([(COS, 1, Fraction(3, 5)), (SIN, 1, Fraction(-4, 5))])
    assert shifted.to_text() == "3/5*cos(p) - 4/5*sin(p)"


def test_negative_frequencies_fold():
    assert TrigPoly.from_terms([(COS, -3, 2)]) == TrigPoly.cos(3, 2)
    assert TrigPoly.from_terms([(SIN, -3, 2)]) == TrigPoly.sin(3, -2)
    with pytest.raises(ValueError):
        TrigPoly.from_terms([(SIN, 0, 1)])


def test_addition_examples():
    assert c1 + c1 == TrigPoly.cos(1, 2)
    assert (c1 + (-c1)).is_zero()
    assert P("1 + cos(2p)") + P("1 - cos(2p)") == TrigPoly.constant(2)


def test_product_to_sum_examples():
    assert c1 * c1 == P("1/2 + 1/2*cos(2p)")
    assert s1 * c1 == P("1/2*sin(2p)")
    assert TrigPoly.cos(3) * TrigPoly.cos(4) == P("1/2*cos(p) + 1/2*cos(7p)")


def test_derivative_examples():
    for k in range(1, 5):
        assert TrigPoly.cos(k).diff() == TrigPoly.sin(k, -k)
        assert TrigPoly.cos(k).diff(order=2) == TrigPoly.cos(k, -k * k)
    assert TrigPoly.constant(7).diff().is_zero()


def test_evaluation_examples():
    assert TrigPoly.cos(2)(0.0) == pytest.approx(1.0)
    assert s1(math.pi / 2) == pytest.approx(1.0)
    w = wronskian([TrigPoly.one(), c1])
    assert w(math.pi / 3) == pytest.approx(-0.8660254, abs=1e-7)


def test_rational_examples():
    cot = TrigRational(c1, s1)
    assert cot * TrigRational(s1, c1) == 1
    assert TrigRational(c1).diff() == TrigRational(-s1)
    with pytest.raises(NearSingularEvaluation):
        TrigRational(TrigPoly.one(), s1)(1e-14, den_guard=1e-12)


def test_rational_text_round_trip():
    r = TrigRational(c1 + TrigPoly.cos(2, 3), s1 * s1 + c1)
    again = TrigRational.parse(r.to_text())
    assert again == r and again.to_text() == r.to_text()
    two = TrigRational.from_factors(TrigPoly2.constant(-2), [(s1.lift(1), 1), (s1.lift(0), 1)])
    assert two.to_text() == "-2/(sin(p)*sin(q))"
    assert TrigRational.parse(two.to_text(), arity=2).to_text() == two.to_text()
    # one two-angle monomial factor keeps its own parentheses
    mono = TrigRational(TrigPoly2.constant(-2), separable(s1, s1))
    assert mono.to_text() == "-2/((sin(p)*sin(q)))"
    assert TrigRational.parse(mono.to_text(), arity=2).to_text() == mono.to_text()


def test_cos_difference_examples():
    assert cos_difference(0) == TrigPoly2.one()
    assert cos_difference(1) == separable(c1, c1) + separable(s1, s1)
    for k in range(6):
        assert cos_difference(k).diagonal() == TrigPoly.one()


def test_modes_do_not_mix():
    f = TrigPoly.cos(1, mode=float_mode())
    with pytest.raises(ModeMismatchError):
        f + c1
    with pytest.raises(ModeMismatchError):
        c1 * 0.5


def test_compiled_rational_matches_direct():
    r = TrigRational(separable(c1, TrigPoly.cos(2)) + TrigPoly2.one(),
                     separable(s1 + TrigPoly.constant(3), s1 + TrigPoly.constant(2)))
    f = compile_rational(r)
    p, q = np.array([0.3, 1.1]), np.array([-0.4, 2.0])
    for a, b, v in zip(p, q, f(p, q)):
        assert v == pytest.approx(float(r(float(a), float(b))), rel=1e-13)


def _at(poly, cs):
    return poly.at_point(*cs)


@given(trig_polys(), trig_polys(), unit_rationals())
def test_evaluation_is_a_ring_homomorphism(a, b, pt):
    c, s = mpq(pt[0]), mpq(pt[1])
    assert (a * b).at_point(c, s) == a.at_point(c, s) * b.at_point(c, s)
    assert (a + b).at_point(c, s) == a.at_point(c, s) + b.at_point(c, s)


@given(trig_polys(), trig_polys())
def test_leibniz_rule(a, b):
    assert (a * b).diff() == a.diff() * b + a * b.diff()


@given(trig_polys())
def test_canonical_form_is_a_fixed_point(p):
    assert TrigPoly.from_terms(p.terms(), p.mode).same_terms(p)
    assert TrigPoly.parse(p.to_text()).same_terms(p)
    assert all(v != 0 for _, v in p.items())


@given(trig_polys2(), unit_rationals())
def test_diagonal_matches_two_angle_evaluation(t, pt):
    c, s = mpq(pt[0]), mpq(pt[1])
    assert t.diagonal().at_point(c, s) == t.at_point(c, s, c, s)


@given(trig_polys2(), st.floats(-3, 3), st.floats(-3, 3))
def test_swap_exchanges_angles(t, p, q):
    assert t.swap()(q, p) == pytest.approx(t(p, q), rel=1e-9, abs=1e-9)


@given(trig_polys(), trig_polys())
def test_quotient_equality_by_cross_multiplication(a, b):
    if b.is_zero():
        return
    r = TrigRational(a * b, b * b)
    assert r == TrigRational(a, b)
