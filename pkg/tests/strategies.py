"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from huygens.trig import COS, SIN, TrigPoly, TrigPoly2

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=7)
freq = st.integers(min_value=0, max_value=5)


@st.composite
def trig_polys(draw, max_terms=4):
    terms = draw(st.lists(st.tuples(st.sampled_from([COS, SIN]), st.integers(1, 5), small_q),
                          max_size=max_terms))
    const = draw(small_q)
    return TrigPoly.from_terms([(COS, 0, const)] + terms)


@st.composite
def trig_polys2(draw, max_terms=3):
    a = draw(trig_polys(max_terms))
    b = draw(trig_polys(max_terms))
    c = draw(trig_polys(2))
    d = draw(trig_polys(2))
    from huygens.trig import separable
    return separable(a, b) + separable(c, d)


@st.composite
def unit_rationals(draw):
    """Rational points of the unit circle from Pythagorean parametrisation."""
    t = draw(st.fractions(min_value=-4, max_value=4, max_denominator=9))
    d = 1 + t * t
    c, s = (1 - t * t) / d, 2 * t / d
    if draw(st.booleans()):
        c = -c
    return Fraction(c), Fraction(s)
