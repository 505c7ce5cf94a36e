from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpq

from huygens.errors import ModeMismatchError
from huygens.scalars import EXACT, Mode, float_mode, parse_scalar, scalar_to_str, to_scalar


def test_exact_scalars_are_reduced_rationals():
    v = to_scalar(Fraction(6, -4))
    assert v == mpq(-3, 2) and v.denominator > 0
    assert to_scalar("3/5") == mpq(3, 5)


def test_exact_mode_rejects_binary_floats():
    with pytest.raises(ModeMismatchError):
        to_scalar(0.5, EXACT)
    with pytest.raises(ModeMismatchError):
        to_scalar(gmpy2.mpfr(0.5), EXACT)


def test_float_mode_precision_floor():
    with pytest.raises(ValueError):
        Mode(32)
    assert float_mode().precision == 128


def test_mode_parse_and_str():
    assert Mode.parse("exact") is EXACT
    assert Mode.parse("float:96") == Mode(96)
    assert str(Mode(96)) == "float:96"
    with pytest.raises(ValueError):
        Mode.parse("double")


def test_scalar_text_round_trip():
    assert scalar_to_str(mpq(-7, 3)) == "-7/3"
    m = float_mode(128)
    with m.context():
        x = to_scalar("1/3", m)
    text = scalar_to_str(x)
    assert text.endswith("@128")
    assert parse_scalar(text, m) == x
    with pytest.raises(ModeMismatchError):
        parse_scalar(text, EXACT)
