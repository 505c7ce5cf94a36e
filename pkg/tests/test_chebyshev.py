import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from huygens.chebyshev import cheb, cheb_derivative, cheb_eval
from huygens.hadamard import _poly_of_cos_diff
from huygens.scalars import EXACT
from huygens.trig import cos_difference


def test_coefficient_examples():
    assert cheb(0) == [1]
    assert cheb(1) == [0, 1]
    assert cheb(4) == [1, 0, -8, 0, 8]
    assert cheb_derivative(1, 1) == [1]
    assert cheb_derivative(0, 1) == []
    assert cheb_derivative(4, 2) == [-16, 0, 96]


def test_evaluation_examples():
    assert cheb_eval(cheb(3), 1) == 1
    for theta in (0.1, 1.3, 2.9):
        assert cheb_eval(cheb(5), math.cos(theta)) == pytest.approx(math.cos(5 * theta), abs=1e-13)
    assert cheb_eval(cheb_derivative(2, 1), 0.7) == pytest.approx(2.8)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        cheb(-1)


def test_machine_identity_up_to_32():
    theta = np.random.default_rng(3).uniform(0, 2 * np.pi, 1000)
    for n in range(33):
        assert np.max(np.abs(cheb_eval(cheb(n), np.cos(theta)) - np.cos(n * theta))) < 1e-12


def test_two_angle_identity_is_exact():
    # T_N(cos(p - q)) == cos(N (p - q)) as two-angle polynomials
    for n in range(13):
        assert _poly_of_cos_diff(cheb(n), EXACT) == cos_difference(n)


@given(st.integers(2, 20))
def test_derivative_commutes_with_recurrence(n):
    lhs = cheb_derivative(n, 1)
    a = [2 * c for c in cheb(n - 1)]
    b = [0] + [2 * c for c in cheb_derivative(n - 1, 1)]
    c = cheb_derivative(n - 2, 1)
    size = max(len(a), len(b), len(c))
    pad = lambda v: v + [0] * (size - len(v))  # noqa: E731
    rhs = [x + y - z for x, y, z in zip(pad(a), pad(b), pad(c))]
    while rhs and rhs[-1] == 0:
        rhs.pop()
    assert lhs == rhs
