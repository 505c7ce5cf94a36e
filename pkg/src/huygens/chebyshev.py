"""Chebyshev polynomials of the first kind with exact integer coefficients.

Coefficient lists are in ascending powers of ``z``; the zero polynomial is
the empty list.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

__all__ = ["cheb", "cheb_derivative", "cheb_eval"]


@lru_cache(maxsize=None)
def _cheb(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 1)
    prev, cur = _cheb(n - 2), _cheb(n - 1)
    # T_n = 2 z T_{n-1} - T_{n-2}
    out = [0] + [2 * c for c in cur]
    for i, c in enumerate(prev):
        out[i] -= c
    return tuple(out)


def cheb(n: int) -> list[int]:
    """Coefficients of ``T_n`` from the three-term recurrence."""
    if n < 0:
        raise ValueError("Chebyshev degree must be non-negative")
    return list(_cheb(n))


def _derive(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def cheb_derivative(n: int, order: int) -> list[int]:
    """Coefficients of the ``order``-th derivative of ``T_n``."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    coeffs = cheb(n)
    for _ in range(order):
        coeffs = _derive(coeffs)
        if not coeffs:
            return []
    return coeffs


@lru_cache(maxsize=256)
def _chebyshev_series(coeffs: tuple) -> tuple[float, ...]:
    """Monomial coefficients rewritten in the basis ``T_0, T_1, ...`` (exactly, then rounded)."""
    out = [Fraction(0)] * len(coeffs)
    for n, a in enumerate(coeffs):
        if not a:
            continue
        # z**n = 2**(1 - n) sum_k C(n, k) T_{n - 2k}, halving the T_0 term
        for k in range(n // 2 + 1):
            w = Fraction(comb(n, k), 2 ** (n - 1)) if n else Fraction(1)
            if n and 2 * k == n:
                w /= 2
            out[n - 2 * k] += a * w
    return tuple(float(v) for v in out)


def _clenshaw(series, z):
    b1 = b2 = z * 0.0
    for c in reversed(series[1:]):
        b1, b2 = 2 * z * b1 - b2 + c, b1
    return z * b1 - b2 + series[0]


def cheb_eval(coeffs, z):
    """Evaluate a coefficient list at ``z``.

    Exact inputs (ints, rationals) and ``mpfr`` use Horner's rule.  Machine
    floats and arrays go through the Chebyshev series and Clenshaw's
    recurrence, which stays accurate on ``[-1, 1]`` where the monomial
    coefficients of ``T_N`` grow like ``2**N``.
    """
    if not len(coeffs):
        return z * 0
    if isinstance(z, (float, np.floating, np.ndarray)):
        return _clenshaw(_chebyshev_series(tuple(coeffs)), z)
    acc = coeffs[-1] + z * 0
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    return acc

