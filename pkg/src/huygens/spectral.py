"""The angular Schrodinger operator and its Wronskian eigenfunctions.

The potential is kept in separated form ``V(x) = v(p) / r**2`` with
``v = -2 (log W)''``; Cartesian evaluation goes through polar coordinates.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpq

from .errors import NearSingularEvaluation, OriginError
from .scalars import to_scalar
from .trig import TrigPoly, TrigRational
from .wronskian import KData, full_wronskian, reduced_wronskian

__all__ = [
    "angular_potential",
    "potential_eval",
    "apply_L",
    "psi",
    "c_const",
    "darboux_forward",
    "darboux_backward",
    "wronskian_zero_angles",
    "polar",
]

DEFAULT_DEN_GUARD = 1e-10
_MPQ = type(mpq())
_MPFR = type(gmpy2.mpfr())


@lru_cache(maxsize=256)
def angular_potential(data: KData) -> TrigRational:
    """``v(p) = -2 (W'' W - W'**2) / W**2`` for the full Wronskian ``W``."""
    w = full_wronskian(data)
    w1 = w.diff()
    num = (w1 * w1 - w.diff(2) * w) * 2
    return TrigRational.from_factors(num, [(w, 2)])


def apply_L(data: KData, f: TrigRational) -> TrigRational:
    """``-f'' + v f``."""
    if isinstance(f, TrigPoly):
        f = TrigRational(f)
    return -f.diff(order=2) + angular_potential(data) * f


@lru_cache(maxsize=1024)
def psi(data: KData, i: int) -> TrigRational:
    """``Wr[chi_j, j != i] / Wr[chi_0..chi_m]``."""
    w = full_wronskian(data)
    return TrigRational.from_factors(reduced_wronskian(data, {i}), [(w, 1)])


def c_const(data: KData, i: int):
    """``prod_{j != i} (k_i**2 - k_j**2)`` as a scalar of the data's mode."""
    if not 0 <= i <= data.m:
        raise IndexError(f"index {i} outside 0..{data.m}")
    ki = data.k[i]
    out = 1
    for j, kj in enumerate(data.k):
        if j != i:
            out *= ki * ki - kj * kj
    with data.mode.context():
        return to_scalar(out, data.mode)


def darboux_forward(data_ext: KData, f: TrigRational) -> TrigRational:
    """``A[f] = (Psi_top f)' / Psi_top`` with ``Psi_top`` the last eigenfunction of ``data_ext``."""
    top = psi(data_ext, data_ext.m)
    return (top * f).diff() / top


def darboux_backward(data_ext: KData, f: TrigRational) -> TrigRational:
    """``A*[f] = -Psi_top (f / Psi_top)'``."""
    top = psi(data_ext, data_ext.m)
    return -(top * (f / top).diff())


# -- point evaluation -----------------------------------------------------------


def _is_exact_number(v) -> bool:
    return isinstance(v, (int, Fraction, _MPQ)) and not isinstance(v, bool)


def polar(x):
    """``(r, cos p, sin p)`` for a Cartesian point.

    Exact rationals come back exactly when ``x1**2 + x2**2`` is a rational
    square; otherwise the point is handled in machine floats (or in the
    precision of ``mpfr`` input).
    """
    x1, x2 = x
    if _is_exact_number(x1) and _is_exact_number(x2):
        q1, q2 = mpq(x1), mpq(x2)
        r2 = q1 * q1 + q2 * q2
        if r2 == 0:
            raise OriginError("the origin has no polar angle")
        num, den = r2.numerator, r2.denominator
        rn, rd = gmpy2.isqrt(num), gmpy2.isqrt(den)
        if rn * rn == num and rd * rd == den:
            r = mpq(rn, rd)
            return r, q1 / r, q2 / r
        x1, x2 = float(q1), float(q2)
    if isinstance(x1, _MPFR) or isinstance(x2, _MPFR):
        prec = max(getattr(x1, "precision", 53), getattr(x2, "precision", 53))
        with gmpy2.context(precision=prec):
            x1, x2 = gmpy2.mpfr(x1), gmpy2.mpfr(x2)
            r = gmpy2.sqrt(x1 * x1 + x2 * x2)
            if r == 0:
                raise OriginError("the origin has no polar angle")
            return r, x1 / r, x2 / r
    x1, x2 = float(x1), float(x2)
    r = math.hypot(x1, x2)
    if r == 0.0:
        raise OriginError("the origin has no polar angle")
    return r, x1 / r, x2 / r


def potential_eval(data: KData, x, den_guard: float = DEFAULT_DEN_GUARD):
    """``V_k(x)``; exact at rational points with rational radius."""
    r, c, s = polar(x)
    v = angular_potential(data)
    try:
        if isinstance(r, _MPQ):
            val = v.at_point(c, s, den_guard=den_guard)
        elif isinstance(r, _MPFR):
            with gmpy2.context(precision=r.precision):
                val = v.at_point(c, s, den_guard=den_guard)
        else:
            val = float(v(math.atan2(s, c), den_guard=den_guard))
    except NearSingularEvaluation as exc:
        raise _with_distance(exc, data, math.atan2(float(s), float(c))) from None
    return val / (r * r)


def _with_distance(exc: NearSingularEvaluation, data: KData, angle: float):
    zeros = wronskian_zero_angles(data)
    if zeros:
        d = min(_angle_dist(angle, z) for z in zeros)
        exc = NearSingularEvaluation(f"{exc} ; nearest singular line at angular distance {d:.3g} rad",
                                     magnitude=exc.magnitude, distance=d)
    return exc


def _angle_dist(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


@lru_cache(maxsize=256)
def wronskian_zero_angles(data: KData, samples: int = 4096) -> tuple[float, ...]:
    """Zeros of the full Wronskian on ``[0, 2 pi)`` by scanning and bisection.

    Sign changes are refined by bisection; touching zeros (local minima of
    ``|W|`` that get close to zero) by ternary search.
    """
    w = full_wronskian(data)
    norm = w.coeff_norm()
    theta = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    vals = np.asarray(w(theta), dtype=float)
    f = lambda t: float(w(float(t)))  # noqa: E731
    step = theta[1] - theta[0]
    found = []
    for j in range(samples):
        a, b = theta[j], theta[j] + step
        fa, fb = vals[j], vals[(j + 1) % samples]
        if fa == 0.0:
            found.append(a)
        elif fa * fb < 0:
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = f(mid)
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
            found.append(0.5 * (a + b))
        else:
            prev = abs(vals[j - 1])
            if abs(fa) < prev and abs(fa) <= abs(fb) and abs(fa) < 1e-3 * norm:
                lo, hi = a - step, b
                for _ in range(100):
                    m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                    if abs(f(m1)) < abs(f(m2)):
                        hi = m2
                    else:
                        lo = m1
                t = 0.5 * (lo + hi)
                if abs(f(t)) < 1e-9 * norm:
                    found.append(t)
    return tuple(sorted(t % (2 * math.pi) for t in found))


def angular_margin(data: KData, angle: float) -> float:
    """Angular distance from ``angle`` to the nearest singular line."""
    zeros = wronskian_zero_angles(data)
    if not zeros:
        return math.inf
    return min(_angle_dist(angle, z) for z in zeros)
