"""Finite-difference residuals of the assembled kernels, evaluated in ``mpfr``.

Working at ``RESIDUAL_BITS`` makes rounding negligible, so a residual that
drops by about 16 when the steps are halved is pure 4th-order truncation.
"""
from __future__ import annotations

import math

import gmpy2
import numpy as np
from gmpy2 import mpfr

from ..hadamard import HadamardTable, ba_eval, heat_kernel_eval, u_eval
from ..spectral import angular_margin, potential_eval
from .oracle import FD_CLEARANCE, sample_admissible_rays
from .report import FAIL, NUMERIC_PASS, VerifyReport, timed

__all__ = ["check_heat_residual", "sample_heat_points", "ba_eigen_probe", "RESIDUAL_BITS"]

RESIDUAL_BITS = 160
HEAT_TOL = 1e-6
RICHARDSON_MIN = 8.0
CONSTANCY_TOL = 1e-5
_D2 = (-1, 16, -30, 16, -1)  # / 12 h**2
_D1 = (1, -8, 0, 8, -1)  # / 12 h


def _mp(v):
    return mpfr(float(v)) if not isinstance(v, type(mpfr())) else v


def _laplacian(f, x, h):
    """4th-order 5-point Laplacian of ``f`` at ``x`` (all in the current context)."""
    total = mpfr(0)
    for axis in (0, 1):
        for j, w in zip(range(-2, 3), _D2):
            if w == 0:
                continue
            y = list(x)
            y[axis] = y[axis] + j * h
            total += w * f(tuple(y))
    return total / (12 * h * h)


def _heat_residual(table, x, xi, t, h, tau):
    data = table.data
    phi = lambda y, s=t: heat_kernel_eval(table, y, xi, s)  # noqa: E731
    centre = phi(x)
    dt = sum(w * phi(x, t + j * tau) for j, w in zip(range(-2, 3), _D1) if w) / (12 * tau)
    lap = _laplacian(phi, x, h)
    v = potential_eval(data, x)
    return abs(dt - lap + v * centre) / abs(centre)


def sample_heat_points(table: HadamardTable, count: int, seed: int = 0, t_range=(0.2, 1.0)):
    """Admissible ``(x, xi, t)`` triples where ``sum U_nu t**nu`` does not nearly cancel."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        (x, xi), = sample_admissible_rays(table.data, 1, rng)
        t = float(rng.uniform(*t_range))
        x, xi = tuple(map(float, x)), tuple(map(float, xi))
        terms = [float(u_eval(table, x, xi, nu)) * t ** nu for nu in range(len(table))]
        if abs(sum(terms)) >= 1e-3 * sum(abs(v) for v in terms):
            out.append((x, xi, t))
    return out


def check_heat_residual(table: HadamardTable, samples=None, h: float = 1e-3, tau: float = 1e-3, *,
                        count: int = 20, seed: int = 0, tol: float = HEAT_TOL,
                        bits: int = RESIDUAL_BITS) -> VerifyReport:
    """``|(d/dt + L) Phi| / |Phi| < tol`` at every sample, with a Richardson check.

    ``h`` is relative to ``|x|`` (capped by a small fraction of the distance
    to the nearest singular line) and ``tau`` relative to ``t``.  The residual
    is recomputed with both steps halved; the ratio must be at least 8.
    """
    with timed() as clock:
        samples = sample_heat_points(table, count, seed) if samples is None else samples
        worst, worst_ratio, witness = 0.0, math.inf, None
        with gmpy2.context(precision=bits):
            for x, xi, t in samples:
                if t <= 0:
                    raise ValueError("heat samples need t > 0")
                xm, xim, tm = tuple(map(_mp, x)), tuple(map(_mp, xi)), _mp(t)
                r = math.hypot(*x)
                hx = mpfr(min(h * r, FD_CLEARANCE * r * angular_margin(table.data, math.atan2(x[1], x[0]))))
                ts = tau * tm
                coarse = float(_heat_residual(table, xm, xim, tm, hx, ts))
                fine = float(_heat_residual(table, xm, xim, tm, hx / 2, ts / 2))
                ratio = coarse / fine if fine else math.inf
                worst = max(worst, coarse)
                worst_ratio = min(worst_ratio, ratio)
                if (coarse >= tol or ratio < RICHARDSON_MIN) and witness is None:
                    witness = {"k": list(table.data.k), "x": list(x), "xi": list(xi), "t": t,
                               "residual_h": coarse, "residual_h_over_2": fine, "richardson": ratio}
    details = {"min_richardson": worst_ratio, "h_rel": h, "tau_rel": tau, "bits": bits}
    return VerifyReport("heat", FAIL if witness else NUMERIC_PASS, len(samples), clock["elapsed"],
                        max_residual=worst, witness=witness, details=details)


def ba_eigen_probe(table: HadamardTable, xi, sample_xs, *, h: float = 1e-3, bits: int = RESIDUAL_BITS,
                   weights=None, tol: float = CONSTANCY_TOL) -> VerifyReport:
    """Measure ``(-Laplace + V) Psi / Psi`` for the Baker-Akhiezer function.

    The report states whether the ratio is constant over the samples (spread
    below ``tol`` relative) and records its mean; no value is assumed.
    ``weights`` replaces the ``2**-nu`` weights (negative controls).
    """
    data = table.data
    with timed() as clock:
        ratios = []
        with gmpy2.context(precision=bits):
            xim = tuple(map(_mp, xi))
            f = lambda y: ba_eval(table, y, xim, weights=weights)  # noqa: E731
            for x in sample_xs:
                xm = tuple(map(_mp, x))
                hx = h * gmpy2.sqrt(xm[0] ** 2 + xm[1] ** 2)
                centre = f(xm)
                val = (-_laplacian(f, xm, hx) + potential_eval(data, xm) * centre) / centre
                ratios.append(float(val))
    mean = sum(ratios) / len(ratios)
    spread = (max(ratios) - min(ratios)) / max(abs(mean), 1e-300)
    constant = spread < tol
    details = {"mean": mean, "spread": spread, "constant": constant, "minus_xi_squared": -(xi[0] ** 2 + xi[1] ** 2),
               "xi": list(map(float, xi))}
    witness = None
    if not constant:
        i_min, i_max = int(np.argmin(ratios)), int(np.argmax(ratios))
        witness = {"k": list(data.k), "x_low": list(map(float, sample_xs[i_min])), "ratio_low": ratios[i_min],
                   "x_high": list(map(float, sample_xs[i_max])), "ratio_high": ratios[i_max]}
    return VerifyReport("ba-probe", NUMERIC_PASS if constant else FAIL, len(ratios), clock["elapsed"],
                        max_residual=spread, witness=witness, details=details)
