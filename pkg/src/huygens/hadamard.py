"""Closed-form Hadamard coefficients, the logarithmic term and the exact kernels.

With ``x = r(cos p, sin p)`` and ``xi = rho(cos q, sin q)`` every coefficient is
``U_nu = sigma_nu(p, q) / (r rho)**nu`` where::

    sigma_nu = (-2)**nu * sum_i c_i Psi_i(p) Psi_i(q) T_{k_i}^{(nu)}(cos(p - q))

The sum is finite (``sigma_nu == 0`` for ``nu > k_max``), so the heat kernel and
the Baker-Akhiezer function below are exact, not asymptotic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

import gmpy2
import numpy as np
from gmpy2 import mpq

from .chebyshev import cheb, cheb_derivative
from .errors import NonPositiveTimeError
from .scalars import EXACT, Mode, to_scalar
from .spectral import DEFAULT_DEN_GUARD, angular_potential, c_const, polar, psi
from .trig import TrigPoly2, TrigRational, compile_rational, cos_difference, sin_difference
from .wronskian import KData

__all__ = [
    "HadamardTable",
    "SeparatedFunction",
    "hadamard_table",
    "sigma_sum",
    "u_eval",
    "log_term",
    "log_term_series",
    "heat_kernel_eval",
    "ba_eval",
    "series_weight",
    "u_eval_array",
]

_MPQ = type(mpq())
_MPFR = type(gmpy2.mpfr())
EXTRA_VANISHING_ORDERS = 3


@lru_cache(maxsize=64)
def _cos_diff_powers(mode: Mode, n: int) -> tuple:
    """``cos(p - q)**j`` for ``j = 0..n`` by repeated two-angle multiplication."""
    base = cos_difference(1, mode)
    out = [TrigPoly2.one(mode)]
    for _ in range(n):
        out.append(out[-1] * base)
    return tuple(out)


def _poly_of_cos_diff(coeffs, mode: Mode) -> TrigPoly2:
    """``sum a_j cos(p - q)**j`` for integer coefficients ``a_j``."""
    powers = _cos_diff_powers(mode, max(len(coeffs) - 1, 0))
    out = TrigPoly2.zero(mode)
    for j, a in enumerate(coeffs):
        if a:
            out = out + powers[j] * a
    return out


def _psi_products(data: KData):
    return [psi(data, i).lift(0) * psi(data, i).lift(1) for i in range(data.m + 1)]


def sigma_sum(data: KData, nu: int, *, c=None, psis=None, orders=None) -> TrigRational:
    """The angular factor ``sigma_nu`` straight from the closed-form sum.

    ``c``, ``psis`` and ``orders`` override the constants, the one-angle
    eigenfunctions and the Chebyshev degrees; they exist so that negative
    controls can perturb a single ingredient.
    """
    mode = data.mode
    c = [c_const(data, i) for i in range(data.m + 1)] if c is None else list(c)
    orders = list(data.k) if orders is None else list(orders)
    if psis is None:
        prods = _psi_products(data)
    else:
        prods = [p.lift(0) * p.lift(1) for p in psis]
    total = TrigRational.constant(0, 2, mode)
    for ci, prod, n in zip(c, prods, orders):
        dcoeffs = cheb_derivative(n, nu)
        if not dcoeffs:
            continue
        total = total + prod * (_poly_of_cos_diff(dcoeffs, mode) * ci)
    with mode.context():
        return total * to_scalar((-2) ** nu, mode)


@dataclass
class HadamardTable:
    """``sigma[nu]`` for ``nu = 0..k_max``; ``U_nu = sigma[nu] / (r rho)**nu``."""

    data: KData
    sigma: list
    vanishing_checked: int = 0
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def k_max(self) -> int:
        return self.data.k_max

    def __len__(self):
        return len(self.sigma)

    def compiled(self, nu: int):
        if nu not in self._compiled:
            self._compiled[nu] = compile_rational(self.sigma[nu])
        return self._compiled[nu]

    def replace_sigma(self, nu: int, value: TrigRational) -> "HadamardTable":
        """Copy of the table with one coefficient swapped (for negative controls)."""
        sigma = list(self.sigma)
        sigma[nu] = value
        return HadamardTable(self.data, sigma, self.vanishing_checked)

    def as_separated(self, nu: int) -> "SeparatedFunction":
        """``U_nu`` as a separated function of ``(r, rho, p, q)``."""
        if nu >= len(self.sigma):
            return SeparatedFunction({}, self.data.mode)
        return SeparatedFunction({(-nu, -nu): self.sigma[nu]}, self.data.mode)


def hadamard_table(data: KData, extra: int = EXTRA_VANISHING_ORDERS) -> HadamardTable:
    """Build the table and prove, for this instance, that the next ``extra``
    coefficients vanish identically and that ``sigma_0 == 1``."""
    sigma = [sigma_sum(data, nu) for nu in range(data.k_max + 1)]
    if not sigma[0] == 1:
        raise ArithmeticError(f"sigma_0 differs from 1 for k={list(data.k)}: {sigma[0]}")
    sigma[0] = TrigRational.constant(1, 2, data.mode)
    for nu in range(data.k_max + 1, data.k_max + 1 + extra):
        tail = sigma_sum(data, nu)
        if not tail.is_zero():
            raise ArithmeticError(f"sigma_{nu} does not vanish for k={list(data.k)}")
    return HadamardTable(data, sigma, extra)


# -- point evaluation -------------------------------------------------------------


def u_eval(table: HadamardTable, x, xi, nu: int, den_guard: float = DEFAULT_DEN_GUARD):
    """``U_nu(x, xi)``.  Exact for rational points with rational radii."""
    r, c1, s1 = polar(x)
    rho, c2, s2 = polar(xi)
    if nu >= len(table.sigma):
        return 0 * r
    sig = table.sigma[nu]
    if isinstance(r, _MPQ) and isinstance(rho, _MPQ):
        val = sig.at_point(c1, s1, c2, s2, den_guard=den_guard)
    elif isinstance(r, _MPFR) or isinstance(rho, _MPFR):
        prec = max(getattr(r, "precision", 53), getattr(rho, "precision", 53))
        with gmpy2.context(precision=prec):
            val = sig.at_point(c1, s1, c2, s2, den_guard=den_guard)
            return val / (r * rho) ** nu
    else:
        r, rho = float(r), float(rho)
        val = float(table.compiled(nu)(math.atan2(float(s1), float(c1)),
                                       math.atan2(float(s2), float(c2)), den_guard=den_guard))
    return val / (r * rho) ** nu


def u_eval_array(table: HadamardTable, x, xi, nu: int, den_guard: float = 0.0):
    """Vectorised float ``U_nu`` over arrays of points of shape ``(..., 2)``."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1])
    rho = np.hypot(xi[..., 0], xi[..., 1])
    if nu >= len(table.sigma):
        return np.zeros(np.broadcast_shapes(r.shape, rho.shape))
    p = np.arctan2(x[..., 1], x[..., 0])
    q = np.arctan2(xi[..., 1], xi[..., 0])
    p, q = np.broadcast_arrays(p, q)
    val = table.compiled(nu)(p, q, den_guard=den_guard)
    return val / (r * rho) ** nu


def _sq_dist(x, xi):
    return (x[0] - xi[0]) ** 2 + (x[1] - xi[1]) ** 2


def heat_kernel_eval(table: HadamardTable, x, xi, t, den_guard: float = DEFAULT_DEN_GUARD):
    """``(4 pi t)**-1 exp(-|x - xi|**2 / 4t) sum_nu U_nu t**nu`` (two dimensions).

    ``mpfr`` arguments are evaluated in their own precision; everything else in
    machine floats.
    """
    if t <= 0:
        raise NonPositiveTimeError(f"time must be positive, got {t}")
    if any(isinstance(v, _MPFR) for v in (*x, *xi, t)):
        prec = max(getattr(v, "precision", 53) for v in (*x, *xi, t))
        with gmpy2.context(precision=prec):
            x = tuple(gmpy2.mpfr(v) for v in x)
            xi = tuple(gmpy2.mpfr(v) for v in xi)
            t = gmpy2.mpfr(t)
            series = sum(u_eval(table, x, xi, nu, den_guard) * t ** nu for nu in range(len(table.sigma)))
            return gmpy2.exp(-_sq_dist(x, xi) / (4 * t)) / (4 * gmpy2.const_pi() * t) * series
    x = tuple(float(v) for v in x)
    xi = tuple(float(v) for v in xi)
    t = float(t)
    series = sum(u_eval(table, x, xi, nu, den_guard) * t ** nu for nu in range(len(table.sigma)))
    return math.exp(-_sq_dist(x, xi) / (4 * t)) / (4 * math.pi * t) * series


def ba_eval(table: HadamardTable, x, xi, den_guard: float = DEFAULT_DEN_GUARD, weights=None):
    """``(sum_nu U_nu / 2**nu) exp(<x, xi>)``.

    ``weights`` replaces the ``2**-nu`` factors (negative controls only).
    """
    n = len(table.sigma)
    weights = [0.5 ** nu for nu in range(n)] if weights is None else list(weights)
    if any(isinstance(v, _MPFR) for v in (*x, *xi)):
        prec = max(getattr(v, "precision", 53) for v in (*x, *xi))
        with gmpy2.context(precision=prec):
            x = tuple(gmpy2.mpfr(v) for v in x)
            xi = tuple(gmpy2.mpfr(v) for v in xi)
            s = sum(u_eval(table, x, xi, nu, den_guard) * weights[nu] for nu in range(n))
            return s * gmpy2.exp(x[0] * xi[0] + x[1] * xi[1])
    x = tuple(float(v) for v in x)
    xi = tuple(float(v) for v in xi)
    s = sum(u_eval(table, x, xi, nu, den_guard) * weights[nu] for nu in range(n))
    return s * math.exp(x[0] * xi[0] + x[1] * xi[1])


# -- separated functions ---------------------------------------------------------------


class SeparatedFunction:
    """``sum_j f_j(p, q) r**a_j rho**b_j`` with two-angle quotients ``f_j``."""

    __slots__ = ("terms", "mode")

    def __init__(self, terms=None, mode: Mode = EXACT):
        self.mode = mode
        self.terms = {key: f for key, f in (terms or {}).items() if not f.is_zero()}

    def __add__(self, other: "SeparatedFunction") -> "SeparatedFunction":
        out = dict(self.terms)
        for key, f in other.terms.items():
            out[key] = out[key] + f if key in out else f
        return SeparatedFunction(out, self.mode)

    def __neg__(self):
        return SeparatedFunction({k: -f for k, f in self.terms.items()}, self.mode)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "SeparatedFunction":
        with self.mode.context():
            factor = to_scalar(factor, self.mode)
        return SeparatedFunction({k: f * factor for k, f in self.terms.items()}, self.mode)

    def times_angular(self, g: TrigRational) -> "SeparatedFunction":
        return SeparatedFunction({k: f * g for k, f in self.terms.items()}, self.mode)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SeparatedFunction):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __len__(self):
        return len(self.terms)

    # -- differential operators ---------------------------------------------
    def euler_r(self) -> "SeparatedFunction":
        """``r d/dr`` (that is, ``x . grad_x``)."""
        return SeparatedFunction({(a, b): f * a for (a, b), f in self.terms.items() if a}, self.mode)

    def xi_dot_grad(self) -> "SeparatedFunction":
        """``xi . grad_x = rho [cos(p - q) d/dr - sin(p - q) / r d/dp]``."""
        cd = TrigRational(cos_difference(1, self.mode))
        sd = TrigRational(sin_difference(1, self.mode))
        out = SeparatedFunction({}, self.mode)
        for (a, b), f in self.terms.items():
            piece = {}
            if a:
                piece[(a - 1, b + 1)] = cd * f * a
            df = f.diff(0)
            if not df.is_zero():
                g = -(sd * df)
                piece[(a - 1, b + 1)] = piece[(a - 1, b + 1)] + g if (a - 1, b + 1) in piece else g
            out = out + SeparatedFunction(piece, self.mode)
        return out

    def directional(self) -> "SeparatedFunction":
        """``(x - xi) . grad_x``."""
        return self.euler_r() - self.xi_dot_grad()

    def apply_L(self, data: KData, potential: TrigRational | None = None) -> "SeparatedFunction":
        """``-d2/dr2 - (1/r) d/dr + (1/r**2)(-d2/dp2 + v(p))`` acting on ``x``."""
        v = (angular_potential(data) if potential is None else potential).lift(0)
        out = {}
        for (a, b), f in self.terms.items():
            g = -f.diff(0, 2) + v * f
            if a:
                g = g - f * (a * a)
            out[(a - 2, b)] = out[(a - 2, b)] + g if (a - 2, b) in out else g
        return SeparatedFunction(out, self.mode)

    # -- evaluation -------------------------------------------------------------
    def __call__(self, x, xi, den_guard: float = 0.0):
        r, c1, s1 = polar(x)
        rho, c2, s2 = polar(xi)
        exact = isinstance(r, _MPQ) and isinstance(rho, _MPQ)
        total = 0
        for (a, b), f in self.terms.items():
            if exact:
                ang = f.at_point(c1, s1, c2, s2, den_guard=den_guard)
            else:
                ang = float(f(math.atan2(float(s1), float(c1)), math.atan2(float(s2), float(c2)),
                              den_guard=den_guard))
                r, rho = float(r), float(rho)
            total = total + ang * r ** a * rho ** b
        return total

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), f in sorted(self.terms.items()):
            parts.append(f"[{f.to_text()}]*r^{a}*rho^{b}")
        return " + ".join(parts)

    def __repr__(self):
        return f"SeparatedFunction({self.to_text()!r})"


def log_term(data: KData) -> SeparatedFunction:
    """``sum_i c_i Psi_i(p) Psi_i(q) T_{k_i}((r/rho + rho/r)/2)`` in Laurent form.

    ``T_k((s + 1/s)/2) = (s**k + s**-k)/2`` with ``s = r/rho``; the ``k = 0``
    summand is a single constant-power term.
    """
    mode = data.mode
    terms = {}
    with mode.context():
        half = to_scalar(mpq(1, 2), mode)
    for i, prod in enumerate(_psi_products(data)):
        k = data.k[i]
        coef = prod * c_const(data, i)
        if k == 0:
            key_terms = [((0, 0), coef)]
        else:
            key_terms = [((k, -k), coef * half), ((-k, k), coef * half)]
        for key, f in key_terms:
            terms[key] = terms[key] + f if key in terms else f
    return SeparatedFunction(terms, mode)


def log_term_series(data: KData) -> list:
    """Coefficients of ``gamma**nu`` in the logarithmic term, ``nu = 0..k_max``.

    Obtained by the Taylor shift ``T(w + c) = sum_nu w**nu sum_n a_n C(n, nu) c**(n - nu)``
    with ``w = gamma / (2 r rho)`` and ``c = cos(p - q)``; no Chebyshev
    derivative tables are involved.
    """
    mode = data.mode
    prods = _psi_products(data)
    series = []
    for nu in range(data.k_max + 1):
        total = TrigRational.constant(0, 2, mode)
        for i, prod in enumerate(prods):
            a = cheb(data.k[i])
            shifted = [a[n] * comb(n, nu) for n in range(nu, len(a))]
            if not any(shifted):
                continue
            total = total + prod * (_poly_of_cos_diff(shifted, mode) * c_const(data, i))
        with mode.context():
            total = total * to_scalar(mpq(1, 2 ** nu), mode)
        series.append(SeparatedFunction({(-nu, -nu): total}, mode))
    return series


def series_weight(nu: int):
    """``1 / ((-4)**nu nu!)``."""
    return mpq(1, (-4) ** nu * factorial(nu))
