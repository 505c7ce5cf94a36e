"""Exact verification of the algebraic identities behind the closed forms.

Every check accepts keyword overrides for its ingredients so that a single
constant, eigenfunction or Chebyshev order can be perturbed on purpose; the
overridden check must then fail with a nonzero witness.
"""
from __future__ import annotations

from math import comb, factorial

from gmpy2 import mpq

from ..hadamard import (
    HadamardTable,
    SeparatedFunction,
    hadamard_table,
    log_term,
    log_term_series,
    series_weight,
    sigma_sum,
)
from ..scalars import to_scalar
from ..spectral import angular_potential, apply_L, c_const, darboux_backward, darboux_forward, psi
from ..trig import TrigPoly, TrigPoly2, TrigRational, cos_difference, separable
from ..wronskian import KData, full_wronskian, reduced_wronskian
from .report import exact_report, timed

__all__ = [
    "check_unity",
    "check_eigen",
    "check_darboux",
    "check_cramer",
    "check_transport_symbolic",
    "check_vanishing",
    "check_goursat",
    "check_series",
    "gamma_power",
]


def _kinfo(data: KData) -> dict:
    return {"k": list(data.k)}


def check_unity(data: KData, *, c=None, numerators=None):
    """``sum c_i W_i(p) W_i(q) cos(k_i (p - q)) - W(p) W(q) == 0`` in two angles."""
    with timed() as t:
        w = full_wronskian(data)
        c = [c_const(data, i) for i in range(data.m + 1)] if c is None else c
        nums = [reduced_wronskian(data, {i}) for i in range(data.m + 1)] if numerators is None else numerators
        total = -separable(w, w)
        for i, (ci, wi) in enumerate(zip(c, nums)):
            total = total + separable(wi, wi) * cos_difference(data.k[i], data.mode) * ci
        failures = [] if total.is_zero() else [{**_kinfo(data), "residual": total.to_text()}]
    return exact_report("unity", failures, 1, t["elapsed"])


def check_eigen(data: KData, *, psis=None, eigenvalues=None):
    """``L[Psi_i] - k_i**2 Psi_i == 0`` for every ``i``."""
    with timed() as t:
        psis = [psi(data, i) for i in range(data.m + 1)] if psis is None else psis
        lams = [k * k for k in data.k] if eigenvalues is None else eigenvalues
        failures = []
        for i, (f, lam) in enumerate(zip(psis, lams)):
            res = apply_L(data, f) - f * lam
            if not res.is_zero():
                failures.append({**_kinfo(data), "i": i, "residual": res.to_text()})
    return exact_report("eigen", failures, data.m + 1, t["elapsed"])


def _factorization_test_set(data: KData):
    mode = data.mode
    out = [TrigRational(TrigPoly.one(mode))]
    for n in range(1, 3):
        out += [TrigRational(TrigPoly.cos(n, mode=mode)), TrigRational(TrigPoly.sin(n, mode=mode))]
    return out + [psi(data, i) for i in range(data.m + 1)]


def check_darboux(data: KData, k_next: int, phase=(1, 0), *, psis=None):
    """Darboux step ``data -> data + k_next``.

    Checks ``A*[Psi~_top] = 0``, ``A*[Psi~_i] = -Psi_i``,
    ``A[Psi_i] = (k_next**2 - k_i**2) Psi~_i`` and ``L = A* A + k_next**2``
    on a spanning test set.  ``psis`` overrides the base eigenfunctions.
    """
    if k_next <= data.k_max:
        raise ValueError(f"k_next={k_next} must exceed k_max={data.k_max}")
    with timed() as t:
        ext = data.extend(k_next, phase)
        base = [psi(data, i) for i in range(data.m + 1)] if psis is None else psis
        failures = []
        top = darboux_backward(ext, psi(ext, ext.m))
        if not top.is_zero():
            failures.append({**_kinfo(ext), "identity": "A*[top]", "residual": top.to_text()})
        for i in range(data.m + 1):
            tilde = psi(ext, i)
            r1 = darboux_backward(ext, tilde) + base[i]
            if not r1.is_zero():
                failures.append({**_kinfo(ext), "identity": "Id1", "i": i, "residual": r1.to_text()})
            r2 = darboux_forward(ext, base[i]) - tilde * (k_next ** 2 - data.k[i] ** 2)
            if not r2.is_zero():
                failures.append({**_kinfo(ext), "identity": "Id2", "i": i, "residual": r2.to_text()})
        for j, f in enumerate(_factorization_test_set(data)):
            r3 = apply_L(data, f) - darboux_backward(ext, darboux_forward(ext, f)) - f * k_next ** 2
            if not r3.is_zero():
                failures.append({**_kinfo(ext), "identity": "factorization", "test_function": f.to_text(),
                                 "residual": r3.to_text()})
    return exact_report("darboux", failures, 2 * (data.m + 1) + 1, t["elapsed"],
                        {"k_next": k_next})


def check_cramer(data: KData, *, wronskians=None):
    """``d/dp (W_i / W_top) == W W_{i,top} / W_top**2`` for ``i < m``.

    ``data`` is the extended set; ``top = m``.  ``wronskians`` maps omitted
    index sets to replacement Wronskians.
    """
    if data.m < 1:
        raise ValueError("the Cramer identity needs at least two basis functions")
    wr = dict(wronskians or {})

    def W(*omit):
        key = frozenset(omit)
        return wr[key] if key in wr else reduced_wronskian(data, key)

    with timed() as t:
        top = data.m
        failures = []
        for i in range(top):
            lhs = TrigRational(W(i), W(top)).diff()
            rhs = TrigRational.from_factors(W() * W(i, top), [(W(top), 2)])
            res = lhs - rhs
            if not res.is_zero():
                failures.append({**_kinfo(data), "i": i, "residual": res.to_text()})
    return exact_report("cramer", failures, top, t["elapsed"])


def check_transport_symbolic(table: HadamardTable, rescale=1):
    """``(x - xi).grad U_nu + nu U_nu == -rescale * L[U_{nu-1}]`` for ``nu = 1..k_max``.

    With ``rescale`` = ``a`` the coefficients used are ``a**nu U_nu``, which
    covers the Baker-Akhiezer (``a = 1/2``) and elliptic (``a = -1/4``) systems.
    """
    data = table.data
    with timed() as t:
        mode = data.mode
        with mode.context():
            a = to_scalar(mpq(rescale) if not isinstance(rescale, str) else rescale, mode)
        failures = []
        for nu in range(1, table.k_max + 1):
            cur = table.as_separated(nu).scale(a ** nu)
            prev = table.as_separated(nu - 1).scale(a ** (nu - 1))
            lhs = cur.directional() + cur.scale(nu)
            rhs = prev.apply_L(data).scale(-a)
            res = lhs - rhs
            if not res.is_zero():
                failures.append({**_kinfo(data), "nu": nu, "residual": res.to_text()})
    return exact_report("transport", failures, table.k_max, t["elapsed"], {"rescale": str(rescale)})


def check_vanishing(data: KData, extra: int = 3, *, c=None, orders=None):
    """The closed-form sum is identically zero for ``k_max < nu <= k_max + extra``."""
    with timed() as t:
        failures = []
        for nu in range(data.k_max + 1, data.k_max + 1 + extra):
            s = sigma_sum(data, nu, c=c, orders=orders)
            if not s.is_zero():
                failures.append({**_kinfo(data), "nu": nu, "residual": s.to_text()})
    return exact_report("vanishing", failures, extra, t["elapsed"])


def gamma_power(nu: int, mode) -> SeparatedFunction:
    """``gamma**nu`` with ``gamma = r**2 + rho**2 - 2 r rho cos(p - q)`` in separated form."""
    cd = cos_difference(1, mode)
    terms = {}
    power = TrigPoly2.one(mode)
    powers = [power]
    for _ in range(nu):
        powers.append(powers[-1] * cd)
    for a in range(nu + 1):
        for b in range(nu + 1 - a):
            c = nu - a - b
            coef = factorial(nu) // (factorial(a) * factorial(b) * factorial(c)) * (-2) ** c
            key = (2 * a + c, 2 * b + c)
            poly = powers[c] * coef
            terms[key] = terms[key] + poly if key in terms else poly
    return SeparatedFunction({k: TrigRational(v) for k, v in terms.items()}, mode)


def _w_from_table(table: HadamardTable) -> SeparatedFunction:
    """``sum_nu U_nu gamma**nu / ((-4)**nu nu!)`` rebuilt from the table."""
    mode = table.data.mode
    out = SeparatedFunction({}, mode)
    for nu in range(len(table.sigma)):
        u = table.as_separated(nu)
        g = gamma_power(nu, mode)
        prod = {}
        for (a, b), f in u.terms.items():
            for (c, d), h in g.terms.items():
                key = (a + c, b + d)
                prod[key] = prod[key] + f * h if key in prod else f * h
        with mode.context():
            out = out + SeparatedFunction(prod, mode).scale(to_scalar(series_weight(nu), mode))
    return out


def check_goursat(data: KData, table: HadamardTable | None = None, *, log=None):
    """The logarithmic term solves ``L[W] = 0`` with ``W = 1`` on ``gamma = 0``.

    (a) every Laurent term of ``W`` is annihilated by the polar operator;
    (b) the ``gamma**0`` coefficient of its expansion is exactly 1;
    (c) ``W`` rebuilt from the table's coefficients through the ``gamma``
        series equals the Laurent form exactly.
    """
    with timed() as t:
        table = hadamard_table(data) if table is None else table
        w = log_term(data) if log is None else log
        failures = []
        for key, f in w.terms.items():
            piece = SeparatedFunction({key: f}, data.mode).apply_L(data)
            if not piece.is_zero():
                failures.append({**_kinfo(data), "part": "L[W]", "term": list(key), "residual": piece.to_text()})
        series = log_term_series(data)
        g0 = series[0].terms.get((0, 0))
        if g0 is None or len(series[0]) != 1 or not g0 == 1:
            failures.append({**_kinfo(data), "part": "boundary", "residual": series[0].to_text()})
        diff = _w_from_table(table) - w
        if not diff.is_zero():
            failures.append({**_kinfo(data), "part": "series vs Laurent", "residual": diff.to_text()})
    return exact_report("goursat", failures, len(w), t["elapsed"])


def check_series(data: KData, table: HadamardTable | None = None):
    """Each ``gamma**nu`` coefficient equals ``U_nu / ((-4)**nu nu!)`` exactly."""
    with timed() as t:
        table = hadamard_table(data) if table is None else table
        series = log_term_series(data)
        failures = []
        n = max(len(series), len(table.sigma))
        for nu in range(n):
            lhs = series[nu] if nu < len(series) else SeparatedFunction({}, data.mode)
            with data.mode.context():
                rhs = table.as_separated(nu).scale(to_scalar(series_weight(nu), data.mode))
            res = lhs - rhs
            if not res.is_zero():
                failures.append({**_kinfo(data), "nu": nu, "residual": res.to_text()})
    return exact_report("series", failures, n, t["elapsed"])
