"""Basis functions ``cos(k_i p + phi_i)`` and their Wronskians."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from gmpy2 import mpfr

from .errors import DegenerateWronskianError, InvalidKDataError, ModeMismatchError
from .scalars import EXACT, Mode, float_mode, to_scalar
from .trig import COS, SIN, TrigPoly, decode, encode

__all__ = ["KData", "chi", "wronskian", "reduced_wronskian", "full_wronskian", "exact_divide"]


@dataclass(frozen=True)
class KData:
    """Strictly increasing integers ``k`` (with ``k[0] == 0``) and unit-circle phases.

    ``phases[i]`` is the pair ``(cos phi_i, sin phi_i)``; the first phase must
    be ``(1, 0)``.  In exact mode the pairs must lie exactly on the unit circle.
    """

    k: tuple
    phases: tuple
    mode: Mode = EXACT

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if not k:
            raise InvalidKDataError("k must contain at least k_0 = 0")
        if k[0] != 0:
            raise InvalidKDataError(f"k_0 must be 0, got {k[0]}")
        if any(b <= a for a, b in zip(k, k[1:])):
            raise InvalidKDataError(f"k must be strictly increasing, got {list(k)}")
        if len(self.phases) != len(k):
            raise InvalidKDataError(f"{len(k)} integers but {len(self.phases)} phases")
        mode = self.mode
        with mode.context():
            phases = tuple((to_scalar(c, mode), to_scalar(s, mode)) for c, s in self.phases)
            if phases[0] != (1, 0):
                raise InvalidKDataError("the phase of k_0 must be 0, i.e. (cos, sin) = (1, 0)")
            tol = 0 if mode.exact else 1000 * mode.zero_tolerance
            for i, (c, s) in enumerate(phases):
                if abs(c * c + s * s - 1) > tol:
                    raise InvalidKDataError(f"phase {i} = ({c}, {s}) is not on the unit circle")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def trivial(cls, k, mode: Mode = EXACT) -> "KData":
        """All phases zero."""
        return cls(tuple(k), tuple((1, 0) for _ in k), mode)

    @classmethod
    def from_angles(cls, k, angles, bits: int = 128) -> "KData":
        """Float-mode data from phase angles in radians."""
        mode = float_mode(bits)
        import gmpy2

        with mode.context():
            phases = []
            for a in angles:
                a = mpfr(a)
                phases.append((gmpy2.cos(a), gmpy2.sin(a)) if a != 0 else (mpfr(1), mpfr(0)))
        return cls(tuple(k), tuple(phases), mode)

    @property
    def m(self) -> int:
        return len(self.k) - 1

    @property
    def k_max(self) -> int:
        return self.k[-1]

    def extend(self, k_next: int, phase=(1, 0)) -> "KData":
        """Append one integer above ``k_max`` (the data of a Darboux step)."""
        return KData(self.k + (k_next,), self.phases + (phase,), self.mode)

    def truncate(self) -> "KData":
        return KData(self.k[:-1], self.phases[:-1], self.mode)


def chi(data: KData, i: int) -> TrigPoly:
    """``cos(k_i p + phi_i) = c_i cos(k_i p) - s_i sin(k_i p)``."""
    if not 0 <= i <= data.m:
        raise IndexError(f"index {i} outside 0..{data.m}")
    c, s = data.phases[i]
    with data.mode.context():
        s = -s
    return TrigPoly.from_terms([(COS, data.k[i], c), (SIN, data.k[i], s)], data.mode)


def _det_cofactor(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    total = None
    for c in range(n):
        if mat[0][c].is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        term = mat[0][c] * _det_cofactor(minor)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else mat[0][0] * 0


def _det_bareiss(mat):
    """Fraction-free elimination; every division is exact over the ring."""
    m = [list(row) for row in mat]
    n = len(m)
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return m[0][0] * 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = v if prev is None else exact_divide(v, prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def wronskian(funcs, method: str = "auto") -> TrigPoly:
    """``det[d^r f_c / dp^r]``; the Wronskian of an empty list is 1."""
    funcs = list(funcs)
    if not funcs:
        raise ValueError("pass at least one function; use reduced_wronskian for the empty case")
    mode = funcs[0].mode
    if any(f.mode != mode for f in funcs):
        raise ModeMismatchError("functions in a Wronskian must share one mode")
    n = len(funcs)
    rows = [funcs]
    for _ in range(1, n):
        rows.append([f.diff() for f in rows[-1]])
    if method == "auto":
        method = "cofactor" if n <= 4 else "bareiss"
    if method == "cofactor":
        return _det_cofactor(rows)
    if method == "bareiss":
        return _det_bareiss(rows)
    if method == "leibniz":
        return _det_leibniz(rows)
    raise ValueError(f"unknown determinant method {method!r}")


def _det_leibniz(mat):
    """Sum over permutations; only for cross-checking the other algorithms."""
    n = len(mat)
    total = mat[0][0] * 0
    for perm in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = mat[0][perm[0]]
        for r in range(1, n):
            term = term * mat[r][perm[r]]
        total = total - term if inv % 2 else total + term
    return total


def reduced_wronskian(data: KData, omit=()) -> TrigPoly:
    """Wronskian of the ``chi`` list with the indices in ``omit`` removed.

    The remaining functions keep their original order, so the sign is the
    one obtained by deleting columns, never by re-sorting.
    """
    return _reduced(data, frozenset(omit))


@lru_cache(maxsize=1024)
def _reduced(data: KData, omit: frozenset) -> TrigPoly:
    bad = [i for i in omit if not 0 <= i <= data.m]
    if bad:
        raise IndexError(f"omitted indices {sorted(bad)} outside 0..{data.m}")
    funcs = [chi(data, i) for i in range(data.m + 1) if i not in omit]
    if not funcs:
        return TrigPoly.one(data.mode)
    return wronskian(funcs)


def full_wronskian(data: KData) -> TrigPoly:
    """The full Wronskian, raising if it vanishes identically."""
    w = _reduced(data, frozenset())
    if w.is_zero():
        raise DegenerateWronskianError(f"Wronskian of k={list(data.k)} vanishes identically")
    return w


# -- exact division through the exponential basis -------------------------------


def _to_laurent(p: TrigPoly, n: int):
    """Coefficients of ``z**j`` (j = 0..2n) in ``z**n * p`` with ``z = e^{ip}``.

    Complex numbers are ``(re, im)`` pairs so exact rationals stay exact.
    """
    zero = to_scalar(0, p.mode)
    coeffs = [(zero, zero) for _ in range(2 * n + 1)]
    for code, v in p.items():
        kind, f = decode(code)
        if f == 0:
            re, im = coeffs[n]
            coeffs[n] = (re + v, im)
            continue
        half = v / 2
        # cos f = (z^f + z^-f)/2 ; sin f = (z^f - z^-f)/(2i)
        if kind == COS:
            hi, lo = (half, zero), (half, zero)
        else:
            hi, lo = (zero, -half), (zero, half)
        for j, (a, b) in ((n + f, hi), (n - f, lo)):
            re, im = coeffs[j]
            coeffs[j] = (re + a, im + b)
    return coeffs


def _from_laurent(coeffs, n: int, mode: Mode) -> TrigPoly:
    terms = {}
    re0, _ = coeffs[n]
    terms[0] = re0
    for f in range(1, n + 1):
        re, im = coeffs[n + f]
        terms[encode(COS, f)] = 2 * re
        terms[encode(SIN, f)] = -2 * im
    return TrigPoly(terms, mode)


def _cmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _cdiv(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    return (a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d


def exact_divide(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """The trigonometric polynomial ``q`` with ``b * q == a``.

    Raises ``ArithmeticError`` when ``b`` does not divide ``a``.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return a
    na, nb = a.degree, b.degree
    if nb > na:
        raise ArithmeticError("divisor has higher degree than dividend")
    with a.mode.context():
        rem = _to_laurent(a, na)
        den = _to_laurent(b, nb)
        lead = den[-1]
        dq = 2 * (na - nb)
        quot = [None] * (dq + 1)
        for j in range(dq, -1, -1):
            c = _cdiv(rem[j + 2 * nb], lead)
            quot[j] = c
            for i, d in enumerate(den):
                re, im = rem[j + i]
                pr, pi = _cmul(c, d)
                rem[j + i] = (re - pr, im - pi)
        q = _from_laurent(quot, na - nb, a.mode)
    if a.mode.exact:
        if any(re != 0 or im != 0 for re, im in rem):
            raise ArithmeticError("division is not exact")
    else:
        tol = a.mode.zero_tolerance * max(a._scale, 1e-300) * 16
        if any(abs(re) > tol or abs(im) > tol for re, im in rem):
            raise ArithmeticError("division is not exact")
    return q
