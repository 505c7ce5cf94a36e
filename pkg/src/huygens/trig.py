"""Finite trigonometric polynomials and their quotients.

A one-angle polynomial is a finite sum of ``cos(n p)`` and ``sin(n p)``; a
two-angle polynomial is a finite sum of tensor products of such basis
functions in the angles ``p`` and ``q``.  Internally each one-angle basis
function is an integer *code*: ``cos n -> 2n`` and ``sin n -> 2n - 1``.  A
two-angle key is a pair of codes.

Quotients (:class:`TrigRational`) keep their denominator as a product of
monic factors with multiplicities.  There is no polynomial GCD; sums take the
least common multiple of the factor lists, which is enough to keep the
Wronskian-power denominators met in practice from growing.
"""
from __future__ import annotations

import re
from collections import defaultdict
from functools import lru_cache
from numbers import Number

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .errors import DivisionByZeroFunctionError, ModeMismatchError, NearSingularEvaluation
from .scalars import EXACT, Mode, parse_scalar, scalar_to_str, to_scalar

__all__ = ["TrigPoly", "TrigPoly2", "TrigRational", "compile_rational", "cos_difference", "sin_difference", "separable"]

COS, SIN = "cos", "sin"
_MPFR = type(mpfr())
_MPQ = type(mpq())


def encode(kind: str, freq: int) -> int:
    if kind == COS:
        return 2 * freq
    if freq <= 0:
        raise ValueError("sin basis needs a positive frequency")
    return 2 * freq - 1


def decode(code: int) -> tuple[str, int]:
    return (SIN if code & 1 else COS), (code + 1) // 2


@lru_cache(maxsize=None)
def _mul_codes(a: int, b: int) -> tuple[tuple[int, int], ...]:
    """Product of two basis functions as ``sum(m/2 * basis(code))``."""
    if a == 0:
        return ((2, b),)
    if b == 0:
        return ((2, a),)
    ka, na = decode(a)
    kb, nb = decode(b)
    s, d = na + nb, na - nb
    out: dict[int, int] = defaultdict(int)
    if ka == COS and kb == COS:
        out[2 * s] += 1
        out[2 * abs(d)] += 1
    elif ka == SIN and kb == SIN:
        out[2 * abs(d)] += 1
        out[2 * s] -= 1
    else:
        out[2 * s - 1] += 1
        if d:
            # sin a cos b = (sin(a+b) + sin(a-b))/2, cos a sin b flips the second sign
            sign = 1 if d > 0 else -1
            if ka == COS:
                sign = -sign
            out[2 * abs(d) - 1] += sign
    return tuple((m, c) for c, m in out.items() if m)


@lru_cache(maxsize=None)
def _mul_keys2(a: tuple[int, int], b: tuple[int, int]) -> tuple[tuple[int, tuple[int, int]], ...]:
    """Product of two tensor basis functions as ``sum(m/4 * basis(key))``."""
    out: dict[tuple[int, int], int] = defaultdict(int)
    for m1, c1 in _mul_codes(a[0], b[0]):
        for m2, c2 in _mul_codes(a[1], b[1]):
            out[(c1, c2)] += m1 * m2
    return tuple((m, k) for k, m in out.items() if m)


def _diff_code(code: int) -> tuple[int, int]:
    """d/dp of a basis function as ``(factor, code)``; factor 0 for constants."""
    kind, n = decode(code)
    if n == 0:
        return 0, 0
    if kind == COS:
        return -n, 2 * n - 1
    return n, 2 * n


def _is_scalar(x) -> bool:
    return isinstance(x, (Number, _MPQ, _MPFR))


class _TrigBase:
    """Shared machinery for :class:`TrigPoly` and :class:`TrigPoly2`."""

    __slots__ = ("_terms", "mode", "_scale", "_hash")
    arity = 0

    def __init__(self, terms=None, mode: Mode = EXACT, scale: float | None = None):
        self.mode = mode
        self._terms = {k: v for k, v in (terms or {}).items() if v != 0}
        if mode.exact:
            self._scale = 0.0
        elif scale is None:
            self._scale = max((abs(float(v)) for v in self._terms.values()), default=0.0)
        else:
            self._scale = scale
        self._hash = None

    # -- construction helpers -------------------------------------------------
    def _new(self, terms, scale=None):
        return type(self)(terms, self.mode, scale)

    @classmethod
    def zero(cls, mode: Mode = EXACT):
        return cls({}, mode)

    @classmethod
    def one(cls, mode: Mode = EXACT):
        return cls.constant(1, mode)

    @classmethod
    def constant(cls, value, mode: Mode = EXACT):
        key = 0 if cls.arity == 1 else (0, 0)
        with mode.context():
            return cls({key: to_scalar(value, mode)}, mode)

    def _coerce(self, other):
        if isinstance(other, _TrigBase):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            if other.mode != self.mode:
                raise ModeMismatchError(f"mode {self.mode} combined with {other.mode}")
            return other
        if _is_scalar(other):
            if isinstance(other, _MPFR) and self.mode.exact:
                raise ModeMismatchError("float scalar combined with exact polynomial")
            if isinstance(other, float) and self.mode.exact:
                raise ModeMismatchError("binary float combined with exact polynomial")
            return type(self).constant(other, self.mode)
        return NotImplemented

    # -- ring operations --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        with self.mode.context():
            out = dict(self._terms)
            for k, v in other._terms.items():
                out[k] = out.get(k, 0) + v
        return self._new(out, max(self._scale, other._scale))

    __radd__ = __add__

    def __neg__(self):
        with self.mode.context():
            return self._new({k: -v for k, v in self._terms.items()}, self._scale)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        factor = to_scalar(factor, self.mode)
        with self.mode.context():
            return self._new({k: v * factor for k, v in self._terms.items()},
                             self._scale * abs(float(factor)))

    def __mul__(self, other):
        if _is_scalar(other):
            if isinstance(other, float) and self.mode.exact:
                raise ModeMismatchError("binary float combined with exact polynomial")
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return self._new({})
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        with self.mode.context():
            terms = self._mul_terms(a, b)
        return self._new(terms, self._scale * other._scale)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = type(self).one(self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- predicates -------------------------------------------------------------
    def is_zero(self) -> bool:
        if self.mode.exact:
            return not self._terms
        tol = self.mode.zero_tolerance * max(self._scale, 1e-300)
        return all(abs(v) < tol for v in self._terms.values())

    def __bool__(self):
        return not self.is_zero()

    def is_constant(self) -> bool:
        zero = 0 if self.arity == 1 else (0, 0)
        return all(k == zero for k in self._terms)

    def constant_term(self):
        zero = 0 if self.arity == 1 else (0, 0)
        return self._terms.get(zero, to_scalar(0, self.mode))

    def __eq__(self, other):
        if _is_scalar(other):
            other = self._coerce(other)
        if not isinstance(other, _TrigBase) or type(other) is not type(self):
            return NotImplemented
        if self.mode != other.mode:
            return False
        if self.mode.exact:
            return self._terms == other._terms
        return (self - other).is_zero()

    def same_terms(self, other) -> bool:
        """Structural identity of the stored coefficients (no tolerance)."""
        return type(self) is type(other) and self.mode == other.mode and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.mode, frozenset(self._terms.items())))
        return self._hash

    # -- inspection -------------------------------------------------------------
    def __len__(self):
        return len(self._terms)

    def items(self):
        return self._terms.items()

    def leading_key(self):
        return max(self._terms) if self._terms else None

    def leading_coeff(self):
        return self._terms[self.leading_key()] if self._terms else to_scalar(0, self.mode)

    def coeff_norm(self) -> float:
        """Sum of coefficient magnitudes; an upper bound for ``|self|``."""
        return float(sum(abs(v) for v in self._terms.values()))

    def sort_key(self):
        return tuple(sorted(self._terms.items()))

    def monic(self):
        """``(lead, self/lead)`` with the leading stored coefficient equal to 1."""
        lead = self.leading_coeff()
        with self.mode.context():
            inv = 1 / lead
            return lead, self._new({k: v * inv for k, v in self._terms.items()})

    def to_float_mode(self, bits: int):
        mode = Mode(bits)
        with mode.context():
            return type(self)({k: to_scalar(mpq(v) if isinstance(v, _MPQ) else v, mode)
                               for k, v in self._terms.items()}, mode)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r}, mode={self.mode})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key in sorted(self._terms, key=self._text_order):
            coeff = self._terms[key]
            basis = self._basis_text(key)
            if basis == "":
                body = scalar_to_str(coeff)
            elif coeff == 1:
                body = basis
            elif coeff == -1:
                body = "-" + basis
            else:
                body = f"{scalar_to_str(coeff)}*{basis}"
            parts.append(body)
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text


def _code_text(code: int, var: str) -> str:
    kind, n = decode(code)
    if n == 0:
        return ""
    return f"{kind}({var})" if n == 1 else f"{kind}({n}{var})"


def _text_order_code(code: int):
    kind, n = decode(code)
    return (kind == SIN, n)


_TERM_RE = re.compile(r"(cos|sin)\((\d*)([pq])\)")


def _parse_terms(text: str, arity: int, mode: Mode):
    """Inverse of ``to_text`` for one- or two-angle polynomials."""
    text = text.strip()
    if text == "0":
        return {}
    terms: dict = {}
    # split on top-level + / - that separate terms (not inside exponents or parens)
    tokens = re.split(r"\s+([+-])\s+", text)
    signs = ["+"] + tokens[1::2]
    bodies = tokens[0::2]
    for sign, body in zip(signs, bodies):
        body = body.strip()
        neg = sign == "-"
        if body.startswith("-"):
            neg = not neg
            body = body[1:]
        factors = body.split("*")
        coeff = to_scalar(1, mode)
        codes = {"p": 0, "q": 0}
        for f in factors:
            m = _TERM_RE.fullmatch(f)
            if m:
                codes[m.group(3)] = encode(m.group(1), int(m.group(2) or 1))
            else:
                coeff = parse_scalar(f, mode)
        if neg:
            coeff = -coeff
        key = codes["p"] if arity == 1 else (codes["p"], codes["q"])
        terms[key] = terms.get(key, 0) + coeff
    return terms


class TrigPoly(_TrigBase):
    """Finite Fourier sum in one angle with exact or fixed-precision coefficients."""

    __slots__ = ()
    arity = 1

    @classmethod
    def from_terms(cls, terms, mode: Mode = EXACT):
        """Build from ``(kind, freq, coeff)`` triples; negative frequencies are folded."""
        out: dict[int, object] = {}
        with mode.context():
            for kind, freq, coeff in terms:
                if kind not in (COS, SIN):
                    raise ValueError(f"unknown basis kind {kind!r}")
                c = to_scalar(coeff, mode)
                freq = int(freq)
                if kind == SIN and freq < 0:
                    freq, c = -freq, -c
                freq = abs(freq)
                if kind == SIN and freq == 0:
                    if c != 0:
                        raise ValueError("sin(0*p) with a nonzero coefficient")
                    continue
                key = encode(kind, freq)
                out[key] = out.get(key, 0) + c
        return cls(out, mode)

    @classmethod
    def cos(cls, n: int, coeff=1, mode: Mode = EXACT):
        return cls.from_terms([(COS, n, coeff)], mode)

    @classmethod
    def sin(cls, n: int, coeff=1, mode: Mode = EXACT):
        return cls.from_terms([(SIN, n, coeff)], mode)

    @classmethod
    def parse(cls, text: str, mode: Mode = EXACT):
        with mode.context():
            return cls(_parse_terms(text, 1, mode), mode)

    @property
    def cos_terms(self) -> dict[int, object]:
        return {decode(k)[1]: v for k, v in self._terms.items() if not k & 1}

    @property
    def sin_terms(self) -> dict[int, object]:
        return {decode(k)[1]: v for k, v in self._terms.items() if k & 1}

    def terms(self):
        """``(kind, freq, coeff)`` triples in canonical text order."""
        return [(*decode(k), self._terms[k]) for k in sorted(self._terms, key=_text_order_code)]

    @property
    def degree(self) -> int:
        return max((decode(k)[1] for k in self._terms), default=0)

    @staticmethod
    def _text_order(key):
        return _text_order_code(key)

    @staticmethod
    def _basis_text(key):
        return _code_text(key, "p")

    @staticmethod
    def _mul_terms(a, b):
        acc = defaultdict(int)
        for ka, ca in a.items():
            for kb, cb in b.items():
                p = ca * cb
                for m, k in _mul_codes(ka, kb):
                    acc[k] += m * p
        return {k: v / 2 for k, v in acc.items()}

    def diff(self, order: int = 1):
        if order < 0:
            raise ValueError("order must be non-negative")
        out = self
        for _ in range(order):
            terms = {}
            scale = out._scale * max(1, out.degree)
            with self.mode.context():
                for k, v in out._terms.items():
                    f, c = _diff_code(k)
                    if f:
                        terms[c] = v * f
            out = out._new(terms, scale)
        return out

    # -- evaluation -------------------------------------------------------------
    def __call__(self, theta):
        """Evaluate at a machine angle (float or ndarray) or an ``mpfr`` angle."""
        if isinstance(theta, _MPFR):
            with gmpy2.context(precision=theta.precision):
                return self.at_point(gmpy2.cos(theta), gmpy2.sin(theta))
        theta = np.asarray(theta, dtype=float) if not isinstance(theta, float) else theta
        total = 0.0
        for k, v in self._terms.items():
            kind, n = decode(k)
            total = total + float(v) * (np.cos(n * theta) if kind == COS else np.sin(n * theta))
        return total

    def at_point(self, c, s):
        """Evaluate at the angle with ``(cos, sin) = (c, s)``.

        Exact for rational points of the unit circle; uses the angle-addition
        recurrence, so any numeric type closed under ``+`` and ``*`` works.
        """
        if not self._terms:
            return c * 0
        cs, sn = _powers(c, s, self.degree)
        total = 0
        for k, v in self._terms.items():
            kind, n = decode(k)
            total = total + v * (cs[n] if kind == COS else sn[n])
        return total

    def lift(self, slot: int = 0) -> "TrigPoly2":
        """Embed as a two-angle polynomial in ``p`` (slot 0) or ``q`` (slot 1)."""
        if slot == 0:
            terms = {(k, 0): v for k, v in self._terms.items()}
        else:
            terms = {(0, k): v for k, v in self._terms.items()}
        return TrigPoly2(terms, self.mode, self._scale)


def _powers(c, s, n: int):
    """``cos(j t), sin(j t)`` for ``j = 0..n`` from ``(cos t, sin t)``."""
    one = c * 0 + 1
    cs, sn = [one], [c * 0]
    for _ in range(n):
        pc, ps = cs[-1], sn[-1]
        cs.append(pc * c - ps * s)
        sn.append(ps * c + pc * s)
    return cs, sn


class TrigPoly2(_TrigBase):
    """Finite Fourier sum in two angles over the tensor basis."""

    __slots__ = ()
    arity = 2

    @classmethod
    def parse(cls, text: str, mode: Mode = EXACT):
        with mode.context():
            return cls(_parse_terms(text, 2, mode), mode)

    @staticmethod
    def _text_order(key):
        return (_text_order_code(key[0]), _text_order_code(key[1]))

    @staticmethod
    def _basis_text(key):
        parts = [t for t in (_code_text(key[0], "p"), _code_text(key[1], "q")) if t]
        return "*".join(parts)

    @staticmethod
    def _mul_terms(a, b):
        acc = defaultdict(int)
        for ka, ca in a.items():
            for kb, cb in b.items():
                p = ca * cb
                for m, k in _mul_keys2(ka, kb):
                    acc[k] += m * p
        return {k: v / 4 for k, v in acc.items()}

    def depends_on(self, slot: int) -> bool:
        return any(k[slot] for k in self._terms)

    def degree(self, slot: int) -> int:
        return max((decode(k[slot])[1] for k in self._terms), default=0)

    def diff(self, slot: int = 0, order: int = 1):
        out = self
        for _ in range(order):
            terms = {}
            scale = out._scale * max(1, out.degree(slot))
            with self.mode.context():
                for k, v in out._terms.items():
                    f, c = _diff_code(k[slot])
                    if f:
                        key = (c, k[1]) if slot == 0 else (k[0], c)
                        terms[key] = v * f
            out = out._new(terms, scale)
        return out

    def swap(self) -> "TrigPoly2":
        return self._new({(k[1], k[0]): v for k, v in self._terms.items()}, self._scale)

    def diagonal(self) -> TrigPoly:
        """Substitute ``q := p``."""
        acc = defaultdict(int)
        with self.mode.context():
            for (a, b), v in self._terms.items():
                for m, k in _mul_codes(a, b):
                    acc[k] += m * v
            terms = {k: v / 2 for k, v in acc.items()}
        return TrigPoly(terms, self.mode, self._scale)

    def __call__(self, p, q):
        if isinstance(p, _MPFR):
            with gmpy2.context(precision=p.precision):
                return self.at_point(gmpy2.cos(p), gmpy2.sin(p), gmpy2.cos(q), gmpy2.sin(q))
        p = np.asarray(p, dtype=float) if not isinstance(p, float) else p
        q = np.asarray(q, dtype=float) if not isinstance(q, float) else q
        total = 0.0
        for (a, b), v in self._terms.items():
            ka, na = decode(a)
            kb, nb = decode(b)
            fa = np.cos(na * p) if ka == COS else np.sin(na * p)
            fb = np.cos(nb * q) if kb == COS else np.sin(nb * q)
            total = total + float(v) * fa * fb
        return total

    def at_point(self, c1, s1, c2, s2):
        if not self._terms:
            return c1 * 0
        cp, sp = _powers(c1, s1, self.degree(0))
        cq, sq = _powers(c2, s2, self.degree(1))
        total = 0
        for (a, b), v in self._terms.items():
            ka, na = decode(a)
            kb, nb = decode(b)
            total = total + v * (cp[na] if ka == COS else sp[na]) * (cq[nb] if kb == COS else sq[nb])
        return total


def separable(a: TrigPoly, b: TrigPoly) -> TrigPoly2:
    """Tensor product ``a(p) * b(q)``."""
    if a.mode != b.mode:
        raise ModeMismatchError(f"mode {a.mode} combined with {b.mode}")
    with a.mode.context():
        terms = {(ka, kb): va * vb for ka, va in a.items() for kb, vb in b.items()}
    return TrigPoly2(terms, a.mode, a._scale * b._scale)


def cos_difference(k: int, mode: Mode = EXACT) -> TrigPoly2:
    """``cos(k (p - q)) = cos kp cos kq + sin kp sin kq``."""
    one = to_scalar(1, mode)
    if k == 0:
        return TrigPoly2({(0, 0): one}, mode)
    k = abs(k)
    return TrigPoly2({(2 * k, 2 * k): one, (2 * k - 1, 2 * k - 1): one}, mode)


def sin_difference(k: int, mode: Mode = EXACT) -> TrigPoly2:
    """``sin(k (p - q)) = sin kp cos kq - cos kp sin kq``."""
    if k == 0:
        return TrigPoly2.zero(mode)
    one = to_scalar(1, mode)
    sign = 1 if k > 0 else -1
    k = abs(k)
    return TrigPoly2({(2 * k - 1, 2 * k): sign * one, (2 * k, 2 * k - 1): -sign * one}, mode)


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------


def _poly_type(arity):
    return TrigPoly if arity == 1 else TrigPoly2


class TrigRational:
    """Quotient ``num / prod(f**e)`` with monic, non-constant factors ``f``.

    Factors are matched structurally, so the same Wronskian appearing in two
    operands is recognised and never squared needlessly.  Equality is decided
    by cross-multiplication: ``a == b`` iff the numerator of ``a - b`` is zero.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num, den=None):
        if den is None:
            self.num = num
            self.factors = ()
            return
        if type(den) is not type(num):
            raise TypeError("numerator and denominator must have the same arity")
        if den.mode != num.mode:
            raise ModeMismatchError(f"mode {num.mode} combined with {den.mode}")
        if den.is_zero():
            raise DivisionByZeroFunctionError("denominator is identically zero")
        r = TrigRational._build(num, [(den, 1)])
        self.num, self.factors = r.num, r.factors

    # -- canonical construction -----------------------------------------------
    @staticmethod
    def _build(num, factor_list):
        """Normalise ``num / prod(f**e)``: monic factors, constants folded in."""
        mode = num.mode
        merged: dict = {}
        order = []
        with mode.context():
            for f, e in factor_list:
                if e == 0:
                    continue
                if f.is_constant():
                    num = num.scale(1 / f.constant_term() ** e)
                    continue
                lead, f = f.monic()
                if lead != 1:
                    num = num.scale(1 / lead ** e)
                key = f
                if key in merged:
                    merged[key] = (merged[key][0], merged[key][1] + e)
                else:
                    merged[key] = (f, e)
                    order.append(key)
        out = TrigRational.__new__(TrigRational)
        out.num = num
        if num.is_zero() and mode.exact:
            out.factors = ()
        else:
            out.factors = tuple(sorted((merged[k] for k in order if merged[k][1]),
                                       key=_factor_order))
        return out

    @classmethod
    def from_factors(cls, num, factors):
        return cls._build(num, list(factors))

    @classmethod
    def constant(cls, value, arity: int = 1, mode: Mode = EXACT):
        return cls(_poly_type(arity).constant(value, mode))

    @property
    def arity(self) -> int:
        return self.num.arity

    @property
    def mode(self) -> Mode:
        return self.num.mode

    @property
    def den(self):
        out = _poly_type(self.arity).one(self.mode)
        for f, e in self.factors:
            out = out * f ** e
        return out

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TrigRational):
            if other.arity != self.arity:
                raise TypeError("cannot combine quotients of different arity")
            if other.mode != self.mode:
                raise ModeMismatchError(f"mode {self.mode} combined with {other.mode}")
            return other
        if isinstance(other, _TrigBase):
            return TrigRational(self.num._coerce(other))
        if _is_scalar(other):
            return TrigRational(self.num._coerce(other))
        return NotImplemented

    def _factor_map(self):
        return {f: (f, e) for f, e in self.factors}

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero() and self.mode.exact:
            return self
        if self.num.is_zero() and self.mode.exact:
            return other
        mine, theirs = self._factor_map(), other._factor_map()
        lcm = dict(mine)
        for k, (f, e) in theirs.items():
            if k not in lcm or lcm[k][1] < e:
                lcm[k] = (f, e)
        num = _scaled_numerator(self.num, mine, lcm) + _scaled_numerator(other.num, theirs, lcm)
        return TrigRational._build(num, list(lcm.values()))

    __radd__ = __add__

    def __neg__(self):
        out = TrigRational.__new__(TrigRational)
        out.num, out.factors = -self.num, self.factors
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_constant_poly():
            out = TrigRational.__new__(TrigRational)
            out.num = self.num * other.num
            out.factors = self.factors if not out.num.is_zero() or not self.mode.exact else ()
            return out
        return TrigRational._build(self.num * other.num, list(self.factors) + list(other.factors))

    __rmul__ = __mul__

    def reciprocal(self):
        if self.num.is_zero():
            raise DivisionByZeroFunctionError("reciprocal of the zero function")
        return TrigRational._build(self.den, [(self.num, 1)])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        return TrigRational._build(self.num ** n, [(f, e * n) for f, e in self.factors])

    def is_constant_poly(self) -> bool:
        return not self.factors and self.num.is_constant()

    # -- calculus ---------------------------------------------------------------
    def diff(self, slot: int = 0, order: int = 1):
        """Derivative in ``p`` (slot 0) or ``q`` (slot 1) by the quotient rule.

        Only factors that actually depend on the variable gain one power, so
        ``d/dp`` of ``n / (W(p) W(q))`` has denominator ``W(p)**2 W(q)``.
        """
        out = self
        for _ in range(order):
            out = out._diff1(slot)
        return out

    def _pdiff(self, poly, slot):
        return poly.diff() if self.arity == 1 else poly.diff(slot)

    def _diff1(self, slot):
        num = self.num
        moving = [(f, e) for f, e in self.factors
                  if (self.arity == 1 and not f.is_constant()) or (self.arity == 2 and f.depends_on(slot))]
        if not moving:
            return TrigRational._build(self._pdiff(num, slot), list(self.factors))
        prod_all = _poly_type(self.arity).one(self.mode)
        for f, _ in moving:
            prod_all = prod_all * f
        new_num = self._pdiff(num, slot) * prod_all
        for j, (f, e) in enumerate(moving):
            others = _poly_type(self.arity).one(self.mode)
            for i, (g, _) in enumerate(moving):
                if i != j:
                    others = others * g
            new_num = new_num - num * self._pdiff(f, slot) * others * e
        moving_keys = {f for f, _ in moving}
        factors = [(f, e + 1) if f in moving_keys else (f, e) for f, e in self.factors]
        return TrigRational._build(new_num, factors)

    # -- comparison -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ModeMismatchError):
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- two-angle helpers ------------------------------------------------------
    def lift(self, slot: int = 0) -> "TrigRational":
        if self.arity != 1:
            raise TypeError("only one-angle quotients can be lifted")
        return TrigRational._build(self.num.lift(slot), [(f.lift(slot), e) for f, e in self.factors])

    def swap(self) -> "TrigRational":
        if self.arity != 2:
            raise TypeError("swap needs a two-angle quotient")
        return TrigRational._build(self.num.swap(), [(f.swap(), e) for f, e in self.factors])

    def diagonal(self) -> "TrigRational":
        if self.arity != 2:
            raise TypeError("diagonal needs a two-angle quotient")
        return TrigRational._build(self.num.diagonal(), [(f.diagonal(), e) for f, e in self.factors])

    # -- evaluation -------------------------------------------------------------
    def __call__(self, *angles, den_guard: float = 0.0):
        return self._evaluate(lambda poly: poly(*angles), den_guard, angles)

    def at_point(self, *coords, den_guard: float = 0.0):
        return self._evaluate(lambda poly: poly.at_point(*coords), den_guard, coords)

    def _evaluate(self, ev, den_guard, where):
        den = 1
        for f, e in self.factors:
            val = ev(f)
            mag = np.min(np.abs(np.asarray(val, dtype=float))) / f.coeff_norm()
            if mag <= den_guard:
                raise NearSingularEvaluation(
                    f"denominator factor {f.to_text()} is {mag:.3g} (relative) at {where!r}",
                    magnitude=float(mag))
            den = den * val ** e
        return ev(self.num) / den

    # -- text -------------------------------------------------------------------
    def to_text(self) -> str:
        num = self.num.to_text()
        if not self.factors:
            return num
        if len(self.num) > 1:
            num = f"({num})"
        parts = []
        for f, e in self.factors:
            t = f.to_text()
            if len(f) > 1 or "*" in t:
                t = f"({t})"
            parts.append(t if e == 1 else f"{t}^{e}")
        return f"{num}/({'*'.join(parts)})"

    @classmethod
    def parse(cls, text: str, arity: int = 1, mode: Mode = EXACT):
        poly = _poly_type(arity)
        text = text.strip()
        cut = _top_level_find(text, "/(")
        if cut < 0:
            return cls(poly.parse(_unwrap(text), mode))
        num = poly.parse(_unwrap(text[:cut]), mode)
        den_text = _unwrap_once(text[cut + 1:])
        factors = []
        for piece in _top_level_split(den_text, "*"):
            exp = 1
            m = re.fullmatch(r"(.*)\^(\d+)", piece.strip())
            if m and _balanced(m.group(1)):
                piece, exp = m.group(1), int(m.group(2))
            factors.append((poly.parse(_unwrap(piece), mode), exp))
        return cls.from_factors(num, factors)

    def __repr__(self):
        return f"TrigRational({self.to_text()!r}, mode={self.mode})"

    __str__ = to_text


def _factor_order(fe):
    f = fe[0]
    # p-dependent factors print before q-only ones
    return (f.arity == 2 and not f.depends_on(0), f.sort_key())


def _scaled_numerator(num, have, target):
    for k, (f, e) in target.items():
        missing = e - (have[k][1] if k in have else 0)
        if missing:
            num = num * f ** missing
    return num


def _balanced(text: str) -> bool:
    depth = 0
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def _unwrap(text: str) -> str:
    text = text.strip()
    while text.startswith("(") and text.endswith(")") and _balanced(text[1:-1]):
        text = text[1:-1].strip()
    return text


def _unwrap_once(text: str) -> str:
    # the factor list is wrapped exactly once; a lone multi-term factor keeps its own parentheses
    text = text.strip()
    if text.startswith("(") and text.endswith(")") and _balanced(text[1:-1]):
        return text[1:-1].strip()
    return text


def _top_level_find(text: str, needle: str) -> int:
    depth = 0
    for i, ch in enumerate(text):
        if depth == 0 and text.startswith(needle, i):
            return i
        depth += ch == "("
        depth -= ch == ")"
    return -1


def _top_level_split(text: str, sep: str):
    depth, start, out = 0, 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append(text[start:i])
            start = i + 1
    out.append(text[start:])
    return out


# ---------------------------------------------------------------------------
# machine-precision evaluators for grids and quadrature
# ---------------------------------------------------------------------------


def _basis_table(theta, max_code: int):
    theta = np.asarray(theta, dtype=float)
    out = np.empty((max_code + 1,) + theta.shape)
    out[0] = 1.0
    for code in range(1, max_code + 1):
        kind, n = decode(code)
        out[code] = np.cos(n * theta) if kind == COS else np.sin(n * theta)
    return out


def _compile_poly(poly):
    if poly.arity == 1:
        size = max(poly._terms, default=0) + 1
        vec = np.zeros(size)
        for k, v in poly.items():
            vec[k] = float(v)
        return lambda p, q=None: np.tensordot(vec, _basis_table(p, size - 1), axes=1)
    sa = max((k[0] for k in poly._terms), default=0) + 1
    sb = max((k[1] for k in poly._terms), default=0) + 1
    mat = np.zeros((sa, sb))
    for (a, b), v in poly.items():
        mat[a, b] = float(v)
    return lambda p, q: np.einsum("a...,ab,b...->...", _basis_table(p, sa - 1), mat, _basis_table(q, sb - 1))


def compile_rational(r: TrigRational):
    """Vectorised float evaluator ``f(p[, q], den_guard=0.0)`` for ``r``."""
    num = _compile_poly(r.num)
    facs = [(_compile_poly(f), f.coeff_norm(), e, f) for f, e in r.factors]

    def evaluate(p, q=None, den_guard: float = 0.0):
        den = 1.0
        for fn, norm, e, f in facs:
            val = fn(p, q)
            mag = np.min(np.abs(val)) / norm if np.size(val) else np.inf
            if mag <= den_guard:
                raise NearSingularEvaluation(
                    f"denominator factor {f.to_text()} is {mag:.3g} (relative)", magnitude=float(mag))
            den = den * val ** e
        return num(p, q) / den

    return evaluate
