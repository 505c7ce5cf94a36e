"""Coefficient fields: exact rationals or fixed-precision binary floats.

Exact values are ``gmpy2.mpq``; float values are ``gmpy2.mpfr`` computed
under the precision carried by :class:`Mode`.  The two are never mixed.
"""
from __future__ import annotations

import contextlib
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import ModeMismatchError

__all__ = ["Mode", "EXACT", "float_mode", "to_scalar", "scalar_to_str", "parse_scalar"]

DEFAULT_FLOAT_BITS = 128


@dataclass(frozen=True)
class Mode:
    """Coefficient mode. ``precision`` is ``None`` for exact rationals."""

    precision: int | None = None

    def __post_init__(self):
        if self.precision is not None and self.precision < 64:
            raise ValueError("float mode needs precision_bits >= 64")

    @property
    def exact(self) -> bool:
        return self.precision is None

    def context(self):
        if self.exact:
            return contextlib.nullcontext()
        return gmpy2.context(precision=self.precision)

    @property
    def zero_tolerance(self) -> float:
        """Relative threshold below which float coefficients count as zero."""
        if self.exact:
            return 0.0
        return 10.0 ** (-0.25 * self.precision)

    def __str__(self):
        return "exact" if self.exact else f"float:{self.precision}"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        text = text.strip().lower()
        if text == "exact":
            return EXACT
        m = re.fullmatch(r"float(?::(\d+))?", text)
        if not m:
            raise ValueError(f"unknown mode {text!r}; expected 'exact' or 'float:<bits>'")
        return float_mode(int(m.group(1)) if m.group(1) else DEFAULT_FLOAT_BITS)


EXACT = Mode()


def float_mode(bits: int = DEFAULT_FLOAT_BITS) -> Mode:
    return Mode(bits)


def to_scalar(value, mode: Mode = EXACT):
    """Convert ``value`` into the coefficient type of ``mode``.

    Exact mode refuses binary floats (they would smuggle rounding into an
    exact computation); strings like ``"3/5"`` are accepted in both modes.
    """
    if mode.exact:
        if isinstance(value, type(mpq())):
            return value
        if isinstance(value, (Integral, Fraction)):
            return mpq(value)
        if isinstance(value, str):
            return mpq(Fraction(value.strip()))
        if isinstance(value, type(mpfr())):
            raise ModeMismatchError("mpfr value given to an exact-mode operation")
        raise ModeMismatchError(f"cannot use {type(value).__name__} {value!r} as an exact scalar")
    with mode.context():
        if isinstance(value, type(mpfr())):
            if value.precision != mode.precision:
                return mpfr(value, mode.precision)
            return value
        if isinstance(value, str):
            text = value.strip().split("@")[0]
            if "/" in text:
                return mpfr(mpq(Fraction(text)), mode.precision)
            return mpfr(text, mode.precision)
        if isinstance(value, Fraction):
            return mpfr(mpq(value), mode.precision)
        return mpfr(value, mode.precision)


def mode_of(value) -> Mode:
    if isinstance(value, type(mpfr())):
        return Mode(value.precision)
    return EXACT


def scalar_to_str(value) -> str:
    """``num/den`` for exact values, ``digits@bits`` for floats."""
    if isinstance(value, type(mpfr())):
        digits = max(17, int(value.precision * 0.30103) + 1)
        return f"{value:.{digits}g}@{value.precision}"
    q = mpq(value)
    return str(q)


def parse_scalar(text: str, mode: Mode = EXACT):
    text = text.strip()
    if "@" in text:
        digits, bits = text.split("@")
        m = Mode(int(bits))
        if mode.exact or mode != m:
            raise ModeMismatchError(f"scalar {text!r} does not match mode {mode}")
        return to_scalar(digits, m)
    return to_scalar(text, mode)
