"""JSON forms of ``KData`` and ``HadamardTable``.

Tables use schema ``hk-1``: one entry per ``nu`` with the canonical text of
``sigma_nu`` (angles written ``p`` for ``x`` and ``q`` for ``xi``), its
numerator and factored denominator, and the radial scaling tag.
"""
from __future__ import annotations

import json
import math

from .errors import InvalidKDataError
from .hadamard import HadamardTable
from .scalars import EXACT, Mode, parse_scalar, scalar_to_str
from .trig import TrigRational
from .wronskian import KData

__all__ = [
    "SCHEMA",
    "kdata_to_dict",
    "kdata_from_dict",
    "load_kdata",
    "table_to_dict",
    "table_from_dict",
    "dumps",
    "tables_equal",
]

SCHEMA = "hk-1"


def kdata_to_dict(data: KData) -> dict:
    return {
        "k": list(data.k),
        "phases": [{"cos": scalar_to_str(c), "sin": scalar_to_str(s)} for c, s in data.phases],
        "mode": str(data.mode),
    }


def kdata_from_dict(obj: dict, mode: Mode | None = None) -> KData:
    """Inverse of :func:`kdata_to_dict`.

    ``phases`` may be omitted (all zero).  In float mode a phase can also be
    given as ``{"angle_radians": value}``.
    """
    if not isinstance(obj, dict) or "k" not in obj:
        raise InvalidKDataError("configuration needs a 'k' list")
    if mode is None:
        mode = Mode.parse(obj.get("mode", "exact"))
    k = obj["k"]
    if not isinstance(k, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in k):
        raise InvalidKDataError(f"'k' must be a list of integers, got {k!r}")
    phases = obj.get("phases")
    if phases is None:
        return KData.trivial(k, mode)
    if len(phases) != len(k):
        raise InvalidKDataError(f"{len(k)} integers but {len(phases)} phases")
    if any("angle_radians" in ph for ph in phases):
        if mode.exact:
            raise InvalidKDataError("angle_radians phases need float mode")
        try:
            angles = [float(ph["angle_radians"]) if "angle_radians" in ph
                      else math.atan2(float(parse_scalar(str(ph["sin"]), mode)),
                                      float(parse_scalar(str(ph["cos"]), mode)))
                      for ph in phases]
        except (KeyError, ValueError) as exc:
            raise InvalidKDataError(f"bad phase entry: {exc}") from None
        return KData.from_angles(k, angles, mode.precision)
    out = []
    for i, ph in enumerate(phases):
        try:
            out.append((parse_scalar(str(ph["cos"]), mode), parse_scalar(str(ph["sin"]), mode)))
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise InvalidKDataError(f"phase {i}: {exc}") from None
    return KData(tuple(k), tuple(out), mode)


def load_kdata(path, mode: Mode | None = None) -> KData:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidKDataError(f"{path}: not valid JSON ({exc})") from None
    return kdata_from_dict(obj, mode)


def _den_text(r: TrigRational) -> str:
    if not r.factors:
        return "1"
    text = r.to_text()
    return text[text.index("/(") + 2:-1]


def table_to_dict(table: HadamardTable) -> dict:
    coeffs = []
    for nu, sig in enumerate(table.sigma):
        coeffs.append({
            "nu": nu,
            "sigma": sig.to_text(),
            "numerator": sig.num.to_text(),
            "denominator": _den_text(sig),
            "scaling": f"(r*rho)^-{nu}",
        })
    return {
        "schema": SCHEMA,
        **kdata_to_dict(table.data),
        "k_max": table.k_max,
        "vanishing_checked": table.vanishing_checked,
        "coefficients": coeffs,
    }


def table_from_dict(obj: dict) -> HadamardTable:
    if obj.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {obj.get('schema')!r}; expected {SCHEMA!r}")
    data = kdata_from_dict(obj)
    sigma = []
    for nu, entry in enumerate(obj["coefficients"]):
        if entry["nu"] != nu:
            raise ValueError(f"coefficient list out of order at position {nu}")
        sig = TrigRational.parse(entry["sigma"], arity=2, mode=data.mode)
        if sig.num.to_text() != entry["numerator"] or _den_text(sig) != entry["denominator"]:
            raise ValueError(f"sigma_{nu}: numerator/denominator fields disagree with the sigma text")
        sigma.append(sig)
    return HadamardTable(data, sigma, obj.get("vanishing_checked", 0))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def tables_equal(a: HadamardTable, b: HadamardTable) -> bool:
    return (a.data == b.data and len(a.sigma) == len(b.sigma)
            and all(x == y and x.to_text() == y.to_text() for x, y in zip(a.sigma, b.sigma)))
