import json

import pytest

from huygens.errors import InvalidKDataError
from huygens.hadamard import hadamard_table
from huygens.io import (
    SCHEMA,
    dumps,
    kdata_from_dict,
    kdata_to_dict,
    load_kdata,
    table_from_dict,
    table_to_dict,
    tables_equal,
)
from huygens.scalars import EXACT, float_mode
from huygens.wronskian import KData

CASES = [KData.trivial((0,)), KData.trivial((0, 1)), KData.trivial((0, 1, 3, 4)),
         KData((0, 2, 5), ((1, 0), (1, 0), ("3/5", "4/5")))]


@pytest.mark.parametrize("data", CASES, ids=lambda d: str(d.k))
def test_table_round_trip(data):
    t = hadamard_table(data)
    text = dumps(table_to_dict(t))
    back = table_from_dict(json.loads(text))
    assert tables_equal(back, t)
    assert dumps(table_to_dict(back)) == text


def test_float_table_round_trip_is_byte_identical():
    t = hadamard_table(KData.from_angles((0, 1, 3), (0.0, 0.0, 0.7), bits=96))
    text = dumps(table_to_dict(t))
    assert dumps(table_to_dict(table_from_dict(json.loads(text)))) == text


def test_table_layout():
    obj = table_to_dict(hadamard_table(KData.trivial((0, 1))))
    assert obj["schema"] == SCHEMA and obj["k_max"] == 1
    first, second = obj["coefficients"]
    assert first == {"nu": 0, "sigma": "1", "numerator": "1", "denominator": "1", "scaling": "(r*rho)^-0"}
    assert second["sigma"] == "-2/(sin(p)*sin(q))"
    assert second["denominator"] == "sin(p)*sin(q)"


def test_table_rejects_other_schema_and_tampering():
    obj = table_to_dict(hadamard_table(KData.trivial((0, 1))))
    with pytest.raises(ValueError):
        table_from_dict({**obj, "schema": "hk-0"})
    obj["coefficients"][1]["numerator"] = "-3"
    with pytest.raises(ValueError):
        table_from_dict(obj)


def test_kdata_round_trip_and_defaults():
    d = CASES[-1]
    assert kdata_from_dict(kdata_to_dict(d)) == d
    assert kdata_from_dict({"k": [0, 1]}) == KData.trivial((0, 1))
    assert kdata_from_dict({"k": [0]}).mode == EXACT


def test_angle_phases_need_float_mode():
    obj = {"k": [0, 1], "phases": [{"cos": "1", "sin": "0"}, {"angle_radians": 0.7853981633974483}]}
    with pytest.raises(InvalidKDataError):
        kdata_from_dict(obj)
    d = kdata_from_dict({**obj, "mode": "float:128"})
    assert d.mode == float_mode(128)
    assert float(d.phases[1][0]) == pytest.approx(2 ** -0.5)


@pytest.mark.parametrize("obj", [{}, {"k": "0,1"}, {"k": [0, 1], "phases": [{"cos": "1"}]},
                                 {"k": [0, 1], "phases": [{"cos": "1", "sin": "0"}, {"cos": "x", "sin": "0"}]},
                                 {"k": [0, 1, 1]}])
def test_bad_kdata(obj):
    with pytest.raises(InvalidKDataError):
        kdata_from_dict(obj)


def test_load_kdata(tmp_path):
    p = tmp_path / "k.json"
    p.write_text('{"k": [0, 1, 3, 4], "phases": [{"cos": "1", "sin": "0"}, {"cos": "1", "sin": "0"},'
                 ' {"cos": "1", "sin": "0"}, {"cos": "1", "sin": "0"}], "mode": "exact"}')
    assert load_kdata(p) == KData.trivial((0, 1, 3, 4))
    p.write_text("{not json")
    with pytest.raises(InvalidKDataError):
        load_kdata(p)
