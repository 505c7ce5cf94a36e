import csv
import io
import json
import math

import pytest

from huygens.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_examples(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "0,1")
    obj = json.loads(out)
    assert code == 0
    assert [c["sigma"] for c in obj["coefficients"]] == ["1", "-2/(sin(p)*sin(q))"]
    assert obj["schema"] == "hk-1" and obj["mode"] == "exact"
    assert len(json.loads(run(capsys, "coeffs", "--k", "0")[1])["coefficients"]) == 1
    assert len(json.loads(run(capsys, "coeffs", "--k", "0,1,3,4")[1])["coefficients"]) == 5


def test_coeffs_csv(capsys):
    _, out, _ = run(capsys, "coeffs", "--k", "0,1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["nu", "sigma", "numerator", "denominator", "scaling"]
    assert rows[2][1] == "-2/(sin(p)*sin(q))"


def test_malformed_k_exits_2(capsys):
    code, _, err = run(capsys, "coeffs", "--k", "0,1,1")
    assert code == 2 and "strictly increasing" in err
    assert run(capsys, "coeffs")[0] == 2
    assert run(capsys, "coeffs", "--k", "0,a")[0] == 2


def test_phases_on_command_line(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "0,2", "--phase-cos", "1", "--phase-sin", "0",
                       "--phase-cos", "3/5", "--phase-sin", "4/5")
    assert code == 0 and json.loads(out)["phases"][1] == {"cos": "3/5", "sin": "4/5"}
    assert run(capsys, "coeffs", "--k", "0,2", "--phase-cos", "1", "--phase-sin", "0")[0] == 2


def test_potential_grid_matches_closed_form(capsys):
    code, out, _ = run(capsys, "potential", "--k", "0,1,3,4", "--grid=-2:2:64,-2:2:64")
    assert code == 0
    cells = json.loads(out)["cells"]
    assert len(cells) == 64 * 64
    checked = 0
    for c in cells:
        x1, x2 = c["x1"], c["x2"]
        if c["singular"]:
            assert c["V"] is None
            continue
        ref = 12 * (49 * x1 ** 4 + 28 * x1 ** 2 * x2 ** 2 - x2 ** 4) / (x2 ** 2 * (7 * x1 ** 2 + x2 ** 2) ** 2)
        assert c["V"] == pytest.approx(ref, rel=1e-12)
        checked += 1
    assert checked > 4000


def test_potential_trivial_is_zero_and_csv_has_17_digits(capsys):
    _, out, _ = run(capsys, "potential", "--k", "0", "--grid", "0.5:1.5:3,1:2:2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["x1", "x2", "V"]
    assert len(rows) == 7
    assert all(float(r[2]) == 0 for r in rows[1:])
    _, out, _ = run(capsys, "potential", "--k", "0,1", "--grid", "0.3:0.3:1,0.7:0.7:1", "--format", "csv")
    value = list(csv.reader(io.StringIO(out)))[1][2]
    assert float(value) == pytest.approx(2 * 0.58 / 0.49 / 0.58, rel=1e-15)


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["potential", "--k", "0,1,3", "--grid", "0.1:2:9,0.2:1:7", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    for path in (a, b):
        main(["coeffs", "--k", "0,1,3,4", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_kernel_and_ba_examples(capsys):
    code, out, _ = run(capsys, "kernel", "--k", "0,1", "--x", "0,2", "--xi", "0,1", "--t", "1")
    assert code == 0
    assert json.loads(out)["rows"][0]["phi"] == pytest.approx(0.0, abs=1e-15)
    _, out, _ = run(capsys, "ba", "--k", "0,1", "--x", "0,2", "--xi", "0,1")
    assert json.loads(out)["rows"][0]["psi_ba"] == pytest.approx(math.exp(2) / 2, rel=1e-15)


def test_guard_errors_are_reported_per_row(capsys):
    code, out, _ = run(capsys, "ba", "--k", "0", "--x", "1,0", "--xi", "0,0", "--xi", "1,1", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1][-1].startswith("OriginError") and rows[1][4] == ""
    assert rows[2][-1] == "" and float(rows[2][4]) == pytest.approx(math.e)
    code, out, _ = run(capsys, "kernel", "--k", "0,1", "--x", "0,2", "--xi", "0,1", "--t", "-1")
    assert code == 0 and json.loads(out)["rows"][0]["error"].startswith("NonPositiveTime")


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": [0, 1], "x": ["0,2"], "xi": ["0,1"], "t": [1]}))
    code, out, _ = run(capsys, "kernel", "--config", str(cfg))
    assert code == 0 and len(json.loads(out)["rows"]) == 1
    cfg.write_text("[1, 2]")
    assert run(capsys, "kernel", "--config", str(cfg))[0] == 2


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "--k", "0,1", "--suite", "unity")
    assert code == 0 and json.loads(out.splitlines()[0])["status"] == "ExactPass"
    assert run(capsys, "verify", "--k", "0,1", "--suite", "bogus")[0] == 2


def test_verify_all_for_0134(capsys):
    code, out, _ = run(capsys, "verify", "--k", "0,1,3,4", "--suite", "all")
    reports = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert len(reports) == 11 and all(r["status"] != "Fail" for r in reports)


def test_float_mode_flag(capsys):
    code, out, _ = run(capsys, "verify", "--k", "0,1", "--mode", "float:96", "--suite", "eigen")
    assert code == 0 and json.loads(out)["status"] == "NumericPass"
