import json

import numpy as np
import pytest

from huygens.hadamard import hadamard_table
from huygens.verify import (
    EXACT_PASS,
    FAIL,
    NUMERIC_PASS,
    SUITES,
    VerifyReport,
    ba_eigen_probe,
    check_cramer,
    check_darboux,
    check_eigen,
    check_goursat,
    check_heat_residual,
    check_series,
    check_transport_oracle,
    check_transport_symbolic,
    check_unity,
    check_vanishing,
    resolve_suites,
    run_suite,
    sample_admissible_rays,
    transport_oracle_numeric,
)
from huygens.wronskian import KData

from controls import perturbed_reports

K01, K013 = KData.trivial((0, 1)), KData.trivial((0, 1, 3))


@pytest.mark.parametrize("k", [(0,), (0, 1), (0, 2), (0, 1, 3)], ids=str)
def test_exact_checks_pass(k):
    d = KData.trivial(k)
    t = hadamard_table(d)
    reports = [check_unity(d), check_eigen(d), check_darboux(d, d.k_max + 2), check_transport_symbolic(t),
               check_vanishing(d), check_goursat(d, t), check_series(d, t)]
    if d.m >= 1:
        reports.append(check_cramer(d))
    for rep in reports:
        assert rep.status == EXACT_PASS, rep.to_json()


def test_darboux_with_phase():
    assert check_darboux(KData.trivial((0, 2)), 5, ("3/5", "4/5")).passed


def test_darboux_rejects_lower_k():
    with pytest.raises(ValueError):
        check_darboux(K013, 2)


@pytest.mark.parametrize("name, rep", sorted(perturbed_reports(K013, 4).items()))
def test_negative_controls_fail_with_witness(name, rep):
    assert rep.status == FAIL
    assert rep.witness and rep.witness["k"]
    assert rep.witness.get("residual") or rep.witness.get("identity")


def test_oracle_example():
    u = transport_oracle_numeric(K01, (0.0, 2.0), (0.0, 1.0), nu_max=1)
    assert u[0] == 1
    assert u[1] == pytest.approx(-1.0, rel=1e-8)


def test_oracle_agrees_on_a_few_rays():
    rep = check_transport_oracle(hadamard_table(K013), count=4, seed=3)
    assert rep.status == NUMERIC_PASS
    assert rep.samples == 4


def test_oracle_detects_a_wrong_coefficient():
    from controls import bump
    t = hadamard_table(K013)
    rep = check_transport_oracle(t.replace_sigma(2, bump(t.sigma[2])), count=3, seed=1)
    assert rep.status == FAIL and rep.witness is not None


def test_sampled_rays_are_admissible():
    rays = sample_admissible_rays(K013, 10, np.random.default_rng(0))
    assert len(rays) == 10
    for x, xi in rays:
        assert 0.8 <= np.hypot(*xi) <= 1.6


def test_heat_residual_passes_and_is_discretisation_limited():
    rep = check_heat_residual(hadamard_table(K01), count=4, seed=2)
    assert rep.status == NUMERIC_PASS
    assert rep.max_residual < 1e-6
    assert rep.details["min_richardson"] >= 8


def test_heat_residual_free_case_is_tiny():
    rep = check_heat_residual(hadamard_table(KData.trivial((0,))), count=3)
    assert rep.passed and rep.max_residual < 1e-10


def test_heat_residual_rejects_wrong_table():
    from controls import bump
    t = hadamard_table(K01)
    rep = check_heat_residual(t.replace_sigma(1, bump(t.sigma[1])), count=3)
    assert rep.status == FAIL


def test_ba_probe_measures_minus_xi_squared():
    t = hadamard_table(K013)
    xs = [x for x, _ in sample_admissible_rays(K013, 5, np.random.default_rng(4))]
    rep = ba_eigen_probe(t, (0.3, 1.1), xs)
    assert rep.status == NUMERIC_PASS
    assert rep.details["mean"] == pytest.approx(rep.details["minus_xi_squared"], rel=1e-6)
    bad = ba_eigen_probe(t, (0.3, 1.1), xs, weights=[1.0] * len(t))
    assert bad.status == FAIL


def test_report_json_round_trip():
    rep = VerifyReport("unity", EXACT_PASS, 3, 0.5, None, None, {"k": [0, 1]})
    again = VerifyReport.from_json(rep.to_json())
    assert again == rep
    assert json.loads(rep.to_json())["status"] == "ExactPass"


def test_suite_resolution():
    assert resolve_suites(["all"]) == list(SUITES)
    assert resolve_suites(["eigen", "unity", "eigen"]) == ["eigen", "unity"]
    with pytest.raises(ValueError, match="bogus"):
        resolve_suites(["bogus"])


def test_float_mode_suite_reports_numeric_pass():
    d = KData.from_angles((0, 1, 3), (0.0, 0.0, 0.7))
    reports = run_suite(d, ["unity", "eigen", "transport"])
    assert [r.status for r in reports] == [NUMERIC_PASS] * 3
