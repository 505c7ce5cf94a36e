"""Acceptance criteria 1-12; each test prints one summary line through conftest."""
import itertools
import math

import numpy as np
from gmpy2 import mpq

from huygens.chebyshev import cheb, cheb_eval
from huygens.hadamard import _poly_of_cos_diff, hadamard_table
from huygens.scalars import EXACT
from huygens.spectral import potential_eval
from huygens.trig import cos_difference
from huygens.verify import (
    EXACT_PASS,
    FAIL,
    ORACLE_TOLERANCES,
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
)
from huygens.wronskian import KData

from controls import perturbed_reports
from criteria import criterion

FOUR = [(0, 1), (0, 2), (0, 1, 3), (0, 1, 3, 4)]
PHASE = ("3/5", "4/5")


def family():
    """Every increasing k in {0..8} with k_0 = 0 and at most four entries,
    with trivial phases and with one non-trivial phase on the last entry."""
    for m in range(4):
        for rest in itertools.combinations(range(1, 9), m):
            k = (0, *rest)
            yield KData.trivial(k)
            if m:
                yield KData(k, ((1, 0),) * m + (PHASE,))


def _all_exact(reports):
    reports = list(reports)
    bad = [r for r in reports if r.status != EXACT_PASS]
    assert not bad, bad[0].to_json()
    return len(reports)


def closed_form(x1, x2):
    return 12 * (49 * x1 ** 4 + 28 * x1 ** 2 * x2 ** 2 - x2 ** 4) / (x2 ** 2 * (7 * x1 ** 2 + x2 ** 2) ** 2)


def test_criterion_01_potential_reproduction():
    with criterion(1, "potential vs closed form, exact", 5) as c:
        rng = np.random.default_rng(2024)
        data = KData.trivial((0, 1, 3, 4))
        count = 0
        while count < 1000:
            u, v = (int(t) for t in rng.integers(1, 60, size=2))
            if u == v:
                continue
            scale = mpq(int(rng.integers(1, 40)), int(rng.integers(1, 40)))
            sign = (-1) ** int(rng.integers(2))
            n = u * u + v * v
            x = (sign * scale * mpq(u * u - v * v, n), scale * mpq(2 * u * v, n))
            if x[1] == 0:
                continue
            assert potential_eval(data, x) == closed_form(*x), f"mismatch at {x}"
            count += 1
        c["note"] = f"{count} rational points"


def test_criterion_02_unity_identity():
    with criterion(2, "unity identity over the family", 60) as c:
        c["note"] = f"{_all_exact(check_unity(d) for d in family())} ExactPass"


def test_criterion_03_eigenfunction_identity():
    with criterion(3, "eigenfunction identity over the family", 60) as c:
        c["note"] = f"{_all_exact(check_eigen(d) for d in family())} ExactPass"


def test_criterion_04_darboux_and_cramer():
    with criterion(4, "Darboux and Cramer identities on three chains", 30) as c:
        reports = []
        for base, k_next in (((0, 1), 3), ((0, 2), 5), ((0, 1, 3), 4)):
            d = KData.trivial(base)
            reports += [check_darboux(d, k_next), check_cramer(d.extend(k_next))]
        c["note"] = f"{_all_exact(reports)} ExactPass"


def test_criterion_05_transport_symbolic():
    with criterion(5, "transport equations, symbolic", 120) as c:
        c["note"] = f"{_all_exact(check_transport_symbolic(hadamard_table(KData.trivial(k))) for k in FOUR)} ExactPass"


def test_criterion_06_transport_oracle():
    with criterion(6, "ray-integration oracle vs closed form", 120) as c:
        worst = {}
        for k in FOUR:
            rep = check_transport_oracle(hadamard_table(KData.trivial(k)), count=20, seed=0)
            assert rep.passed, rep.to_json()
            assert rep.samples >= 20
            for nu, err in rep.details["per_level_max_error"].items():
                nu = int(nu)
                assert err < ORACLE_TOLERANCES[nu], (k, nu, err)
                worst[nu] = max(worst.get(nu, 0.0), err)
        c["note"] = "worst " + ", ".join(f"nu={nu}: {e:.1e}" for nu, e in sorted(worst.items()))


def test_criterion_07_vanishing():
    with criterion(7, "sigma vanishes for k_max < nu <= k_max + 3", 60) as c:
        c["note"] = f"{_all_exact(check_vanishing(d, extra=3) for d in family())} ExactPass"


def test_criterion_08_goursat():
    with criterion(8, "Goursat problem for the log term", 60) as c:
        c["note"] = f"{_all_exact(check_goursat(d) for d in family())} ExactPass"


def test_criterion_09_series():
    with criterion(9, "gamma series of the log term", 60) as c:
        c["note"] = f"{_all_exact(check_series(d) for d in family())} ExactPass"


def test_criterion_10_heat_residual():
    with criterion(10, "heat equation residual", 60) as c:
        worst, ratio = 0.0, math.inf
        for k in FOUR:
            rep = check_heat_residual(hadamard_table(KData.trivial(k)), count=20, seed=0)
            assert rep.passed, rep.to_json()
            assert rep.samples >= 20 and rep.max_residual < 1e-6
            assert rep.details["min_richardson"] >= 8, rep.details
            worst, ratio = max(worst, rep.max_residual), min(ratio, rep.details["min_richardson"])
        c["note"] = f"worst residual {worst:.1e}, min Richardson ratio {ratio:.1f}"


def test_criterion_11_chebyshev():
    with criterion(11, "Chebyshev identity", 10) as c:
        theta = np.random.default_rng(11).uniform(-math.pi, math.pi, 1000)
        worst = 0.0
        for n in range(33):
            err = float(np.max(np.abs(cheb_eval(cheb(n), np.cos(theta)) - np.cos(n * theta))))
            assert err < 1e-12, (n, err)
            worst = max(worst, err)
        for n in range(13):
            assert _poly_of_cos_diff(cheb(n), EXACT) == cos_difference(n), n
        c["note"] = f"machine error {worst:.1e}; exact for N <= 12"


def test_criterion_12_negative_controls():
    with criterion(12, "negative controls", 30) as c:
        reports = perturbed_reports(KData.trivial((0, 1, 3)), 4)
        for name, rep in reports.items():
            assert rep.status == FAIL, f"{name} did not fail"
            assert rep.witness and rep.witness.get("residual"), f"{name} gave no witness"
        c["note"] = f"{len(reports)} perturbed checks failed with witnesses"
