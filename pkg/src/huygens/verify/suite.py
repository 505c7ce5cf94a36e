"""Named verification suites over one ``KData``."""
from __future__ import annotations

import numpy as np

from ..hadamard import hadamard_table
from ..wronskian import KData
from .exact import (
    check_cramer,
    check_darboux,
    check_eigen,
    check_goursat,
    check_series,
    check_transport_symbolic,
    check_unity,
    check_vanishing,
)
from .oracle import check_transport_oracle, sample_admissible_rays
from .report import EXACT_PASS, NUMERIC_PASS, VerifyReport
from .residual import ba_eigen_probe, check_heat_residual

__all__ = ["SUITES", "run_suite", "resolve_suites", "BA_PROBE_XI"]

BA_PROBE_XI = (0.3, 1.1)


def _darboux(data, table, seed):
    if data.m >= 1:
        return check_darboux(data.truncate(), data.k_max, data.phases[-1])
    return check_darboux(data, data.k_max + 1)


def _cramer(data, table, seed):
    return check_cramer(data if data.m >= 1 else data.extend(data.k_max + 1))


def _ba(data, table, seed):
    xs = [x for x, _ in sample_admissible_rays(data, 10, np.random.default_rng(seed))]
    return ba_eigen_probe(table, BA_PROBE_XI, xs)


SUITES = {
    "unity": lambda d, t, s: check_unity(d),
    "eigen": lambda d, t, s: check_eigen(d),
    "darboux": _darboux,
    "cramer": _cramer,
    "transport": lambda d, t, s: check_transport_symbolic(t),
    "vanishing": lambda d, t, s: check_vanishing(d),
    "goursat": lambda d, t, s: check_goursat(d, t),
    "series": lambda d, t, s: check_series(d, t),
    "transport-oracle": lambda d, t, s: check_transport_oracle(t, seed=s),
    "heat": lambda d, t, s: check_heat_residual(t, seed=s),
    "ba-probe": _ba,
}


def resolve_suites(names) -> list[str]:
    """Expand ``all`` and reject unknown names with ``ValueError``."""
    out = []
    for name in names:
        if name == "all":
            out.extend(n for n in SUITES if n not in out)
        elif name in SUITES:
            if name not in out:
                out.append(name)
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    return out


def run_suite(data: KData, names=("all",), seed: int = 0) -> list[VerifyReport]:
    """Run the named checks in a fixed order; float-mode exact checks report ``NumericPass``."""
    names = resolve_suites(names)
    table = hadamard_table(data)
    reports = []
    for name in names:
        rep = SUITES[name](data, table, seed)
        if rep.status == EXACT_PASS and not data.mode.exact:
            rep.status = NUMERIC_PASS
        reports.append(rep)
    return reports
