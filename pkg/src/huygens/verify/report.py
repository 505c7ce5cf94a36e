"""Outcome records for verification checks."""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

EXACT_PASS = "ExactPass"
NUMERIC_PASS = "NumericPass"
FAIL = "Fail"


@dataclass
class VerifyReport:
    """One check's outcome.  A ``Fail`` always carries a concrete ``witness``."""

    check_name: str
    status: str
    samples: int = 0
    elapsed: float = 0.0
    max_residual: float | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)

    @classmethod
    def from_json(cls, line: str) -> "VerifyReport":
        return cls(**json.loads(line))


@contextmanager
def timed():
    box = {}
    start = time.perf_counter()
    try:
        yield box
    finally:
        box["elapsed"] = time.perf_counter() - start


def _clip(text: str, limit: int = 400) -> str:
    return text if len(text) <= limit else text[:limit] + f"... ({len(text)} chars)"


def exact_report(name: str, failures: list, samples: int, elapsed: float, details=None) -> VerifyReport:
    """``ExactPass`` when ``failures`` is empty, else ``Fail`` on the first witness."""
    if failures:
        witness = dict(failures[0])
        witness = {k: _clip(v) if isinstance(v, str) else v for k, v in witness.items()}
        witness["failures"] = len(failures)
        return VerifyReport(name, FAIL, samples, elapsed, witness=witness, details=details or {})
    return VerifyReport(name, EXACT_PASS, samples, elapsed, details=details or {})
