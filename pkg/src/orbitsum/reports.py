"""Verdicts and the generic check report shared by every verifier."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PASS = "pass"
FAIL = "fail"
UNMET = "hypotheses-unmet"
INCONCLUSIVE = "inconclusive"
VERDICTS = (PASS, FAIL, UNMET, INCONCLUSIVE)


@dataclass
class CheckReport:
    name: str
    verdict: str
    details: dict[str, Any] = field(default_factory=dict)
    message: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def __bool__(self):
        return self.ok

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "message": self.message,
            "details": {k: jsonable(v) for k, v in self.details.items()},
        }


def jsonable(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item") and callable(x.item):
        return x.item()
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def verdict(ok: bool) -> str:
    return PASS if ok else FAIL
