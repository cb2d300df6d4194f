"""Shared result records and the fixed-precision JSON/CSV formatting used in reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SIG_DIGITS = 6


@dataclass(frozen=True)
class TestResult:
    """Outcome of a classical hypothesis test.

    ``p_direction`` is ``"="`` for a point p-value, ``"<"`` when the true
    p-value lies below ``p_value`` and ``">"`` when it lies above it (the
    statistic fell outside the tabulated range).
    """

    statistic: float
    p_value: float
    method: str
    nuisance: dict[str, Any]
    detail: str
    p_direction: str = "="
    critical_values: dict[str, float] = field(default_factory=dict)
    nobs: int = 0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not math.isfinite(self.statistic):
            raise ValueError(f"{self.method}: statistic is not finite")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"{self.method}: p-value {self.p_value} outside [0, 1]")
        if self.p_direction not in ("=", "<", ">"):
            raise ValueError(f"unknown p-value direction {self.p_direction!r}")

    def rejects(self, alpha: float = 0.05) -> bool:
        """True when the null is rejected at level ``alpha``."""
        if self.p_direction == ">":
            return False
        if self.p_direction == "<":
            return self.p_value <= alpha
        return self.p_value < alpha

    def p_text(self) -> str:
        """Human rendering in the ``<0.01`` / ``>0.1`` style."""
        if self.p_direction == "=":
            return format_float(self.p_value, 4, fixed=True)
        return f"{self.p_direction}{self.p_value:g}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "p_value": p_value_record(self.p_value, self.p_direction),
            "nuisance": dict(self.nuisance),
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
            "detail": self.detail,
        }


def p_value_record(value: float, direction: str = "="):
    """JSON shape of a p-value: a number, or ``{bound, direction}`` when off-table."""
    if direction == "=":
        return value
    return {"bound": value, "direction": direction}


def format_float(x: float, digits: int = SIG_DIGITS, fixed: bool = False) -> str:
    if x is None or not math.isfinite(x):
        return "nan" if x is not None else ""
    if fixed:
        return f"{x:.{digits}f}"
    return f"{x:.{digits}g}"


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x) or x == 0:
        return x
    return float(f"{x:.{digits}g}")


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return round_sig(x)
    if hasattr(obj, "to_dict"):
        return _normalize(obj.to_dict())
    return obj


def dumps(obj) -> str:
    """Serialize with floats fixed at six significant digits and stable key order."""
    return json.dumps(_normalize(obj), indent=2, ensure_ascii=False) + "\n"
