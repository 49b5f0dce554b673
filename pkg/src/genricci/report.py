"""Residual reports: named residual values gated by a tolerance.

A report separates gated residuals (must be <= tolerance to pass) from
informational values (condition numbers, computed scalars) that carry no
pass/fail semantics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


def _sig12(x: float) -> float:
    """Round to 12 significant digits for byte-stable JSON output."""
    if x == 0.0 or not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


@dataclass
class ResidualReport:
    residuals: dict[str, float]
    tolerance: float = 1e-8
    info: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.residuals.items():
            if not math.isfinite(value):
                raise ValueError(f"residual {name!r} is not finite: {value}")

    @property
    def flags(self) -> dict[str, bool]:
        return {k: abs(v) <= self.tolerance for k, v in self.residuals.items()}

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    @property
    def max_residual(self) -> float:
        return max((abs(v) for v in self.residuals.values()), default=0.0)

    def merged(self, other: "ResidualReport", prefix: str = "") -> "ResidualReport":
        res = dict(self.residuals)
        res.update({prefix + k: v for k, v in other.residuals.items()})
        info = dict(self.info)
        info.update({prefix + k: v for k, v in other.info.items()})
        return ResidualReport(res, max(self.tolerance, other.tolerance), info)

    def to_dict(self) -> dict:
        return {
            "residuals": {k: _sig12(v) for k, v in sorted(self.residuals.items())},
            "info": {k: _sig12(v) for k, v in sorted(self.info.items())},
            "tolerance": _sig12(self.tolerance),
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        worst = self.max_residual
        return f"{state} ({len(self.residuals)} residuals, max {worst:.3e}, tol {self.tolerance:.1e})"
