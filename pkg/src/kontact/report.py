"""Aggregated residual reports shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class ResidualReport:
    """Named check → residual aggregates over sampled points.

    ``passed`` is always equivalent to ``max <= tolerance``; a check with
    no evaluated points reports max = mean = 0 and passes vacuously.
    """

    check_name: str
    count: int
    skipped: int
    max: float
    mean: float
    tolerance: float
    passed: bool
    provenance: str = ""

    @classmethod
    def from_residuals(cls, check_name: str, residuals: Sequence[float],
                       tolerance: float, skipped: int = 0,
                       provenance: str = "") -> "ResidualReport":
        vals = [abs(float(r)) for r in residuals]
        mx = max(vals) if vals else 0.0
        mn = sum(vals) / len(vals) if vals else 0.0
        return cls(check_name=check_name, count=len(vals), skipped=int(skipped),
                   max=mx, mean=mn, tolerance=float(tolerance),
                   passed=bool(mx <= tolerance), provenance=provenance)

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "count": self.count,
            "skipped": self.skipped,
            "max": self.max,
            "mean": self.mean,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class EnergyEstimate:
    """Monte Carlo energy estimate with its standard error."""

    estimate: float
    stderr: float
    samples: int
    skipped: int

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "samples": self.samples,
            "skipped": self.skipped,
        }
