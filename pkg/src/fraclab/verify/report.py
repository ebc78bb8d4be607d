"""Case tables, empirical constants and the refinement pass policy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "MAX_RELATIVE_CHANGE",
    "VerificationCase",
    "VerificationReport",
    "ratio_of",
    "pointwise_case",
    "relative_change",
    "refine",
]

# pass policy: the empirical constant may move at most this much from N to 2N
MAX_RELATIVE_CHANGE = 0.20


def ratio_of(lhs: float, rhs: float) -> tuple[float, bool]:
    """``lhs / rhs`` with ``0/0 -> 0``; a positive ``lhs`` over zero is flagged."""
    if rhs > 0:
        return lhs / rhs, False
    if lhs == 0:
        return 0.0, False
    return math.inf, True


@dataclass
class VerificationCase:
    suite: str
    label: str
    inputs: dict
    lhs: float
    rhs: float
    ratio: float
    flagged: bool = False
    degenerate: bool = False
    N: int | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, suite: str, label: str, inputs: dict, lhs: float, rhs: float,
              degenerate: bool = False, N: int | None = None, extra: dict | None = None
              ) -> "VerificationCase":
        if lhs < 0 or rhs < 0:
            raise ValueError("case sides must be non-negative")
        r, flagged = ratio_of(float(lhs), float(rhs))
        return cls(suite, label, inputs, float(lhs), float(rhs), r, flagged, degenerate, N,
                   dict(extra or {}))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "label": self.label, "inputs": self.inputs,
                "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "flagged": self.flagged, "degenerate": self.degenerate, "N": self.N,
                "extra": self.extra}

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationCase":
        return cls(**d)


def pointwise_case(suite: str, label: str, inputs: dict, lhs: np.ndarray, rhs: np.ndarray,
                   mask: np.ndarray, N: int | None = None, extra: dict | None = None
                   ) -> VerificationCase:
    """Aggregate nodewise sides by the maximal ratio over the nodes in ``mask``.

    The case records ``lhs`` and ``rhs`` at the maximising node.  Any node
    with ``rhs = 0 < lhs`` makes the case flagged.
    """
    lhs, rhs = lhs[mask], rhs[mask]
    bad = (rhs <= 0) & (lhs > 0)
    extra = dict(extra or {})
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        extra["flagged_nodes"] = int(bad.sum())
        return VerificationCase.build(suite, label, inputs, float(lhs[i]), 0.0, N=N, extra=extra)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)
    i = int(np.argmax(ratios))
    return VerificationCase.build(suite, label, inputs, float(lhs[i]), float(rhs[i]), N=N,
                                  extra=extra)


def relative_change(coarse: float, fine: float) -> float:
    if coarse == fine:
        return 0.0
    if not (math.isfinite(coarse) and math.isfinite(fine)) or coarse == 0:
        return math.inf
    return abs(fine - coarse) / abs(coarse)


@dataclass
class VerificationReport:
    """Case table of one suite.

    Pass policy: every case finite unless declared degenerate, all extra
    checks true, all sub-reports passing, and (when a refinement was run) an
    empirical-constant change of at most ``max_change`` from N to 2N.
    """

    suite: str
    cases: list[VerificationCase] = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    sub_reports: dict = field(default_factory=dict)
    refinement: dict | None = None
    max_change: float = MAX_RELATIVE_CHANGE
    notes: list = field(default_factory=list)

    def cases_at(self, N: int | None) -> list[VerificationCase]:
        return [c for c in self.cases if c.N == N]

    def constant_at(self, N: int | None) -> float:
        finite = [c.ratio for c in self.cases_at(N) if not c.flagged]
        return max(finite, default=0.0)

    @property
    def finest_N(self) -> int | None:
        Ns = [c.N for c in self.cases if c.N is not None]
        return max(Ns) if Ns else None

    @property
    def empirical_constant(self) -> float:
        """Largest finite ratio at the finest resolution."""
        return self.constant_at(self.finest_N)

    @property
    def infinite_cases(self) -> list[VerificationCase]:
        return [c for c in self.cases if c.flagged and not c.degenerate]

    @property
    def passed(self) -> bool:
        if self.infinite_cases or not math.isfinite(self.empirical_constant):
            return False
        if not all(self.checks.values()):
            return False
        if not all(r.passed for r in self.sub_reports.values()):
            return False
        if self.refinement is not None and not self.refinement["relative_change"] <= self.max_change:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "empirical_constant": self.empirical_constant,
            "refinement": self.refinement,
            "max_change": self.max_change,
            "checks": self.checks,
            "settings": self.settings,
            "notes": self.notes,
            "cases": [c.to_dict() for c in self.cases],
            "sub_reports": {k: r.to_dict() for k, r in self.sub_reports.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            suite=d["suite"],
            cases=[VerificationCase.from_dict(c) for c in d["cases"]],
            settings=d["settings"],
            checks=d["checks"],
            sub_reports={k: cls.from_dict(r) for k, r in d["sub_reports"].items()},
            refinement=d["refinement"],
            max_change=d["max_change"],
            notes=d["notes"],
        )


def _merge(coarse: VerificationReport, fine: VerificationReport, N: int) -> VerificationReport:
    c1, c2 = coarse.constant_at(coarse.finest_N), fine.constant_at(fine.finest_N)
    merged = VerificationReport(
        suite=fine.suite,
        cases=coarse.cases + fine.cases,
        settings={"coarse": coarse.settings, "fine": fine.settings},
        checks={**{f"N={N}:{k}": v for k, v in coarse.checks.items()},
                **{f"N={2 * N}:{k}": v for k, v in fine.checks.items()}},
        refinement={"N": N, "N_fine": 2 * N, "constant": c1, "constant_fine": c2,
                    "relative_change": relative_change(c1, c2)},
        max_change=fine.max_change,
        notes=list(dict.fromkeys(coarse.notes + fine.notes)),
    )
    for key, sub in fine.sub_reports.items():
        merged.sub_reports[key] = _merge(coarse.sub_reports[key], sub, N)
    return merged


def refine(build: Callable[[int], VerificationReport], N: int) -> VerificationReport:
    """Run ``build`` at ``N`` and ``2N`` and attach the refinement trend."""
    return _merge(build(N), build(2 * N), N)
