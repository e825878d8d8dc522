"""Common report type for the inequality checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class InequalityReport:
    """Outcome of one inequality check over an ensemble.

    ``passed`` is true exactly when ``violations`` is empty.  ``status`` adds
    the verdict: ``"pass"``, ``"fail"``, ``"hypotheses not met"`` (no
    prediction is made, the ratios are still recorded) or ``"no prediction"``.
    """

    inequality: str
    ensemble_size: int
    empirical_best_constant: float
    predicted_constant: float | None
    slack: float
    violations: list
    status: str
    ratios: list = field(default_factory=list)
    hypotheses: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    calibration: dict = field(default_factory=dict)
    seed: int | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_document(self) -> dict:
        doc = dict(vars(self))
        doc["pass"] = self.passed
        return doc


def ratio(lhs: float, rhs: float) -> float:
    """``lhs / rhs`` with ``0/0 = 0``."""
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def build_report(inequality: str, ratios, predicted: float | None, slack: float,
                 hypotheses: dict | None = None, **extra) -> InequalityReport:
    """Assemble a report; a member violates when its ratio exceeds ``predicted * slack``."""
    ratios = [float(r) for r in ratios]
    hypotheses = dict(hypotheses or {})
    met = all(v.get("met", True) if isinstance(v, dict) else bool(v) for v in hypotheses.values())
    best = max(ratios) if ratios else 0.0
    violations = []
    if not met:
        predicted, status = None, "hypotheses not met"
    elif predicted is None:
        status = "no prediction"
    else:
        bound = predicted * slack
        violations = [{"index": i, "ratio": r, "bound": bound} for i, r in enumerate(ratios)
                      if not r <= bound]
        status = "fail" if violations else "pass"
    return InequalityReport(inequality, len(ratios), float(best),
                            None if predicted is None else float(predicted), float(slack),
                            violations, status, ratios, hypotheses, **extra)

