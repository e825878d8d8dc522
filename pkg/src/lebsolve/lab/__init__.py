"""Numerical checks of the weighted inequalities.

Each check evaluates both sides of one inequality over a seeded ensemble and
returns an :class:`InequalityReport`.
"""
from .report import InequalityReport, build_report
from .hardy import (HardyCondition, ConverseWitness, hardy_condition, hardy_converse,
                    hardy_ensemble, hardy_forward, power_weight)
from .moments import (cocanceling_moment_check, fundamental_lemma_check, log_family,
                      measure_duality_check, project_kernel, trace_inequality_check)
from .necessity import first_order_necessity, triviality_check
from .calibration import CALIBRATION, calibrate, calibration_constant

__all__ = [
    "InequalityReport", "build_report",
    "HardyCondition", "ConverseWitness", "hardy_condition", "hardy_converse", "hardy_ensemble",
    "hardy_forward", "power_weight",
    "cocanceling_moment_check", "fundamental_lemma_check", "log_family", "measure_duality_check",
    "project_kernel", "trace_inequality_check",
    "first_order_necessity", "triviality_check",
    "CALIBRATION", "calibrate", "calibration_constant",
]
