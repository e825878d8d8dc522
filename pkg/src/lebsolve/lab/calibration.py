"""Calibration scalars for the predicted constants.

The inequalities only hold up to an unspecified constant, so each predicted
bound carries one scalar ``c`` per (inequality, operator).  It is the
largest observed ``LHS / RHS`` divided by the measure functional on a
calibration ensemble over the example measure ``|x|^(q(N-l)-N) dx`` on
``[-1, 1]^N`` (128 nodes per axis, seed ``CALIBRATION_SEED``), and is frozen
here.  :func:`calibrate` recomputes an entry.
"""
from __future__ import annotations

import numpy as np

CALIBRATION_SEED = 7919
CALIBRATION_SIZE = 200

# (inequality, operator name) -> c
CALIBRATION: dict = {
    ("fundamental_lemma", "grad2"): 0.023985457339659587,
    ("trace_derivative", "grad2"): 0.023985449288837533,
    ("trace_fractional", "grad2"): 0.023985449288837533,
    ("trace_derivative", "D2_2"): 0.020148300789076246,
    ("trace_fractional", "D2_2"): 0.01960236696827319,
    ("cocanceling_moment", "div2"): 0.05437570065111596,
}


def calibration_constant(inequality: str, op_name: str) -> float | None:
    return CALIBRATION.get((inequality, op_name))


def example_measure(N: int = 2, ell: float = 1.0, q: float = 1.0, resolution: int = 128):
    """``|x|^(q(N-l)-N) dx`` gridded on ``[-1, 1]^N``."""
    from .. import grid as _grid
    from ..measures import VectorMeasure

    lo, hi, res = _grid.centered_box(1.0, resolution, N)
    e = q * (N - ell) - N
    return VectorMeasure.from_density(lambda x: np.sqrt(np.sum(x**2, axis=0)) ** e, lo, hi, res)


def calibrate(inequality: str, op, ensemble_size: int = CALIBRATION_SIZE, seed: int = CALIBRATION_SEED,
              resolution: int = 128, q: float = 1.0, ell: float = 1.0) -> float:
    """Recompute ``c`` for one entry (returns it; the table is not modified)."""
    from . import moments

    if inequality == "cocanceling_moment":
        from ..ensembles import TestEnsemble
        from .. import grid as _grid

        lo, hi, res = _grid.centered_box(1.0, resolution, op.dim_N)
        f = TestEnsemble.generate(1, lo, hi, res, op.dimE, seed + 1).fields[0]
        f = moments.project_kernel(op, f)
        rep = moments.cocanceling_moment_check(op, f, ensemble_size=ensemble_size, seed=seed, calibration=1.0)
        return rep.empirical_best_constant
    nu = example_measure(op.dim_N, ell, q, resolution)
    if inequality == "fundamental_lemma":
        rep = moments.fundamental_lemma_check(op, nu, q, ell, ensemble_size=ensemble_size, seed=seed,
                                              calibration=1.0)
    elif inequality.startswith("trace_"):
        rep = moments.trace_inequality_check(op, nu, q, ell, ensemble_size=ensemble_size, seed=seed,
                                             form=inequality[len("trace_"):], calibration=1.0)
    else:
        raise ValueError(f"unknown inequality {inequality!r}")
    return rep.empirical_best_constant / rep.predicted_constant
