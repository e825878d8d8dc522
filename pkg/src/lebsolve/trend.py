"""Finite-sample divergence verdicts from values at successive cutoffs.

A quantity that should stay bounded as a cutoff shrinks (or grows) is
evaluated once per decade of the cutoff.  It is called divergent when the
last few decades show either geometric growth (power-law blow-up) or
increments that do not decay (logarithmic blow-up).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Trend:
    cutoffs: list
    values: list
    divergent: bool
    kind: str  # "infinite", "power", "log" or "bounded"

    def to_document(self) -> dict:
        return dict(vars(self))


def assess(cutoffs, values, decades: int = 3, power_ratio: float = 1.5,
           log_factor: float = 0.8, rel_floor: float = 1e-6) -> Trend:
    """Classify a sequence ordered from the coarsest to the finest cutoff.

    ``decades`` is the number of trailing steps inspected; with fewer values
    available the sequence is judged on what there is (at least two steps).
    """
    cutoffs = [float(c) for c in cutoffs]
    vals = np.asarray(values, dtype=float)
    out = dict(cutoffs=cutoffs, values=vals.tolist())
    if np.any(np.isinf(vals)):
        return Trend(**out, divergent=True, kind="infinite")
    steps = min(decades, len(vals) - 1)
    if steps < 2:
        return Trend(**out, divergent=False, kind="bounded")
    tail = vals[-(steps + 1):]
    inc = np.diff(tail)
    # geometric growth of both values and increments; linear growth has flat increments
    if np.all(tail > 0) and np.all(tail[1:] >= power_ratio * tail[:-1]) \
            and np.all(inc > 0) and np.all(inc[1:] >= power_ratio * inc[:-1]):
        return Trend(**out, divergent=True, kind="power")
    scale = max(float(np.max(np.abs(vals))), np.finfo(float).tiny)
    if np.all(inc > rel_floor * scale) and np.all(inc[1:] >= log_factor * inc[:-1]):
        return Trend(**out, divergent=True, kind="log")
    return Trend(**out, divergent=False, kind="bounded")
