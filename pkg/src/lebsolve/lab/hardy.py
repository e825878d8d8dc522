"""Two-weight Hardy inequality for averages over the ball ``B(0, |x|/2)``.

For nonnegative ``g`` the inequality reads

    (int (int_{B(0,|x|/2)} g)^q u dnu(x))^(1/q) <= C int g v dx

and holds with finite ``C`` iff

    sup_R (int_{|x| >= R} u dnu)^(1/q) * sup_{|y| < R} 1/v(y) < inf.

Everything here is discrete: ``nu`` is a gridded measure (mass at nodes)
and ``g`` lives on the same nodes.  On this discretisation the forward
inequality holds exactly with the discrete condition constant, and that
constant is computed exactly (both factors are step functions of ``R``
that only change at node radii).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import grid as _grid
from ..ensembles import TestEnsemble, smooth_bump
from ..grid import GridField
from ..measures import VectorMeasure, total_variation
from ..trend import Trend, assess
from .report import InequalityReport, build_report, ratio


def power_weight(a: float):
    """``x -> |x|^a`` (``inf`` at the origin for ``a < 0``)."""
    def w(x):
        r = np.sqrt(np.sum(np.asarray(x, dtype=float) ** 2, axis=0))
        with np.errstate(divide="ignore"):
            return r**a
    return w


class _Nodes:
    """Node radii, masses and weight values, sorted by radius."""

    def __init__(self, u_weight, v_weight, nu: VectorMeasure, q: float):
        if q < 1:
            raise ValueError("q must be at least 1")
        if nu.kind != "gridded":
            raise ValueError("the Hardy checks need a gridded measure")
        tv = total_variation(nu).measure
        x = _grid.mesh(tv.lo, tv.hi, tv.resolution)
        r = np.sqrt(np.sum(x**2, axis=0)).ravel()
        self.order = np.argsort(r, kind="stable")
        self.r = r[self.order]
        self.mass = (tv.density[0].real.ravel() * tv.cell_volume)[self.order]
        u = np.asarray(u_weight(x), dtype=float).ravel()[self.order]
        v = np.asarray(v_weight(x), dtype=float).ravel()[self.order]
        if np.any(u < 0) or np.any(v < 0):
            raise ValueError("weights must be nonnegative")
        self.u, self.v = u, v
        with np.errstate(divide="ignore"):
            self.v_inv = 1.0 / v
        # u dnu per node; nodes without mass contribute nothing even where u = inf
        self.un = np.where(self.mass > 0, u * np.where(self.mass > 0, self.mass, 1.0), 0.0)
        self.q = float(q)
        self.h_vol = tv.cell_volume
        self.shape = tv.resolution
        self.lo, self.hi = tv.lo, tv.hi

    def sorted_field(self, g: np.ndarray) -> np.ndarray:
        return np.asarray(g).real.ravel()[self.order]

    def sides(self, g_sorted: np.ndarray) -> tuple:
        """Both sides of the inequality for one nonnegative ``g`` (node values, sorted)."""
        gm = g_sorted * self.h_vol
        csum = np.concatenate([[0.0], np.cumsum(gm)])
        # G(x) = sum over |y| < |x|/2
        G = csum[np.searchsorted(self.r, self.r / 2, side="left")]
        live = (G > 0) & (self.un > 0)
        lhs = float(np.sum(G[live] ** self.q * self.un[live])) ** (1.0 / self.q)
        on = gm > 0
        rhs = float(np.sum(gm[on] * self.v[on]))
        return lhs, rhs


@dataclass
class HardyCondition:
    value: float
    witness_R: float | None
    trend: Trend
    R_values: list
    condition_values: list
    q: float

    @property
    def divergent(self) -> bool:
        return self.trend.divergent

    def to_document(self) -> dict:
        doc = dict(vars(self))
        doc["trend"] = self.trend.to_document()
        return doc


def _group_ends(r: np.ndarray) -> np.ndarray:
    """Index of the last node of each group of equal radii."""
    tol = 1e-12 * max(float(r[-1]), 1.0)
    return np.flatnonzero(np.concatenate([np.diff(r) > tol, [True]]))


def _condition_profile(nodes: _Nodes):
    """Exact discrete condition on each interval ``R in (rho_j, rho_{j+1}]``.

    Returns the left endpoints ``rho_j`` and the condition value there.
    """
    ends = _group_ends(nodes.r)
    tail = np.concatenate([np.cumsum(nodes.un[::-1])[::-1], [0.0]])
    phi = tail[ends + 1]
    s = np.maximum.accumulate(nodes.v_inv)[ends]
    with np.errstate(invalid="ignore"):
        vals = np.where(phi > 0, phi ** (1.0 / nodes.q) * s, 0.0)
    return nodes.r[ends], vals


def hardy_condition(u_weight, v_weight, nu: VectorMeasure, q: float = 1.0, R_grid=None) -> HardyCondition:
    """Discrete condition constant ``C`` and a divergence trend.

    Without ``R_grid`` the supremum runs over all ``R > 0``.  The trend
    records the sup restricted to ``R >= c`` for cutoffs ``c`` one decade
    apart, from the largest node radius down to the smallest positive one.
    """
    nodes = _Nodes(u_weight, v_weight, nu, q)
    rho, vals = _condition_profile(nodes)
    if R_grid is not None:
        R = np.sort(np.atleast_1d(np.asarray(R_grid, dtype=float)))
        if np.any(R <= 0):
            raise ValueError("radii must be positive")
        j = np.searchsorted(rho, R, side="left") - 1  # last group with rho_j < R
        rho, vals = R, np.where(j >= 0, vals[np.maximum(j, 0)], 0.0)
    pos = rho[rho > 0]
    if pos.size == 0 or not np.any(vals > 0):
        return HardyCondition(0.0, None, assess([], []), rho.tolist(), vals.tolist(), float(q))
    k = int(np.argmax(vals))
    top, bottom = float(pos.max()), float(pos.min())
    n_dec = int(np.floor(np.log10(top / bottom) + 1e-9))
    cut = list(top * 10.0 ** -np.arange(0, n_dec + 1))
    if cut[-1] > bottom:
        cut.append(bottom)
    # the sup over R >= c; for the exact profile an interval starting just below c also counts
    tv = [float(np.max(vals[rho >= c * (1 - 1e-12)], initial=0.0)) if R_grid is not None
          else float(np.max(vals[np.concatenate([rho[1:], [np.inf]]) >= c], initial=0.0)) for c in cut]
    return HardyCondition(float(vals[k]), float(rho[k]), assess(cut, tv), rho.tolist(), vals.tolist(),
                          float(q))


def hardy_ensemble(lo, hi, resolution, count: int, seed: int = 0) -> TestEnsemble:
    """Nonnegative fields: sums of one to three smooth bumps at log-uniform radii and distances."""
    if count < 1:
        raise ValueError("ensemble size must be positive")
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    resolution = tuple(int(n) for n in resolution)
    N = lo.size
    rng = np.random.default_rng(seed)
    h = float(np.max((hi - lo) / np.asarray(resolution)))
    L = float(np.min(hi - lo))
    x = _grid.mesh(lo, hi, resolution)
    fields = []
    for _ in range(count):
        g = np.zeros(resolution)
        for _ in range(int(rng.integers(1, 4))):
            d = rng.standard_normal(N)
            d *= np.exp(rng.uniform(np.log(h), np.log(L / 4))) / np.linalg.norm(d)
            rad = np.exp(rng.uniform(np.log(1.5 * h), np.log(L / 4)))
            dist = np.sqrt(np.sum((x - d.reshape((N,) + (1,) * N)) ** 2, axis=0))
            g += rng.uniform(0.1, 1.0) * smooth_bump(dist, rad)
        fields.append(GridField(lo, hi, g[None].astype(complex)))
    return TestEnsemble(seed, count, lo, hi, resolution, 1, 0, False, fields)


def hardy_forward(u_weight, v_weight, nu: VectorMeasure, q: float = 1.0, g_ensemble=None,
                  slack: float = 1.1, ensemble_size: int = 1000, seed: int = 0) -> InequalityReport:
    """Both sides of the inequality for every ``g`` of the ensemble.

    The predicted constant is the condition constant ``C`` (the proof via
    Minkowski's inequality gives the inequality with constant ``C``).
    """
    nodes = _Nodes(u_weight, v_weight, nu, q)
    cond = hardy_condition(u_weight, v_weight, nu, q)
    if g_ensemble is None:
        g_ensemble = hardy_ensemble(nodes.lo, nodes.hi, nodes.shape, ensemble_size, seed)
    ratios, lhs_all, rhs_all = [], [], []
    for g in g_ensemble:
        vals = g.samples if isinstance(g, GridField) else np.asarray(g)
        if np.any(np.asarray(vals).real < 0):
            raise ValueError("g must be nonnegative")
        lhs, rhs = nodes.sides(nodes.sorted_field(vals))
        lhs_all.append(lhs)
        rhs_all.append(rhs)
        ratios.append(ratio(lhs, rhs))
    hyp = {"condition_finite": {"met": not cond.divergent and np.isfinite(cond.value),
                                "value": cond.value, "trend": cond.trend.kind}}
    return build_report("hardy", ratios, cond.value, slack, hyp,
                        terms={"lhs": lhs_all, "rhs": rhs_all},
                        seed=getattr(g_ensemble, "seed", seed))


@dataclass
class ConverseWitness:
    R: float
    n: int
    ratio: float
    support_size: int
    candidate_C: float

    def to_document(self) -> dict:
        return dict(vars(self))


def hardy_converse(u_weight, v_weight, nu: VectorMeasure, q: float = 1.0, candidate_C: float = 1.0,
                   R_grid=None, n_list=(1, 2, 4, 8, 16, 32)) -> ConverseWitness | None:
    """Search for ``g`` with ``LHS / RHS > candidate_C`` by the converse construction.

    For each ``R`` (ascending) and ``n``, ``g`` is the indicator of the nodes
    in ``B(0, R)`` where ``1/v > S(R) (1 - 1/n)``, ``S(R)`` being the sup of
    ``1/v`` over the ball.  Returns the first witness or ``None``.
    """
    nodes = _Nodes(u_weight, v_weight, nu, q)
    pos = nodes.r[nodes.r > 0]
    if R_grid is None:
        if pos.size == 0:
            return None
        R_grid = np.geomspace(pos.min() * 1.01, nodes.r[-1], 60)
    for R in np.sort(np.asarray(R_grid, dtype=float)):
        inside = nodes.r < R
        if not np.any(inside):
            continue
        S = float(np.max(nodes.v_inv[inside]))
        if not np.isfinite(S) or S <= 0:
            continue
        for n in n_list:
            g = (inside & (nodes.v_inv > S * (1 - 1 / n))).astype(float)
            lhs, rhs = nodes.sides(g)
            rt = ratio(lhs, rhs)
            if rt > candidate_C:
                return ConverseWitness(float(R), int(n), float(rt), int(g.sum()), float(candidate_C))
    return None
