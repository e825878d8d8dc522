"""Triviality of L^p solutions and the decay forced by a bounded ``f``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import RegularGridInterpolator

from .. import grid as _grid
from ..errors import InputError
from ..grid import GridField
from ..measures import VectorMeasure, sphere_area
from ..operators import HomogeneousOperator
from ..potentials import _sphere_directions, energy, riesz_constant, weak_energy
from ..trend import Trend, assess
from .report import InequalityReport, build_report


@dataclass
class TrivialityReport:
    zero_measure: bool
    m: float
    p: float
    critical_p: float
    R_list: list = field(default_factory=list)
    lower_bounds: list = field(default_factory=list)
    trend: Trend | None = None
    energies: list | None = None
    energy_trend: str | None = None
    consistent: bool | None = None
    weak: dict | None = None

    @property
    def divergent(self) -> bool:
        return bool(self.trend and self.trend.divergent)

    def to_document(self) -> dict:
        doc = dict(vars(self))
        doc["trend"] = None if self.trend is None else self.trend.to_document()
        doc["status"] = "zero measure" if self.zero_measure else (
            "divergent" if self.divergent else "bounded")
        return doc


def _support_radius(mu: VectorMeasure) -> float:
    if mu.kind == "gridded":
        corners = np.stack([mu.lo, mu.hi])
        return float(np.linalg.norm(np.max(np.abs(corners), axis=0)))
    return float(np.max(np.linalg.norm(mu.points, axis=1)))


def triviality_check(mu: VectorMeasure, m: float, p: float, R_list=(10.0, 100.0, 1000.0),
                     cross_check: bool = True) -> TrivialityReport:
    """Lower bound for ``int_{B_R'} |I_m mu|^p`` that diverges for ``1 <= p <= N/(N-m)``.

    With ``R`` the radius of a ball at the origin holding the support,
    ``|I_m mu_l(x)| >= |mu_l(B_R)| (|x| + R)^(m-N) / gamma`` gives

        int_{B_R'} |I_m mu|^p >= sigma (|M| / gamma)^p int_0^R' r^(N-1) (r + R)^((m-N)p) dr,

    which grows like ``log R'`` at ``p = N/(N-m)`` and like a power below.
    The grid energies are cross-checked against this bound.  For ``p = 1``
    the weak route is reported too: ``lam |{|I_m mu| > lam}|`` is at least
    ``lam |B(0, (|M|/(gamma lam))^(1/(N-m)) - R)|``, unbounded as ``lam -> 0``.
    """
    N = mu.dim_N
    if not 0 < m < N:
        raise InputError("need 0 < m < N")
    p_crit = N / (N - m)
    if not 1 <= p <= p_crit * (1 + 1e-12):
        raise InputError(f"p must lie in [1, {p_crit:.6g}]")
    R_list = sorted(float(r) for r in R_list)
    if mu.is_zero():
        return TrivialityReport(True, float(m), float(p), p_crit, R_list)
    M = float(np.max(np.abs(mu.total_mass())))
    R = _support_radius(mu)
    gamma = riesz_constant(N, m)
    amp = sphere_area(N) * (M / gamma) ** p
    e = (m - N) * p

    def lower(Rp):
        if R == 0:
            # point support: the bound is the bare power r^(N-1+e)
            k = N + e
            return math.inf if k <= 0 else amp * Rp**k / k
        # split at R: the integrand turns from ~r^(N-1) into ~r^(N-1+e)
        f = lambda r: r ** (N - 1) * (r + R) ** e
        a = integrate.quad(f, 0, min(R, Rp))[0]
        if Rp > R:
            a += integrate.quad(lambda t: f(math.exp(t)) * math.exp(t), math.log(R), math.log(Rp), limit=200)[0]
        return amp * a

    lbs = [lower(r) for r in R_list]
    rep = TrivialityReport(False, float(m), float(p), p_crit, R_list, lbs, assess(R_list, lbs))
    if cross_check and mu.kind == "gridded":
        en = energy(mu, m, p, R_list)
        vals = [v for _, v in en.truncated_energies]
        rep.energies = vals
        rep.energy_trend = en.trend.kind
        rep.consistent = bool(en.trend.divergent == rep.trend.divergent
                              and all(v >= 0.99 * lb for v, lb in zip(vals, lbs)))
    if p == 1:
        lam = M / gamma * np.geomspace(1.0, 1e-6, 7) / (2 * max(R, 0.5)) ** (N - m)
        rho = np.maximum((M / (gamma * lam)) ** (1 / (N - m)) - R, 0.0)
        vals = lam * sphere_area(N) / N * rho**N
        weak = {"lambdas": lam.tolist(), "lower_bounds": vals.tolist(),
                "trend": assess(1 / lam, vals).to_document()}
        if mu.kind == "gridded":
            we = weak_energy(mu, m)
            weak["grid_divergent"] = we.divergent
            weak["grid_weak_quasinorm"] = we.weak_quasinorm
        rep.weak = weak
    return rep


# --- first-order necessity ---------------------------------------------------

def necessity_constant(op: HomogeneousOperator) -> float:
    """``sigma_(N-1) * sum_j ||a_j|| * sqrt(2 dimE)``.

    Gauss-Green gives ``mu(B) = -sum_j a_j^H int_{dB} f n_j``, so the vector
    norm of ``mu(B)`` is at most ``sigma r^(N-1) ||f||_inf sum_j ||a_j||``;
    the factor ``sqrt(2 dimE)`` converts to the mass ``sum_e |Re| + |Im|``.
    """
    s = sum(float(np.linalg.norm(a, 2)) for a in op.coeffs.values())
    return sphere_area(op.dim_N) * s * math.sqrt(2 * op.dimE)


def _ball_masses(op: HomogeneousOperator, f: GridField, centres, radii, n_dir: int) -> np.ndarray:
    """``|mu(B(x, r))|`` (sum of |Re| and |Im| over components) by boundary quadrature."""
    N = op.dim_N
    axes = _grid.node_coords(f.lo, f.hi, f.resolution)
    interp = [(RegularGridInterpolator(axes, c.real), RegularGridInterpolator(axes, c.imag))
              for c in f.samples]
    dirs = _sphere_directions(N, n_dir)
    out = np.zeros((len(centres), len(radii)))
    for i, x in enumerate(centres):
        for j, r in enumerate(radii):
            pts = x + r * dirs
            vals = np.array([re(pts) + 1j * im(pts) for re, im in interp])  # (dimF, n_dir)
            w = sphere_area(N) * r ** (N - 1) / n_dir
            mu = np.zeros(op.dimE, dtype=complex)
            for alpha, a in op.coeffs.items():
                jdir = alpha.index(1)
                mu -= a.conj().T @ (vals @ dirs[:, jdir]) * w
            out[i, j] = float(np.sum(np.abs(mu.real) + np.abs(mu.imag)))
    return out


def _adjoint_fd(op: HomogeneousOperator, f: GridField) -> np.ndarray:
    """``A*(D) f`` by central differences (no periodic wrap, unlike the spectral route)."""
    out = np.zeros((op.dimE,) + f.resolution, dtype=complex)
    for alpha, a in op.coeffs.items():
        j = alpha.index(1)
        df = np.gradient(f.samples, float(f.spacing[j]), axis=j + 1)
        out -= np.einsum("ef,f...->e...", a.conj().T, df)
    return out


def first_order_necessity(op: HomogeneousOperator, f: GridField, centres=None, radii=None,
                          n_centres: int = 32, seed: int = 0, directions: int | None = None) -> InequalityReport:
    """Sampled ``|mu(B(x,r))| / (||f||_inf r^(N-1))`` for ``mu = A*(D) f``.

    Ball masses come from Gauss-Green on the sphere with ``f`` linearly
    interpolated, so ``|f| <= ||f||_inf`` holds at every quadrature point.
    Every ball lies inside the grid box.  ``terms["mass_ratio"]`` traces
    ``sup_x |mu(B(x,r))| / r^(N-1)`` from the largest radius down; a
    divergent trend witnesses a measure too concentrated for any bounded ``f``.
    """
    if op.order_m != 1:
        raise InputError("first-order necessity needs an operator of order 1")
    if f.dim != op.dim_N or f.value_dim != op.dimF:
        raise InputError("field does not match the operator")
    N = op.dim_N
    h = float(np.max(f.spacing))
    lo = f.lo + h
    hi = f.hi - 2 * h
    if centres is None:
        rng = np.random.default_rng(seed)
        mid, half = (lo + hi) / 2, (hi - lo) / 4
        centres = np.concatenate([mid[None], mid + half * rng.uniform(-1, 1, (n_centres, N))])
    centres = np.atleast_2d(np.asarray(centres, dtype=float))
    room = float(np.min(np.minimum(centres - lo, hi - centres)))
    if room <= 2 * h:
        raise InputError("centres too close to the box boundary")
    if radii is None:
        n_dec = max(1, int(np.floor(np.log10(room / (2 * h)))))
        radii = room * 10.0 ** -np.arange(n_dec + 1)
        if radii[-1] > 6 * h:
            radii = np.append(radii, 2 * h)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii > room * (1 + 1e-12)):
        raise InputError("balls must lie inside the box")
    n_dir = directions or (256 if N == 2 else 1024)

    finf = float(np.max(f.norm()))
    mu = _adjoint_fd(op, f)
    scale = float(np.max(np.abs(mu))) or 1.0
    positive = bool(np.all(mu.real >= -1e-2 * scale) and np.all(mu.imag >= -1e-2 * scale))
    masses = _ball_masses(op, f, centres, radii, n_dir)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = masses / (finf * radii ** (N - 1)) if finf > 0 else np.zeros_like(masses)
    mass_ratio = (masses / radii ** (N - 1)).max(axis=0)
    order = np.argsort(radii)[::-1]
    C = necessity_constant(op)
    hyp = {"positive_parts": {"met": True, "value": positive,
                              "note": "bound applies to |mu(B)| either way"}}
    return build_report("first_order_necessity", ratios.ravel(), C, 1.0, hyp,
                        terms={"linf": finf, "radii": radii[order].tolist(),
                               "mass_ratio": mass_ratio[order].tolist(),
                               "mass_ratio_trend": assess(radii[order], mass_ratio[order]).to_document(),
                               "centres": len(centres)},
                        seed=seed)
