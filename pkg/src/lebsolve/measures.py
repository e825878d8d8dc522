"""Positive vector measures and their regularity functionals.

Each component is stored as a complex number whose real and imaginary parts
are separately nonnegative, ``mu_l = mu_l^Re + i mu_l^Im``.  The total
variation is the scalar measure ``sum_l (mu_l^Re + mu_l^Im)``.

Measures are either atomic (points and weights) or gridded (a cellwise
constant density on a box, zero outside).  Gridded ball masses split every
cell into ``3^N`` equal sub-cells whose centres carry the mass; cells fully
inside or outside a ball are counted exactly, boundary cells get a ``3^N``
point overlap estimate.

Below a resolution floor (4 cells for Ahlfors-type sups, 1 cell for the
Wolff-type integrals) the discrete ball mass is meaningless, so gridded
functionals switch to the model ``rho |B_r|`` with ``rho`` the mean density
of the floor ball.  Atomic
measures built with a ``spacing`` (e.g. a discretised curve) use
``2*spacing`` as their floor for divergence trends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import grid as _grid
from .trend import Trend, assess


def unit_ball_volume(N: int) -> float:
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N."""
    return 2 * math.pi ** (N / 2) / math.gamma(N / 2)


def _check_positive_parts(arr, what):
    arr = np.asarray(arr, dtype=complex)
    if np.any(arr.real < 0) or np.any(arr.imag < 0):
        raise ValueError(f"{what} must have nonnegative real and imaginary parts")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class VectorMeasure:
    dim_N: int
    dimE: int
    kind: str
    points: np.ndarray | None = None
    weights: np.ndarray | None = None
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    density: np.ndarray | None = None
    spacing: float | None = None
    meta: dict = field(default_factory=dict)

    # -- constructors ------------------------------------------------------
    @classmethod
    def atomic(cls, points, weights, spacing=None, **meta) -> "VectorMeasure":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=complex)
        if w.ndim == 1:
            w = w[:, None]
        if w.shape[0] != pts.shape[0]:
            raise ValueError("need one weight vector per atom")
        if pts.shape[1] < 2:
            raise ValueError("dimension must be at least 2")
        w = _check_positive_parts(w, "atom weights")
        return cls(pts.shape[1], w.shape[1], "atomic", points=pts, weights=w, spacing=spacing, meta=meta)

    @classmethod
    def gridded(cls, lo, hi, density, **meta) -> "VectorMeasure":
        d = _check_positive_parts(density, "density")
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if d.ndim != lo.size + 1:
            raise ValueError("density must have shape (dimE, *resolution)")
        if np.any(hi <= lo):
            raise ValueError("box must satisfy hi > lo")
        return cls(lo.size, d.shape[0], "gridded", lo=lo, hi=hi, density=d, meta=meta)

    @classmethod
    def from_density(cls, fn: Callable, lo, hi, resolution, subcells: int = 4, **meta) -> "VectorMeasure":
        """Grid a density by averaging ``fn`` over ``subcells^N`` midpoints per cell.

        ``fn(x)`` receives coordinates of shape ``(N, ...)`` and returns the
        density (scalar shape or ``(dimE, ...)``).  Midpoints never hit the
        cell centre, so integrable point singularities at nodes are handled.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        N = lo.size
        h = (hi - lo) / np.asarray(resolution)
        x = _grid.mesh(lo, hi, resolution)
        offs = (np.arange(subcells) + 0.5) / subcells - 0.5
        acc = None
        for o in np.stack(np.meshgrid(*([offs] * N), indexing="ij")).reshape(N, -1).T:
            v = np.asarray(fn(x + (o * h).reshape((N,) + (1,) * N)), dtype=complex)
            if v.shape == tuple(resolution):
                v = v[None]
            acc = v if acc is None else acc + v
        return cls.gridded(lo, hi, acc / subcells**N, **meta)

    @classmethod
    def zero(cls, N: int, dimE: int = 1) -> "VectorMeasure":
        return cls(N, dimE, "atomic", points=np.zeros((0, N)), weights=np.zeros((0, dimE), dtype=complex))

    @classmethod
    def delta(cls, point, weight=1.0) -> "VectorMeasure":
        w = np.atleast_1d(np.asarray(weight, dtype=complex))
        return cls.atomic([point], w[None])

    @classmethod
    def line(cls, N: int = 2, half_length: float = 1.0, spacing: float = 1e-4, axis: int = 0) -> "VectorMeasure":
        """Arc length on a coordinate segment, as equally spaced atoms of weight ``spacing``."""
        n = int(round(2 * half_length / spacing))
        t = -half_length + spacing * (np.arange(n) + 0.5)
        pts = np.zeros((n, N))
        pts[:, axis] = t
        return cls.atomic(pts, np.full((n, 1), spacing, dtype=complex), spacing=spacing, name="line")

    # -- basic properties --------------------------------------------------
    @property
    def resolution(self) -> tuple:
        return self.density.shape[1:]

    @property
    def cell_spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / np.asarray(self.resolution)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_spacing))

    def is_zero(self) -> bool:
        if self.kind == "atomic":
            return self.weights.size == 0 or not np.any(self.weights)
        return not np.any(self.density)

    def total_mass(self) -> np.ndarray:
        """Complex mass vector ``mu(R^N)``."""
        if self.kind == "atomic":
            return self.weights.sum(axis=0)
        return self.density.reshape(self.dimE, -1).sum(axis=1) * self.cell_volume

    def scale(self) -> float:
        """Characteristic length (support diameter, or 1 for a single point)."""
        if self.kind == "gridded":
            return float(np.linalg.norm(self.hi - self.lo))
        if len(self.points) < 2:
            return 1.0
        d = float(np.linalg.norm(self.points.max(axis=0) - self.points.min(axis=0)))
        return d if d > 0 else 1.0

    def scaled(self, c: float) -> "VectorMeasure":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        if self.kind == "atomic":
            return VectorMeasure.atomic(self.points, self.weights * c, self.spacing, **self.meta) \
                if len(self.points) else VectorMeasure.zero(self.dim_N, self.dimE)
        return VectorMeasure.gridded(self.lo, self.hi, self.density * c, **self.meta)

    def plus(self, other: "VectorMeasure") -> "VectorMeasure":
        if (self.dim_N, self.dimE) != (other.dim_N, other.dimE):
            raise ValueError("measures live in different spaces")
        if self.kind == other.kind == "atomic":
            return VectorMeasure.atomic(np.concatenate([self.points, other.points]),
                                        np.concatenate([self.weights, other.weights]))
        if self.kind == other.kind == "gridded" and np.allclose(self.lo, other.lo) \
                and np.allclose(self.hi, other.hi) and self.resolution == other.resolution:
            return VectorMeasure.gridded(self.lo, self.hi, self.density + other.density)
        raise ValueError("can only add measures of the same kind on the same grid")

    def floor(self, wolff: bool = False) -> float:
        if self.kind == "gridded":
            return float(np.max(self.cell_spacing)) * (1.0 if wolff else 4.0)
        return 2.0 * self.spacing if self.spacing else 0.0

    def to_document(self) -> dict:
        if self.kind == "atomic":
            return {"kind": "atomic", "N": self.dim_N, "dimE": self.dimE,
                    "atoms": [{"point": p.tolist(), "weight_re": w.real.tolist(), "weight_im": w.imag.tolist()}
                              for p, w in zip(self.points, self.weights)]}
        return {"kind": "gridded", "N": self.dim_N, "dimE": self.dimE,
                "box": [[float(a), float(b)] for a, b in zip(self.lo, self.hi)],
                "resolution": list(self.resolution),
                "density_re": [c.real.ravel().tolist() for c in self.density],
                "density_im": [c.imag.ravel().tolist() for c in self.density]}

    # -- sample representation ---------------------------------------------
    def _samples(self):
        """Points and complex weights of the quadrature representation."""
        if self.kind == "atomic":
            return self.points, self.weights
        cache = getattr(self, "_sample_cache", None)
        if cache is not None:
            return cache
        N = self.dim_N
        h = self.cell_spacing
        x = _grid.mesh(self.lo, self.hi, self.resolution).reshape(N, -1)
        m = self.density.reshape(self.dimE, -1).T * self.cell_volume
        nz = np.any(m != 0, axis=1)
        x, m = x[:, nz], m[nz]
        offs = np.stack(np.meshgrid(*([np.array([-1.0, 0.0, 1.0]) / 3] * N), indexing="ij")).reshape(N, -1)
        pts = (x[:, :, None] + (offs * h[:, None])[:, None, :]).reshape(N, -1).T
        w = np.repeat(m / 3**N, offs.shape[1], axis=0)
        object.__setattr__(self, "_sample_cache", (pts, w))
        return pts, w


class TotalVariation(NamedTuple):
    measure: VectorMeasure
    mass: float


def total_variation(mu: VectorMeasure) -> TotalVariation:
    if mu.kind == "atomic":
        w = (mu.weights.real + mu.weights.imag).sum(axis=1, keepdims=True)
        tv = VectorMeasure.atomic(mu.points, w, mu.spacing) if len(w) else VectorMeasure.zero(mu.dim_N)
        return TotalVariation(tv, float(w.sum()))
    d = (mu.density.real + mu.density.imag).sum(axis=0, keepdims=True)
    tv = VectorMeasure.gridded(mu.lo, mu.hi, d)
    return TotalVariation(tv, float(d.sum() * mu.cell_volume))


def _tv_samples(mu: VectorMeasure):
    pts, w = mu._samples()
    return pts, (w.real + w.imag).sum(axis=1)


def ball_masses(mu: VectorMeasure, x, radii) -> np.ndarray:
    """``mu(B(x, r))`` for each radius, shape ``(len(radii), dimE)`` complex (open balls)."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    pts, w = mu._samples()
    if len(pts) == 0:
        return np.zeros((radii.size, mu.dimE), dtype=complex)
    d = np.linalg.norm(pts - np.asarray(x, dtype=float), axis=1)
    order = np.argsort(d, kind="stable")
    cum = np.concatenate([np.zeros((1, mu.dimE)), np.cumsum(w[order], axis=0)])
    return cum[np.searchsorted(d[order], radii, side="left")]


def ball_mass(mu: VectorMeasure, x, r: float) -> np.ndarray:
    if r <= 0:
        raise ValueError("radius must be positive")
    return ball_masses(mu, x, [r])[0]


class _Profile:
    """Distances from one center, sorted, with cumulative total-variation mass."""

    def __init__(self, pts, w, x, rmax=np.inf):
        d = np.linalg.norm(pts - np.asarray(x, dtype=float), axis=1) if len(pts) else np.zeros(0)
        keep = d < rmax
        d, w = d[keep], w[keep]
        order = np.argsort(d, kind="stable")
        self.d = d[order]
        self.cum = np.concatenate([[0.0], np.cumsum(w[order])])

    def open(self, r):
        return self.cum[np.searchsorted(self.d, r, side="left")]

    def closed(self, r):
        return self.cum[np.searchsorted(self.d, r, side="right")]


def _tv_ball_masses(mu: VectorMeasure, x, radii) -> np.ndarray:
    pts, w = _tv_samples(mu)
    radii = np.asarray(radii, dtype=float)
    return _Profile(pts, w, x, float(radii.max())).open(radii)


def _floor_density(mu: VectorMeasure, prof: _Profile, floor: float) -> float:
    """Mean total-variation density of ``B(x, floor)``, the sub-floor model."""
    return float(prof.open(floor)) / (unit_ball_volume(mu.dim_N) * floor**mu.dim_N)


def default_radii(mu: VectorMeasure, count: int = 200, span=(1e-3, 1e3)) -> np.ndarray:
    s = mu.scale()
    return np.geomspace(span[0] * s, span[1] * s, count)


def default_centers(mu: VectorMeasure, count: int = 128, seed: int = 0) -> np.ndarray:
    """Origin, the atoms (or the densest cells) and seeded uniform points in the bounding box."""
    N = mu.dim_N
    rng = np.random.default_rng(seed)
    cs = [np.zeros((1, N))]
    if mu.kind == "atomic":
        if len(mu.points):
            step = max(1, len(mu.points) // count)
            cs.append(mu.points[::step])
            lo, hi = mu.points.min(axis=0), mu.points.max(axis=0)
            cs.append(lo + (hi - lo) * rng.random((count, N)))
    else:
        d = (mu.density.real + mu.density.imag).sum(axis=0)
        x = _grid.mesh(mu.lo, mu.hi, mu.resolution).reshape(N, -1).T
        top = np.argsort(d.ravel(), kind="stable")[::-1][: count // 4]
        cs.append(x[top])
        cs.append(mu.lo + (mu.hi - mu.lo) * rng.random((count, N)))
    return np.concatenate(cs)


def _ahlfors_profile(mu, x, lam, radii, pts, w):
    """``|mu|(B(x,r)) / r^lam`` at the radii, with the sub-floor model and atomic critical radii."""
    prof = _Profile(pts, w, x, float(radii[-1]) * (1 + 1e-12))
    mass = prof.open(radii)
    if mu.kind == "atomic":
        # just above an atom distance the open ball already holds that atom
        crit = prof.d[(prof.d >= radii[0]) & (prof.d <= radii[-1])]
        return np.concatenate([radii, crit]), np.concatenate([mass / radii**lam, prof.closed(crit) / crit**lam])
    floor = mu.floor()
    below = radii < floor
    if np.any(below):
        rho = _floor_density(mu, _Profile(pts, w, x, floor), floor)
        mass = np.where(below, rho * unit_ball_volume(mu.dim_N) * radii**mu.dim_N, mass)
    return radii, mass / radii**lam


@dataclass
class AhlforsEstimate:
    value: float
    trend: Trend
    lam: float
    centers: int
    radii: list
    witness_center: list | None = None
    witness_radius: float | None = None


def _ahlfors(mu, lam, centers, radii) -> AhlforsEstimate:
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.sort(np.atleast_1d(np.asarray(radii, dtype=float)))
    if centers.size == 0:
        raise ValueError("empty center sample")
    if radii.size == 0:
        raise ValueError("empty radii set")
    tv = total_variation(mu).measure
    pts, w = _tv_samples(tv)
    n_dec = int(np.floor(np.log10(radii[-1] / radii[0]) + 1e-9))
    cut = radii[-1] * 10.0 ** -np.arange(1, 1 + n_dec)
    best, wc, wr = 0.0, None, None
    trend_vals = np.zeros(cut.size)
    for x in centers:
        r, ratio = _ahlfors_profile(tv, x, lam, radii, pts, w)
        if ratio.size and ratio.max() > best:
            k = int(np.argmax(ratio))
            best, wc, wr = float(ratio[k]), x.tolist(), float(r[k])
        for i, c in enumerate(cut):
            sel = r >= c
            if np.any(sel):
                trend_vals[i] = max(trend_vals[i], float(ratio[sel].max()))
    trend = assess(cut, trend_vals)
    return AhlforsEstimate(best, trend, float(lam), len(centers),
                           [float(radii[0]), float(radii[-1]), len(radii)], wc, wr)


def ahlfors_constant(mu: VectorMeasure, lam: float, centers=None, radii=None, seed: int = 0) -> AhlforsEstimate:
    """Lower estimate of ``sup_{x,r} |mu|(B(x,r)) / r^lam`` over the sample.

    The origin is always a center.  For atomic measures the atom distances
    inside the radius range are added as critical radii, so the sup over
    ``[r_min, r_max]`` is exact for each sampled center.
    """
    centers = default_centers(mu, seed=seed) if centers is None else centers
    radii = default_radii(mu) if radii is None else radii
    centers = np.concatenate([np.zeros((1, mu.dim_N)), np.atleast_2d(np.asarray(centers, float))])
    return _ahlfors(mu, lam, centers, radii)


def origin_ahlfors(mu: VectorMeasure, lam: float, radii=None) -> AhlforsEstimate:
    radii = default_radii(mu) if radii is None else radii
    return _ahlfors(mu, lam, np.zeros((1, mu.dim_N)), radii)


# --- Wolff-type integrals --------------------------------------------------

def _atomic_bracket(d, w, lam, R, c):
    """``int_c^R |mu|(B(y,r)) r^{-lam-1} dr`` for atoms at distances ``d`` (exact)."""
    sel = d < R
    if not np.any(sel):
        return 0.0
    lower = np.maximum(d[sel], c)
    if c <= 0 and np.any(lower == 0):
        return math.inf
    return float(np.sum(w[sel] * (lower ** -lam - R ** -lam)) / lam)


def _power_integral(rho, e, a, b):
    """``rho * int_a^b r^(e-1) dr`` with the e <= 0, a = 0 case infinite."""
    if rho <= 0 or b <= a:
        return 0.0
    if e > 0:
        return rho * (b**e - a**e) / e
    if a == 0:
        return math.inf
    return rho * (math.log(b / a) if e == 0 else (a**e - b**e) / -e)


def _gridded_bracket(mu, prof, lam, R, c, n_r):
    """Log-trapezoid quadrature above the floor plus the constant-density model below."""
    floor = min(mu.floor(wolff=True), R)
    total = 0.0
    lo = max(c, floor)
    if lo < R:
        r = np.geomspace(lo, R, n_r)
        total += float(np.trapezoid(prof.open(r) / r**lam, np.log(r)))
    if c < floor:
        rho = _floor_density(mu, prof, floor) * unit_ball_volume(mu.dim_N)
        total += _power_integral(rho, mu.dim_N - lam, c, floor)
    return total


@dataclass
class WolffEstimate:
    value: float
    trend: Trend
    lam: float
    per_y: list
    witness_y: list | None
    r_points: int


def default_y_sample(mu: VectorMeasure, count: int = 128, seed: int = 1) -> np.ndarray:
    """Support sample plus points approaching the origin.

    For gridded measures points closer to the origin than two floors are
    dropped: their whole integration range is below the grid resolution.
    """
    ys = default_centers(mu, count, seed)
    s = mu.scale()
    N = mu.dim_N
    rng = np.random.default_rng(seed)
    near = rng.standard_normal((32, N))
    near *= (s * np.geomspace(1e-3, 0.5, 32) / np.linalg.norm(near, axis=1))[:, None]
    ys = np.concatenate([ys, near])
    rmin = 4 * mu.floor(wolff=True) if mu.kind == "gridded" else 0.0
    return ys[np.linalg.norm(ys, axis=1) > rmin]


def wolff_condition(mu: VectorMeasure, lam: float, y_sample=None, r_points: int = 200,
                    decades: int = 6) -> WolffEstimate:
    """``sup_y int_0^{|y|/2} |mu|(B(y,r)) / r^{lam+1} dr`` over the y sample.

    The trend records the sup with lower cutoffs ``|y|/2 * 10^-k``; cutoffs
    below an atomic measure's floor are not used.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    ys = default_y_sample(mu) if y_sample is None else np.atleast_2d(np.asarray(y_sample, float))
    ys = ys[np.linalg.norm(ys, axis=1) > 0]
    tv = total_variation(mu).measure
    pts, w = _tv_samples(tv)
    floor = tv.floor(wolff=True)
    factors = 10.0 ** -np.arange(1, decades + 1)
    per_y, trend_vals, usable = [], np.zeros(decades), np.zeros(decades, dtype=bool)
    for y in ys:
        R = float(np.linalg.norm(y)) / 2
        if tv.kind == "atomic":
            d = np.linalg.norm(pts - y, axis=1) if len(pts) else np.zeros(0)
            full = _atomic_bracket(d, w, lam, R, floor)
            vals = [_atomic_bracket(d, w, lam, R, R * f) if R * f >= floor else None for f in factors]
        else:
            prof = _Profile(pts, w, y, R)
            full = _gridded_bracket(tv, prof, lam, R, 0.0, r_points)
            vals = [_gridded_bracket(tv, prof, lam, R, R * f, r_points) for f in factors]
        per_y.append(full)
        for i, v in enumerate(vals):
            if v is not None:
                usable[i] = True
                trend_vals[i] = max(trend_vals[i], v)
    k = int(np.argmax(per_y)) if per_y else None
    n_use = decades if usable.all() else int(np.argmin(usable))
    trend = assess(factors[:n_use], trend_vals[:n_use])
    value = max(per_y) if per_y else 0.0
    return WolffEstimate(float(value), trend, float(lam), [float(v) for v in per_y],
                         None if k is None else ys[k].tolist(), r_points)


@dataclass
class WolffPotential:
    value: float
    divergent: bool
    trend: Trend


def wolff_potential(nu: VectorMeasure, alpha: float, p: float, t: float, x, r_points: int = 400) -> WolffPotential:
    """``W^t_{alpha,p} nu(x) = int_0^t [nu(B(x,r)) / r^{N - alpha p}]^{1/(p-1)} dr/r``.

    Atomic measures are integrated exactly between consecutive atom
    distances; gridded ones by log-trapezoid quadrature above the floor.
    """
    if alpha <= 0 or p <= 1 or t <= 0:
        raise ValueError("need alpha > 0, p > 1, t > 0")
    tv = total_variation(nu).measure
    N = nu.dim_N
    s = N - alpha * p
    beta = 1.0 / (p - 1)
    pts, w = _tv_samples(tv)
    prof = _Profile(pts, w, x, t)
    factors = 10.0 ** -np.arange(1, 9)
    floor = tv.floor(wolff=True)
    if tv.kind == "atomic":
        def integral(c):
            edges = np.unique(np.concatenate([[c, t], prof.d[(prof.d > c) & (prof.d < t)]]))
            return sum(_power_integral(float(prof.closed(a)) ** beta, -s * beta, a, b)
                       for a, b in zip(edges[:-1], edges[1:]))
    else:
        floor = min(floor, t)
        rho = _floor_density(tv, prof, floor) * unit_ball_volume(N) if floor > 0 else 0.0

        def integral(c):
            total = 0.0
            lo = max(c, floor)
            if lo < t:
                r = np.geomspace(lo, t, r_points)
                total += float(np.trapezoid((prof.open(r) / r**s) ** beta, np.log(r)))
            if c < floor:
                total += _power_integral(rho**beta, (N - s) * beta, c, floor)
            return total

    value = integral(0.0)
    vals = [integral(t * f) for f in factors if t * f >= floor]
    trend = assess(factors[: len(vals)], vals)
    if math.isinf(value):
        trend = Trend(trend.cutoffs, trend.values, True, "infinite")
    return WolffPotential(float(value), bool(trend.divergent), trend)


# --- combined report -------------------------------------------------------

@dataclass
class RegularityReport:
    lam: float
    ahlfors: float
    origin_ahlfors: float
    wolff_bracket: float
    divergent_flags: dict
    trends: dict
    sampling: dict

    def to_document(self) -> dict:
        return {"lambda": self.lam, "ahlfors": self.ahlfors, "origin_ahlfors": self.origin_ahlfors,
                "wolff_bracket": self.wolff_bracket, "divergent_flags": self.divergent_flags,
                "trends": {k: v.to_document() for k, v in self.trends.items()}, "sampling": self.sampling}


def regularity_report(mu: VectorMeasure, lam: float, seed: int = 0, r_points: int = 200) -> RegularityReport:
    a = ahlfors_constant(mu, lam, seed=seed)
    o = origin_ahlfors(mu, lam)
    w = wolff_condition(mu, lam, r_points=r_points) if lam > 0 else None
    trends = {"ahlfors": a.trend, "origin_ahlfors": o.trend}
    if w is not None:
        trends["wolff_bracket"] = w.trend
    return RegularityReport(
        lam=float(lam), ahlfors=a.value, origin_ahlfors=o.value,
        wolff_bracket=w.value if w else 0.0,
        divergent_flags={k: t.divergent for k, t in trends.items()}, trends=trends,
        sampling={"seed": seed, "centers": a.centers, "radii": a.radii, "r_points": r_points,
                  "y_count": len(w.per_y) if w else 0})
