"""Riesz potentials, energies and Riesz transforms.

``I_m eta(x) = gamma(m)^-1 int |x - y|^(m - N) d eta(y)`` with
``gamma(m) = pi^(N/2) 2^m Gamma(m/2) / Gamma((N - m)/2)``, whose Fourier
multiplier is ``|k|^-m``.  The Riesz transform of order ``alpha`` is the
multiplier ``(-i)^|alpha| k^alpha / |k|^|alpha|``; with this sign
``R_1 cos(x_1) = sin(x_1)`` and ``sum_j R_j R_j = -1``.  Both multipliers
are set to 0 on the zero mode, so spectral results are mean-free.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as _gamma

from . import grid as _grid
from .grid import GridField
from .measures import VectorMeasure, sphere_area
from .operators import HomogeneousOperator, MultiIndex, apply_adjoint
from .trend import Trend, assess


def riesz_constant(N: int, m: float) -> float:
    if not 0 < m < N:
        raise ValueError(f"need 0 < m < N, got m={m}, N={N}")
    return float(math.pi ** (N / 2) * 2**m * _gamma(m / 2) / _gamma((N - m) / 2))


def _kernel(r, N, m):
    return r ** (m - N) / riesz_constant(N, m)


def riesz_potential_atomic(mu: VectorMeasure, m: float, x) -> np.ndarray:
    """Exact atom sum at one point ``x`` (shape ``(dimE,)``) or many (``(M, dimE)``).

    At an atom the affected real/imaginary parts are ``+inf``.
    """
    if mu.kind != "atomic":
        raise ValueError("riesz_potential_atomic needs an atomic measure")
    N = mu.dim_N
    riesz_constant(N, m)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xs = np.atleast_2d(x)
    out = np.zeros((len(xs), mu.dimE), dtype=complex)
    if len(mu.points) == 0:
        return out[0] if single else out
    d = np.linalg.norm(xs[:, None, :] - mu.points[None, :, :], axis=2)
    hit = d == 0
    with np.errstate(divide="ignore"):
        k = np.where(hit, 0.0, _kernel(np.where(hit, 1.0, d), N, m))
    re = k @ mu.weights.real
    im = k @ mu.weights.imag
    re[(hit.astype(float) @ mu.weights.real) > 0] = np.inf
    im[(hit.astype(float) @ mu.weights.imag) > 0] = np.inf
    out.real, out.imag = re, im
    return out[0] if single else out


def self_cell_value(N: int, m: float, spacing) -> float:
    """Kernel weight for a cell's own mass: the mean of ``gamma^-1 |z|^(m-N)``
    over the ball with the cell's volume, ``sigma_{N-1} rho^m / (m gamma |cell|)``."""
    vol = float(np.prod(spacing))
    rho = (vol * math.gamma(N / 2 + 1) / math.pi ** (N / 2)) ** (1.0 / N)
    return sphere_area(N) * rho**m / (m * riesz_constant(N, m) * vol)


def _kernel_stencil(N, m, spacing, half_counts):
    """Kernel on node offsets ``-c..c`` per axis, with the self-cell value at 0."""
    axes = [spacing[j] * np.arange(-c, c + 1) for j, c in enumerate(half_counts)]
    z = np.stack(np.meshgrid(*axes, indexing="ij"))
    r = np.sqrt(np.sum(z**2, axis=0))
    centre = tuple(half_counts)
    r[centre] = 1.0
    k = _kernel(r, N, m)
    k[centre] = self_cell_value(N, m, spacing)
    return k


def riesz_potential_grid(mu: VectorMeasure, m: float, padding: int = 4) -> GridField:
    """``I_m mu`` at every node of the box enlarged ``padding`` times.

    Cell masses are convolved with the sampled kernel (zero-padded FFT
    convolution, so no periodic images); each cell's own contribution uses
    :func:`self_cell_value`.
    """
    if mu.kind != "gridded":
        raise ValueError("riesz_potential_grid needs a gridded measure")
    N = mu.dim_N
    riesz_constant(N, m)
    lo, hi, res, off = _grid.padded_box(mu.lo, mu.hi, mu.resolution, padding)
    h = mu.cell_spacing
    masses = np.zeros((mu.dimE, *res), dtype=complex)
    sl = (slice(None),) + tuple(slice(o, o + n) for o, n in zip(off, mu.resolution))
    masses[sl] = mu.density * mu.cell_volume
    k = _kernel_stencil(N, m, h, [n - 1 for n in res])
    out = np.empty_like(masses)
    for c in range(mu.dimE):
        out[c] = fftconvolve(masses[c].real, k, mode="same") + 1j * fftconvolve(masses[c].imag, k, mode="same")
    return GridField(lo, hi, out, padding, {"m": m, "padding": padding})


def _far_field(mu: VectorMeasure, m: float, pts: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Direct cell sum of ``I_m mu`` at points outside the support, shape ``(M, dimE)``."""
    N = mu.dim_N
    x = _grid.mesh(mu.lo, mu.hi, mu.resolution).reshape(N, -1).T
    masses = mu.density.reshape(mu.dimE, -1).T * mu.cell_volume
    nz = np.any(masses != 0, axis=1)
    x, masses = x[nz], masses[nz]
    out = np.zeros((len(pts), mu.dimE), dtype=complex)
    for s in range(0, len(pts), chunk):
        d = np.linalg.norm(pts[s:s + chunk, None, :] - x[None], axis=2)
        out[s:s + chunk] = _kernel(d, N, m) @ masses
    return out


def _sphere_directions(N: int, count: int) -> np.ndarray:
    if N == 2:
        t = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if N == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (3 - math.sqrt(5)) * i
        s = np.sqrt(1 - z**2)
        return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    raise ValueError("far-field quadrature supports N = 2, 3")


@dataclass
class EnergyReport:
    m: float
    p: float
    truncated_energies: list
    weak_quasinorm: float | None
    divergent: bool
    trend: Trend
    near_radius: float
    mean_removed: bool = False
    notes: list = field(default_factory=list)

    def to_document(self) -> dict:
        d = dict(vars(self))
        d["trend"] = self.trend.to_document()
        return d


def energy(mu: VectorMeasure, m: float, p: float, R_list, padding: int = 4,
           per_decade: int = 48, directions: int | None = None) -> EnergyReport:
    """Truncated energies ``int_{B_R} |I_m mu|^p`` for each R.

    Inside the inscribed radius ``R0`` of the padded box the grid potential
    is summed; beyond ``R0`` the potential is evaluated by direct sums on a
    log-polar quadrature (``per_decade`` radial nodes per decade).
    """
    if not 1 <= p < math.inf:
        raise ValueError("need 1 <= p < inf")
    N = mu.dim_N
    riesz_constant(N, m)
    R_list = sorted(float(r) for r in R_list)
    if mu.is_zero():
        zero = [(R, 0.0) for R in R_list]
        return EnergyReport(m, p, zero, 0.0, False, assess(R_list, [0.0] * len(R_list)), 0.0)
    if mu.kind != "gridded":
        raise ValueError("energy needs a gridded measure")
    field_ = riesz_potential_grid(mu, m, padding)
    R0 = float(np.min(field_.hi - field_.lo)) / 2 - float(np.max(field_.spacing))
    centre = (mu.lo + mu.hi) / 2
    rad = _grid.radii(field_.lo, field_.hi, field_.resolution, centre)
    dens = field_.norm() ** p
    energies = []
    for R in R_list:
        inner = float(np.sum(dens[rad < min(R, R0)]) * field_.cell_volume)
        outer = 0.0
        if R > R0:
            outer = _shell_integral(mu, m, p, R0, R, centre, per_decade, directions)
        energies.append(inner + outer)
    trend = assess(R_list, energies)
    weak = _weak_from_field(field_).weak_quasinorm
    return EnergyReport(m, p, list(zip(R_list, energies)), weak, trend.divergent, trend, R0)


def _shell_integral(mu, m, p, R0, R, centre, per_decade, directions):
    N = mu.dim_N
    n_dir = directions or (64 if N == 2 else 256)
    dirs = _sphere_directions(N, n_dir)
    n_r = max(8, int(math.ceil(per_decade * math.log10(R / R0))))
    # Gauss-Legendre in t = log r
    t, wt = np.polynomial.legendre.leggauss(n_r)
    a, b = math.log(R0), math.log(R)
    logr = (b - a) / 2 * t + (a + b) / 2
    wt = wt * (b - a) / 2
    r = np.exp(logr)
    pts = centre + (r[:, None, None] * dirs[None, :, :]).reshape(-1, N)
    vals = np.linalg.norm(_far_field(mu, m, pts), axis=1).reshape(len(r), n_dir) ** p
    sphere_mean = vals.mean(axis=1) * sphere_area(N)
    return float(np.sum(wt * sphere_mean * r**N))


@dataclass
class WeakEnergy:
    weak_quasinorm: float
    lambdas: list
    values: list
    divergent: bool
    trend: Trend | None
    edge_level: float

    def to_document(self) -> dict:
        d = dict(vars(self))
        d["trend"] = None if self.trend is None else self.trend.to_document()
        return d


def weak_energy(mu: VectorMeasure, m: float, padding: int = 4, lambda_grid=None, count: int = 100) -> WeakEnergy:
    """``sup_lambda lambda |{|I_m mu| > lambda}|`` by cell counting on the padded grid.

    Only levels above the largest boundary value are used, so every counted
    superlevel set lies inside the box.
    """
    riesz_constant(mu.dim_N, m)
    if mu.is_zero():
        return WeakEnergy(0.0, [], [], False, None, 0.0)
    return _weak_from_field(riesz_potential_grid(mu, m, padding), lambda_grid, count)


def _weak_from_field(field_: GridField, lambda_grid=None, count: int = 100) -> WeakEnergy:
    a = field_.norm()
    edge = max(float(np.max(np.take(a, [0, -1], axis=j))) for j in range(field_.dim))
    top = float(a.max())
    if lambda_grid is None:
        lambda_grid = np.geomspace(max(edge, top * 1e-12) * 1.0001, top, count)
    lam = np.asarray([l for l in lambda_grid if l > edge])
    flat = np.sort(a.ravel())
    vals = lam * (flat.size - np.searchsorted(flat, lam, side="right")) * field_.cell_volume
    # sup over lambda >= c, for c at decades below the top level and the lowest usable level
    n_dec = int(np.floor(np.log10(top / lam.min()))) if lam.size else 0
    cuts = top * 10.0 ** -np.arange(1, n_dec + 1)
    if lam.size and (not cuts.size or cuts[-1] > lam.min() * 1.5):
        cuts = np.append(cuts, lam.min())
    trend = assess(cuts, [float(vals[lam >= c].max()) for c in cuts])
    return WeakEnergy(float(vals.max()) if vals.size else 0.0, lam.tolist(), vals.tolist(),
                      trend.divergent, trend, edge)


# --- Riesz transforms ------------------------------------------------------

def riesz_multiplier(lo, hi, resolution, alpha) -> np.ndarray:
    alpha = MultiIndex(alpha)
    if alpha.order < 1:
        raise ValueError("|alpha| must be at least 1")
    k = _grid.wavevector_grid(lo, hi, resolution)
    kn = np.sqrt(np.sum(k**2, axis=0))
    mono = np.ones(kn.shape)
    for j, e in enumerate(alpha):
        mono = mono * k[j] ** e
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = (-1j) ** alpha.order * mono / kn**alpha.order
    mult[(0,) * len(resolution)] = 0.0
    return mult


def riesz_transform(f: GridField, alpha) -> GridField:
    mult = riesz_multiplier(f.lo, f.hi, f.resolution, alpha)
    return f.with_samples(_grid.physical(mult * _grid.spectral(f.samples)))


def riesz_potential_spectral(f: GridField, m: float) -> GridField:
    """``I_m`` on the torus: multiplier ``|k|^-m``, zero mode dropped."""
    k = _grid.wavevector_grid(f.lo, f.hi, f.resolution)
    kn = np.sqrt(np.sum(k**2, axis=0))
    with np.errstate(divide="ignore"):
        mult = np.where(kn > 0, kn ** (-float(m)), 0.0)
    return f.with_samples(_grid.physical(mult * _grid.spectral(f.samples)))


@dataclass
class RieszIdentityReport:
    constant: float
    residual: float
    raw_residual: float
    aliasing: float
    lhs_norm: float
    mean_removed: list

    def to_document(self) -> dict:
        return dict(vars(self))


def verify_riesz_identity(op: HomogeneousOperator, f: GridField, alias_tol: float = 1e-12) -> RieszIdentityReport:
    """Compare ``I_m(A*(D) f)`` with ``sum_alpha a_alpha^H R^alpha f``.

    The least-squares scalar ``c`` with ``lhs ~ c * rhs`` is returned with the
    relative residual after the fit.  ``raw_residual`` uses ``c = 1``.
    """
    if not 0 < op.order_m < op.dim_N:
        raise ValueError("need 0 < m < N")
    alias = _grid.aliasing_fraction(f.samples)
    if alias > alias_tol:
        warnings.warn(f"f is not band-limited (aliasing fraction {alias:.2e})")
    mu = apply_adjoint(op, f)
    lhs = riesz_potential_spectral(mu, op.order_m).samples
    rhs = np.zeros_like(lhs)
    for alpha, a in op.coeffs.items():
        rf = riesz_transform(f, alpha).samples
        rhs += np.einsum("ef,f...->e...", a.conj().T, rf)
    ln = float(np.linalg.norm(lhs))
    rn = float(np.linalg.norm(rhs))
    if rn == 0:
        c = 1.0
    else:
        c = float(np.real(np.vdot(rhs, lhs)) / rn**2)
    scale = max(ln, np.finfo(float).tiny)
    res = float(np.linalg.norm(lhs - c * rhs)) / scale if ln else 0.0
    raw = float(np.linalg.norm(lhs - rhs)) / scale if ln else 0.0
    return RieszIdentityReport(c, res, raw, alias, ln, [complex(v) for v in f.integral() / f.volume])
