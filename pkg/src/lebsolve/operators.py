"""Homogeneous constant-coefficient operators and their symbols.

``A(D) = sum_{|alpha|=m} a_alpha d^alpha`` maps E-valued to F-valued
functions, with ``a_alpha`` a ``dimF x dimE`` complex matrix.  Two symbols
appear:

* the real-homogeneous symbol ``A(xi) = sum a_alpha xi^alpha`` used by the
  structural certificates, and
* the Fourier multiplier of ``A(D)``, which is ``i^m A(k)`` under the
  convention ``(d^alpha u)^ = (ik)^alpha u^``.

The formal adjoint is ``A*(D) = sum (-1)^m a_alpha^H d^alpha`` so that
``int <A(D)u, f> = int <u, A*(D)f>`` for the Hermitian pairing; its Fourier
multiplier is ``(-i)^m A(k)^H``.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from . import grid as _grid
from . import subspace
from .errors import InputError
from .grid import GridField


class MultiIndex(tuple):
    """Tuple of nonnegative integers; ``order`` is their sum."""

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        if any(e < 0 for e in entries):
            raise ValueError(f"multi-index entries must be nonnegative: {entries}")
        return super().__new__(cls, entries)

    @property
    def order(self) -> int:
        return sum(self)


def multi_indices(N: int, m: int) -> list:
    """All multi-indices of length N and order m, in lexicographically decreasing order."""
    out = [MultiIndex(c) for c in itertools.product(range(m, -1, -1), repeat=N) if sum(c) == m]
    return out


def multinomial(alpha) -> int:
    return math.factorial(sum(alpha)) // math.prod(math.factorial(a) for a in alpha)


@dataclass(frozen=True, eq=False)
class HomogeneousOperator:
    dim_N: int
    order_m: int
    dimE: int
    dimF: int
    coeffs: Mapping
    name: str = ""

    def __post_init__(self):
        if self.dim_N < 2:
            raise ValueError("spatial dimension must be at least 2")
        if self.order_m < 1:
            raise ValueError("order must be at least 1")
        if self.dimE < 1 or self.dimF < 1:
            raise ValueError("dimE and dimF must be positive")
        clean = {}
        for alpha, mat in self.coeffs.items():
            alpha = MultiIndex(alpha)
            if len(alpha) != self.dim_N:
                raise ValueError(f"multi-index {tuple(alpha)} does not have length {self.dim_N}")
            if alpha.order != self.order_m:
                raise ValueError(f"inhomogeneous term {tuple(alpha)}: order {alpha.order} != {self.order_m}")
            mat = np.array(mat, dtype=complex)
            if mat.shape != (self.dimF, self.dimE):
                raise ValueError(
                    f"dimension mismatch for {tuple(alpha)}: matrix {mat.shape}, expected {(self.dimF, self.dimE)}")
            clean[alpha] = clean.get(alpha, 0) + mat
        if not clean or all(not np.any(m) for m in clean.values()):
            raise ValueError("operator needs at least one nonzero coefficient")
        object.__setattr__(self, "coeffs", clean)

    def symbol(self, xi) -> np.ndarray:
        """``A(xi)`` for ``xi`` of shape ``(..., N)``; returns ``(..., dimF, dimE)``."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim_N:
            raise ValueError(f"xi must have trailing dimension {self.dim_N}")
        out = np.zeros(xi.shape[:-1] + (self.dimF, self.dimE), dtype=complex)
        for alpha, a in self.coeffs.items():
            mono = np.prod(xi ** np.array(alpha), axis=-1)
            out += mono[..., None, None] * a
        return out

    def adjoint_symbol(self, xi) -> np.ndarray:
        return np.conj(np.swapaxes(self.symbol(xi), -1, -2))

    def scaled(self, c) -> "HomogeneousOperator":
        return HomogeneousOperator(self.dim_N, self.order_m, self.dimE, self.dimF,
                                   {a: c * m for a, m in self.coeffs.items()}, self.name)

    def to_document(self) -> dict:
        return {
            "N": self.dim_N, "m": self.order_m, "dimE": self.dimE, "dimF": self.dimF,
            "name": self.name,
            "terms": [{"alpha": list(a), "re": m.real.tolist(), "im": m.imag.tolist()}
                      for a, m in sorted(self.coeffs.items(), reverse=True)],
        }


@dataclass(frozen=True)
class SymbolMatrix:
    value: np.ndarray
    at_xi: np.ndarray


def symbol_at(op: HomogeneousOperator, xi) -> SymbolMatrix:
    xi = np.asarray(xi, dtype=float)
    return SymbolMatrix(op.symbol(xi), xi)


def adjoint_symbol_at(op: HomogeneousOperator, xi) -> SymbolMatrix:
    xi = np.asarray(xi, dtype=float)
    return SymbolMatrix(op.adjoint_symbol(xi), xi)


def parse_operator(doc) -> HomogeneousOperator:
    """Build an operator from a JSON string, bytes or already-decoded dict.

    Fields: ``N, m, dimE, dimF`` and ``terms``, a list of
    ``{"alpha": [...], "re": [[...]], "im": [[...]]}`` (``im`` optional).
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed operator document: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("malformed operator document: expected an object")
    try:
        N, m, dE, dF = (int(doc[k]) for k in ("N", "m", "dimE", "dimF"))
        terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed operator document: missing or invalid field {exc}") from None
    if not isinstance(terms, list) or not terms:
        raise InputError("malformed operator document: 'terms' must be a non-empty list")
    coeffs = {}
    for t in terms:
        try:
            alpha = MultiIndex(t["alpha"])
            re = np.asarray(t["re"], dtype=float)
            im = np.asarray(t.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed term {t!r}: {exc}") from None
        if len(alpha) != N:
            raise InputError(f"malformed term: alpha {list(alpha)} has length {len(alpha)}, expected N={N}")
        if alpha.order != m:
            raise InputError(f"inhomogeneous term: |alpha|={alpha.order} for alpha={list(alpha)} but m={m}")
        if re.shape != (dF, dE) or im.shape != (dF, dE):
            raise InputError(f"dimension mismatch in term {list(alpha)}: got {re.shape}/{im.shape}, expected {(dF, dE)}")
        coeffs[alpha] = coeffs.get(alpha, 0) + re + 1j * im
    try:
        return HomogeneousOperator(N, m, dE, dF, coeffs, str(doc.get("name", "")))
    except ValueError as exc:
        raise InputError(str(exc)) from None


# --- sphere sampling -------------------------------------------------------

def sphere_sample(N: int, count: int, seed: int = 0, n_random: int = 64) -> np.ndarray:
    """Quasi-uniform unit vectors plus the coordinate axes and random directions.

    N=2 uses equally spaced angles (count rounded up to a multiple of 4),
    N=3 a Fibonacci spiral, N>3 normalised Gaussianised Halton points.
    """
    count = max(int(count), 2 * N)
    if N == 2:
        count = 4 * math.ceil(count / 4)
        t = 2 * np.pi * np.arange(count) / count
        base = np.stack([np.cos(t), np.sin(t)], axis=1)
    elif N == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (3 - math.sqrt(5)) * i
        s = np.sqrt(1 - z**2)
        base = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    else:
        pts = qmc.Halton(d=N, scramble=False).random(count + 1)[1:]
        base = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
        base /= np.linalg.norm(base, axis=1, keepdims=True)
    axes = np.concatenate([np.eye(N), -np.eye(N)])
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, N))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.concatenate([axes, base, rand])


# --- certificates ----------------------------------------------------------

@dataclass
class StructureCertificate:
    """Ellipticity and canceling verdicts; fields left ``None`` when not computed.

    Verdicts are relative to the recorded sphere sample (seed and size), not
    symbolic proofs.
    """

    elliptic: bool | None = None
    min_singular_value: float | None = None
    max_singular_value: float | None = None
    witness_xi: list | None = None
    tolerance: float | None = None
    canceling: bool | None = None
    intersection_dim: int | None = None
    intersection_basis: list = field(default_factory=list)
    subspace_tolerance: float | None = None
    sample_size: int | None = None
    seed: int | None = None
    basis: str = "numerical, relative to the sphere sample"

    def merge(self, other: "StructureCertificate") -> "StructureCertificate":
        out = StructureCertificate(**{k: v for k, v in vars(self).items()})
        for k, v in vars(other).items():
            if v is not None and getattr(out, k) in (None, []):
                setattr(out, k, v)
        return out

    def to_document(self) -> dict:
        d = dict(vars(self))
        d["intersection_basis"] = [_complex_list(v) for v in self.intersection_basis]
        return d


@dataclass
class CocancelingCertificate:
    cocanceling: bool
    intersection_dim: int
    intersection_basis: list
    sample_size: int
    subspace_tolerance: float
    seed: int
    basis: str = "numerical, relative to the sphere sample"

    def to_document(self) -> dict:
        d = dict(vars(self))
        d["intersection_basis"] = [_complex_list(v) for v in self.intersection_basis]
        return d


def _complex_list(v):
    v = np.asarray(v)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def _min_singular(mats: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(mats, compute_uv=False)
    if mats.shape[-1] > mats.shape[-2]:
        # more unknowns than equations: injectivity is impossible
        return np.zeros(mats.shape[:-2]), s.max(axis=-1)
    return s[..., -1], s.max(axis=-1)


def check_ellipticity(op: HomogeneousOperator, sphere_sample_count: int = 256, tol: float = 1e-8,
                      seed: int = 0, refine: bool = True) -> StructureCertificate:
    """Smallest singular value of ``A(xi)`` over the unit sphere.

    ``tol`` is relative: the threshold is ``tol`` times the largest singular
    value seen.  With ``refine`` the three best sample points are polished by
    a Nelder-Mead search on the sphere; the search is skipped when the
    sampled minimum is already flat (within 1e-6 of the median).
    """
    if sphere_sample_count < 2 * op.dim_N:
        raise ValueError(f"sphere_sample_count must be >= 2N = {2 * op.dim_N}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    xi = sphere_sample(op.dim_N, sphere_sample_count, seed)
    smin, smax = _min_singular(op.symbol(xi))
    order = np.argsort(smin)
    best, witness = float(smin[order[0]]), xi[order[0]]
    flat = best >= (1 - 1e-6) * float(np.median(smin))
    if refine and best > 0 and not flat:
        def f(v):
            n = np.linalg.norm(v)
            return np.inf if n == 0 else float(_min_singular(op.symbol(v / n)[None])[0][0])
        for start in xi[order[:3]]:
            res = minimize(f, start, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 200 * op.dim_N})
            if res.fun < best:
                best, witness = float(res.fun), res.x / np.linalg.norm(res.x)
    scale = float(smax.max())
    threshold = tol * scale
    return StructureCertificate(
        elliptic=bool(best > threshold), min_singular_value=best, max_singular_value=scale,
        witness_xi=[float(v) for v in witness], tolerance=threshold,
        sample_size=len(xi), seed=seed)


def check_canceling(op: HomogeneousOperator, sphere_sample_count: int = 256, tol: float = 1e-8,
                    seed: int = 0) -> StructureCertificate:
    """Numerical intersection of the ranges ``A(xi)[E]`` over the sphere sample."""
    xi = sphere_sample(op.dim_N, sphere_sample_count, seed)
    if len(xi) == 0:
        raise ValueError("empty sphere sample")
    mats = op.symbol(xi)
    smin, smax = _min_singular(mats)
    if not np.all(smin > tol * smax.max()):
        warnings.warn("operator is not elliptic on the sample; canceling verdict still computed")
    threshold = tol * float(smax.max())
    bases = (subspace.range_basis(a, threshold) for a in mats)
    inter = subspace.intersect_all(bases, tol)
    return StructureCertificate(
        canceling=inter.shape[1] == 0, intersection_dim=int(inter.shape[1]),
        intersection_basis=[inter[:, j] for j in range(inter.shape[1])],
        subspace_tolerance=tol, sample_size=len(xi), seed=seed)


def certify(op: HomogeneousOperator, sphere_sample_count: int = 256, tol: float = 1e-8,
            seed: int = 0) -> StructureCertificate:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        canc = check_canceling(op, sphere_sample_count, tol, seed)
    return check_ellipticity(op, sphere_sample_count, tol, seed).merge(canc)


def _kernel_intersection(L: HomogeneousOperator, xi: np.ndarray, tol: float) -> np.ndarray:
    mats = L.symbol(xi)
    scale = float(np.linalg.svd(mats, compute_uv=False).max())
    bases = (subspace.null_basis(a, tol * scale) for a in mats)
    return subspace.intersect_all(bases, tol)


def check_cocanceling(L: HomogeneousOperator, sphere_sample_count: int = 256, tol: float = 1e-8,
                      seed: int = 0) -> CocancelingCertificate:
    """Numerical intersection of the kernels ``ker L(xi)`` over the sphere sample."""
    xi = sphere_sample(L.dim_N, sphere_sample_count, seed)
    if len(xi) == 0:
        raise ValueError("empty sphere sample")
    inter = _kernel_intersection(L, xi, tol)
    return CocancelingCertificate(
        cocanceling=inter.shape[1] == 0, intersection_dim=int(inter.shape[1]),
        intersection_basis=[inter[:, j] for j in range(inter.shape[1])],
        sample_size=len(xi), subspace_tolerance=tol, seed=seed)


@dataclass
class AnnihilatorReport:
    contained: list
    all_contained: bool
    max_relative_product: float
    kernel_intersection_dim: int
    range_intersection_dim: int
    intersections_agree: bool
    sample_size: int

    def to_document(self) -> dict:
        return dict(vars(self))


def verify_annihilator(A: HomogeneousOperator, L: HomogeneousOperator, sample=None,
                       tol: float = 1e-8, seed: int = 0) -> AnnihilatorReport:
    """Check ``A(xi)[E] in ker L(xi)`` per sampled xi and compare the two intersections."""
    if A.dim_N != L.dim_N or L.dimE != A.dimF:
        raise ValueError(f"dimension mismatch: A maps C^{A.dimE}->C^{A.dimF}, L expects C^{L.dimE}")
    xi = sphere_sample(A.dim_N, 64, seed) if sample is None else np.atleast_2d(np.asarray(sample, float))
    a = A.symbol(xi)
    lm = L.symbol(xi)
    la = np.linalg.norm(lm, axis=(-2, -1))
    aa = np.linalg.norm(a, axis=(-2, -1))
    if la.max() <= 1e-14 * max(aa.max(), 1.0):
        raise ValueError("L has trivial symbol")
    prod = np.linalg.norm(lm @ a, axis=(-2, -1))
    rel = prod / np.maximum(la * aa, np.finfo(float).tiny)
    contained = [bool(r <= tol) for r in rel]
    scale = float(np.linalg.svd(a, compute_uv=False).max())
    ranges = subspace.intersect_all((subspace.range_basis(m, tol * scale) for m in a), tol)
    kernels = _kernel_intersection(L, xi, tol)
    return AnnihilatorReport(
        contained=contained, all_contained=all(contained), max_relative_product=float(rel.max()),
        kernel_intersection_dim=int(kernels.shape[1]), range_intersection_dim=int(ranges.shape[1]),
        intersections_agree=subspace.same_subspace(kernels, ranges, 1e-6), sample_size=len(xi))


# --- spectral application --------------------------------------------------

def _apply_terms(coeffs, phase, u_hat, kgrid) -> np.ndarray:
    out = None
    for alpha, a in coeffs:
        mono = np.ones(kgrid.shape[1:], dtype=complex)
        for j, e in enumerate(alpha):
            if e:
                mono = mono * (1j * kgrid[j]) ** e
        term = np.einsum("fe,e...->f...", a, mono * u_hat)
        out = term if out is None else out + term
    return phase * out


def apply_operator(op: HomogeneousOperator, u: GridField) -> GridField:
    """``A(D)u`` by multiplying each Fourier mode by ``(ik)^alpha``."""
    if u.dim != op.dim_N or u.value_dim != op.dimE:
        raise ValueError(f"grid field (N={u.dim}, dim={u.value_dim}) does not match operator "
                         f"(N={op.dim_N}, dimE={op.dimE})")
    k = _grid.wavevector_grid(u.lo, u.hi, u.resolution)
    out = _apply_terms(op.coeffs.items(), 1.0, _grid.spectral(u.samples), k)
    return u.with_samples(_grid.physical(out))


def apply_adjoint(op: HomogeneousOperator, f: GridField) -> GridField:
    """Formal adjoint ``A*(D)f = sum (-1)^m a_alpha^H d^alpha f``."""
    if f.dim != op.dim_N or f.value_dim != op.dimF:
        raise ValueError(f"grid field (N={f.dim}, dim={f.value_dim}) does not match adjoint "
                         f"(N={op.dim_N}, dimF={op.dimF})")
    k = _grid.wavevector_grid(f.lo, f.hi, f.resolution)
    terms = [(alpha, a.conj().T) for alpha, a in op.coeffs.items()]
    out = _apply_terms(terms, (-1.0) ** op.order_m, _grid.spectral(f.samples), k)
    return f.with_samples(_grid.physical(out))


def symbol_on_grid(op: HomogeneousOperator, lo, hi, resolution) -> np.ndarray:
    """``A(k)`` on all FFT modes, shape ``(n_modes, dimF, dimE)`` (FFT order, C-flattened)."""
    k = _grid.wavevector_grid(lo, hi, resolution)
    return op.symbol(k.reshape(op.dim_N, -1).T)
