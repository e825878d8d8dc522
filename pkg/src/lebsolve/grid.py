"""Uniform periodic grids and the spectral helpers built on them.

A grid is a box ``[lo, hi)`` split into ``n_j`` nodes per axis, with nodes
at ``lo + i*h`` and ``h = (hi - lo)/n``.  Each node owns the cell of side
``h`` centred on it.  Transforms use angular wavenumbers
``k = 2*pi*fftfreq(n, h)`` so that ``d/dx`` is multiplication by ``i*k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def _as_vec(x, n=None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if n is not None and arr.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {arr.shape}")
    return arr


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridField:
    """Vector-valued samples on a periodic box.

    ``samples`` has shape ``(value_dim, n_1, ..., n_N)`` and is stored as
    complex.  ``padding_factor`` records how many times the data box was
    enlarged to build this grid (1 when unpadded).
    """

    lo: np.ndarray
    hi: np.ndarray
    samples: np.ndarray
    padding_factor: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lo = _as_vec(self.lo)
        hi = _as_vec(self.hi, lo.size)
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != lo.size + 1:
            raise ValueError("samples must have shape (value_dim, *resolution)")
        if np.any(hi <= lo):
            raise ValueError("box must satisfy hi > lo on every axis")
        for n in samples.shape[1:]:
            if not is_power_of_two(n):
                raise ValueError(f"resolution {samples.shape[1:]} is not a power of two per axis")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "samples", samples)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def value_dim(self) -> int:
        return self.samples.shape[0]

    @property
    def resolution(self) -> tuple:
        return self.samples.shape[1:]

    @property
    def spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / np.array(self.resolution)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def coords(self) -> list:
        return node_coords(self.lo, self.hi, self.resolution)

    def mesh(self) -> np.ndarray:
        return mesh(self.lo, self.hi, self.resolution)

    def with_samples(self, samples, **meta) -> "GridField":
        return GridField(self.lo, self.hi, samples, self.padding_factor, {**self.meta, **meta})

    def norm(self) -> np.ndarray:
        """Pointwise Euclidean norm over the value components."""
        return np.sqrt(np.sum(np.abs(self.samples) ** 2, axis=0))

    def integral(self) -> np.ndarray:
        return self.samples.reshape(self.value_dim, -1).sum(axis=1) * self.cell_volume

    def lp_norm(self, p: float) -> float:
        a = self.norm()
        if np.isinf(p):
            return float(a.max())
        return float((np.sum(a**p) * self.cell_volume) ** (1.0 / p))


def node_coords(lo, hi, resolution) -> list:
    lo = _as_vec(lo)
    hi = _as_vec(hi)
    return [lo[j] + (hi[j] - lo[j]) / n * np.arange(n) for j, n in enumerate(resolution)]


def mesh(lo, hi, resolution) -> np.ndarray:
    """Node coordinates stacked as an array of shape ``(N, *resolution)``."""
    return np.stack(np.meshgrid(*node_coords(lo, hi, resolution), indexing="ij"))


def wavenumbers(lo, hi, resolution) -> list:
    lo = _as_vec(lo)
    hi = _as_vec(hi)
    return [2 * np.pi * np.fft.fftfreq(n, d=(hi[j] - lo[j]) / n) for j, n in enumerate(resolution)]


def wavevector_grid(lo, hi, resolution) -> np.ndarray:
    """Wavevectors as an array of shape ``(N, *resolution)`` in FFT order."""
    return np.stack(np.meshgrid(*wavenumbers(lo, hi, resolution), indexing="ij"))


def spectral(samples: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, samples.ndim))
    return np.fft.fftn(samples, axes=axes)


def physical(coeffs: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, coeffs.ndim))
    return np.fft.ifftn(coeffs, axes=axes)


def centered_box(half_width, resolution, dim=None):
    """Box ``[-a, a)^N`` with the origin on a node (needs even resolution)."""
    if np.isscalar(resolution):
        resolution = (int(resolution),) * int(dim)
    a = np.broadcast_to(np.asarray(half_width, dtype=float), (len(resolution),))
    return -a.copy(), a.copy(), tuple(int(n) for n in resolution)


def from_function(fn: Callable, lo, hi, resolution, padding_factor=1) -> GridField:
    """Sample ``fn(x)`` where ``x`` has shape ``(N, *resolution)``.

    ``fn`` returns an array of shape ``(value_dim, *resolution)`` or
    ``resolution`` for scalar fields.
    """
    x = mesh(lo, hi, resolution)
    vals = np.asarray(fn(x))
    if vals.shape == tuple(resolution):
        vals = vals[None]
    return GridField(lo, hi, vals, padding_factor)


def zeros(lo, hi, resolution, value_dim=1) -> GridField:
    return GridField(lo, hi, np.zeros((value_dim, *resolution), dtype=complex))


def padded_box(lo, hi, resolution, factor: int):
    """Enlarge a box about its centre by an integer factor, keeping nodes aligned."""
    lo = _as_vec(lo)
    hi = _as_vec(hi)
    factor = int(factor)
    if factor < 1:
        raise ValueError("padding factor must be >= 1")
    res = np.array(resolution)
    new_res = res * factor
    if factor > 1 and np.any(((factor - 1) * res) % 2):
        raise ValueError("resolution must be even to pad with node alignment")
    h = (hi - lo) / res
    offset = (factor - 1) * res // 2
    new_lo = lo - offset * h
    new_hi = new_lo + new_res * h
    return new_lo, new_hi, tuple(int(n) for n in new_res), tuple(int(o) for o in offset)


def node_offset(base_lo, spacing, target_lo) -> tuple:
    """Integer node offset of ``base_lo`` inside a grid starting at ``target_lo``."""
    d = (np.asarray(base_lo) - np.asarray(target_lo)) / np.asarray(spacing)
    off = np.rint(d)
    if np.max(np.abs(d - off)) > 1e-8:
        raise ValueError("grids are not node-aligned")
    return tuple(int(o) for o in off)


def embed(field: GridField, factor: int) -> GridField:
    """Zero-extend a field onto the box enlarged by ``factor``."""
    lo, hi, res, off = padded_box(field.lo, field.hi, field.resolution, factor)
    out = np.zeros((field.value_dim, *res), dtype=complex)
    sl = (slice(None),) + tuple(slice(o, o + n) for o, n in zip(off, field.resolution))
    out[sl] = field.samples
    return GridField(lo, hi, out, field.padding_factor * int(factor), dict(field.meta))


def embed_samples(samples, base_lo, spacing, target_lo, target_res) -> np.ndarray:
    """Place ``samples`` (value_dim, *res) into a zero array on a target grid."""
    off = node_offset(base_lo, spacing, target_lo)
    out = np.zeros((samples.shape[0], *target_res), dtype=complex)
    sl = []
    for o, n, nt in zip(off, samples.shape[1:], target_res):
        if o < 0 or o + n > nt:
            raise ValueError("base grid does not fit inside the target grid")
        sl.append(slice(o, o + n))
    out[(slice(None),) + tuple(sl)] = samples
    return out


def restrict(field: GridField, lo, resolution) -> GridField:
    """Extract the node-aligned sub-box starting at ``lo``."""
    off = node_offset(lo, field.spacing, field.lo)
    sl = (slice(None),) + tuple(slice(o, o + n) for o, n in zip(off, resolution))
    lo = _as_vec(lo)
    hi = lo + field.spacing * np.array(resolution)
    return GridField(lo, hi, field.samples[sl].copy(), 1, dict(field.meta))


def aliasing_fraction(samples: np.ndarray, keep: float = 2.0 / 3.0) -> float:
    """Fraction of spectral energy outside the central ``keep`` band."""
    c = spectral(samples)
    total = np.sum(np.abs(c) ** 2)
    if total == 0:
        return 0.0
    mask = np.ones(samples.shape[1:], dtype=bool)
    for j, n in enumerate(samples.shape[1:]):
        idx = np.abs(np.fft.fftfreq(n, d=1.0 / n))
        shape = [1] * (samples.ndim - 1)
        shape[j] = n
        mask &= (idx <= keep * n / 2).reshape(shape)
    return float(np.sum(np.abs(c[:, ~mask]) ** 2) / total)


def radii(lo, hi, resolution, center: Sequence[float] | None = None) -> np.ndarray:
    x = mesh(lo, hi, resolution)
    if center is not None:
        x = x - np.asarray(center, dtype=float).reshape((-1,) + (1,) * (x.ndim - 1))
    return np.sqrt(np.sum(x**2, axis=0))
