"""Seeded random test fields and cutoff profiles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grid as _grid
from .grid import GridField


def poly_bump(r, radius: float):
    """``(1 - (r/radius)^2)^3`` inside the ball, 0 outside; C^2 across the edge."""
    t = np.clip(1 - (np.asarray(r) / radius) ** 2, 0.0, None)
    return t**3


def smooth_bump(r, radius: float):
    """``exp(1 - 1/(1 - (r/radius)^2))``, C^infinity with value 1 at the centre."""
    s = (np.asarray(r, dtype=float) / radius) ** 2
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(1 - 1 / (1 - s[inside]))
    return out


def smoothstep_cutoff(t):
    """Radial cutoff: 1 for ``t <= 1/4``, 0 for ``t >= 1/2``, C^2 quintic in between."""
    tau = np.clip((np.asarray(t, dtype=float) - 0.25) / 0.25, 0.0, 1.0)
    return 1 - tau**3 * (10 - 15 * tau + 6 * tau**2)


def bandlimited(rng, resolution, value_dim: int, bandwidth: int, complex_values: bool = False) -> np.ndarray:
    """Gaussian Fourier coefficients on modes with every index ``|j| <= bandwidth``."""
    coeffs = np.zeros((value_dim, *resolution), dtype=complex)
    idx = [np.fft.fftfreq(n, 1.0 / n) for n in resolution]
    mask = np.ones(resolution, dtype=bool)
    for j, ix in enumerate(idx):
        shape = [1] * len(resolution)
        shape[j] = -1
        mask &= (np.abs(ix) <= bandwidth).reshape(shape)
    count = int(mask.sum())
    vals = rng.standard_normal((value_dim, count)) + 1j * rng.standard_normal((value_dim, count))
    coeffs[:, mask] = vals
    out = _grid.physical(coeffs)
    if not complex_values:
        out = out.real.astype(complex)
    return out / max(float(np.abs(out).max()), 1e-300)


@dataclass
class TestEnsemble:
    """Band-limited random fields times a C^2 bump of radius ``L/4`` at the box centre.

    Every member is supported in the inner half of the box.
    """

    __test__ = False  # not a pytest class

    seed: int
    count: int
    lo: np.ndarray
    hi: np.ndarray
    resolution: tuple
    value_dim: int
    bandwidth: int
    complex_values: bool = False
    fields: list = field(default_factory=list)

    @classmethod
    def generate(cls, count: int, lo, hi, resolution, value_dim: int = 1, seed: int = 0,
                 bandwidth: int | None = None, complex_values: bool = False) -> "TestEnsemble":
        if count < 1:
            raise ValueError("ensemble size must be positive")
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        resolution = tuple(int(n) for n in resolution)
        bw = max(1, min(resolution) // 8) if bandwidth is None else int(bandwidth)
        rng = np.random.default_rng(seed)
        centre = (lo + hi) / 2
        radius = float(np.min(hi - lo)) / 4
        envelope = poly_bump(_grid.radii(lo, hi, resolution, centre), radius)
        fields = [GridField(lo, hi, bandlimited(rng, resolution, value_dim, bw, complex_values) * envelope)
                  for _ in range(count)]
        return cls(seed, count, lo, hi, resolution, value_dim, bw, complex_values, fields)

    def __iter__(self):
        return iter(self.fields)

    def __len__(self):
        return len(self.fields)

    def describe(self) -> dict:
        return {"seed": self.seed, "count": self.count, "bandwidth": self.bandwidth,
                "resolution": list(self.resolution), "value_dim": self.value_dim,
                "envelope": "(1-|x-c|^2/rho^2)^3, rho = L/4"}
