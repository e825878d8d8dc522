"""Orthonormal bases, principal angles and iterated subspace intersection."""
from __future__ import annotations

import numpy as np


def range_basis(mat: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal basis (columns) of the range, singular values > threshold."""
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    return u[:, s > threshold]


def null_basis(mat: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel, singular values <= threshold."""
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T


def principal_cosines(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros(0)
    s = np.linalg.svd(U.conj().T @ V, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def intersect(U: np.ndarray, V: np.ndarray, tol: float) -> np.ndarray:
    """Intersection of span(U) and span(V) for orthonormal U, V.

    Directions whose principal angle has ``1 - cos(theta) <= tol`` are kept.
    """
    dim = U.shape[0]
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros((dim, 0), dtype=complex)
    y, s, _ = np.linalg.svd(U.conj().T @ V)
    keep = s >= 1.0 - tol
    if not np.any(keep):
        return np.zeros((dim, 0), dtype=complex)
    q, _ = np.linalg.qr(U @ y[:, : len(s)][:, keep])
    return q


def intersect_all(bases, tol: float) -> np.ndarray:
    """Pairwise intersections in order; stops early at the zero subspace."""
    it = iter(bases)
    acc = next(it)
    for b in it:
        if acc.shape[1] == 0:
            break
        acc = intersect(acc, b, tol)
    return acc


def same_subspace(U: np.ndarray, V: np.ndarray, tol: float) -> bool:
    if U.shape[1] != V.shape[1]:
        return False
    if U.shape[1] == 0:
        return True
    return bool(np.all(principal_cosines(U, V) >= 1.0 - tol))
