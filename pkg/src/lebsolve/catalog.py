"""Standard operators used in tests, acceptance checks and CLI presets."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .operators import HomogeneousOperator, MultiIndex, multi_indices, multinomial


def _unit(N: int, j: int, k: int = 1) -> MultiIndex:
    e = [0] * N
    e[j] = k
    return MultiIndex(e)


def gradient(N: int) -> HomogeneousOperator:
    """``u -> (d_1 u, ..., d_N u)`` for scalar u."""
    coeffs = {}
    for j in range(N):
        a = np.zeros((N, 1))
        a[j, 0] = 1.0
        coeffs[_unit(N, j)] = a
    return HomogeneousOperator(N, 1, 1, N, coeffs, f"grad{N}")


def divergence(N: int) -> HomogeneousOperator:
    coeffs = {}
    for j in range(N):
        a = np.zeros((1, N))
        a[0, j] = 1.0
        coeffs[_unit(N, j)] = a
    return HomogeneousOperator(N, 1, N, 1, coeffs, f"div{N}")


def laplacian(N: int) -> HomogeneousOperator:
    return HomogeneousOperator(N, 2, 1, 1, {_unit(N, j, 2): [[1.0]] for j in range(N)}, f"laplace{N}")


def partial(N: int, j: int = 0) -> HomogeneousOperator:
    return HomogeneousOperator(N, 1, 1, 1, {_unit(N, j): [[1.0]]}, f"d{j + 1}")


def total_derivative(N: int, m: int) -> HomogeneousOperator:
    """All order-m derivatives of a scalar, one row per multi-index.

    Row ``alpha`` carries ``sqrt(m!/alpha!)`` so the Euclidean norm of the
    output equals the norm of the full symmetric tensor ``D^m u``; the symbol
    then satisfies ``|A(xi)| = |xi|^m``.
    """
    alphas = multi_indices(N, m)
    coeffs = {}
    for r, alpha in enumerate(alphas):
        a = np.zeros((len(alphas), 1))
        a[r, 0] = math.sqrt(multinomial(alpha))
        coeffs[alpha] = a
    return HomogeneousOperator(N, m, 1, len(alphas), coeffs, f"D{m}_{N}")


def curl_antisym(N: int) -> HomogeneousOperator:
    """``f -> (d_i f_j - d_j f_i)_{i<j}``, whose symbol is ``xi ^ f``."""
    pairs = list(itertools.combinations(range(N), 2))
    coeffs = {}
    for j in range(N):
        a = np.zeros((len(pairs), N))
        for r, (p, q) in enumerate(pairs):
            if p == j:
                a[r, q] = 1.0
            elif q == j:
                a[r, p] = -1.0
        coeffs[_unit(N, j)] = a
    return HomogeneousOperator(N, 1, N, len(pairs), coeffs, f"curl{N}")


PRESETS = {
    "grad": gradient,
    "div": divergence,
    "laplace": laplacian,
    "curl": curl_antisym,
}
