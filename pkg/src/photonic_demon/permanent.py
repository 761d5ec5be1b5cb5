"""Matrix permanents."""

from __future__ import annotations

import itertools

import numpy as np

from photonic_demon.errors import InvalidDimensionError, ProblemSizeError

MAX_RYSER_SIZE = 24


def permanent(matrix: np.ndarray) -> complex | float:
    """
    Permanent of a square matrix by Ryser's formula in Gray-code order, ``O(2^n n)``.

    Consecutive column subsets differ by a single column, so the row sums are
    updated with one vector addition per step instead of being recomputed.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n > MAX_RYSER_SIZE:
        raise ProblemSizeError(f"{n}x{n} permanent is too large for exact evaluation")
    real = not np.iscomplexobj(a)
    a = a.astype(complex)
    row_sums = np.zeros(n, dtype=complex)
    in_subset = np.zeros(n, dtype=bool)
    size = 0
    total = 0j
    for k in range(1, 2**n):
        col = (k & -k).bit_length() - 1
        if in_subset[col]:
            row_sums -= a[:, col]
            size -= 1
        else:
            row_sums += a[:, col]
            size += 1
        in_subset[col] = not in_subset[col]
        total += (-1) ** size * np.prod(row_sums)
    result = (-1) ** n * total
    return float(result.real) if real else complex(result)


def permanent_naive(matrix: np.ndarray) -> complex | float:
    """Definition-level permanent ``sum_sigma prod_i a[i, sigma(i)]``; reference for small ``n``."""
    a = np.asarray(matrix)
    n = a.shape[0]
    total = 0
    for sigma in itertools.permutations(range(n)):
        prod = 1
        for i in range(n):
            prod = prod * a[i, sigma[i]]
        total = total + prod
    return total
