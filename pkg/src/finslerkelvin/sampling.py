"""Deterministic low-discrepancy point generation.

Everything here is pure integer/float arithmetic with no RNG state, so the
same arguments always reproduce the same points bit for bit, regardless of
platform, thread count, or call order.
"""

from __future__ import annotations

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _radical_inverse(index: int, base: int) -> float:
    inv = 0.0
    scale = 1.0 / base
    while index > 0:
        index, digit = divmod(index, base)
        inv += digit * scale
        scale /= base
    return inv


def halton(count: int, dim: int, skip: int = 0) -> np.ndarray:
    """First `count` Halton points in (0, 1)^dim, starting at index skip+1.

    The index offset lets callers carve disjoint deterministic subsequences
    out of the same global sequence (used for seed-dependent sample plans).
    """
    if dim > len(_PRIMES):
        raise ValueError(f"halton supports at most {len(_PRIMES)} dimensions")
    if count < 0 or skip < 0:
        raise ValueError("count and skip must be non-negative")
    out = np.empty((count, dim))
    for i in range(count):
        idx = skip + i + 1
        for j in range(dim):
            out[i, j] = _radical_inverse(idx, _PRIMES[j])
    return out


def cube_directions(count: int, dim: int, skip: int = 0) -> np.ndarray:
    """Deterministic spread of nonzero directions in the cube [-1, 1]^dim.

    Points are not Euclidean-normalised; callers rescale by the norm they
    care about. No entry of the Halton sequence maps to the zero vector
    (that would need every coordinate to equal 1/2 simultaneously, which the
    mixed-base construction never produces for dim >= 2).
    """
    return 2.0 * halton(count, dim, skip=skip) - 1.0
