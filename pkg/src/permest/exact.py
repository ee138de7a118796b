"""Exact permanents for small matrices.

Three independent routes are provided so they can check one another:
enumeration of permutations, Ryser's inclusion-exclusion formula and the
deterministic Glynn expansion over sign vectors. The exponential outer
sums are accumulated with :func:`math.fsum` on the real and imaginary parts.
"""

from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from .errors import DimensionTooLarge, NotSquare

NAIVE_MAX_M = 10
SUBSET_MAX_M = 24

# number of columns/rows enumerated as one vectorised block
_BLOCK_BITS = 12


class ExactMethod(str, enum.Enum):
    NAIVE = "naive"
    RYSER = "ryser"
    GLYNN = "glynn"


def _as_square(mat):
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"square check: got shape {a.shape}")
    return a


def _fsum_complex(values) -> complex:
    values = np.asarray(values)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _subset_bits(k):
    """All 2**k subsets of k items as a (2**k, k) 0/1 array."""
    idx = np.arange(2**k, dtype=np.int64)[:, None]
    return ((idx >> np.arange(k)) & 1).astype(float)


def _gray_flips(n):
    """Yield the bit index flipped at each step of the reflected Gray code."""
    for step in range(1, 2**n):
        yield (step & -step).bit_length() - 1


def permanent_naive(mat) -> complex:
    """Sum over all permutations of the product of selected entries."""
    a = _as_square(mat)
    m = a.shape[0]
    if m > NAIVE_MAX_M:
        raise DimensionTooLarge(f"naive permanent: M = {m} > {NAIVE_MAX_M}")
    if m == 0:
        return 1.0 + 0j
    rows = np.arange(m)
    perms = itertools.permutations(range(m))
    partials = []
    while True:
        chunk = np.array(list(itertools.islice(perms, 40320)), dtype=np.intp)
        if chunk.size == 0:
            break
        partials.append(_fsum_complex(np.prod(a[rows, chunk], axis=1)))
    return _fsum_complex(partials)


def permanent_ryser(mat) -> complex:
    """Ryser's formula with Gray-code subset iteration.

    ``Per A = (-1)^M sum_S (-1)^|S| prod_i sum_{j in S} a_ij``. Columns are
    split into a low block enumerated all at once and a high block walked in
    Gray-code order, so each high step costs one O(M) row-sum update.
    """
    a = _as_square(mat)
    m = a.shape[0]
    if m > SUBSET_MAX_M:
        raise DimensionTooLarge(f"ryser permanent: M = {m} > {SUBSET_MAX_M}")
    if m == 0:
        return 1.0 + 0j
    k = min(m, _BLOCK_BITS)
    bits = _subset_bits(k)
    low_sums = bits @ a[:, :k].T  # (2**k, m): row sums over each low subset
    low_sign = (-1.0) ** bits.sum(axis=1)
    high = a[:, k:]
    h = np.zeros(m, dtype=complex)
    in_set = np.zeros(m - k, dtype=bool)
    high_sign = 1.0

    partials = [_fsum_complex(low_sign * np.prod(low_sums, axis=1))]
    for b in _gray_flips(m - k):
        if in_set[b]:
            h -= high[:, b]
        else:
            h += high[:, b]
        in_set[b] = not in_set[b]
        high_sign = -high_sign
        block = np.prod(low_sums + h, axis=1)
        partials.append(high_sign * _fsum_complex(low_sign * block))
    return (-1) ** m * _fsum_complex(partials)


def glynn_terms(a, signs) -> np.ndarray:
    """Glynn summands ``prod(x) * prod_i (sum_j x_j a_ji)`` for a batch of
    sign vectors (rows of `signs`)."""
    signs = np.asarray(signs, dtype=float)
    return np.prod(signs, axis=1) * np.prod(signs @ a, axis=1)


def permanent_glynn_exact(mat) -> complex:
    """Deterministic Glynn expansion over the 2**(M-1) sign vectors with the
    first sign fixed to +1."""
    a = _as_square(mat)
    m = a.shape[0]
    if m > SUBSET_MAX_M:
        raise DimensionTooLarge(f"glynn permanent: M = {m} > {SUBSET_MAX_M}")
    if m == 0:
        return 1.0 + 0j
    free = m - 1
    k = min(free, _BLOCK_BITS)
    low_x = 1.0 - 2.0 * _subset_bits(k)  # (2**k, k) of +-1
    low_sign = np.prod(low_x, axis=1)
    # column sums with the first row and the low rows signed, high rows all +1
    base = a[0] + low_x @ a[1 : 1 + k]
    high = a[1 + k :]
    v = high.sum(axis=0)
    flipped = np.zeros(free - k, dtype=bool)
    high_sign = 1.0

    partials = [_fsum_complex(low_sign * np.prod(base + v, axis=1))]
    for b in _gray_flips(free - k):
        if flipped[b]:
            v += 2.0 * high[b]
        else:
            v -= 2.0 * high[b]
        flipped[b] = not flipped[b]
        high_sign = -high_sign
        partials.append(high_sign * _fsum_complex(low_sign * np.prod(base + v, axis=1)))
    return _fsum_complex(partials) / 2.0**free


def permanent(mat, method: ExactMethod | str = ExactMethod.RYSER) -> complex:
    method = ExactMethod(method)
    if method is ExactMethod.NAIVE:
        return permanent_naive(mat)
    if method is ExactMethod.GLYNN:
        return permanent_glynn_exact(mat)
    return permanent_ryser(mat)
