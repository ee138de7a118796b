"""Gurvits' randomized permanent estimator (Glynn form, real +-1 signs).

For a uniformly random sign vector ``x`` with ``x_1 = 1`` the quantity
``prod(x) * prod_i (sum_j x_j X_ji)`` is an unbiased estimator of
``Per(X)`` bounded in modulus by ``||X||^M`` (spectral norm). Averaging
``N = ceil(2 ln(2/delta) / eps^2)`` draws gives an additive error of at most
``eps ||X||^M`` with probability ``1 - delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._streams import partitioned_sum
from .errors import InvalidInput, NotSquare
from .exact import glynn_terms


@dataclass(frozen=True)
class GurvitsResult:
    estimate: complex
    n_samples: int
    epsilon: float
    delta: float
    seed: int
    error_bound: float
    workers: int = 1


def _as_square(mat):
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"square check: got shape {a.shape}")
    return a


def _draw_signs(rng, m, size):
    x = 1.0 - 2.0 * rng.integers(0, 2, size=(size, m))
    x[:, 0] = 1.0
    return x


def glynn_sample(mat, rng: np.random.Generator) -> complex:
    """One Glynn draw: ``prod(x) * prod_i (sum_j x_j mat[j, i])``."""
    a = _as_square(mat)
    return complex(glynn_terms(a, _draw_signs(rng, a.shape[0], 1))[0])


def gurvits_sample_size(epsilon: float, delta: float) -> int:
    return math.ceil(2.0 * math.log(2.0 / delta) / epsilon**2)


def gurvits_estimate(mat, epsilon: float, delta: float, seed: int = 0, workers: int = 1) -> GurvitsResult:
    """Sample mean of Glynn draws with the Hoeffding sample size.

    The seed and worker conventions match
    :func:`permest.estimator.estimate_permanent`.
    """
    a = _as_square(mat)
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise InvalidInput(f"epsilon check: epsilon = {epsilon} must be finite and > 0")
    if not (0.0 < delta < 1.0):
        raise InvalidInput(f"delta check: delta = {delta} must lie in (0, 1)")
    m = a.shape[0]
    n = gurvits_sample_size(epsilon, delta)

    def draw(rng, size):
        return glynn_terms(a, _draw_signs(rng, m, size))

    total = partitioned_sum(draw, n, seed, workers)
    norm = np.float64(np.linalg.norm(a, 2)) if m else np.float64(0.0)
    with np.errstate(over="ignore"):
        bound = float(epsilon * norm**m)
    return GurvitsResult(
        estimate=complex(total) / n,
        n_samples=n,
        epsilon=epsilon,
        delta=delta,
        seed=seed,
        error_bound=bound,
        workers=workers,
    )
