"""Deterministic per-worker random streams and compensated accumulation.

Sample ``j`` belongs to worker ``j % workers``. Worker ``w`` draws from a
Philox stream spawned from ``SeedSequence(seed)`` at index ``w`` and keeps
its own exactly-rounded partial sums; partials are merged in worker order.
The result depends on ``(seed, workers)`` only, never on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InvalidInput

BATCH = 1 << 15


def worker_generators(seed: int, workers: int) -> list[np.random.Generator]:
    if seed < 0:
        raise InvalidInput(f"seed check: seed = {seed} must be >= 0")
    if workers < 1:
        raise InvalidInput(f"workers check: workers = {workers} must be >= 1")
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def worker_counts(n: int, workers: int) -> list[int]:
    return [max(0, (n - w + workers - 1) // workers) for w in range(workers)]


def fsum_complex(values) -> complex:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def _worker_total(draw, rng, count):
    partials = []
    done = 0
    while done < count:
        b = min(BATCH, count - done)
        partials.append(fsum_complex(draw(rng, b)))
        done += b
    return fsum_complex(partials) if partials else 0.0


def _merge_log(parts):
    """Combine ``(shift, total)`` pairs meaning ``total * exp(shift)``."""
    parts = [(m, t) for m, t in parts if t > 0.0]
    if not parts:
        return -math.inf, 0.0
    top = max(m for m, _ in parts)
    return top, math.fsum(t * math.exp(m - top) for m, t in parts)


def _worker_logsum(draw_log, rng, count):
    parts = []
    done = 0
    while done < count:
        b = min(BATCH, count - done)
        v = draw_log(rng, b)
        done += b
        top = float(v.max())
        if top > -math.inf:
            parts.append((top, math.fsum(np.exp(v - top))))
    return _merge_log(parts)


def partitioned_logsumexp(draw_log, n: int, seed: int, workers: int = 1) -> float:
    """``ln sum exp(v)`` over `n` log-values from ``draw_log(rng, size)``,
    with the same stream and merge contract as :func:`partitioned_sum`."""
    gens = worker_generators(seed, workers)
    counts = worker_counts(n, workers)
    if workers == 1:
        totals = [_worker_logsum(draw_log, gens[0], counts[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            totals = list(pool.map(lambda w: _worker_logsum(draw_log, gens[w], counts[w]), range(workers)))
    top, total = _merge_log(totals)
    return top + math.log(total) if total > 0.0 else -math.inf


def partitioned_sum(draw, n: int, seed: int, workers: int = 1):
    """Sum of `n` values produced by ``draw(rng, batch_size) -> ndarray``.

    The work is split over `workers` threads following the module-level
    stream contract.
    """
    gens = worker_generators(seed, workers)
    counts = worker_counts(n, workers)
    if workers == 1:
        totals = [_worker_total(draw, gens[0], counts[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            totals = list(pool.map(lambda w: _worker_total(draw, gens[w], counts[w]), range(workers)))
    return fsum_complex(totals)
