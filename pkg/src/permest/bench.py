"""Head-to-head runs of the coherent-state estimator and Gurvits' estimator.

Each row draws one matrix from a family, runs both estimators at the same
``(epsilon, delta)`` and, up to ``M = 12``, measures their errors against the
exact Ryser permanent. The coherent-state estimator uses the S1 mode when the
matrix is in S1 (its error budget is then ``eps (l lambda_max)^M``);
otherwise it runs in absolute mode with Gurvits' budget ``eps lambda_max^M``.
"""

from __future__ import annotations

import time

import numpy as np

from .errors import SampleOverflow
from .estimator import DEFAULT_SAMPLE_CAP, ErrorMode, estimate_permanent, make_scale_plan, optimize_scale
from .exact import permanent_ryser
from .gurvits import gurvits_estimate
from .regimes import Verdict, check_s1
from .spectra import gen_from_spectrum, gen_random_hpsm, spectral_decompose, validate_hpsm

FAMILIES = ("rank-one", "diagonal", "random")
EXACT_MAX_M = 12


def family_matrix(family: str, m: int, lambda_max: float, seed: int):
    """Member of size `m` of a benchmark family, deterministic in `seed`."""
    if family == "rank-one":
        return gen_from_spectrum([lambda_max] + [0.0] * (m - 1), seed)
    if family == "diagonal":
        d = np.random.default_rng(seed).uniform(0.0, lambda_max, m)
        d[0] = lambda_max
        return validate_hpsm(np.diag(d))
    if family == "random":
        return gen_random_hpsm(m, lambda_max, seed)
    raise ValueError(f"unknown family {family!r}, expected one of {FAMILIES}")


def bench_row(mat, epsilon, delta, seed=0, workers=1, sample_cap=DEFAULT_SAMPLE_CAP) -> dict:
    dec = spectral_decompose(mat)
    m = dec.m
    lam_max = dec.lambda_max
    budget = epsilon * lam_max**m
    row = {"m": m, "lambda_max": lam_max, "gurvits_budget": budget}

    exact = permanent_ryser(mat.entries).real if m <= EXACT_MAX_M else None
    row["exact"] = exact

    plan = make_scale_plan(dec, optimize_scale(dec))
    in_s1 = check_s1(dec, plan).verdict is Verdict.HOLDS
    mode = ErrorMode.gurvits_beating(epsilon) if in_s1 else ErrorMode.absolute(budget)
    row["s1"] = in_s1
    row["cs_mode"] = mode.kind.value

    t0 = time.perf_counter()
    try:
        cs = estimate_permanent(mat, mode, delta, seed=seed, workers=workers, sample_cap=sample_cap)
    except SampleOverflow:
        cs = None
    row["cs_seconds"] = time.perf_counter() - t0
    row["cs_samples"] = cs.n_samples if cs else None
    row["cs_estimate"] = cs.estimate if cs else None
    row["cs_budget"] = cs.error_bound if cs else None
    row["cs_error"] = abs(cs.estimate - exact) if (cs and exact is not None) else None

    t0 = time.perf_counter()
    gv = gurvits_estimate(mat.entries, epsilon, delta, seed=seed, workers=workers)
    row["gurvits_seconds"] = time.perf_counter() - t0
    row["gurvits_samples"] = gv.n_samples
    row["gurvits_estimate"] = gv.estimate.real
    row["gurvits_error"] = abs(gv.estimate - exact) if exact is not None else None
    return row


def run_bench(
    sizes,
    family="rank-one",
    lambda_max=0.9,
    epsilon=0.1,
    delta=0.05,
    seed=0,
    workers=1,
    sample_cap=DEFAULT_SAMPLE_CAP,
) -> list[dict]:
    """One :func:`bench_row` per size; matrix ``M`` is drawn with seed
    ``seed + M``."""
    return [
        bench_row(family_matrix(family, m, lambda_max, seed + m), epsilon, delta, seed, workers, sample_cap)
        for m in sizes
    ]


TABLE_COLUMNS = (
    ("m", "{}"),
    ("s1", "{}"),
    ("exact", "{:.4e}"),
    ("cs_samples", "{}"),
    ("cs_error", "{:.3e}"),
    ("cs_budget", "{:.3e}"),
    ("gurvits_samples", "{}"),
    ("gurvits_error", "{:.3e}"),
    ("gurvits_budget", "{:.3e}"),
    ("cs_seconds", "{:.3f}"),
    ("gurvits_seconds", "{:.3f}"),
)


def format_table(rows) -> str:
    """Right-aligned text table of the main benchmark columns."""
    cells = [[name for name, _ in TABLE_COLUMNS]]
    for row in rows:
        cells.append([fmt.format(row[name]) if row.get(name) is not None else "-" for name, fmt in TABLE_COLUMNS])
    widths = [max(len(r[k]) for r in cells) for k in range(len(TABLE_COLUMNS))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)
