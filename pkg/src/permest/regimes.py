"""Spectral efficiency regimes of the coherent-state estimator and the
spectral bounds on the permanent that come with them.

All quantities are functions of the spectrum and the scale ``s`` of a
:class:`~permest.estimator.ScalePlan`. Writing ``C = s / lambda_max`` covers
both the rescaled case (``C`` is the rescale constant) and the unscaled
case ``lambda_max < 1`` (``s = 1`` so ``C = 1 / lambda_max``).

S1  ``a >= lambda_max C^2 / e``: additive error ``eps (l lambda_max)^M``,
    ``l <= 1``, exponentially smaller than Gurvits' ``eps lambda_max^M``.
S2  ``a >= lambda_max^2 C^2 / e`` with ``lambda_max >= 1``: additive error
    ``eps k^M``, ``k <= 1``.
S3  ``lambda_max^4 C^4 d / (lambda_min^2 e^2) <= 1``: error
    ``eps sqrt(Per)``.

Here ``a`` and ``d`` are the geometric means of ``s - lambda_i`` and
``lambda_i / (s - lambda_i)^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure, ZeroEigenvalue
from .spectra import HpsmMatrix, SpectralDecomposition, spectral_decompose, validate_hpsm

E = math.e
EXACT_MAX_M = 12


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class S1Check:
    verdict: Verdict
    l: float
    a: float
    threshold: float
    necessary: dict[str, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class S2Check:
    verdict: Verdict
    k: float
    a: float
    threshold: float
    necessary: dict[str, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class S3Check:
    verdict: Verdict
    ratio: float


@dataclass(frozen=True)
class RegimeReport:
    """Everything :func:`analyze` computes about one matrix.

    Bounds are natural logarithms. ``f`` is set only when ``lambda_max < 1``
    and ``d`` only when the matrix is positive definite.
    """

    m: int
    a: float
    d: float | None
    f: float | None
    s1: S1Check
    s2: S2Check
    s3: S3Check
    necessary_checks: dict[str, bool]
    upper_bound: float
    lower_bound: float
    c_used: float
    scale: float
    mean_lambda: float
    lambda_max: float
    lambda_min: float
    exact_permanent: float | None = None


def geo_mean_a(spectrum, s: float) -> float:
    """Geometric mean of ``s - lambda_i``."""
    lam = np.asarray(spectrum, dtype=float)
    return math.exp(math.fsum(np.log(s - lam)) / lam.size)


def geo_mean_d(spectrum, s: float) -> float:
    """Geometric mean of ``lambda_i / (s - lambda_i)^2``; with ``s = 1`` this
    is the quantity ``f`` of the unscaled case."""
    lam = np.asarray(spectrum, dtype=float)
    if np.any(lam <= 0):
        raise ZeroEigenvalue("d check: needs lambda_min > 0")
    return math.exp(math.fsum(np.log(lam) - 2 * np.log(s - lam)) / lam.size)


def _s1(lam, s):
    lam_max = float(lam[0])
    c = s / lam_max
    mean = float(np.mean(lam))
    a = geo_mean_a(lam, s)
    threshold = lam_max * c * c / E
    necessary = {
        "mean_bound_s1": mean <= lam_max * c * (1 - c / E),
        "c_le_e": c <= E,
    }
    # the e/4 ceiling on the mean presumes lambda_max <= 1
    if lam_max <= 1.0:
        necessary["mean_le_e_over_4"] = mean <= E / 4
    holds = a >= threshold
    return S1Check(Verdict.HOLDS if holds else Verdict.FAILS, threshold / a, a, threshold, necessary)


def _s2(lam, s):
    lam_max = float(lam[0])
    c = s / lam_max
    mean = float(np.mean(lam))
    a = geo_mean_a(lam, s)
    threshold = (lam_max * c) ** 2 / E
    necessary = {
        "mean_bound_s2": mean <= lam_max * c * (1 - lam_max * c / E),
        "lambda_max_le_e_over_c": lam_max <= E / c,
        "c_le_e": c <= E,
    }
    if lam_max < 1.0:
        verdict = Verdict.NOT_APPLICABLE
    else:
        verdict = Verdict.HOLDS if a >= threshold else Verdict.FAILS
    return S2Check(verdict, threshold / a, a, threshold, necessary)


def _s3_ratio(lam, s):
    lam_min = float(lam[-1])
    if lam_min <= 0:
        raise ZeroEigenvalue("S3 check: needs lambda_min > 0")
    d = geo_mean_d(lam, s)
    return s**4 * d / (lam_min**2 * E**2)


def check_s1(dec: SpectralDecomposition, plan) -> S1Check:
    """S1 verdict with ``l = lambda_max C^2 / (e a)`` and the necessary
    conditions on the eigenvalue mean and on ``C``."""
    return _s1(dec.spectrum, plan.s)


def check_s2(dec: SpectralDecomposition, plan) -> S2Check:
    """S2 verdict with ``k = lambda_max^2 C^2 / (e a)``.

    Reported as not applicable when ``lambda_max < 1``.
    """
    return _s2(dec.spectrum, plan.s)


def check_s3(dec: SpectralDecomposition, plan) -> S3Check:
    ratio = _s3_ratio(dec.spectrum, plan.s)
    return S3Check(Verdict.HOLDS if ratio <= 1.0 else Verdict.FAILS, ratio)


def permanent_upper_bound(dec: SpectralDecomposition, plan) -> float:
    """``ln`` of ``(s^2 / (a e))^M``, valid for every HPSM."""
    lam = dec.spectrum
    s = plan.s
    return lam.size * (2 * math.log(s) - math.log(geo_mean_a(lam, s)) - 1.0)


def permanent_lower_bound(dec: SpectralDecomposition) -> float:
    """``ln`` of ``lambda_min^(2M) / prod(lambda_i)``; ``-inf`` for singular
    matrices."""
    lam = dec.spectrum
    if lam[-1] <= 0:
        return -math.inf
    return 2 * lam.size * math.log(lam[-1]) - math.fsum(np.log(lam))


def analyze(
    mat,
    c: float | str = "auto",
    force_rescale: bool = False,
    exact: bool = True,
) -> RegimeReport:
    """Evaluate every regime condition and both bounds for `mat`.

    For ``M <= 12`` (and ``exact=True``) the Ryser permanent is attached and
    checked to lie between the bounds.
    """
    # imported here: estimator depends on this module
    from .estimator import make_scale_plan, optimize_scale
    from .exact import permanent_ryser

    if not isinstance(mat, HpsmMatrix):
        mat = validate_hpsm(mat)
    dec = spectral_decompose(mat)
    if c == "auto":
        c = optimize_scale(dec, force_rescale=force_rescale)
    plan = make_scale_plan(dec, c, force_rescale=force_rescale)
    lam = dec.spectrum
    s = plan.s

    positive = dec.lambda_min > 0
    d = geo_mean_d(lam, s) if positive else None
    f = geo_mean_d(lam, 1.0) if (positive and dec.lambda_max < 1.0) else None
    s1 = check_s1(dec, plan)
    s2 = check_s2(dec, plan)
    s3 = check_s3(dec, plan) if positive else S3Check(Verdict.NOT_APPLICABLE, math.nan)
    necessary = {**s1.necessary, **s2.necessary}
    upper = permanent_upper_bound(dec, plan)
    lower = permanent_lower_bound(dec)

    per = None
    if exact and dec.m <= EXACT_MAX_M:
        per = permanent_ryser(mat.entries).real
        log_per = math.log(per) if per > 0 else -math.inf
        # 1e-9 relative slack, expressed in logs
        if log_per > upper + 1e-9 or (lower > -math.inf and log_per < lower - 1e-9):
            raise NumericalFailure(
                f"bound check: ln Per = {log_per:.6g} outside [{lower:.6g}, {upper:.6g}]"
            )

    return RegimeReport(
        m=dec.m,
        a=geo_mean_a(lam, s),
        d=d,
        f=f,
        s1=s1,
        s2=s2,
        s3=s3,
        necessary_checks=necessary,
        upper_bound=upper,
        lower_bound=lower,
        c_used=plan.c_effective,
        scale=s,
        mean_lambda=dec.mean_lambda,
        lambda_max=dec.lambda_max,
        lambda_min=dec.lambda_min,
        exact_permanent=per,
    )
