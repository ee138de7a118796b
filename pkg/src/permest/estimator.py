"""Coherent-state Monte Carlo estimator for permanents of HPSMs.

For ``Lambda = U diag(lambda) U^H`` and a scale ``s > lambda_max``,

    Per(Lambda) = Z * E[p_cs(alpha)],   Z = s**(2M) / prod(s - lambda_i),

where ``alpha_i`` is a centred complex Gaussian with ``E|alpha_i|^2 =
nbar_i = tau_i / (1 - tau_i)``, ``tau_i = lambda_i / s``, and ``p_cs`` is the
probability that the interferometer output ``beta`` carries exactly one
photon per mode, ``prod_i |beta_i|^2 exp(-|beta_i|^2)``. Each sample lies in
``[0, e^{-M}]`` so the Hoeffding inequality fixes the number of samples.

Everything that can overflow (``Z``, ``p_cs``, the sample count) is handled
as a logarithm. The sample mean is taken over ``e^M p_cs``, which lies in
``[0, 1]``, and accumulated as a log-sum-exp so it survives underflow at
large ``M``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import regimes
from ._streams import partitioned_logsumexp
from .errors import (
    DimensionMismatch,
    InvalidC,
    InvalidInput,
    RegimeNotSatisfied,
    SampleOverflow,
    ZeroMatrix,
)
from .spectra import HpsmMatrix, SpectralDecomposition, spectral_decompose, validate_hpsm

E = math.e
DEFAULT_SAMPLE_CAP = 10**9


@dataclass(frozen=True)
class ScalePlan:
    """Rescaling of the spectrum into thermal-state parameters.

    ``s`` equals ``c * lambda_max`` when the matrix is rescaled and 1 when
    ``lambda_max < 1`` lets the rescale be skipped.
    """

    c: float
    s: float
    tau: np.ndarray
    nbar: np.ndarray
    log_z: float

    @property
    def m(self) -> int:
        return self.tau.shape[0]

    @property
    def c_effective(self) -> float:
        """``s / lambda_max``: the constant C, or ``1/lambda_max`` when the
        rescale is skipped."""
        return 1.0 / float(self.tau[0])


class ModeKind(str, enum.Enum):
    ABSOLUTE = "absolute"
    GURVITS_BEATING = "gurvits-beating"
    EXP_DECAYING = "exp-decaying"
    SQRT_RELATIVE = "sqrt-relative"


_MODE_ALIASES = {"s1": ModeKind.GURVITS_BEATING, "s2": ModeKind.EXP_DECAYING, "s3": ModeKind.SQRT_RELATIVE}


@dataclass(frozen=True)
class ErrorMode:
    """What the target error ``epsilon`` means.

    * ``absolute``: ``|estimate - Per| < epsilon``.
    * ``gurvits-beating``: ``< epsilon * (l * lambda_max)**M`` (needs S1).
    * ``exp-decaying``: ``< epsilon * k**M`` (needs S2).
    * ``sqrt-relative``: ``< epsilon * sqrt(Per)`` (needs S3).
    """

    kind: ModeKind
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ModeKind(self.kind))
        eps = float(self.epsilon)
        if not (eps > 0 and math.isfinite(eps)):
            raise InvalidInput(f"epsilon check: epsilon = {self.epsilon} must be finite and > 0")
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def parse(cls, name: str, epsilon: float) -> "ErrorMode":
        key = name.strip().lower()
        kind = _MODE_ALIASES.get(key)
        if kind is None:
            try:
                kind = ModeKind(key)
            except ValueError:
                choices = [k.value for k in ModeKind] + list(_MODE_ALIASES)
                raise InvalidInput(f"mode check: unknown mode {name!r}, expected one of {choices}") from None
        return cls(kind, epsilon)

    @classmethod
    def absolute(cls, epsilon):
        return cls(ModeKind.ABSOLUTE, epsilon)

    @classmethod
    def gurvits_beating(cls, epsilon):
        return cls(ModeKind.GURVITS_BEATING, epsilon)

    @classmethod
    def exp_decaying(cls, epsilon):
        return cls(ModeKind.EXP_DECAYING, epsilon)

    @classmethod
    def sqrt_relative(cls, epsilon):
        return cls(ModeKind.SQRT_RELATIVE, epsilon)


@dataclass(frozen=True)
class EstimateResult:
    """Output of :func:`estimate_permanent`.

    ``error_bound`` is the additive error on the permanent guaranteed with
    probability ``1 - delta``. In ``sqrt-relative`` mode it is evaluated with
    the estimate plugged in for the unknown permanent.
    """

    log_estimate: float
    estimate: float
    n_samples: int
    epsilon: float
    delta: float
    mode: ErrorMode
    seed: int
    mean_scaled: float
    c: float
    log_z: float
    workers: int
    log_error_bound: float
    error_bound: float


def _check_c(c):
    try:
        c = float(c)
    except (TypeError, ValueError):
        raise InvalidC(f"c check: c = {c!r} is not a number") from None
    if not (1.0 < c <= E):
        raise InvalidC(f"c check: c = {c} must satisfy 1 < c <= e")
    return c


def make_scale_plan(dec: SpectralDecomposition, c: float, force_rescale: bool = False) -> ScalePlan:
    """Thermal parameters for rescale constant `c`.

    With ``lambda_max < 1`` the matrix is used as is (``s = 1``) unless
    `force_rescale` asks for ``s = c * lambda_max``.
    """
    c = _check_c(c)
    lam = dec.spectrum
    lam_max = dec.lambda_max
    if lam_max <= 0.0:
        raise ZeroMatrix("scale check: lambda_max = 0, the permanent is 0")
    s = 1.0 if (lam_max < 1.0 and not force_rescale) else c * lam_max
    tau = lam / s
    nbar = tau / (1.0 - tau)
    log_z = _log_z(lam, s)
    tau.setflags(write=False)
    nbar.setflags(write=False)
    return ScalePlan(c=c, s=s, tau=tau, nbar=nbar, log_z=log_z)


def _log_z(lam, s):
    return 2 * lam.size * math.log(s) - math.fsum(np.log(s - lam))


def optimize_scale(dec: SpectralDecomposition, force_rescale: bool = False) -> float:
    """Rescale constant in (1, e] minimising ``ln Z``.

    A 1000-point grid locates the basin, golden-section search refines it to
    relative 1e-6. Returns ``e`` when ``lambda_max < 1`` and the rescale is
    skipped (the value is then unused).
    """
    lam = dec.spectrum
    lam_max = dec.lambda_max
    if lam_max <= 0.0:
        raise ZeroMatrix("scale check: lambda_max = 0, the permanent is 0")
    if lam_max < 1.0 and not force_rescale:
        return E

    def f(c):
        return _log_z(lam, c * lam_max)

    n_grid = 1000
    grid = 1.0 + (E - 1.0) * np.arange(1, n_grid + 1) / n_grid
    values = [f(c) for c in grid]
    k = int(np.argmin(values))
    lo = grid[k - 1] if k > 0 else 1.0 + (E - 1.0) * 1e-6
    hi = grid[min(k + 1, n_grid - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > 1e-7 * hi:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    best = 0.5 * (lo + hi)
    if f(best) > values[k]:
        best = float(grid[k])
    return min(float(best), E)


def sample_alpha(plan: ScalePlan, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Coherent amplitudes with independent real and imaginary parts of
    variance ``nbar_i / 2``. Returns shape ``(M,)`` or ``(size, M)``."""
    m = plan.m
    shape = (m, 2) if size is None else (size, m, 2)
    z = rng.standard_normal(shape)
    std = np.sqrt(plan.nbar / 2.0)
    return (z[..., 0] + 1j * z[..., 1]) * std


def transform_beta(unitary, alpha) -> np.ndarray:
    """Output amplitudes ``beta_i = sum_j unitary[j, i] * alpha_j``.

    `alpha` may be a single vector or a batch of row vectors.
    """
    u = np.asarray(unitary)
    alpha = np.asarray(alpha)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or alpha.shape[-1] != u.shape[0]:
        raise DimensionMismatch(
            f"dimension check: unitary {u.shape} incompatible with alpha {alpha.shape}"
        )
    return alpha @ u


def log_p_cs(beta) -> np.ndarray | float:
    """``ln prod_i |beta_i|^2 exp(-|beta_i|^2)``, summed over the last axis.

    ``-inf`` whenever some ``beta_i`` is zero; never above ``-M``.
    """
    t = np.abs(np.asarray(beta)) ** 2
    with np.errstate(divide="ignore"):
        terms = np.minimum(np.log(t) - t, -1.0)
    out = terms.sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _log_ceil(log_n, cap, what):
    if not math.isfinite(log_n) and log_n > 0:
        raise SampleOverflow(f"sample cap check: {what} needs an unbounded sample count")
    if log_n > math.log(cap):
        raise SampleOverflow(
            f"sample cap check: {what} needs N = exp({log_n:.6g}) > cap {cap}"
        )
    return max(1, math.ceil(math.exp(log_n)))


def _plan(plan, dec, mode, delta, sample_cap):
    """Return ``(N, log of the additive error bound on Per)``."""
    if not (0.0 < delta < 1.0):
        raise InvalidInput(f"delta check: delta = {delta} must lie in (0, 1)")
    m = dec.m
    eps = mode.epsilon
    log_log_delta = math.log(math.log(1.0 / delta))
    base = log_log_delta - math.log(2 * eps * eps)
    kind = mode.kind

    if kind is ModeKind.ABSOLUTE:
        log_n = 2 * plan.log_z - 2 * m + base
        return _log_ceil(log_n, sample_cap, "absolute mode"), math.log(eps)

    if kind is ModeKind.GURVITS_BEATING:
        s1 = regimes.check_s1(dec, plan)
        if s1.verdict is not regimes.Verdict.HOLDS:
            raise RegimeNotSatisfied(
                f"S1 check: a = {s1.a:.6g} < lambda_max*C^2/e = {s1.threshold:.6g} (l = {s1.l:.6g} > 1)"
            )
        n = _log_ceil(base, sample_cap, "gurvits-beating mode")
        return n, math.log(eps) + m * math.log(s1.l * dec.lambda_max)

    if kind is ModeKind.EXP_DECAYING:
        s2 = regimes.check_s2(dec, plan)
        if s2.verdict is not regimes.Verdict.HOLDS:
            reason = (
                "lambda_max < 1, S2 not applicable"
                if s2.verdict is regimes.Verdict.NOT_APPLICABLE
                else f"a = {s2.a:.6g} < lambda_max^2*C^2/e = {s2.threshold:.6g}"
            )
            raise RegimeNotSatisfied(f"S2 check: {reason} (k = {s2.k:.6g})")
        n = _log_ceil(base, sample_cap, "exp-decaying mode")
        return n, math.log(eps) + m * math.log(s2.k)

    s3 = regimes.check_s3(dec, plan)
    if s3.verdict is not regimes.Verdict.HOLDS:
        raise RegimeNotSatisfied(f"S3 check: ratio = {s3.ratio:.6g} > 1")
    log_n = base + m * math.log(s3.ratio)
    # actual bound is eps * sqrt(Per); filled in once the estimate is known
    return _log_ceil(log_n, sample_cap, "sqrt-relative mode"), math.nan


def plan_samples(
    plan: ScalePlan,
    dec: SpectralDecomposition,
    mode: ErrorMode,
    delta: float,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> int:
    """Number of samples reaching `mode` with failure probability `delta`.

    Raises
    ------
    RegimeNotSatisfied
        The spectral condition of a regime mode fails.
    SampleOverflow
        The count exceeds `sample_cap`.
    """
    return _plan(plan, dec, mode, delta, sample_cap)[0]


def estimate_permanent(
    mat,
    mode: ErrorMode,
    delta: float = 0.05,
    c: float | str = "auto",
    seed: int = 0,
    workers: int = 1,
    force_rescale: bool = False,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> EstimateResult:
    """Estimate ``Per(mat)`` for a Hermitian positive semidefinite `mat`.

    Parameters
    ----------
    mat : HpsmMatrix or array_like
        Input matrix; validated if given as an array.
    mode : ErrorMode
        Target error and its meaning.
    delta : float
        Failure probability of the error guarantee.
    c : float or "auto"
        Rescale constant in (1, e]; "auto" minimises ``ln Z``.
    seed, workers : int
        The result is bit-identical for a fixed ``(seed, workers)`` pair.
    force_rescale : bool
        Rescale by ``c * lambda_max`` even when ``lambda_max < 1``.
    sample_cap : int
        Largest admissible sample count.

    Returns
    -------
    EstimateResult
    """
    if not isinstance(mat, HpsmMatrix):
        mat = validate_hpsm(mat)
    if not (0.0 < delta < 1.0):
        raise InvalidInput(f"delta check: delta = {delta} must lie in (0, 1)")
    if workers < 1:
        raise InvalidInput(f"workers check: workers = {workers} must be >= 1")
    dec = spectral_decompose(mat)
    m = dec.m

    if dec.lambda_max == 0.0:
        return EstimateResult(
            log_estimate=-math.inf, estimate=0.0, n_samples=0, epsilon=mode.epsilon,
            delta=delta, mode=mode, seed=seed, mean_scaled=0.0, c=math.nan,
            log_z=math.nan, workers=workers, log_error_bound=-math.inf, error_bound=0.0,
        )

    if isinstance(c, str):
        if c != "auto":
            raise InvalidC(f"c check: expected a number or 'auto', got {c!r}")
        c = optimize_scale(dec, force_rescale=force_rescale)
    plan = make_scale_plan(dec, c, force_rescale=force_rescale)
    n, log_bound = _plan(plan, dec, mode, delta, sample_cap)

    # the estimator samples the circuit U^H: beta = conj(U) alpha
    circuit = dec.unitary.conj().T

    def draw_log(rng, size):
        beta = transform_beta(circuit, sample_alpha(plan, rng, size))
        return np.minimum(m + log_p_cs(beta), 0.0)

    # log-sum-exp keeps the mean representable even when e^M p_cs underflows
    log_mean = min(partitioned_logsumexp(draw_log, n, seed, workers) - math.log(n), 0.0)
    mean_scaled = math.exp(log_mean)
    if log_mean > -math.inf:
        log_estimate = plan.log_z - m + log_mean
        estimate = math.exp(log_estimate)
    else:
        log_estimate, estimate = -math.inf, 0.0
    if mode.kind is ModeKind.SQRT_RELATIVE:
        log_bound = math.log(mode.epsilon) + 0.5 * log_estimate
    return EstimateResult(
        log_estimate=log_estimate,
        estimate=estimate,
        n_samples=n,
        epsilon=mode.epsilon,
        delta=delta,
        mode=mode,
        seed=seed,
        mean_scaled=mean_scaled,
        c=plan.c_effective,
        log_z=plan.log_z,
        workers=workers,
        log_error_bound=log_bound,
        error_bound=math.exp(log_bound),
    )
