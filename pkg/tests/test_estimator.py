import math

import numpy as np
import pytest
from scipy import integrate

from permest._streams import worker_generators

from permest import (
    DimensionMismatch,
    ErrorMode,
    InvalidC,
    RegimeNotSatisfied,
    SampleOverflow,
    SpectralDecomposition,
    ZeroMatrix,
    estimate_permanent,
    gen_from_spectrum,
    gen_random_hpsm,
    haar_unitary,
    log_p_cs,
    make_scale_plan,
    optimize_scale,
    permanent_ryser,
    plan_samples,
    sample_alpha,
    spectral_decompose,
    transform_beta,
    validate_hpsm,
)


def dec_of(lam):
    lam = np.asarray(lam, dtype=float)
    return SpectralDecomposition(np.eye(lam.size), lam)


def thermal_mean_oracle(nbar):
    """E[t e^-t] for t ~ Exp(mean nbar), by quadrature."""
    val, _ = integrate.quad(lambda t: t * math.exp(-t) * math.exp(-t / nbar) / nbar, 0, math.inf)
    return val


# --- make_scale_plan -------------------------------------------------------

def test_plan_no_rescale_below_one():
    plan = make_scale_plan(dec_of([0.5]), 2.0)
    assert plan.s == 1.0
    np.testing.assert_allclose(plan.tau, [0.5])
    np.testing.assert_allclose(plan.nbar, [1.0])
    assert plan.log_z == pytest.approx(math.log(2))


def test_plan_rescale_at_one():
    plan = make_scale_plan(dec_of([1.0]), 2.0)
    assert plan.s == 2.0
    np.testing.assert_allclose(plan.tau, [0.5])
    np.testing.assert_allclose(plan.nbar, [1.0])
    assert plan.log_z == pytest.approx(math.log(4))


def test_plan_all_ones():
    plan = make_scale_plan(dec_of([3.0, 0, 0]), 1.5)
    assert plan.s == pytest.approx(4.5)
    np.testing.assert_allclose(plan.tau, [2 / 3, 0, 0])
    np.testing.assert_allclose(plan.nbar, [2, 0, 0])
    # Z = s^6 / (1.5 * 4.5^2)
    assert plan.log_z == pytest.approx(6 * math.log(4.5) - math.log(1.5) - 2 * math.log(4.5))


def test_plan_force_rescale():
    plan = make_scale_plan(dec_of([0.5]), 2.0, force_rescale=True)
    assert plan.s == 1.0 and plan.log_z == pytest.approx(math.log(2))
    plan = make_scale_plan(dec_of([0.5, 0.1]), 1.5, force_rescale=True)
    assert plan.s == pytest.approx(0.75)


def test_plan_errors():
    with pytest.raises(ZeroMatrix):
        make_scale_plan(dec_of([0.0, 0.0]), 2.0)
    for c in (1.0, 0.5, 2.8, math.nan):
        with pytest.raises(InvalidC):
            make_scale_plan(dec_of([1.0]), c)


def test_plan_invariants(rng):
    for seed in range(50):
        lam = np.sort(rng.uniform(0, 5, 1 + seed % 6))[::-1]
        plan = make_scale_plan(dec_of(lam), rng.uniform(1.01, math.e), force_rescale=bool(seed % 2))
        assert np.all((plan.tau >= 0) & (plan.tau < 1))
        assert np.all(np.isfinite(plan.nbar)) and np.all(plan.nbar >= 0)
        expect = 2 * lam.size * math.log(plan.s) - np.log(plan.s - lam).sum()
        assert plan.log_z == pytest.approx(expect, rel=1e-12, abs=1e-12)


# --- optimize_scale --------------------------------------------------------

@pytest.mark.parametrize("lam", [[1.0], [1.0, 1.0]])
def test_optimize_scale_calculus(lam):
    # d/ds [2M ln s - M ln(s - 1)] = 0  =>  s = 2
    assert optimize_scale(dec_of(lam)) == pytest.approx(2.0, rel=1e-5)


def test_optimize_scale_rank_one():
    # (M+1) ln s - ln(s - lam) is minimised at s = lam (M+1)/M
    for m in (2, 5, 9):
        c = optimize_scale(dec_of([3.0] + [0.0] * (m - 1)))
        assert c == pytest.approx(1 + 1 / m, rel=1e-5)


def test_optimize_scale_below_one():
    assert optimize_scale(dec_of([0.5])) == math.e
    assert make_scale_plan(dec_of([0.5]), optimize_scale(dec_of([0.5]))).s == 1.0


def test_optimize_scale_beats_grid(rng):
    for _ in range(10):
        lam = np.sort(rng.uniform(0, 4, 5))[::-1]
        lam[0] = max(lam[0], 1.0)
        dec = dec_of(lam)
        best = make_scale_plan(dec, optimize_scale(dec)).log_z
        for c in np.linspace(1.001, math.e, 400):
            assert best <= make_scale_plan(dec, c).log_z + 1e-9


# --- sampling primitives ---------------------------------------------------

def test_sample_alpha_zero_variance(rng):
    plan = make_scale_plan(dec_of([0.5, 0.0, 0.0]), 2.0)
    alpha = sample_alpha(plan, rng, 100)
    assert np.all(alpha[:, 1:] == 0)
    plan0 = type(plan)(c=2.0, s=1.0, tau=np.zeros(3), nbar=np.zeros(3), log_z=0.0)
    assert np.all(sample_alpha(plan0, rng) == 0)


def test_sample_alpha_moments(rng):
    plan = make_scale_plan(dec_of([0.5]), 2.0)  # nbar = 1
    alpha = sample_alpha(plan, rng, 100_000)
    assert np.mean(np.abs(alpha) ** 2) == pytest.approx(1.0, abs=0.02)
    plan2 = make_scale_plan(dec_of([2 / 3]), 2.0)  # nbar = 2
    alpha = sample_alpha(plan2, rng, 100_000)
    assert abs(alpha.real.mean()) < 0.02 and abs(alpha.imag.mean()) < 0.02


def test_transform_beta_examples(rng):
    np.testing.assert_allclose(transform_beta(np.eye(2), [1 + 2j, 3]), [1 + 2j, 3])
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    np.testing.assert_allclose(transform_beta(h, [1, 0]), [1 / np.sqrt(2), 1 / np.sqrt(2)])
    u = np.array([[1, 2j], [3, 4]])
    np.testing.assert_allclose(transform_beta(u, [1, 1]), [4, 4 + 2j])  # beta_i = sum_j u[j, i] a_j
    with pytest.raises(DimensionMismatch):
        transform_beta(np.eye(3), [1, 2])


def test_transform_beta_norm_preserved(rng):
    for m in range(2, 9):
        u = haar_unitary(m, rng)
        alpha = rng.standard_normal((1000, m)) + 1j * rng.standard_normal((1000, m))
        beta = transform_beta(u, alpha)
        na, nb = (np.abs(alpha) ** 2).sum(1), (np.abs(beta) ** 2).sum(1)
        assert np.all(np.abs(na - nb) <= 1e-9 * na)


def test_log_p_cs_examples():
    assert log_p_cs(np.array([1, 1j, -1])) == pytest.approx(-3.0)
    assert log_p_cs(np.array([1.0, 0.0])) == -math.inf
    assert log_p_cs(np.array([math.sqrt(2)])) == pytest.approx(math.log(2) - 2, abs=1e-12)
    assert log_p_cs(np.array([math.sqrt(2)])) == pytest.approx(-1.30685, abs=1e-5)


def test_log_p_cs_bounded(rng):
    for m in range(1, 11):
        beta = (rng.standard_normal((1000, m)) + 1j * rng.standard_normal((1000, m))) * 2
        assert np.all(log_p_cs(beta) <= -m)


# --- plan_samples ----------------------------------------------------------

def test_plan_samples_absolute_closed_form():
    dec = dec_of([0.5])
    plan = make_scale_plan(dec, 2.0)
    n = plan_samples(plan, dec, ErrorMode.absolute(0.01), 0.05)
    assert n == math.ceil(4 * math.exp(-2) / (2 * 1e-4) * math.log(20)) == 8109


def test_plan_samples_s1():
    dec = dec_of([0.9] + [0.0] * 9)
    plan = make_scale_plan(dec, 2.0)
    assert plan_samples(plan, dec, ErrorMode.gurvits_beating(0.1), 0.05) == 150
    bad = dec_of([0.5, 0.5])
    with pytest.raises(RegimeNotSatisfied, match="S1"):
        plan_samples(make_scale_plan(bad, 2.0), bad, ErrorMode.gurvits_beating(0.1), 0.05)


def test_plan_samples_s2():
    dec = dec_of([1.2] + [0.0] * 9)
    plan = make_scale_plan(dec, 1.05)
    assert plan_samples(plan, dec, ErrorMode.exp_decaying(0.1), 0.05) == 150
    low = dec_of([0.9] + [0.0] * 9)
    with pytest.raises(RegimeNotSatisfied, match="not applicable"):
        plan_samples(make_scale_plan(low, 2.0), low, ErrorMode.exp_decaying(0.1), 0.05)


def test_plan_samples_s3():
    dec = dec_of([0.25] * 3)
    plan = make_scale_plan(dec, 2.0)
    n = plan_samples(plan, dec, ErrorMode.sqrt_relative(0.1), 0.05)
    ratio = (0.25 / 0.5625) / (0.0625 * math.e**2)
    assert n == math.ceil(math.log(20) / 0.02 * ratio**3)
    assert n <= math.ceil(math.log(20) / 0.02 * 0.962**3)
    bad = dec_of([0.2, 0.2])
    with pytest.raises(RegimeNotSatisfied, match="S3"):
        plan_samples(make_scale_plan(bad, 2.0), bad, ErrorMode.sqrt_relative(0.1), 0.05)


def test_plan_samples_cap():
    dec = dec_of([0.5])
    plan = make_scale_plan(dec, 2.0)
    with pytest.raises(SampleOverflow):
        plan_samples(plan, dec, ErrorMode.absolute(0.01), 0.05, sample_cap=8000)
    big = dec_of([5.0] * 60)
    with pytest.raises(SampleOverflow):
        plan_samples(make_scale_plan(big, 2.0), big, ErrorMode.absolute(1e-3), 0.05)


# --- estimate_permanent ----------------------------------------------------

def test_estimate_one_by_one():
    r = estimate_permanent([[0.5]], ErrorMode.absolute(0.01), 0.05, seed=42)
    assert 0.49 <= r.estimate <= 0.51
    assert r.n_samples == 8109
    assert r.estimate == pytest.approx(math.exp(r.log_z - 1 + math.log(r.mean_scaled)))
    assert 0 <= r.mean_scaled <= 1


def test_estimate_diagonal():
    r = estimate_permanent(np.diag([0.3, 0.7]), ErrorMode.absolute(0.01), 0.05, seed=3)
    assert 0.20 <= r.estimate <= 0.22


def test_estimate_all_ones_fixed_c():
    r = estimate_permanent(np.ones((3, 3)), ErrorMode.absolute(0.05), 0.05, c=1.5, seed=5)
    assert abs(r.estimate - 6.0) <= 0.05
    assert r.c == pytest.approx(1.5)


def test_estimate_zero_matrix():
    r = estimate_permanent(np.zeros((3, 3)), ErrorMode.absolute(0.01), 0.05)
    assert r.estimate == 0.0 and r.log_estimate == -math.inf


def test_estimate_regime_modes():
    mat = gen_from_spectrum([0.9] + [0.0] * 5, 4)
    per = permanent_ryser(mat.entries).real
    r = estimate_permanent(mat, ErrorMode.gurvits_beating(0.1), 0.05, seed=1)
    assert r.n_samples == 150
    assert r.error_bound < 0.1 * 0.9**6
    assert abs(r.estimate - per) < r.error_bound

    mat = gen_from_spectrum([1.2] + [0.0] * 9, 2)
    r = estimate_permanent(mat, ErrorMode.exp_decaying(0.1), 0.05, c=1.05, seed=1)
    assert r.error_bound == pytest.approx(0.1 * 0.62849**10, rel=1e-3)

    mat = gen_from_spectrum([0.25] * 3, 8)
    r = estimate_permanent(mat, ErrorMode.sqrt_relative(0.1), 0.05, seed=1)
    assert abs(r.estimate - 0.25**3) < 0.1 * math.sqrt(0.25**3)
    with pytest.raises(RegimeNotSatisfied):
        estimate_permanent(gen_from_spectrum([0.2, 0.2], 0), ErrorMode.sqrt_relative(0.1), 0.05)


def test_estimate_nonnegative_and_deterministic():
    mat = gen_random_hpsm(4, 1.5, 9)
    mode = ErrorMode.absolute(0.2)
    a = estimate_permanent(mat, mode, 0.1, seed=77, workers=3)
    b = estimate_permanent(mat, mode, 0.1, seed=77, workers=3)
    assert a == b
    assert a.estimate >= 0
    c = estimate_permanent(mat, mode, 0.1, seed=78, workers=3)
    assert c.estimate != a.estimate


def test_worker_partition_same_distribution():
    mat = gen_random_hpsm(3, 0.8, 2)
    per = permanent_ryser(mat.entries).real
    for w in (1, 2, 4):
        r = estimate_permanent(mat, ErrorMode.absolute(0.01 * per), 0.05, seed=1, workers=w)
        assert abs(r.estimate - per) < 0.01 * per


def test_estimate_large_m_log_domain():
    # at M = 1500 even e^M p_cs underflows; the estimate must stay in logs
    m = 1500
    mat = validate_hpsm(np.diag(np.full(m, 1 / 3)))
    r = estimate_permanent(mat, ErrorMode.sqrt_relative(0.5), 0.1, seed=0)
    assert r.n_samples == 1
    assert r.mean_scaled == 0.0
    assert math.isfinite(r.log_estimate)

    # replay the single sample from the same stream
    dec = spectral_decompose(mat)
    plan = make_scale_plan(dec, math.e)
    rng = worker_generators(0, 1)[0]
    beta = transform_beta(dec.unitary.conj().T, sample_alpha(plan, rng, 1))
    expected = plan.log_z + float(log_p_cs(beta)[0])
    assert r.log_estimate == pytest.approx(expected, rel=1e-12)
    assert r.log_estimate <= plan.log_z - m


def test_m1_closed_form_oracle():
    for nbar in (0.5, 1.0, 3.0):
        assert thermal_mean_oracle(nbar) == pytest.approx(nbar / (1 + nbar) ** 2, rel=1e-9)
