import itertools
import math

import numpy as np
import pytest

from permest import (
    InvalidInput,
    NotSquare,
    gen_random_hpsm,
    glynn_sample,
    gurvits_estimate,
    gurvits_sample_size,
    permanent_naive,
    permanent_ryser,
)
from permest.exact import glynn_terms

from conftest import random_complex


def all_signs(m):
    rest = np.array(list(itertools.product((1.0, -1.0), repeat=m - 1))).reshape(2 ** (m - 1), m - 1)
    return np.hstack([np.ones((len(rest), 1)), rest])


def test_identity_both_sign_vectors():
    terms = glynn_terms(np.eye(2, dtype=complex), all_signs(2))
    assert np.allclose(terms, [1, 1])
    assert terms.mean() == pytest.approx(1.0)


def test_two_by_two_enumeration():
    a = np.array([[2, 1], [1, 2]], dtype=complex)
    terms = glynn_terms(a, all_signs(2))
    assert sorted(terms.real) == [1.0, 9.0]
    assert terms.mean() == pytest.approx(5.0)


def test_diag_hand_evaluation():
    a = np.diag([2.0, 3.0]).astype(complex)
    assert glynn_terms(a, np.array([[1.0, -1.0]]))[0] == pytest.approx(6.0)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_full_enumeration_matches_naive(m, rng):
    for _ in range(10):
        a = random_complex(rng, m)
        avg = glynn_terms(a, all_signs(m)).mean()
        ref = permanent_naive(a)
        assert abs(avg - ref) <= 1e-10 * max(1.0, abs(ref))


def test_sample_first_sign_fixed_and_bounded(rng):
    a = random_complex(rng, 5)
    bound = np.prod(np.abs(a).sum(axis=0))
    terms = {glynn_sample(a, rng) for _ in range(200)}
    # x1 = 1 leaves 16 sign vectors
    assert len(terms) <= 16
    assert all(abs(t) <= bound * (1 + 1e-12) for t in terms)


def test_sample_rejects_non_square():
    with pytest.raises(NotSquare):
        glynn_sample(np.ones((2, 3)), np.random.default_rng(0))


def test_sample_size_formula():
    assert gurvits_sample_size(0.1, 0.05) == math.ceil(200 * math.log(40))
    assert gurvits_sample_size(0.05, 0.05) == 2952


@pytest.mark.parametrize("eps,delta", [(0.0, 0.1), (-1.0, 0.1), (math.inf, 0.1), (0.1, 0.0), (0.1, 1.0)])
def test_estimate_rejects_bad_parameters(eps, delta):
    with pytest.raises(InvalidInput):
        gurvits_estimate(np.eye(2), eps, delta)


def test_identity_five():
    r = gurvits_estimate(np.eye(5), 0.1, 0.05, seed=3)
    # every draw of the identity is exactly 1
    assert r.estimate == pytest.approx(1.0, abs=1e-12)
    assert r.error_bound == pytest.approx(0.1)
    assert r.n_samples == gurvits_sample_size(0.1, 0.05)


def test_two_by_two_within_budget():
    r = gurvits_estimate(np.array([[2, 1], [1, 2]]), 0.05, 0.05, seed=1)
    assert r.error_bound == pytest.approx(0.45)
    assert abs(r.estimate - 5.0) <= 0.45


def test_random_hpsm_within_budget():
    mat = gen_random_hpsm(6, 0.9, seed=11)
    r = gurvits_estimate(mat.entries, 0.1, 0.05, seed=2)
    assert r.error_bound == pytest.approx(0.1 * 0.9**6)
    assert abs(r.estimate - permanent_ryser(mat.entries)) <= r.error_bound


def test_estimate_deterministic_per_seed_and_workers():
    mat = gen_random_hpsm(4, 0.8, seed=5)
    a = gurvits_estimate(mat.entries, 0.1, 0.1, seed=9)
    b = gurvits_estimate(mat.entries, 0.1, 0.1, seed=9)
    assert a == b
    c = gurvits_estimate(mat.entries, 0.1, 0.1, seed=9, workers=3)
    assert c == gurvits_estimate(mat.entries, 0.1, 0.1, seed=9, workers=3)
    assert c.workers == 3 and c.n_samples == a.n_samples


def test_statistical_guarantee():
    mat = gen_random_hpsm(4, 0.8, seed=21)
    per = permanent_ryser(mat.entries)
    eps, delta, runs = 0.1, 0.1, 200
    fails = sum(
        abs(gurvits_estimate(mat.entries, eps, delta, seed=s).estimate - per) > eps * 0.8**4
        for s in range(runs)
    )
    assert fails / runs <= delta + 3 * math.sqrt(delta * (1 - delta) / runs)
