import numpy as np
import pytest

from mixquant.density import conditional_mean, distortion, mixture_density, reflect
from mixquant.mixed import MIXTURE
from mixquant.oracle import PRNG, batch_distortion, lloyd, lloyd_iterate, verify
from quad_oracle import quad_distortion


def centroid_residual(d, codebook):
    lo, hi = d.support
    bounds = [lo] + [(a + b) / 2 for a, b in zip(codebook, codebook[1:])] + [hi]
    return max(abs(conditional_mean(d, c, e) - a) for a, c, e in zip(codebook, bounds, bounds[1:]))


def test_n1_is_mean():
    rep = lloyd(MIXTURE, 1)
    assert rep.codebook == pytest.approx((0.75,), abs=1e-10)
    assert rep.error == pytest.approx(7 / 48, abs=1e-10)
    assert rep.converged and rep.prng == PRNG == "PCG64"


def test_n3():
    rep = lloyd(MIXTURE, 3)
    assert rep.codebook == pytest.approx((0.25, 0.75, 1.25), abs=1e-8)
    assert rep.error == pytest.approx(1 / 48, abs=1e-8)


def test_n4():
    rep = lloyd(MIXTURE, 4)
    assert rep.error == pytest.approx(0.01057, abs=1e-5)
    assert rep.codebook == pytest.approx((0.198223, 0.59467, 0.90533, 1.30178), abs=1e-4)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_monotone_descent(p):
    d = mixture_density(p)
    rng = np.random.default_rng(3)
    start = np.sort(rng.uniform(0, 1.5, (8, 9)), axis=1)
    _, _, _, hist = lloyd_iterate(d, start, max_iters=2000, record_every=10)
    hist = np.array(hist)
    assert np.all(np.diff(hist, axis=0) <= 1e-14)


def test_batch_distortion_matches_scalar():
    rng = np.random.default_rng(5)
    x = np.sort(rng.uniform(0, 1.5, (6, 7)), axis=1)
    assert batch_distortion(MIXTURE, x) == pytest.approx([distortion(MIXTURE, r) for r in x], abs=1e-14)


@pytest.mark.parametrize("n", [2, 5, 8, 13])
def test_result_is_stationary(n):
    rep = lloyd(MIXTURE, n, restarts=16)
    assert rep.converged
    assert centroid_residual(MIXTURE, rep.codebook) < 1e-10
    assert rep.error == pytest.approx(quad_distortion(MIXTURE, rep.codebook), abs=1e-12)


def test_deterministic():
    a = lloyd(MIXTURE, 11, restarts=16, seed=42)
    b = lloyd(MIXTURE, 11, restarts=16, seed=42)
    assert a == b


def test_seed_changes_random_starts():
    from mixquant.oracle import _random_start, _rng

    a = _random_start(MIXTURE, 5, _rng(1, 1))
    b = _random_start(MIXTURE, 5, _rng(2, 1))
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("kw", [{"n": 0}, {"n": 3, "restarts": 0}, {"n": 3, "tol": 0.0}])
def test_arguments(kw):
    with pytest.raises(ValueError):
        lloyd(MIXTURE, **kw)


@pytest.mark.parametrize("n", [1, 2])
def test_verify_small(n):
    v = verify(n)
    assert v.max_point_gap < 1e-9
    assert v.error_gap < 1e-9


def test_verify_n6_finds_asymmetric_optimum():
    """At n = 6 the best stationary codebook is not symmetric about 3/4.

    The symmetric solution (1/192) is stationary but beaten by about 3.7e-5.
    """
    v = verify(6)
    rep = v.oracle
    assert rep.error == pytest.approx(0.0051711929, abs=1e-9)
    assert v.closed_form.error - rep.error == pytest.approx(3.714e-5, abs=1e-8)
    assert rep.error == pytest.approx(quad_distortion(MIXTURE, rep.codebook), abs=1e-12)
    assert centroid_residual(MIXTURE, rep.codebook) < 1e-10
    mirror = reflect(rep.codebook)
    assert max(abs(a - b) for a, b in zip(mirror, rep.codebook)) > 0.01
    # its mirror image is equally good
    assert distortion(MIXTURE, mirror) == pytest.approx(rep.error, abs=1e-14)
