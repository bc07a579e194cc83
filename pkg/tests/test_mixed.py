import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mixquant.density import conditional_mean, distortion, reflect
from mixquant.mixed import (
    CENTER,
    MIXTURE,
    SMALL_N_CASES,
    InfeasibleSplitError,
    SplitConfig,
    _small_n_cases,
    best_split,
    small_n,
    solve_split,
    split_error,
)
from mixquant.oracle import lloyd
from mixquant.selector import solve, split_value


def centroid_residual(codebook):
    lo, hi = MIXTURE.support
    bounds = [lo] + [(a + b) / 2 for a, b in zip(codebook, codebook[1:])] + [hi]
    return max(abs(conditional_mean(MIXTURE, c, e) - a) for a, c, e in zip(codebook, bounds, bounds[1:]))


def check_invariants(res):
    cb = res.codebook
    assert len(cb) == res.n
    assert all(b > a for a, b in zip(cb, cb[1:]))
    assert np.allclose(reflect(cb), cb, atol=1e-10, rtol=0)
    if res.n % 2:
        assert cb[res.n // 2] == CENTER
    assert centroid_residual(cb) < 1e-9
    assert res.error == pytest.approx(distortion(MIXTURE, cb), abs=1e-10)


@pytest.mark.parametrize(
    "n, codebook, error",
    [
        (1, (0.75,), 7 / 48),
        (2, (7 / 16, 17 / 16), 37 / 768),
        (3, (0.25, 0.75, 1.25), 1 / 48),
        (6, (0.125, 0.375, 0.625, 0.875, 1.125, 1.375), 1 / 192),
    ],
)
def test_small_n_rational(n, codebook, error):
    res = small_n(n)
    assert res.codebook == pytest.approx(codebook, abs=1e-12)
    assert res.error == pytest.approx(error, abs=1e-12)
    check_invariants(res)


def test_small_n_four():
    res = small_n(4)
    assert res.codebook == pytest.approx((0.198223, 0.59467, 0.90533, 1.30178), abs=1e-5)
    assert res.error == pytest.approx(0.01057, abs=1e-5)
    # first-order conditions give a2 = 3 a1 with 64 a1^2 - 48 a1 + 7 = 0
    a1 = (48 - math.sqrt(512)) / 128
    assert res.codebook[:2] == pytest.approx((a1, 3 * a1), abs=1e-14)
    check_invariants(res)


def test_small_n_five():
    res = small_n(5)
    assert res.codebook == pytest.approx((0.169821, 0.509464, 0.75, 0.990536, 1.33018), abs=1e-5)
    assert res.error == pytest.approx(0.00721728, abs=1e-8)
    # a2 = 3 a1 with 176 a1^2 - 24 a1 - 1 = 0
    a1 = (24 + math.sqrt(24 ** 2 + 4 * 176)) / 352
    assert res.codebook[:2] == pytest.approx((a1, 3 * a1), abs=1e-14)
    check_invariants(res)


@pytest.mark.parametrize("n", [0, 7, -1])
def test_small_n_range(n):
    with pytest.raises(ValueError):
        small_n(n)


def region_points(region, rng, count):
    pts = []
    while len(pts) < count:
        a1, a2 = rng.uniform(0, 0.75, 2)
        if all(w1 * a1 + w2 * a2 + w0 < -1e-9 for w1, w2, w0 in region):
            pts.append((a1, a2))
    return pts


@pytest.mark.parametrize("n, name", [(n, name) for n in SMALL_N_CASES for name in SMALL_N_CASES[n]])
def test_case_polynomials_are_distortions(n, name):
    poly, region = SMALL_N_CASES[n][name]
    rng = np.random.default_rng(7)
    for a1, a2 in region_points(region, rng, 40):
        left = (a1, a2, CENTER) if n == 5 else (a1, a2)
        cb = left + reflect(left[:2])
        assert poly(a1, a2) == pytest.approx(distortion(MIXTURE, cb), abs=1e-13)


@pytest.mark.parametrize("n, name", [(n, name) for n in SMALL_N_CASES for name in SMALL_N_CASES[n]])
def test_case_minima_against_grid(n, name):
    poly, region = SMALL_N_CASES[n][name]
    val, (a1, a2) = _small_n_cases(n)[name]
    g = np.linspace(0, 0.75, 1501)
    x, y = np.meshgrid(g, g, indexing="ij")
    mask = np.ones_like(x, dtype=bool)
    for w1, w2, w0 in region:
        mask &= w1 * x + w2 * y + w0 <= 1e-12
    vals = sum(c * x ** i * y ** j for (i, j), c in poly.c.items())
    grid_min = vals[mask].min()
    assert val <= grid_min + 1e-14
    assert val == pytest.approx(grid_min, abs=1e-6)
    assert all(w1 * a1 + w2 * a2 + w0 <= 1e-10 for w1, w2, w0 in region)


@pytest.mark.parametrize(
    "n, name, value, point",
    [
        (4, "a2<=1/2", 0.0150463, (1 / 6, 0.5)),
        (4, "a1<=1/2<a2, mid>=1/2", 0.0169271, (0.3125, 0.6875)),
        (5, "a2<=1/4", 0.0162037, (1 / 12, 0.25)),
        (5, "a1<=1/2<a2, mid>=1/2", 0.0167955, (0.315741, 0.684259)),
    ],
)
def test_losing_case_minima(n, name, value, point):
    val, pt = _small_n_cases(n)[name]
    assert val == pytest.approx(value, abs=1e-7)
    assert pt == pytest.approx(point, abs=1e-6)


def test_split_n6():
    res = solve_split(SplitConfig(2, 1, "even", "V1"))
    assert res.codebook == pytest.approx((0.125, 0.375, 0.625, 0.875, 1.125, 1.375), abs=1e-12)
    assert res.error == pytest.approx(0.00520833, abs=1e-8)
    check_invariants(res)


def test_split_domain():
    with pytest.raises(ValueError):
        SplitConfig(1, 1, "even", "V1")
    with pytest.raises(ValueError):
        SplitConfig(0, 3, "odd", "V2")
    with pytest.raises(ValueError):
        SplitConfig(2, 1, "even", "V3")


def test_split_n7_against_lloyd():
    res = best_split(2, 1, "odd")
    assert res.n == 7
    rep = lloyd(MIXTURE, 7, restarts=64)
    assert res.error == pytest.approx(rep.error, abs=1e-8)
    check_invariants(res)


def test_split_error_n6():
    assert split_error(2, 1, "even") == pytest.approx(0.00520833, abs=1e-8)
    # (1, 2) has no admissible stationary configuration, so F counts it as +inf
    with pytest.raises(InfeasibleSplitError):
        split_error(1, 2, "even")
    assert split_value(6, 1) == math.inf > split_value(6, 2)


def test_split_error_n10_sweep():
    values = {j: split_value(10, j) for j in range(1, 5)}
    assert min(values, key=values.get) == 3
    assert all(values[3] <= v for v in values.values())


def test_tie_prefers_v1():
    v1 = solve_split(SplitConfig(2, 1, "even", "V1"))
    v2 = solve_split(SplitConfig(2, 1, "even", "V2"))
    assert v2 is not None and abs(v1.error - v2.error) < 1e-12
    assert best_split(2, 1, "even").case == "V1"


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.sampled_from(["even", "odd"]), st.sampled_from(["V1", "V2"]))
def test_split_results_are_stationary(k, m, parity, case):
    assume((k, m) != (1, 1))
    res = solve_split(SplitConfig(k, m, parity, case))
    if res is None:
        return
    check_invariants(res)
    left = res.left_half
    # the case hypothesis holds for the returned configuration
    ak, b1 = left[k - 1], left[k]
    assert ak <= 0.5 < b1
    assert sum(1 for x in left if 0.5 < x < CENTER) == m
    if case == "V1":
        assert (ak + b1) / 2 <= 0.5 + 1e-12
    else:
        assert (ak + b1) / 2 >= 0.5 - 1e-12


@pytest.mark.parametrize("n", range(1, 61))
def test_solve_invariants(n):
    check_invariants(solve(n))


def test_occupancy():
    for n in range(4, 61):
        cb = solve(n).codebook
        assert any(0 < x < 0.5 for x in cb)
        assert any(0.5 < x < 0.75 for x in cb)


def test_monotone_errors():
    errs = [solve(n).error for n in range(1, 61)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
