import math

import numpy as np
import pytest

from lyapspec import map_core as mc
from lyapspec import pressure as pr
from lyapspec import spectrum as sp
from lyapspec.errors import DepthTooLarge, NoOverlap, NotMarkov

LOG2, LOG4 = math.log(2), math.log(4)


@pytest.fixture(scope="module")
def two_slope():
    return mc.two_slope_map()


@pytest.fixture(scope="module")
def ts_curve(two_slope):
    return pr.build_pressure_curve(two_slope, (-2, 2), 41, 12)


def test_tent_single_bin():
    est = sp.empirical_spectrum(mc.tent_map(), 20)
    c, cnt, e = est.occupied()
    assert len(c) == 1
    assert c[0] == pytest.approx(LOG2)
    assert cnt[0] == 2 ** 20
    assert e[0] == pytest.approx(1.0)


@pytest.mark.parametrize("n", [8, 14])
def test_two_slope_binomial_oracle(two_slope, n):
    # k visits to the slope-4 branch: exponent ((n-k) log2 + k log4)/n, C(n,k) cylinders
    est = sp.empirical_spectrum(two_slope, n, bin_width=LOG2 / n)
    c, cnt, e = est.occupied()
    assert len(c) == n + 1
    for k in range(n + 1):
        alpha = ((n - k) * LOG2 + k * LOG4) / n
        assert c[k] == pytest.approx(alpha)
        assert cnt[k] == math.comb(n, k)
        assert e[k] == pytest.approx(math.log(math.comb(n, k)) / (n * alpha))


def test_default_bins_conserve_count(two_slope):
    for n in (10, 16):
        assert sp.empirical_spectrum(two_slope, n).total == 2 ** n


def test_equal_exponents_share_a_bin(two_slope):
    # the default width puts the exponent lattice on half-bin boundaries
    est = sp.empirical_spectrum(two_slope, 16)
    _, cnt, _ = est.occupied()
    assert sorted(cnt.tolist()) == sorted(math.comb(16, k) for k in range(17))


def test_peak_bin_stirling(two_slope):
    # near chi* the binomial count is exp(n H(p)) / sqrt(2 pi n p (1-p)) to leading order
    n = 20
    est = sp.empirical_spectrum(two_slope, n, bin_width=LOG2 / n)
    c, _, e = est.occupied()
    for k in (12, 13):
        p = k / n
        alpha = c[k]
        H = -(p * math.log(p) + (1 - p) * math.log(1 - p))
        stirling = (n * H - 0.5 * math.log(2 * math.pi * n * p * (1 - p))) / (n * alpha)
        assert e[k] == pytest.approx(stirling, abs=0.01)


def test_tent_comparison_zero(ts_curve):
    tent_curve = pr.build_pressure_curve(mc.tent_map(), (-2, 2), 41, 8)
    cmp = sp.compare_to_prediction(sp.empirical_spectrum(mc.tent_map(), 12), tent_curve)
    assert cmp.deviation == pytest.approx(0.0, abs=1e-9)


def test_comparison_accepts_spectrum_curve(two_slope, ts_curve):
    est = sp.empirical_spectrum(two_slope, 14)
    a = sp.compare_to_prediction(est, ts_curve).deviation
    b = sp.compare_to_prediction(est, pr.build_spectrum_curve(ts_curve, 161)).deviation
    assert b == pytest.approx(a, abs=5e-3)


def test_comparison_no_overlap(two_slope):
    est = sp.empirical_spectrum(mc.tent_map(), 8)
    ts = pr.build_pressure_curve(two_slope, (-2, 2), 41, 8)
    with pytest.raises(NoOverlap):
        sp.compare_to_prediction(est, ts)


def test_requires_markov():
    with pytest.raises(NotMarkov):
        sp.empirical_spectrum(mc.quadratic_map(-1.8), 8)


def test_depth_cap(two_slope):
    with pytest.raises(DepthTooLarge):
        sp.empirical_spectrum(two_slope, sp.MAX_DEPTH + 1)


def test_audit_two_slope(two_slope):
    itin = np.random.default_rng(4).integers(0, 2, (200, 300))
    rep = sp.exponent_range_audit(two_slope, 300, LOG2, LOG4, itineraries=itin)
    assert rep.ok
    assert np.all(rep.lower >= LOG2 - 1e-12) and np.all(rep.upper <= LOG4 + 1e-12)


def test_audit_tent_exact():
    pts = np.random.default_rng(6).uniform(0.01, 0.99, 10)
    rep = sp.exponent_range_audit(mc.tent_map(), 40, LOG2, LOG2, points=pts)
    assert np.allclose(rep.lower, LOG2) and np.allclose(rep.upper, LOG2)


def test_audit_flags_violation(two_slope):
    itin = np.ones((3, 100), dtype=int)  # exponent log 4 exactly
    rep = sp.exponent_range_audit(two_slope, 100, LOG2, 1.0, itineraries=itin)
    assert not rep.ok and len(rep.violations) == 3


@pytest.mark.parametrize("n", [1, 6, 12])
def test_chebyshev_periodic_exponents(n):
    a = sp.periodic_exponents(mc.chebyshev_map(), n)
    assert a.min() >= LOG2 - 1e-9 and a.max() <= LOG4 + 1e-9
    assert a.min() == pytest.approx(LOG2) and a.max() == pytest.approx(LOG4)


def test_spectrum_csv(tmp_path, two_slope, ts_curve):
    est = sp.empirical_spectrum(two_slope, 8, bin_width=LOG2 / 8)
    p = tmp_path / "s.csv"
    sp.write_spectrum_csv(est, p, ts_curve)
    rows = p.read_text().splitlines()
    assert rows[0] == "alpha_bin,count,dim_estimate,F_predicted"
    assert len(rows) == 10
    assert int(rows[1].split(",")[1]) == 1
