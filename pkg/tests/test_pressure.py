import json
import math
import warnings

import numpy as np
import pytest

from lyapspec import map_core as mc
from lyapspec import pressure as pr
from lyapspec.errors import InvalidBand, NotExpanding, NotMarkov, ValidationError

LOG2, LOG4 = math.log(2), math.log(4)
T0 = math.log2((1 + math.sqrt(5)) / 2)


def two_slope_P(t):
    return math.log(2.0 ** -t + 4.0 ** -t)


def bernoulli_F(p):
    """Parametric oracle: exponent p log2 + (1-p) log4 carries dimension H(p) / alpha."""
    alpha = p * LOG2 + (1 - p) * LOG4
    H = -(p * math.log(p) + (1 - p) * math.log(1 - p))
    return alpha, H / alpha


@pytest.fixture(scope="module")
def two_slope():
    return mc.two_slope_map()


@pytest.fixture(scope="module")
def ts_curve(two_slope):
    return pr.build_pressure_curve(two_slope, (-2, 2), 81, 14)


# -- brackets ----------------------------------------------------------------

@pytest.mark.parametrize("t", [-2.0, -0.3, 0.0, 1.0, 1.7])
@pytest.mark.parametrize("n", [1, 4, 9])
def test_tent_bracket_exact(t, n):
    lo, up = pr.pressure_markov(mc.tent_map(), t, n)
    assert lo == pytest.approx((1 - t) * LOG2, abs=1e-13)
    assert up == pytest.approx((1 - t) * LOG2, abs=1e-13)


@pytest.mark.parametrize("t", [-1.5, 0.0, 0.5, 2.0])
def test_two_slope_depth_one(two_slope, t):
    lo, up = pr.pressure_markov(two_slope, t, 1)
    assert lo == pytest.approx(two_slope_P(t), abs=1e-13)
    assert up == pytest.approx(two_slope_P(t), abs=1e-13)


def test_two_slope_zero_at_golden_root(two_slope):
    assert 2.0 ** -T0 + 4.0 ** -T0 == pytest.approx(1.0)
    lo, up = pr.pressure_markov(two_slope, T0, 10)
    assert abs(lo) < 1e-12 and abs(up) < 1e-12


def test_periodic_tent_entropy():
    assert pr.pressure_periodic(mc.tent_map(), 0.0, 10) == pytest.approx(LOG2, abs=1e-13)


def test_periodic_chebyshev_entropy():
    assert pr.pressure_periodic(mc.chebyshev_map(), 0.0, 12) == pytest.approx(LOG2, abs=1e-12)


def test_periodic_chebyshev_left_of_kink():
    # for t <= -1 the fixed point with multiplier 4 dominates: P(t) -> -t log 4
    est = pr.pressure_periodic(mc.chebyshev_map(), -2.0, 12)
    assert est == pytest.approx(2 * LOG4, abs=0.02)


def test_markov_needed(two_slope):
    with pytest.raises(NotMarkov):
        pr.build_pressure_curve(mc.quadratic_map(-1.8), method="markov")


# -- graphs ------------------------------------------------------------------

def test_graph_single_loop():
    g = pr.MarkovGraph(1, ((0, 0, 2.0),))
    for t in (-1.0, 0.0, 2.5):
        assert pr.graph_pressure(g, t) == pytest.approx(-t * LOG2)


def test_graph_complete_two():
    g = pr.MarkovGraph(2, tuple((k, l, 2.0) for k in range(2) for l in range(2)))
    for t in (-1.0, 0.0, 0.7):
        assert pr.graph_pressure(g, t) == pytest.approx(LOG2 - t * LOG2, abs=1e-12)


def test_graph_matches_markov(two_slope):
    g = pr.markov_graph_from_map(two_slope)
    for t in np.linspace(-2, 2, 20):
        lo, up = pr.pressure_markov(two_slope, t, 8)
        assert pr.graph_pressure(g, t) == pytest.approx(0.5 * (lo + up), abs=1e-10)


def test_graph_reducible_warns():
    g = pr.MarkovGraph(2, ((0, 0, 2.0), (0, 1, 2.0), (1, 1, 3.0)))
    with pytest.warns(pr.ReducibleGraphWarning):
        val = pr.graph_pressure(g, 0.0)
    assert val == pytest.approx(0.0)


def test_graph_validation():
    with pytest.raises(ValidationError):
        pr.MarkovGraph(2, ((0, 0, 2.0),))
    with pytest.raises(ValidationError):
        pr.MarkovGraph(1, ((0, 0, -1.0),))


def test_graph_requires_affine():
    with pytest.raises((NotExpanding, NotMarkov)):
        pr.markov_graph_from_map(mc.chebyshev_map())


# -- curves ------------------------------------------------------------------

def test_tent_curve():
    c = pr.build_pressure_curve(mc.tent_map(), (-2, 2), 81, 10)
    assert np.allclose(c.P, (1 - c.t_grid) * LOG2, atol=1e-13)
    assert c.chi_inf == pytest.approx(LOG2) and c.chi_sup == pytest.approx(LOG2)
    assert c.t0 == pytest.approx(1.0, abs=1e-9)
    assert c.t_plus == math.inf and c.t_minus == -math.inf


def test_two_slope_curve(ts_curve):
    assert np.allclose(ts_curve.P, [two_slope_P(t) for t in ts_curve.t_grid], atol=1e-12)
    assert ts_curve.t0 == pytest.approx(T0, abs=1e-9)
    assert ts_curve.chi_inf == pytest.approx(LOG2, abs=1e-6)
    assert ts_curve.chi_sup == pytest.approx(LOG4, abs=1e-6)


def test_curve_convex_decreasing(ts_curve):
    d = np.diff(ts_curve.P)
    assert np.all(d < 0)
    assert np.all(np.diff(d) >= -1e-12)


def test_convexification_of_explicit_function():
    f = lambda t: abs(t) - t + 0.1 * math.sin(5 * t) * 0  # convex kinked function
    c = pr.curve_from_function(f, (-2, 2), 41)
    assert np.allclose(c.P, [f(t) for t in c.t_grid])


def test_lower_convex_hull_removes_bump():
    x = np.linspace(0, 1, 5)
    y = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    assert np.allclose(pr.lower_convex_hull(x, y), 0.0)


def test_chebyshev_kink():
    c = pr.build_pressure_curve(mc.chebyshev_map(), (-2, 2), 81, 12, method="periodic")
    assert c.t_minus == pytest.approx(-1.0, abs=0.05)
    assert c.chi_inf == pytest.approx(LOG2, abs=1e-3)
    assert c.chi_sup == pytest.approx(LOG4, abs=1e-3)


def test_grid_validation(two_slope):
    with pytest.raises(ValidationError):
        pr.build_pressure_curve(two_slope, (-2, 2), 3, 8)
    with pytest.raises(ValidationError):
        pr.build_pressure_curve(two_slope, (2, -2), 11, 8)


def test_threads_bit_identical(two_slope):
    a = pr.build_pressure_curve(two_slope, (-2, 2), 41, 10, threads=1)
    b = pr.build_pressure_curve(two_slope, (-2, 2), 41, 10, threads=4)
    assert np.array_equal(a.P, b.P) and np.array_equal(a.P_lower, b.P_lower)


# -- Legendre transform --------------------------------------------------------

def test_tent_F():
    c = pr.build_pressure_curve(mc.tent_map(), (-2, 2), 41, 8)
    assert pr.legendre_F(c, LOG2) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.618, 0.8, 0.95])
def test_two_slope_F_parametric(ts_curve, p):
    alpha, F = bernoulli_F(p)
    assert pr.legendre_F(ts_curve, alpha) == pytest.approx(F, abs=1e-6)


def test_F_peak_is_t0(ts_curve):
    cs = pr.chi_star(ts_curve)
    assert pr.legendre_F(ts_curve, cs) == pytest.approx(T0, abs=1e-6)


def test_F_outside_range(ts_curve):
    assert pr.legendre_F(ts_curve, 0.5) == -math.inf
    assert pr.legendre_F(ts_curve, 1.5) == -math.inf


def test_F_endpoints_zero(ts_curve):
    assert pr.legendre_F(ts_curve, LOG2) == pytest.approx(0.0, abs=1e-6)
    assert pr.legendre_F(ts_curve, LOG4) == pytest.approx(0.0, abs=1e-6)


def test_spectrum_curve(ts_curve):
    s = pr.build_spectrum_curve(ts_curve, 41)
    assert s.F.max() <= T0 + 1e-9
    assert s.F0 is None


def test_F0_limit():
    # P(t) = log(1 + e^{-t}) has chi_inf = 0; F(alpha) -> the entropy slope at t -> infinity, which is 0
    c = pr.curve_from_function(lambda t: math.log1p(math.exp(-t)) if t > -30 else -t, (-2, 2), 41)
    assert c.chi_inf == pytest.approx(0.0, abs=1e-9)
    assert pr.F0(c) is not None


# -- conformal measures ------------------------------------------------------

def test_conformal_tent_uniform():
    m = pr.conformal_eigenmeasure(mc.tent_map(), 0.7, 5)
    assert np.allclose(m.masses, 2.0 ** -5)


def test_conformal_two_slope_branch_masses(two_slope):
    m0 = pr.conformal_eigenmeasure(two_slope, 0.0, 4)
    assert np.allclose(m0.branch_masses, [0.5, 0.5])
    m1 = pr.conformal_eigenmeasure(two_slope, 1.0, 4)
    assert np.allclose(m1.branch_masses, [2 / 3, 1 / 3])
    assert m1.pressure == pytest.approx(two_slope_P(1.0))


def test_conformal_requires_affine():
    with pytest.raises(NotExpanding):
        pr.conformal_eigenmeasure(mc.chebyshev_map(), 1.0, 3)


# -- irregular bounds ----------------------------------------------------------

def test_irregular_bound_at_peak(ts_curve):
    cs = pr.chi_star(ts_curve)
    b = pr.irregular_bound(ts_curve, cs, cs)
    assert b.lower == pytest.approx(T0, abs=1e-6)
    assert b.upper_weak == pytest.approx(T0, abs=1e-6)


def test_irregular_bound_at_edge(ts_curve):
    b = pr.irregular_bound(ts_curve, LOG2, LOG2)
    assert b.lower == pytest.approx(0.0, abs=1e-6)
    assert b.upper_weak == pytest.approx(0.0, abs=1e-6)


def test_irregular_bound_empty_flag_follows_alpha_sharp(ts_curve):
    # alpha_sharp = log4 / (1 + (log4 - 0.1 log2)/log4) = (2/1.95) log2, just above chi_inf
    b = pr.irregular_bound(ts_curve, 0.1 * LOG2, LOG4)
    assert b.alpha_sharp == pytest.approx(2 / 1.95 * LOG2)
    assert b.empty_flag is False
    b = pr.irregular_bound(ts_curve, 0.0, LOG2 * 1.2)
    assert b.alpha_sharp < LOG2 and b.empty_flag


def test_irregular_bound_applies_flag(ts_curve, two_slope):
    assert pr.irregular_bound(ts_curve, LOG2, LOG4, two_slope).theorem_applies is False
    assert pr.irregular_bound(ts_curve, LOG2, LOG4, mc.tent_map()).theorem_applies is False


def test_irregular_bound_invalid(ts_curve):
    with pytest.raises(InvalidBand):
        pr.irregular_bound(ts_curve, 1.0, 0.9)


# -- export ------------------------------------------------------------------

def test_pressure_csv_roundtrip(tmp_path, ts_curve):
    p = tmp_path / "pressure.csv"
    pr.write_pressure_csv(ts_curve, p)
    rows = p.read_text().splitlines()
    assert rows[0] == "t,P_lower,P,P_upper"
    vals = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert np.array_equal(vals[:, 2], ts_curve.P)


def test_summary_json(ts_curve):
    d = json.loads(pr.summary_json(ts_curve))
    assert d["t0"] == pytest.approx(T0)
    assert d["t_plus"] == "inf"
