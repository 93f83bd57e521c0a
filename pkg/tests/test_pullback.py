import json
import math

import numpy as np
import pytest

from lyapspec import cocycle as cc
from lyapspec import map_core as mc
from lyapspec import pullback as pb
from lyapspec.errors import BranchNotDiffeomorphic, NotPlissTime, TreeExplosion, ValidationError


@pytest.fixture(scope="module")
def two_slope():
    return mc.two_slope_map()


def square_map():
    return mc.map_from_config({
        "name": "square", "intervals": [[-1, 1]],
        "branches": [{"interval": [-1, 0], "coeffs": [0, 0, 1]}, {"interval": [0, 1], "coeffs": [0, 0, 1]}],
        "critical": [{"c": 0.0, "d": 2, "R0": 1.0}],
    })


# -- components --------------------------------------------------------------

def test_preimage_components_tent():
    comps = pb.preimage_components(mc.tent_map(), (0.4, 0.6))
    ivs = sorted(iv for _, iv in comps)
    assert ivs[0] == pytest.approx((0.2, 0.3)) and ivs[1] == pytest.approx((0.7, 0.8))


def test_preimage_components_glue_at_fold():
    # the tent branches meet at 1/2 where T = 1, so a ball around 1 pulls back to one component
    comps = pb.preimage_components(mc.tent_map(), (0.9, 1.0))
    assert len(comps) == 1
    ids, iv = comps[0]
    assert set(ids) == {0, 1}
    assert iv == pytest.approx((0.45, 0.55))


# -- trees -------------------------------------------------------------------

def test_tent_tree_counts_and_diameters():
    tree = pb.pull_back_tree(mc.tent_map(), 0.5, 0.1, 3)
    for k in range(4):
        level = tree.level(k)
        assert len(level) == 2 ** k
        assert np.allclose([nd.diameter for nd in level], 0.2 * 2.0 ** -k)


def test_two_slope_tree_product_law(two_slope):
    y, r = 0.3, 0.01
    tree = pb.pull_back_tree(two_slope, y, r, 5)
    slope = {0: 2.0, 1: 4.0}
    for nd in tree.nodes:
        prod = np.prod([slope[step[0]] for step in nd.signature]) if nd.signature else 1.0
        assert nd.diameter == pytest.approx(2 * r / prod, rel=1e-12)
    assert len(tree.level(5)) == 32


def test_chebyshev_tree_depth_one():
    tree = pb.pull_back_tree(mc.chebyshev_map(), 0.0, 0.05, 1)
    level = sorted(tree.level(1), key=lambda nd: nd.left)
    assert len(level) == 2
    assert level[0].left == pytest.approx(-math.sqrt(2.05))
    assert level[0].right == pytest.approx(-math.sqrt(1.95))
    assert level[1].left == pytest.approx(math.sqrt(1.95))
    assert level[1].right == pytest.approx(math.sqrt(2.05))


def test_tree_singular_flags():
    tree = pb.pull_back_tree(mc.chebyshev_map(), -2.0, 0.05, 1)
    # f^-1 of B(-2, 0.05) is one component around the critical point 0
    level = tree.level(1)
    assert len(level) == 1 and level[0].singular


def test_tree_explosion():
    with pytest.raises(TreeExplosion):
        pb.pull_back_tree(mc.tent_map(), 0.5, 0.1, 12, node_cap=500)


def test_cap_per_depth():
    tree = pb.pull_back_tree(mc.tent_map(), 0.5, 0.1, 8, prune="cap-per-depth", per_depth_cap=16)
    assert max(len(tree.level(k)) for k in range(9)) <= 16


def test_tree_exports(tmp_path):
    tree = pb.pull_back_tree(mc.tent_map(), 0.5, 0.1, 2)
    pb.write_tree_csv(tree, tmp_path / "t.csv")
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0] == "depth,left,right,signature,singular_flag"
    assert len(rows) == 1 + 1 + 2 + 4
    pb.write_tree_json(tree, tmp_path / "t.json")
    doc = json.loads((tmp_path / "t.json").read_text())
    assert len(doc["root"]["children"]) == 2
    assert len(doc["root"]["children"][0]["children"]) == 2


def test_backward_shrinking(two_slope):
    tree = pb.pull_back_tree(two_slope, 0.2, 0.05, 10)
    d = [tree.max_diameter(k) for k in range(11)]
    assert all(d[k + 1] < d[k] for k in range(10))


# -- telescope -----------------------------------------------------------------

def test_telescope_two_slope_constant(two_slope):
    rng = np.random.default_rng(3)
    itin = rng.integers(0, 2, 60)
    pts = mc.orbit_from_itinerary(two_slope, itin[None, :])[0]
    c = cc.cocycle_from_itinerary(two_slope, itin)
    H = cc.pliss_times(c, 0.5).times
    A = [pb.telescope_check(two_slope, pts[0], n, 0.5, 0.0, 0.01, orbit_pts=pts).A1 for n in H]
    assert len(A) > 5
    # affine branches: diam_k |(f^k)'| = 2r exactly, so A1 = 2 at every Pliss time
    assert np.allclose(A, 2.0, atol=1e-9)
    assert max(A) <= 4


def test_telescope_requires_pliss_time():
    m = mc.tent_map()
    x = 0.1234
    with pytest.raises(NotPlissTime):
        pb.telescope_check(m, x, 10, 0.9, 0.0, 0.01)


def test_telescope_holds(two_slope):
    itin = np.array([0, 1] * 10)
    pts = mc.orbit_from_itinerary(two_slope, itin[None, :])[0]
    rep = pb.telescope_check(two_slope, pts[0], 20, 0.5, 0.05, 0.01, orbit_pts=pts)
    assert rep.holds


# -- singular branch counts ----------------------------------------------------

def test_two_slope_count_is_one(two_slope):
    rep = pb.singular_branch_count(two_slope, 0.3, 10, 0.05)
    assert np.all(rep.counts == 1)
    assert rep.eps_hat == pytest.approx(0.0, abs=1e-12)


def test_tent_count_subexponential():
    rng = np.random.default_rng(11)
    for y in rng.uniform(0, 1, 5):
        rep = pb.singular_branch_count(mc.tent_map(), float(y), 12, 0.01)
        assert math.log(rep.N) / 12 <= 0.1


def test_chebyshev_count_monotone_in_r():
    eps = [pb.singular_branch_count(mc.chebyshev_map(), 0.0, 10, r).eps_hat for r in (0.05, 0.02, 0.01)]
    assert eps[0] >= eps[1] >= eps[2]


def test_count_validation():
    with pytest.raises(ValidationError):
        pb.singular_branch_count(mc.tent_map(), 0.3, 5, 0.0)


# -- TCE, shadows, distortion ----------------------------------------------------

def test_tce_two_slope_zero(two_slope):
    itin = np.random.default_rng(0).integers(0, 2, 40)
    pts = mc.orbit_from_itinerary(two_slope, itin[None, :])[0]
    rep = pb.tce_diagnostic(two_slope, pts[0], 30, 0.01, 1, orbit_pts=pts)
    assert rep.max_count == 0


def test_tce_tent_far_orbit():
    # the orbit 0.2 -> 0.4 -> 0.8 -> 0.4 stays 0.1 away from 1/2; pulling back B(., 0.01) only shrinks it
    rep = pb.tce_diagnostic(mc.tent_map(), 0.2, 20, 0.01, 1, orbit_pts=[0.2] + [0.4, 0.8] * 10)
    assert rep.max_count == 0


def test_shadow_tent_far_orbit():
    pts = [0.2] + [0.4, 0.8] * 50
    rep = pb.shadow_budget(mc.tent_map(), 0.2, 100, 1.0, orbit_pts=pts)
    assert rep.mean_prime <= -math.log(0.1)


def test_shadow_two_slope_bounded(two_slope):
    itin = np.random.default_rng(1).integers(0, 2, 400)
    pts = mc.orbit_from_itinerary(two_slope, itin[None, :])[0]
    rep = pb.shadow_budget(two_slope, pts[0], 400, 1.0, orbit_pts=pts)
    # the Cantor set keeps distance >= 1/8 from the gap midpoint 5/8
    assert rep.a.max() <= -math.log(0.125) + 1e-12


def test_distortion_affine():
    assert pb.distortion(mc.tent_map(), [0, 1, 0, 0, 1], (0.1, 0.9)) == pytest.approx(1.0)


def test_distortion_chebyshev_grid_oracle():
    cheb = mc.chebyshev_map()
    D = pb.distortion(cheb, [1], (1.5, 2.0))
    # g(y) = sqrt(y + 2), g'(y) = 1 / (2 sqrt(y + 2)); ratio of extremes on [1.5, 2]
    y = np.linspace(1.5, 2.0, 10_000)
    g = 1 / (2 * np.sqrt(y + 2))
    assert D >= 1
    assert D == pytest.approx(g.max() / g.min(), rel=0.01)


def test_distortion_through_critical_value():
    with pytest.raises(BranchNotDiffeomorphic):
        pb.distortion(mc.chebyshev_map(), [1], (-2.0, -1.0))


# -- critical-image bound --------------------------------------------------------

def test_critical_bound_pure_power():
    m = square_map()
    cp = m.critical_points[0]
    h = 0.3
    rep = pb.critical_image_bound_check(m, cp, [((0.0, h), h)])
    assert rep.violations == 0
    # diam f(T) = h^2 and the right side is h * 2h / (2 * 2 * A0^4)
    assert rep.min_ratio == pytest.approx(2 * cp.A0 ** 4, rel=1e-9)


def test_critical_bound_symmetric():
    m = square_map()
    cp = m.critical_points[0]
    rep = pb.critical_image_bound_check(m, cp, [((-0.2, 0.2), 0.2), ((-0.5, 0.5), -0.5)])
    assert rep.violations == 0


@pytest.mark.parametrize("name", ["chebyshev", "quadratic:-1.8"])
def test_critical_bound_random(name):
    m = mc.builtin_map(name)
    for cp in m.critical_points:
        rep = pb.critical_image_bound_check(m, cp, 1000, seed=2)
        assert rep.violations == 0
