"""Invariant suites run by ``lyapspec verify``.

Every check is a pure function of its derived seed, so the report does not
depend on how many worker threads evaluate the checks.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cocycle as cc
from . import map_core as mc
from . import pressure as pr
from . import pullback as pb
from . import spectrum as sp


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{self.suite:<9} {self.name:<34} {'PASS' if self.passed else 'FAIL'}  {self.detail}"


def sub_seed(seed: int, suite: str, index: int) -> np.random.Generator:
    """Generator seeded by a fixed hash of (suite name, index) on top of the run seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(suite.encode()), index)))


# -- map_core ------------------------------------------------------------------

def _inverse_composition(rng):
    fmap = mc.chebyshev_map()
    a = rng.uniform(-1.9, 1.5)
    W = [(a, a + 0.3)]
    worst = 0.0
    for depth in range(1, 5):
        nxt = []
        for lo, hi in W:
            for _, iv in mc.monotone_branch_inverses(fmap, (lo, hi)):
                nxt.append(iv)
        W = nxt
        for lo, hi in W:
            for x in (lo, hi):
                y = x
                for _ in range(depth):
                    y = fmap(y)
                worst = max(worst, max(0.0, a - y, y - (a + 0.3)))
    return worst <= 1e-10, f"max excursion {worst:.3e}"


def _periodic_residual(rng):
    # forward iteration amplifies rounding by the multiplier, so measure the backward error
    worst = 0.0
    for fmap, n in ((mc.tent_map(), 12), (mc.chebyshev_map(), 12), (mc.two_slope_map(), 8)):
        for p, mult in mc.periodic_points(fmap, n):
            y = p
            for _ in range(n):
                y = fmap(y)
            worst = max(worst, abs(y - p) / abs(mult))
    return worst <= 1e-10, f"max |f^n(p)-p|/|mult| {worst:.3e}"


def _nonflat(rng):
    ok = True
    for fmap in (mc.chebyshev_map(), mc.quadratic_map(-1.8)):
        for cp in fmap.critical_points:
            off = rng.uniform(0, cp.R0, 100)
            off[off == 0] = cp.R0
            for x in np.concatenate([cp.c + off, cp.c - off]):
                if not fmap.in_domain(x):
                    continue
                ratio = abs(fmap.deriv(x)) / abs(x - cp.c) ** (cp.d - 1)
                ok &= 1 / cp.A0 <= ratio <= cp.A0
    return ok, "ratios within [1/A0, A0]"


def _chain_rule(rng):
    fmap = mc.chebyshev_map()
    worst = 0.0
    for _ in range(5):
        x = rng.uniform(-2, 2)
        pts = mc.orbit(fmap, x, 50)
        s = sum(math.log(abs(fmap.deriv(p))) for p in pts[:-1])
        prod = 0.0
        for p in pts[:-1]:
            prod += math.log(abs(2 * p))
        worst = max(worst, abs(s - prod) / max(1.0, abs(prod)))
    return worst <= 1e-9, f"relative error {worst:.3e}"


# -- cocycle ---------------------------------------------------------------

def _random_cocycle(rng, n=500, L=2.0, exact=False):
    if exact:
        steps = [Fraction(int(v), 64) for v in rng.integers(-64, int(64 * L) + 1, n)]
        vals = [Fraction(0)]
        for s in steps:
            vals.append(vals[-1] + s)
        return cc.cocycle_from_values(vals, L)
    steps = rng.uniform(-1.0, L, n)
    return cc.cocycle_from_values(np.concatenate([[0.0], np.cumsum(steps)]).tolist(), L)


def _envelope(rng):
    ok = True
    for exact in (False, True):
        c = _random_cocycle(rng, n=200, exact=exact)
        sigma = Fraction(1, 4) if exact else float(rng.uniform(0, 1.5))
        one = cc.sigma_envelope(c, sigma)
        brute = cc.envelope_bruteforce(c.values, sigma)
        if exact:
            ok &= one == brute
        else:
            ok &= float(np.max(np.abs(np.array(one) - np.array(brute)))) <= 1e-12
    return ok, "one-pass equals brute force"


def _pliss_density(rng):
    c = _random_cocycle(rng)
    sigma = float(rng.uniform(0, 0.5))
    rep = cc.pliss_times(c, sigma)
    ok = all(cc.is_pliss_time(c.values, h, sigma) for h in rep.times)
    q1 = sigma + float(rng.uniform(0, 0.3))
    q2 = q1 + float(rng.uniform(0.05, 0.5))
    cr = cc.crossing_intervals(c, sigma, q1, q2)
    return ok and cr.all_dense, f"{len(rep.times)} Pliss times, {len(cr.intervals)} crossings"


def _envelope_order(rng):
    c = _random_cocycle(rng)
    s1, s2 = sorted(rng.uniform(0, 1.5, 2))
    e1, e2 = np.array(cc.sigma_envelope(c, s1)), np.array(cc.sigma_envelope(c, s2))
    return bool(np.all(e1 <= e2 + 1e-12)), f"sigma {s1:.3f} <= {s2:.3f}"


def _alpha_sharp_sandwich(rng):
    ok = True
    for _ in range(50):
        a, b = sorted(rng.uniform(0.01, 2.0, 2))
        chi = b + float(rng.uniform(0, 1))
        s = cc.alpha_sharp(a, b, chi)
        ok &= a < s < b
    return ok, "alpha < alpha_sharp < beta"


def _clustered(rng):
    n = 2000
    J = np.nonzero(rng.random(n) < 0.3)[0] + 1
    d = len(J) / n
    pts, m = cc.clustered_subset(J.tolist(), n, d, 5)
    return set(pts) <= set(J.tolist()) and pts[-1] - pts[0] <= m, f"span {pts[-1] - pts[0]} <= m={m}"


# -- pressure ----------------------------------------------------------------

def _bracket_nesting(rng):
    fmap = mc.two_slope_map()
    ok = True
    for t in rng.uniform(-2, 2, 5):
        for n in (3, 5):
            l1, u1 = pr.pressure_markov(fmap, t, n)
            l2, u2 = pr.pressure_markov(fmap, t, 2 * n)
            ok &= l1 <= l2 + 1e-12 and l2 <= u2 + 1e-12 and u2 <= u1 + 1e-12
    return ok, "lower(n) <= lower(2n) <= upper(2n) <= upper(n)"


def _convexity(rng):
    ok = True
    for fmap in (mc.tent_map(), mc.two_slope_map(), mc.chebyshev_map()):
        c = pr.build_pressure_curve(fmap, (-2, 2), 41, 10)
        d1 = np.diff(c.P)
        ok &= bool(np.all(np.diff(d1) >= -1e-12) and np.all(d1 <= 1e-12))
    return ok, "convex and non-increasing"


def _cross_oracle(rng):
    fmap = mc.two_slope_map()
    g = pr.markov_graph_from_map(fmap)
    worst = 0.0
    for t in np.linspace(-2, 2, 9):
        lo, up = pr.pressure_markov(fmap, t, 10)
        mid = 0.5 * (lo + up)
        worst = max(worst, abs(mid - pr.pressure_periodic(fmap, t, 10)), abs(mid - pr.graph_pressure(g, t)))
    return worst <= 1e-4, f"max disagreement {worst:.3e}"


def _legendre_duality(rng):
    c = pr.build_pressure_curve(mc.two_slope_map(), (-2, 2), 41, 10)
    alphas = np.linspace(c.chi_inf, c.chi_sup, 161)[1:-1]
    F = np.array([pr.legendre_F(c, a) for a in alphas])
    worst = 0.0
    for t in np.linspace(-1.5, 1.5, 7):
        dual = float(np.max(alphas * F - alphas * t))
        worst = max(worst, abs(dual - c(t)))
    return worst <= 1e-4, f"max |P - dual| {worst:.3e}"


def _conformal(rng):
    fmap = mc.two_slope_map()
    t = float(rng.uniform(-1, 2))
    m = pr.conformal_eigenmeasure(fmap, t, 6)
    return m.identity_error <= 1e-8 and abs(m.masses.sum() - 1) <= 1e-12, f"t={t:.3f} error {m.identity_error:.2e}"


def _multipliers(rng):
    ok = True
    for fmap in (mc.tent_map(), mc.two_slope_map(), mc.chebyshev_map()):
        for n in (1, 4, 8):
            ok &= all(abs(mult) >= 1 for _, mult in mc.periodic_points(fmap, n))
    return ok, "|(f^n)'(p)| >= 1"


# -- pullback ------------------------------------------------------------------

def _pullback_consistency(rng):
    fmap = mc.chebyshev_map()
    y = float(rng.uniform(-1.5, 1.5))
    r = 0.05
    tree = pb.pull_back_tree(fmap, y, r, 5)
    worst = 0.0
    for nd in tree.level(5):
        z = 0.5 * (nd.left + nd.right)
        for _ in range(5):
            z = nd_eval(fmap, z)
        worst = max(worst, max(0.0, abs(z - y) - r))
    return worst <= 1e-8, f"max excursion {worst:.3e}"


def nd_eval(fmap, z):
    # leaves may sit in the extension margin; evaluate with the nearest branch polynomial
    for br in fmap.branches:
        a, b = br.ext_interval
        if a <= z <= b:
            return float(br.value(z))
    return fmap(z)


def _product_law(rng):
    fmap = mc.two_slope_map()
    y = float(rng.uniform(0.1, 0.4))
    r = 0.01
    tree = pb.pull_back_tree(fmap, y, r, 6)
    worst = 0.0
    slopes = {0: 2.0, 1: 4.0}
    for nd in tree.level(6):
        prod = np.prod([slopes[step[0]] for step in nd.signature])
        worst = max(worst, abs(nd.diameter * prod - 2 * r) / (2 * r))
    return worst <= 1e-9, f"relative error {worst:.3e}"


def _singular_monotone(rng):
    fmap = mc.chebyshev_map()
    y = float(rng.uniform(-1.9, 1.9))
    counts = [pb.singular_branch_count(fmap, y, 8, r).counts for r in (0.2, 0.1, 0.05)]
    ok = all(bool(np.all(np.diff(c) >= 0)) for c in counts)
    ok &= all(bool(np.all(counts[i] >= counts[i + 1])) for i in range(2))
    return ok, f"N(y,8,r) = {[int(c[-1]) for c in counts]}"


def _bashrink(rng):
    fmap = mc.two_slope_map()
    tree = pb.pull_back_tree(fmap, float(rng.uniform(0.1, 0.4)), 0.05, 8)
    d = [tree.max_diameter(k) for k in range(9)]
    return bool(np.all(np.diff(d) < 0)), f"max diameter at depth 8: {d[-1]:.3e}"


# -- spectrum ----------------------------------------------------------------

def _count_conservation(rng):
    ok = True
    for fmap in (mc.tent_map(), mc.two_slope_map()):
        for n in (8, 12):
            ok &= sp.empirical_spectrum(fmap, n).total == 2 ** n
    return ok, "sum of bin counts = 2^n"


def _unimodal(rng):
    est = sp.empirical_spectrum(mc.two_slope_map(), 16)
    _, _, e = est.occupied()
    i = int(np.argmax(e))
    ok = bool(np.all(np.diff(e[: i + 1]) >= 0) and np.all(np.diff(e[i:]) <= 0))
    return ok, f"peak bin {i}"


def _audit(rng):
    fmap = mc.two_slope_map()
    itin = rng.integers(0, 2, (500, 400))
    rep = sp.exponent_range_audit(fmap, 400, math.log(2), math.log(4), itineraries=itin)
    return rep.ok, f"{len(rep.violations)} violations"


def _periodic_range(rng):
    fmap = mc.chebyshev_map()
    n = int(rng.integers(4, 11))
    a = sp.periodic_exponents(fmap, n)
    lo, hi = math.log(2), math.log(4)
    return bool(np.all(a >= lo - 1e-9) and np.all(a <= hi + 1e-9)), f"n={n}, range [{a.min():.6f}, {a.max():.6f}]"


SUITES = {
    "map_core": [("inverse composition", _inverse_composition), ("periodic residual", _periodic_residual),
                 ("non-flatness", _nonflat), ("chain rule", _chain_rule)],
    "cocycle": [("envelope vs brute force", _envelope), ("Pliss and crossing density", _pliss_density),
                ("envelope ordering", _envelope_order), ("alpha-sharp sandwich", _alpha_sharp_sandwich),
                ("clustered subset", _clustered)],
    "pressure": [("bracket nesting", _bracket_nesting), ("convexity", _convexity),
                 ("cross-oracle agreement", _cross_oracle), ("Legendre duality", _legendre_duality),
                 ("conformal identity", _conformal), ("expanding multipliers", _multipliers)],
    "pullback": [("pull-back consistency", _pullback_consistency), ("diameter product law", _product_law),
                 ("singular count monotone", _singular_monotone), ("backward shrinking", _bashrink)],
    "spectrum": [("count conservation", _count_conservation), ("unimodal spectrum", _unimodal),
                 ("exponent audit", _audit), ("periodic exponents in range", _periodic_range)],
}


def run_suites(suite: str = "all", seed: int = 0, threads: int = 1) -> list[CheckResult]:
    names = list(SUITES) if suite == "all" else [suite]
    for s in names:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}")
    jobs = [(s, i, name, fn) for s in names for i, (name, fn) in enumerate(SUITES[s])]

    def run(job):
        s, i, name, fn = job
        try:
            ok, detail = fn(sub_seed(seed, s, i))
        except Exception as exc:  # a crash is a failed check, reported not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        return CheckResult(s, name, bool(ok), detail)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]


def format_report(results: list[CheckResult], seed: int) -> str:
    lines = [f"lyapspec verification report (seed {seed})"]
    lines += [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
