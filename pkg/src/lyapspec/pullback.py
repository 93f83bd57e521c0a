"""Pull-backs of balls under the map: trees, telescope bounds, singular counts and diagnostics.

Preimages are taken with the extended branches so that a ball centred
near the edge of the domain is pulled back without truncation.  Monotone
preimage pieces that meet at a shared junction are glued into one
component, as the connected component of f^-1(W) is their union there.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import map_core
from .cocycle import is_pliss_time
from .errors import (BranchNotDiffeomorphic, ComputationError, CriticalOrbit,
                     NotPlissTime, TreeExplosion, ValidationError)

SLACK = 1e-12
DEFAULT_NODE_CAP = 1_000_000


# -- components ------------------------------------------------------------

def preimage_components(fmap, W: tuple[float, float], extended: bool = True):
    """Connected components of f^-1(W) meeting the domain, as (branch ids, (lo, hi))."""
    pieces = map_core.monotone_branch_inverses(fmap, W, extended=extended)
    comps: list[list] = []
    for j, (lo, hi) in pieces:
        if comps:
            ids, (plo, phi) = comps[-1]
            jprev = ids[-1]
            junction = fmap.branches[jprev].interval[1]
            if (jprev + 1 == j and fmap.branches[j].interval[0] == junction
                    and phi >= junction - SLACK and lo <= junction + SLACK):
                comps[-1] = [ids + (j,), (min(plo, lo), max(phi, hi))]
                continue
        comps.append([(j,), (lo, hi)])
    out = []
    for ids, (lo, hi) in comps:
        if any(lo <= b + SLACK and hi >= a - SLACK for a, b in fmap.domain_intervals):
            out.append((ids, (lo, hi)))
    return out


def component_containing(fmap, W: tuple[float, float], z: float, extended: bool = True):
    for ids, iv in preimage_components(fmap, W, extended):
        if iv[0] - SLACK <= z <= iv[1] + SLACK:
            return ids, iv
    raise ComputationError(f"no component of the preimage of {W} contains {z!r}")


def meets(points: Sequence[float], iv: tuple[float, float]) -> bool:
    return any(iv[0] - SLACK <= p <= iv[1] + SLACK for p in points)


# Small components are carried as (anchor, lo, hi) offsets so that their
# diameters keep full relative precision however deep the pull-back goes.
RELATIVE_BELOW = 1e-6


def critical_values(fmap) -> list:
    out = []
    for c in fmap.critical_set:
        out.append(fmap(c))
    return out


def _solve_offset(br, z: float, delta: float) -> float:
    """e with br(z + e) - br(z) = delta, from the Taylor expansion of the branch at z."""
    coeffs = np.array(br.coeffs)
    taylor = []
    d = coeffs
    fact = 1.0
    for m in range(len(coeffs)):
        taylor.append(np.polynomial.polynomial.polyval(z, d) / fact)
        d = np.polynomial.polynomial.polyder(d)
        fact *= m + 1
    a1 = taylor[1]
    e = delta / a1
    if len(taylor) > 2:
        for _ in range(60):
            g = sum(taylor[m] * e ** m for m in range(1, len(taylor))) - delta
            dg = sum(m * taylor[m] * e ** (m - 1) for m in range(1, len(taylor)))
            step = g / dg
            e -= step
            if abs(step) <= 1e-16 * abs(e):
                break
    return e


def pull_step(fmap, comp: tuple[float, float, float], zprime: float, cvals=None):
    """Component of f^-1(anchor + [lo, hi]) containing zprime, in offset form around zprime."""
    z, lo, hi = comp
    width = hi - lo
    if cvals is None:
        cvals = critical_values(fmap)
    near_cv = any(z + lo - width <= v <= z + hi + width for v in cvals)
    br = fmap.branches[fmap.branch_index(zprime)]
    if not near_cv and (br.is_affine or width <= RELATIVE_BELOW):
        # zprime and the exact preimage of the anchor differ by rounding only; anchoring the
        # offsets at zprime keeps the diameter exact instead of swamping it with that residual
        e1, e2 = _solve_offset(br, zprime, lo), _solve_offset(br, zprime, hi)
        a, b = br.ext_interval
        if a < zprime + min(e1, e2) and zprime + max(e1, e2) < b:
            return (zprime, min(e1, e2), max(e1, e2))
    _, (L, H) = component_containing(fmap, (z + lo, z + hi), zprime)
    return (zprime, L - zprime, H - zprime)


# -- trees -----------------------------------------------------------------

@dataclass(frozen=True)
class PullbackNode:
    depth: int
    left: float
    right: float
    signature: tuple
    singular: bool
    parent: int
    encounters: int

    @property
    def diameter(self) -> float:
        return self.right - self.left


@dataclass
class PullbackTree:
    y: float
    r: float
    depth: int
    nodes: list = field(default_factory=list)

    def level(self, k: int) -> list:
        return [nd for nd in self.nodes if nd.depth == k]

    def max_diameter(self, k: int) -> float:
        return max((nd.diameter for nd in self.level(k)), default=0.0)

    def singular_times(self) -> list:
        return sorted({nd.depth for nd in self.nodes if nd.singular})

    def to_rows(self):
        return [(nd.depth, nd.left, nd.right, format_signature(nd.signature), int(nd.singular)) for nd in self.nodes]

    def to_nested(self) -> dict:
        children: dict[int, list] = {}
        for i, nd in enumerate(self.nodes):
            children.setdefault(nd.parent, []).append(i)

        def build(i):
            nd = self.nodes[i]
            return {"depth": nd.depth, "interval": [nd.left, nd.right], "signature": format_signature(nd.signature),
                    "singular": nd.singular, "critical_encounters": nd.encounters,
                    "children": [build(c) for c in children.get(i, [])]}
        return {"y": self.y, "r": self.r, "depth": self.depth, "root": build(0)}


def format_signature(sig: tuple) -> str:
    return ".".join("+".join(str(j) for j in step) for step in sig)


def pull_back_tree(fmap, y: float, r: float, n: int, prune: str = "none", x_path: Sequence[float] | None = None,
                   per_depth_cap: int = 4096, node_cap: int = DEFAULT_NODE_CAP, max_depth: int = 64) -> PullbackTree:
    """All components of f^-k(B(y, r)) meeting the domain for k <= n, breadth first.

    prune: 'none', 'keep-only-x-branch' (keep the component containing x_path[n-k]
    at depth k, where x_path is a forward orbit ending at y) or 'cap-per-depth'.
    """
    if r <= 0 or n < 0 or n > max_depth:
        raise ValidationError(f"need r > 0 and 0 <= n <= {max_depth}")
    if prune not in ("none", "keep-only-x-branch", "cap-per-depth"):
        raise ValidationError(f"unknown prune policy {prune!r}")
    if prune == "keep-only-x-branch" and (x_path is None or len(x_path) < n + 1):
        raise ValidationError("keep-only-x-branch needs a forward orbit of length n+1 ending at y")
    sing = fmap.singular_set.points
    crit = fmap.critical_set
    root = (y - r, y + r)
    tree = PullbackTree(float(y), float(r), n)
    tree.nodes.append(PullbackNode(0, root[0], root[1], (), meets(sing, root), -1, int(meets(crit, root))))
    frontier = [0]
    for k in range(1, n + 1):
        nxt = []
        for pi in frontier:
            par = tree.nodes[pi]
            for ids, (lo, hi) in preimage_components(fmap, (par.left, par.right)):
                nxt.append(PullbackNode(k, lo, hi, par.signature + (ids,), meets(sing, (lo, hi)), pi,
                                        par.encounters + int(meets(crit, (lo, hi)))))
        if prune == "keep-only-x-branch":
            z = x_path[n - k]
            nxt = [nd for nd in nxt if nd.left - SLACK <= z <= nd.right + SLACK][:1]
        elif prune == "cap-per-depth":
            nxt = sorted(nxt, key=lambda nd: nd.left)[:per_depth_cap]
        base = len(tree.nodes)
        tree.nodes.extend(nxt)
        if len(tree.nodes) > node_cap:
            raise TreeExplosion(f"pull-back tree exceeded {node_cap} nodes at depth {k}")
        frontier = list(range(base, len(tree.nodes)))
    return tree


# -- telescope ---------------------------------------------------------------

@dataclass
class TelescopeReport:
    x: float
    n: int
    sigma: float
    epsilon: float
    r: float
    diameters: np.ndarray
    log_derivs: np.ndarray
    bounds: np.ndarray
    A1: float

    @property
    def holds(self) -> bool:
        k = np.arange(self.n + 1)
        lhs = self.diameters
        rhs = self.r * self.A1 * np.exp(-k * (self.sigma - self.epsilon))
        return bool(np.all(lhs <= rhs * (1 + 1e-12)))


def orbit_logs(fmap, pts: Sequence[float]) -> np.ndarray:
    return map_core.log_derivatives(fmap, pts)


def telescope_check(fmap, x: float, n: int, sigma: float, epsilon: float, r: float,
                    orbit_pts: Sequence[float] | None = None) -> TelescopeReport:
    """Diameters of the pull-backs of B(f^n x, r) along the orbit of x and the fitted constant A1.

    A1 is the least constant with diam_k <= r A1 e^{k eps} |(f^k)'(f^{n-k} x)|^-1 for all k <= n.
    """
    pts = np.asarray(orbit_pts if orbit_pts is not None else map_core.orbit(fmap, x, n), dtype=float)[: n + 1]
    if len(pts) < n + 1:
        raise ValidationError("orbit shorter than n")
    logs = orbit_logs(fmap, pts[:n])
    phi = np.concatenate([[0.0], np.cumsum(logs)])
    if not is_pliss_time(list(phi), n, sigma):
        raise NotPlissTime(f"n={n} is not a Pliss time for sigma={sigma}")
    W = (pts[n], -r, r)
    cvals = critical_values(fmap)
    diam = np.empty(n + 1)
    diam[0] = 2 * r
    for k in range(1, n + 1):
        W = pull_step(fmap, W, pts[n - k], cvals)
        diam[k] = W[2] - W[1]
    k = np.arange(n + 1)
    dlog = phi[n] - phi[n - k]
    ratio = diam * np.exp(dlog - k * epsilon) / r
    A1 = float(ratio.max())
    bounds = r * A1 * np.exp(k * epsilon - dlog)
    return TelescopeReport(float(pts[0]), n, float(sigma), float(epsilon), float(r), diam, dlog, bounds, A1)


# -- singular branch count ---------------------------------------------------

@dataclass
class SingularCountReport:
    y: float
    n: int
    r: float
    N: int
    counts: np.ndarray
    A2: float
    eps_hat: float


def _singular_pairs(fmap, y: float, n: int, r: float, node_cap: int):
    """Per depth m <= n, the set of maximal restart pairs (k, y_k) over all backward branches."""
    sing = fmap.singular_set.points
    cvals = critical_values(fmap)
    # stack entries: (i, y_i, restart index k, restart point y_k, component W in offset form)
    stack = [(0, y, 0, y, (y, -r, r))]
    pairs = [set() for _ in range(n + 1)]
    visited = 0
    while stack:
        i, yi, k, yk, W = stack.pop()
        pairs[i].add((k, round(yk, 12)))
        if i == n:
            continue
        for j, (lo, hi) in map_core.monotone_branch_inverses(fmap, (yi, yi)):
            z = lo
            visited += 1
            if visited > node_cap:
                raise TreeExplosion(f"singular count exceeded {node_cap} backward branches")
            W2 = pull_step(fmap, W, z, cvals)
            if meets(sing, (W2[0] + W2[1], W2[0] + W2[2])):
                stack.append((i + 1, z, i + 1, z, (z, -r, r)))
            else:
                stack.append((i + 1, z, k, yk, W2))
    return pairs


def singular_branch_count(fmap, y: float, n: int, r: float, node_cap: int = DEFAULT_NODE_CAP) -> SingularCountReport:
    """N(y, n, r): number of distinct (y_k, k) pairs, k the last restart time along each backward branch.

    Along a backward branch the ball is restarted at y_k whenever the current
    pull-back component contains a point of the singular set.  Branches with no
    restart contribute the pair (y, 0).  Counts for every m <= n come from one
    traversal; eps_hat is the slope of log N against m.
    """
    if r <= 0 or n < 1:
        raise ValidationError("need r > 0 and n >= 1")
    if not fmap.in_domain(y):
        raise ValidationError("y must lie in the domain")
    pairs = _singular_pairs(fmap, y, n, r, node_cap)
    counts = np.array([len(p) for p in pairs])
    m = np.arange(1, n + 1)
    logN = np.log(counts[1:])
    if n >= 2:
        slope, icpt = np.polyfit(m, logN, 1)
    else:
        slope, icpt = float(logN[0]), 0.0
    resid = logN - slope * m
    return SingularCountReport(float(y), n, float(r), int(counts[n]), counts, float(np.exp(resid.max())), float(slope))


# -- TCE and shadows ---------------------------------------------------------

@dataclass
class TCEReport:
    counts: np.ndarray
    M_cap: int
    density: float
    max_count: int


def tce_diagnostic(fmap, x: float, n_max: int, r: float, M_cap: int, orbit_pts: Sequence[float] | None = None) -> TCEReport:
    """Per n, the number of k < n for which the pull-back of B(f^n x, r) to f^k x meets a critical point."""
    pts = np.asarray(orbit_pts if orbit_pts is not None else map_core.orbit(fmap, x, n_max), dtype=float)
    crit = fmap.critical_set
    counts = np.zeros(n_max + 1, dtype=int)
    cvals = critical_values(fmap)
    for n in range(1, n_max + 1):
        W = (pts[n], -r, r)
        c = 0
        for j in range(1, n + 1):
            W = pull_step(fmap, W, pts[n - j], cvals)
            c += int(meets(crit, (W[0] + W[1], W[0] + W[2])))
        counts[n] = c
    dens = float(np.mean(counts[1:] <= M_cap)) if n_max >= 1 else 1.0
    return TCEReport(counts, int(M_cap), dens, int(counts.max()))


@dataclass
class ShadowReport:
    a: np.ndarray
    mean_prime: float
    total_length: float
    overcovered_fraction: float


def shadow_budget(fmap, x: float, n: int, kappa: float, M: int = 1, orbit_pts: Sequence[float] | None = None) -> ShadowReport:
    """a(j) = -log dist(f^j x, Crit) and the shadow statistics built from it.

    Maps without critical points in the domain measure distance to the ambient
    folds recorded on the map.  The primed mean drops, for each critical point,
    the single time of closest approach.
    """
    pts = np.asarray(orbit_pts if orbit_pts is not None else map_core.orbit(fmap, x, n), dtype=float)[:n]
    crit = np.array(fmap.critical_set or fmap.ambient_critical, dtype=float)
    if crit.size == 0:
        raise ValidationError("map has neither critical points nor ambient folds")
    D = np.abs(pts[:, None] - crit[None, :])
    if np.any(D.min(axis=1) == 0):
        raise CriticalOrbit(int(np.argmin(D.min(axis=1))))
    a = -np.log(D.min(axis=1))
    keep = np.ones(n, dtype=bool)
    keep[np.argmin(D, axis=0)] = False
    mean_prime = float(a[keep].sum() / n)
    length = kappa * np.maximum(a, 0.0)
    cover = np.zeros(n + 1)
    for j in range(n):
        if length[j] > 0:
            lo, hi = j + 1, min(n, j + int(math.floor(length[j])))
            if hi >= lo:
                cover[lo] += 1
                if hi + 1 <= n:
                    cover[hi + 1] -= 1
    cover = np.cumsum(cover)[1:]
    return ShadowReport(a, mean_prime, float(length.sum()), float(np.mean(cover > M)))


# -- distortion and critical bounds -----------------------------------------

def distortion(fmap, branch_ids: Sequence[int], Z: tuple[float, float], grid: int = 129) -> float:
    """sup |g'(x)| / |g'(y)| over a grid on Z, g = inverse of branch_ids[-1] o ... o inverse of branch_ids[0]."""
    xs = np.linspace(Z[0], Z[1], grid)
    logd = np.zeros_like(xs)
    cur = xs
    for j in branch_ids:
        br = fmap.branches[j]
        lo, hi = br.image()
        if cur.min() < lo - SLACK or cur.max() > hi + SLACK:
            raise BranchNotDiffeomorphic(f"interval leaves the image of branch {j}")
        cur = br.inverse(np.clip(cur, lo, hi))
        d = np.abs(br.deriv(cur))
        if np.any(d == 0):
            raise BranchNotDiffeomorphic("inverse branch passes through a critical point")
        logd -= np.log(d)
    return float(math.exp(logd.max() - logd.min()))


@dataclass
class CriticalBoundReport:
    samples: int
    violations: int
    min_ratio: float


def critical_image_bound_check(fmap, cp: map_core.CriticalPoint, samples=1000, seed: int = 0) -> CriticalBoundReport:
    """Check diam f(T) >= diam T |f'(x)| / (2 d A0^4) on intervals T near c.

    samples is a count (random T, x drawn inside B(c, R0)) or an explicit list of ((u, v), x).
    """
    if isinstance(samples, int):
        rng = np.random.default_rng(seed)
        cases = []
        for _ in range(samples):
            u, v = np.sort(rng.uniform(cp.c - cp.R0, cp.c + cp.R0, 2))
            cases.append(((u, v), rng.uniform(u, v)))
    else:
        cases = list(samples)
    viol, worst = 0, math.inf
    for (u, v), x in cases:
        u, v = max(u, fmap.hull[0]), min(v, fmap.hull[1])
        if not (u < v) or not fmap.in_domain(x):
            continue
        vals = [fmap(u), fmap(v)]
        if u < cp.c < v:
            vals.append(fmap(cp.c))
        diam_img = max(vals) - min(vals)
        rhs = (v - u) * abs(fmap.deriv(x)) / (2 * cp.d * cp.A0 ** 4)
        if rhs > 0:
            worst = min(worst, diam_img / rhs)
        if diam_img < rhs * (1 - 1e-12):
            viol += 1
    return CriticalBoundReport(len(cases), viol, worst)


# -- export ----------------------------------------------------------------

def write_tree_csv(tree: PullbackTree, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["depth", "left", "right", "signature", "singular_flag"])
        for d, lo, hi, sig, flag in tree.to_rows():
            w.writerow([d, format(lo, ".17g"), format(hi, ".17g"), sig, flag])


def write_tree_json(tree: PullbackTree, path) -> None:
    with open(path, "w") as fh:
        json.dump(tree.to_nested(), fh, indent=1)
