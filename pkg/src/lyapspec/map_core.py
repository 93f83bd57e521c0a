"""Piecewise-monotone multimodal maps with closed-form branches.

A map is a finite list of monotone polynomial branches laid out over a
finite union of pairwise disjoint closed intervals.  Derivatives are exact
(symbolic derivative of the branch polynomial), which keeps the derivative
cocycle free of finite-difference noise.

Every branch also carries an *extended* interval: on sides that are not
shared with a neighbouring branch the polynomial is continued a small
margin outside the domain.  Pull-back constructions use the extension so
that balls centred near the boundary of the invariant set do not get
truncated; evaluation and orbits never do.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CriticalOrbit, OrbitEscaped, OutOfDomain, ValidationError

DOMAIN_SLACK = 1e-12
MERGE_TOL = 1e-9
ROOT_TOL = 64 * np.finfo(float).eps
DEFAULT_MAX_PERIOD = 16


@dataclass(frozen=True)
class MonotoneBranch:
    """A strictly monotone polynomial piece ``x -> sum coeffs[i] x**i`` on ``interval``."""

    interval: tuple[float, float]
    coeffs: tuple[float, ...]
    ext_interval: tuple[float, float] | None = None

    def __post_init__(self):
        a, b = (float(v) for v in self.interval)
        if not a < b:
            raise ValidationError(f"degenerate branch interval {self.interval}")
        object.__setattr__(self, "interval", (a, b))
        coeffs = tuple(float(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if len(coeffs) < 2 or len(coeffs) > 5:
            raise ValidationError("branches must be polynomials of degree 1..4")
        object.__setattr__(self, "coeffs", coeffs)
        if self.ext_interval is None:
            object.__setattr__(self, "ext_interval", (a, b))
        object.__setattr__(self, "_dcoeffs", tuple(P.polyder(np.array(coeffs))))

    @property
    def dcoeffs(self) -> tuple[float, ...]:
        return self._dcoeffs

    @property
    def is_affine(self) -> bool:
        return len(self.coeffs) == 2

    @property
    def orientation(self) -> int:
        a, b = self.interval
        return 1 if self.value(b) > self.value(a) else -1

    def value(self, x):
        if self.is_affine:
            return self.coeffs[0] + self.coeffs[1] * x
        return P.polyval(x, self.coeffs)

    def deriv(self, x):
        if self.is_affine:
            return self.coeffs[1] + 0.0 * x
        return P.polyval(x, self._dcoeffs)

    def image(self, extended: bool = False) -> tuple[float, float]:
        a, b = self.ext_interval if extended else self.interval
        va, vb = float(self.value(a)), float(self.value(b))
        return (min(va, vb), max(va, vb))

    def derivative_extremes(self) -> tuple[float, float]:
        """(min |f'|, max |f'|) over the branch interval, from endpoints and stationary points of f'."""
        a, b = self.interval
        pts = [a, b]
        if len(self._dcoeffs) > 2:
            for r in P.polyroots(P.polyder(np.array(self._dcoeffs))):
                if abs(r.imag) < 1e-12 and a < r.real < b:
                    pts.append(r.real)
        vals = np.abs(self.deriv(np.array(pts)))
        return float(vals.min()), float(vals.max())

    def inverse(self, v, extended: bool = False):
        """Solve ``value(x) = v`` inside the (extended) interval; vectorised over ``v``."""
        a, b = self.ext_interval if extended else self.interval
        scalar = np.ndim(v) == 0
        v = np.asarray(v, dtype=float)
        if self.is_affine:
            x = np.clip((v - self.coeffs[0]) / self.coeffs[1], a, b)
        elif len(self.coeffs) == 3:
            x = np.clip(self._quadratic_root(v, a, b), a, b)
        else:
            s = self.orientation
            lo = np.full(v.shape, a)
            hi = np.full(v.shape, b)
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                right = s * (self.value(mid) - v) > 0
                new_lo = np.where(right, lo, mid)
                new_hi = np.where(right, mid, hi)
                if np.array_equal(new_lo, lo) and np.array_equal(new_hi, hi):
                    break
                lo, hi = new_lo, new_hi
            x = 0.5 * (lo + hi)
        return float(x) if scalar else x

    def _quadratic_root(self, v: np.ndarray, a: float, b: float) -> np.ndarray:
        """Closed-form root in [a, b]; avoids the sqrt(eps) loss of bisection near a fold."""
        c0, c1, c2 = self.coeffs
        disc = np.maximum(c1 * c1 - 4.0 * c2 * (c0 - v), 0.0)
        q = -0.5 * (c1 + math.copysign(1.0, c1) * np.sqrt(disc))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(q != 0, q / c2, -c1 / (2 * c2))
            r2 = np.where(q != 0, (c0 - v) / q, -c1 / (2 * c2))
        dist = lambda r: np.maximum(a - r, 0) + np.maximum(r - b, 0)
        return np.where(dist(r1) <= dist(r2), r1, r2)


@dataclass(frozen=True)
class CriticalPoint:
    """Non-flat critical point: A0^-1 <= |f'(x)| / |x-c|^(d-1) <= A0 for |x-c| <= R0."""

    c: float
    d: int
    kind: str = "turning"
    A0: float = 0.0
    R0: float = 0.0

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("critical order must be >= 2")
        if self.kind not in ("turning", "inflection"):
            raise ValidationError(f"unknown critical kind {self.kind!r}")


@dataclass(frozen=True)
class SingularSet:
    points: tuple[float, ...]
    provenance: tuple[str, ...]

    def contains_any(self, lo: float, hi: float, slack: float = DOMAIN_SLACK) -> bool:
        return any(lo - slack <= p <= hi + slack for p in self.points)


@dataclass(frozen=True)
class Cylinders:
    """Monotone pieces of f^n: ``left[i] <= right[i]`` with branch itinerary ``itin[i]``."""

    left: np.ndarray
    right: np.ndarray
    itin: np.ndarray

    def __len__(self):
        return len(self.left)

    @property
    def depth(self) -> int:
        return self.itin.shape[1]


@dataclass(frozen=True)
class MultimodalMap:
    name: str
    domain_intervals: tuple[tuple[float, float], ...]
    branches: tuple[MonotoneBranch, ...]
    critical_points: tuple[CriticalPoint, ...] = ()
    is_markov: bool = False
    exceptional_flag: bool = False
    not_open: tuple[float, ...] | None = None
    ambient_critical: tuple[float, ...] = ()
    margin: float = 0.1
    _lefts: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.domain_intervals))
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if not b0 < a1:
                raise ValidationError("domain intervals must be pairwise disjoint")
        object.__setattr__(self, "domain_intervals", ivs)
        brs = sorted(self.branches, key=lambda br: br.interval[0])
        for iv in ivs:
            inside = [br for br in brs if iv[0] - DOMAIN_SLACK <= br.interval[0] and br.interval[1] <= iv[1] + DOMAIN_SLACK]
            if not inside or inside[0].interval[0] != iv[0] or inside[-1].interval[1] != iv[1]:
                raise ValidationError(f"branches do not cover domain interval {iv}")
            for left, right in zip(inside, inside[1:]):
                if left.interval[1] != right.interval[0]:
                    raise ValidationError("consecutive branches must meet at a common endpoint")
        if sum(1 for br in brs if any(iv[0] <= br.interval[0] and br.interval[1] <= iv[1] for iv in ivs)) != len(brs):
            raise ValidationError("every branch must lie inside one domain interval")
        for br in brs:
            a, b = br.interval
            xs = np.linspace(a, b, 259)[1:-1]
            d = br.deriv(xs)
            if np.any(d == 0) or (np.any(d > 0) and np.any(d < 0)):
                raise ValidationError(f"branch on {br.interval} is not strictly monotone")
        # extend each branch on sides that are domain-interval endpoints
        ends = {a for a, _ in ivs} | {b for _, b in ivs}
        extended = []
        for br in brs:
            a, b = br.interval
            extended.append(MonotoneBranch(br.interval, br.coeffs,
                                           (a - self.margin if a in ends else a, b + self.margin if b in ends else b)))
        object.__setattr__(self, "branches", tuple(extended))
        object.__setattr__(self, "_lefts", tuple(br.interval[0] for br in extended))
        crit = []
        for cp in self.critical_points:
            crit.append(_calibrate_critical(self, cp))
        object.__setattr__(self, "critical_points", tuple(crit))
        if self.is_markov and not self._markov_structure_ok():
            raise ValidationError(f"map {self.name!r} is flagged Markov but branch images are not unions of partition intervals")

    # -- structure ---------------------------------------------------------
    @property
    def boundary_points(self) -> tuple[float, ...]:
        return tuple(v for iv in self.domain_intervals for v in iv)

    @property
    def hull(self) -> tuple[float, float]:
        return (self.domain_intervals[0][0], self.domain_intervals[-1][1])

    @property
    def folds(self) -> tuple[float, ...]:
        """Junctions between adjacent branches of opposite orientation (turning points)."""
        out = []
        for left, right in zip(self.branches, self.branches[1:]):
            if left.interval[1] == right.interval[0] and left.orientation != right.orientation:
                out.append(left.interval[1])
        return tuple(out)

    @property
    def critical_set(self) -> tuple[float, ...]:
        """Critical points together with non-smooth folds; used by TCE and shadow diagnostics."""
        return tuple(sorted({cp.c for cp in self.critical_points} | set(self.folds)))

    @property
    def singular_set(self) -> SingularSet:
        crit = {cp.c for cp in self.critical_points}
        if self.not_open is not None:
            no = set(self.not_open)
        else:
            turning = {cp.c for cp in self.critical_points if cp.kind == "turning"} | set(self.folds)
            no = turning | set(self.boundary_points)
        pts, prov = [], []
        for p in sorted(crit | no):
            pts.append(p)
            if p in crit:
                prov.append("critical")
            elif p in self.boundary_points:
                prov.append("boundary")
            else:
                prov.append("not-open")
        return SingularSet(tuple(pts), tuple(prov))

    @property
    def slope_bound(self) -> float:
        """L = sup over the domain of log|f'|."""
        return math.log(max(br.derivative_extremes()[1] for br in self.branches))

    @property
    def min_abs_derivative(self) -> float:
        return min(br.derivative_extremes()[0] for br in self.branches)

    @property
    def is_expanding(self) -> bool:
        return not self.critical_points and self.min_abs_derivative > 1.0

    @property
    def is_interval_union(self) -> bool:
        """True when f maps the domain into itself, so the invariant set is the whole domain."""
        return all(any(a - 1e-12 <= lo and hi <= b + 1e-12 for a, b in self.domain_intervals)
                   for lo, hi in (br.image() for br in self.branches))

    def transitions(self) -> np.ndarray:
        """Boolean matrix T[i, j]: image of branch i covers the interval of branch j."""
        n = len(self.branches)
        T = np.zeros((n, n), dtype=bool)
        for i, bi in enumerate(self.branches):
            lo, hi = bi.image()
            for j, bj in enumerate(self.branches):
                a, b = bj.interval
                T[i, j] = lo - 1e-12 <= a and b <= hi + 1e-12
        return T

    def _markov_structure_ok(self) -> bool:
        T = self.transitions()
        for i, br in enumerate(self.branches):
            lo, hi = br.image()
            covered = sum(bj.interval[1] - bj.interval[0] for j, bj in enumerate(self.branches) if T[i, j])
            inside = sum(max(0.0, min(hi, b) - max(lo, a)) for a, b in self.domain_intervals)
            if abs(covered - inside) > 1e-9:
                return False
        return True

    # -- pointwise ---------------------------------------------------------
    def branch_index(self, x: float) -> int:
        i = bisect.bisect_right(self._lefts, x) - 1
        if i < 0:
            if x >= self._lefts[0] - DOMAIN_SLACK:
                return 0
            raise OutOfDomain(x)
        a, b = self.branches[i].interval
        if x <= b + DOMAIN_SLACK:
            # at a shared endpoint the left branch is used; values agree there
            if i > 0 and x == a and self.branches[i - 1].interval[1] == a:
                return i - 1
            return i
        if i + 1 < len(self.branches) and x >= self.branches[i + 1].interval[0] - DOMAIN_SLACK:
            return i + 1
        raise OutOfDomain(x)

    def clamp(self, x: float, i: int) -> float:
        a, b = self.branches[i].interval
        return min(max(x, a), b)

    def __call__(self, x: float) -> float:
        i = self.branch_index(x)
        return float(self.branches[i].value(self.clamp(x, i)))

    def deriv(self, x: float) -> float:
        i = self.branch_index(x)
        return float(self.branches[i].deriv(self.clamp(x, i)))

    def in_domain(self, x: float) -> bool:
        return any(a - DOMAIN_SLACK <= x <= b + DOMAIN_SLACK for a, b in self.domain_intervals)


def _calibrate_critical(fmap: MultimodalMap, cp: CriticalPoint) -> CriticalPoint:
    """Fill in R0 and a sampled A0 for the non-flatness estimate."""
    c, d = cp.c, cp.d
    R0 = cp.R0
    if R0 <= 0:
        others = [p for p in fmap.boundary_points if p != c] + [q.c for q in fmap.critical_points if q.c != c]
        R0 = min([1.0] + [abs(p - c) / 2 for p in others])
    offsets = np.linspace(R0 / 1000, R0, 1000)
    ratios = []
    for side in (-1, 1):
        xs = c + side * offsets
        ok = [x for x in xs if fmap.in_domain(x)]
        ratios.extend(abs(fmap.deriv(x)) / abs(x - c) ** (d - 1) for x in ok)
    ratios = np.array(ratios)
    if ratios.size == 0 or ratios.min() <= 0:
        raise ValidationError(f"critical point {c} is flat or of order other than {d}")
    A0 = max(cp.A0, ratios.max(), 1.0 / ratios.min()) * (1 + 1e-9)
    return CriticalPoint(c, d, cp.kind, max(A0, 1 + 1e-9), R0)


# -- operations -------------------------------------------------------------

def evaluate(fmap: MultimodalMap, x: float) -> float:
    return fmap(x)


def derivative(fmap: MultimodalMap, x: float) -> float:
    return fmap.deriv(x)


def orbit(fmap: MultimodalMap, x: float, n: int) -> list[float]:
    """[x, f(x), ..., f^n(x)]; raises OrbitEscaped(k) when f^k(x) leaves the domain."""
    if not fmap.in_domain(x):
        raise OrbitEscaped(0, x)
    out = [float(x)]
    for k in range(1, n + 1):
        x = fmap(x)
        if not fmap.in_domain(x):
            raise OrbitEscaped(k, x)
        out.append(x)
    return out


def log_derivatives(fmap: MultimodalMap, points: Sequence[float]) -> np.ndarray:
    """log|f'| at each point; raises CriticalOrbit(k) where f' vanishes."""
    out = np.empty(len(points))
    for k, x in enumerate(points):
        d = fmap.deriv(x)
        if d == 0.0:
            raise CriticalOrbit(k)
        out[k] = math.log(abs(d))
    return out


def monotone_branch_inverses(fmap: MultimodalMap, target: tuple[float, float],
                             extended: bool = False) -> list[tuple[int, tuple[float, float]]]:
    """Preimage of [a, b] split by branch: ``(branch_id, interval)`` for every branch hitting it."""
    a, b = target
    if a > b:
        raise ValidationError("target interval must satisfy a <= b")
    out = []
    for i, br in enumerate(fmap.branches):
        lo, hi = br.image(extended)
        u, v = max(a, lo), min(b, hi)
        if u > v:
            continue
        p, q = br.inverse(u, extended), br.inverse(v, extended)
        out.append((i, (min(p, q), max(p, q))))
    return out


def apply_itinerary_step(fmap: MultimodalMap, x: np.ndarray, symbols: np.ndarray):
    """One vectorised step: returns (f(x), |f'(x)|) using the branch named by ``symbols``."""
    fx = np.empty_like(x)
    dfx = np.empty_like(x)
    for j, br in enumerate(fmap.branches):
        m = symbols == j
        if m.any():
            fx[m] = br.value(x[m])
            dfx[m] = np.abs(br.deriv(x[m]))
    return fx, dfx


def log_derivative_along(fmap: MultimodalMap, x: np.ndarray, itin: np.ndarray) -> np.ndarray:
    """log|(f^n)'(x)| following the given itineraries (rows of ``itin``)."""
    x = np.array(x, dtype=float)
    acc = np.zeros_like(x)
    with np.errstate(divide="ignore"):
        for k in range(itin.shape[1]):
            x, d = apply_itinerary_step(fmap, x, itin[:, k])
            acc += np.log(d)
    return acc


def iterate_along(fmap: MultimodalMap, x: np.ndarray, itin: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float)
    for k in range(itin.shape[1]):
        x, _ = apply_itinerary_step(fmap, x, itin[:, k])
    return x


def cylinders(fmap: MultimodalMap, n: int) -> Cylinders:
    """All monotone pieces of f^n, built by pulling back the branch partition."""
    if n < 1:
        raise ValidationError("cylinder depth must be >= 1")
    dtype = np.int8 if len(fmap.branches) < 127 else np.int32
    left = np.array([br.interval[0] for br in fmap.branches])
    right = np.array([br.interval[1] for br in fmap.branches])
    itin = np.arange(len(fmap.branches), dtype=dtype)[:, None]
    for _ in range(n - 1):
        L, R, I = [], [], []
        for j, br in enumerate(fmap.branches):
            lo, hi = br.image()
            u, v = np.maximum(left, lo), np.minimum(right, hi)
            m = u < v
            if not m.any():
                continue
            p, q = br.inverse(u[m]), br.inverse(v[m])
            L.append(np.minimum(p, q))
            R.append(np.maximum(p, q))
            I.append(np.concatenate([np.full((int(m.sum()), 1), j, dtype=dtype), itin[m]], axis=1))
        left, right, itin = np.concatenate(L), np.concatenate(R), np.concatenate(I)
        order = np.argsort(left, kind="stable")
        left, right, itin = left[order], right[order], itin[order]
    return Cylinders(left, right, itin)


def orbit_from_itinerary(fmap: MultimodalMap, itin: np.ndarray, anchor=None) -> np.ndarray:
    """True orbit segments realising the given itineraries, built by backward contraction.

    ``itin`` is (m, n); returns an (m, n+1) array ``X`` with ``X[:, k] -> X[:, k+1]`` under f and
    ``X[:, k]`` in the branch ``itin[:, k]``; ``anchor`` is a scalar or one end point per row.  Forward iteration of floats drifts off a Cantor
    invariant set; pulling an anchor back through inverse branches does not.
    """
    itin = np.atleast_2d(itin)
    m, n = itin.shape
    X = np.empty((m, n + 1))
    if anchor is None:
        anchor = float(np.mean(fmap.domain_intervals[0]))
    X[:, n] = anchor
    for k in range(n - 1, -1, -1):
        col = itin[:, k]
        for j, br in enumerate(fmap.branches):
            msk = col == j
            if msk.any():
                lo, hi = br.image()
                X[msk, k] = br.inverse(np.clip(X[msk, k + 1], lo, hi))
    return X


def periodic_points(fmap: MultimodalMap, n: int, max_period: int = DEFAULT_MAX_PERIOD) -> list[tuple[float, float]]:
    """All fixed points of f^n with their multipliers (f^n)'(p)."""
    pts, logm, sign = periodic_point_data(fmap, n, max_period)
    return [(float(p), float(s * math.exp(lm))) for p, lm, s in zip(pts, logm, sign)]


def periodic_point_data(fmap: MultimodalMap, n: int, max_period: int = DEFAULT_MAX_PERIOD):
    """Arrays (points, log|multiplier|, sign of multiplier) for the fixed points of f^n."""
    if n < 1 or n > max_period:
        raise ValidationError(f"period must lie in [1, {max_period}]")
    cyl = cylinders(fmap, n)
    a, b, itin = cyl.left, cyl.right, cyl.itin
    ga = iterate_along(fmap, a, itin) - a
    gb = iterate_along(fmap, b, itin) - b
    # roots on cylinder endpoints (e.g. the boundary fixed point of x^2 + c) can miss by an ulp
    ga = np.where(np.abs(ga) <= ROOT_TOL * np.maximum(1.0, np.abs(a)), 0.0, ga)
    gb = np.where(np.abs(gb) <= ROOT_TOL * np.maximum(1.0, np.abs(b)), 0.0, gb)
    ok = np.sign(ga) * np.sign(gb) <= 0
    a, b, itin, ga = a[ok], b[ok], itin[ok], ga[ok]
    root = np.where(ga == 0, a, np.nan)
    lo, hi = a.copy(), b.copy()
    sa = np.sign(ga)
    active = ga != 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gm = iterate_along(fmap, mid, itin) - mid
        same = np.sign(gm) == sa
        lo = np.where(active & same, mid, lo)
        hi = np.where(active & ~same, mid, hi)
        if np.all(hi - lo <= 0) or np.all(hi[active] - lo[active] <= 1e-15 * np.maximum(1, np.abs(lo[active]))):
            break
    root = np.where(active, 0.5 * (lo + hi), root)
    order = np.argsort(root, kind="stable")
    root, itin, a, b = root[order], itin[order], a[order], b[order]
    # a root sitting on an endpoint shared by two cylinders is found twice; genuine
    # neighbours can be closer than 1e-9 at period 16, so only bisection-level agreement counts
    keep = np.ones(len(root), dtype=bool)
    last = 0
    for i in range(1, len(root)):
        tol = ROOT_TOL * max(1.0, abs(root[i]))
        shared = b[last] if abs(b[last] - a[i]) <= tol else (a[last] if abs(a[last] - b[i]) <= tol else None)
        if shared is not None and abs(root[i] - shared) <= tol and abs(root[last] - shared) <= tol:
            keep[i] = False
        else:
            last = i
    root, itin = root[keep], itin[keep]
    # forward iteration amplifies rounding by the multiplier before the orbit can pass
    # near a critical point; the orbit rebuilt backwards from the root does not
    X = orbit_from_itinerary(fmap, itin, root)
    logm = np.zeros(len(root))
    sign = np.ones(len(root))
    with np.errstate(divide="ignore"):
        for k in range(n):
            for j, br in enumerate(fmap.branches):
                msk = itin[:, k] == j
                d = br.deriv(X[msk, k])
                logm[msk] += np.log(np.abs(d))
                sign[msk] *= np.sign(d)
    return root, logm, sign


# -- built-in maps and configuration ---------------------------------------

def tent_map() -> MultimodalMap:
    return MultimodalMap(
        name="tent",
        domain_intervals=((0.0, 1.0),),
        branches=(MonotoneBranch((0.0, 0.5), (0.0, 2.0)), MonotoneBranch((0.5, 1.0), (2.0, -2.0))),
        is_markov=True,
        exceptional_flag=True,
        not_open=(0.5,),
    )


def two_slope_map() -> MultimodalMap:
    """Slope 2 on [0,1/2] and slope -4 on [3/4,1], both onto [0,1]; the invariant set is a Cantor set."""
    return MultimodalMap(
        name="two-slope",
        domain_intervals=((0.0, 0.5), (0.75, 1.0)),
        branches=(MonotoneBranch((0.0, 0.5), (0.0, 2.0)), MonotoneBranch((0.75, 1.0), (4.0, -4.0))),
        is_markov=True,
        exceptional_flag=False,
        not_open=(),
        # the fold of an ambient unimodal map producing this Cantor set sits in the gap
        ambient_critical=(0.625,),
    )


def chebyshev_map() -> MultimodalMap:
    return MultimodalMap(
        name="chebyshev",
        domain_intervals=((-2.0, 2.0),),
        branches=(MonotoneBranch((-2.0, 0.0), (-2.0, 0.0, 1.0)), MonotoneBranch((0.0, 2.0), (-2.0, 0.0, 1.0))),
        critical_points=(CriticalPoint(0.0, 2, "turning", R0=1.0),),
        is_markov=True,
        exceptional_flag=True,
        not_open=(0.0,),
    )


def quadratic_map(c: float) -> MultimodalMap:
    """x**2 + c on [-beta, beta], where beta = (1+sqrt(1-4c))/2 is the fixed point with f(-beta) = beta."""
    if not -2.0 <= c < 0.25:
        raise ValidationError("quadratic parameter must lie in [-2, 1/4)")
    beta = (1.0 + math.sqrt(1.0 - 4.0 * c)) / 2.0
    return MultimodalMap(
        name=f"quadratic:{c!r}",
        domain_intervals=((-beta, beta),),
        branches=(MonotoneBranch((-beta, 0.0), (c, 0.0, 1.0)), MonotoneBranch((0.0, beta), (c, 0.0, 1.0))),
        critical_points=(CriticalPoint(0.0, 2, "turning", R0=min(1.0, beta / 2)),),
        is_markov=False,
        exceptional_flag=(c == -2.0),
        not_open=(0.0,),
    )


BUILTINS = {
    "tent": tent_map,
    "two-slope": two_slope_map,
    "chebyshev": chebyshev_map,
}


def builtin_map(name: str) -> MultimodalMap:
    """Look up a built-in map; ``quadratic:C`` gives x**2 + C."""
    if name in BUILTINS:
        return BUILTINS[name]()
    if name.startswith("quadratic:"):
        try:
            c = float(name.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError(f"bad quadratic parameter in {name!r}") from exc
        return quadratic_map(c)
    raise ValidationError(f"unknown map {name!r}; built-ins: {sorted(BUILTINS)} or quadratic:C")


def map_from_config(cfg: dict) -> MultimodalMap:
    try:
        branches = tuple(MonotoneBranch(tuple(b["interval"]), tuple(b["coeffs"])) for b in cfg["branches"])
        crit = tuple(CriticalPoint(float(c["c"]), int(c["d"]), c.get("kind", "turning"), R0=float(c.get("R0", 0.0)))
                     for c in cfg.get("critical", []))
        return MultimodalMap(
            name=str(cfg["name"]),
            domain_intervals=tuple(tuple(iv) for iv in cfg["intervals"]),
            branches=branches,
            critical_points=crit,
            is_markov=bool(cfg.get("markov", False)),
            exceptional_flag=bool(cfg.get("exceptional", False)),
            not_open=tuple(cfg["not_open"]) if "not_open" in cfg else None,
            ambient_critical=tuple(cfg.get("ambient_critical", ())),
            margin=float(cfg.get("margin", 0.1)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed map config: {exc}") from exc


def load_map_config(path: str | Path) -> MultimodalMap:
    with open(path) as fh:
        return map_from_config(json.load(fh))


def map_to_config(fmap: MultimodalMap) -> dict:
    cfg = {
        "name": fmap.name,
        "intervals": [list(iv) for iv in fmap.domain_intervals],
        "branches": [{"interval": list(br.interval), "coeffs": list(br.coeffs)} for br in fmap.branches],
        "critical": [{"c": cp.c, "d": cp.d, "kind": cp.kind, "R0": cp.R0} for cp in fmap.critical_points],
        "markov": fmap.is_markov,
        "exceptional": fmap.exceptional_flag,
        "ambient_critical": list(fmap.ambient_critical),
        "margin": fmap.margin,
    }
    if fmap.not_open is not None:
        cfg["not_open"] = list(fmap.not_open)
    return cfg


def resolve_map(spec: str) -> MultimodalMap:
    """Built-in name or path to a JSON config."""
    if spec.endswith(".json") or Path(spec).is_file():
        return load_map_config(spec)
    return builtin_map(spec)


def merge_close(values: Iterable[float], tol: float = MERGE_TOL) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out
