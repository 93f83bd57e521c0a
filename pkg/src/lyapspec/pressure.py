"""Geometric pressure P(t), its Legendre-like transform F(alpha) and related objects.

Three independent estimators are provided:

* cylinder brackets on Markov maps, (1/n) log sum over n-cylinders of
  inf / sup |(f^n)'|^(-t);
* periodic-orbit sums, (1/n) log sum over fixed points of f^n of |(f^n)'(p)|^(-t);
* the spectral radius of a weighted transition graph.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.sparse.csgraph import connected_components
from scipy.special import logsumexp

from . import map_core
from .cocycle import alpha_sharp
from .errors import (ConvergenceError, GridTooCoarse, InvalidArgs, InvalidBand,
                     NotExpanding, NotMarkov, ValidationError)

NEG_INF = float("-inf")
FAR_FIELD = 64.0
EDGE_TOL = 1e-8


class ReducibleGraphWarning(UserWarning):
    pass


# -- cylinder and periodic data --------------------------------------------

@lru_cache(maxsize=32)
def cylinder_log_derivatives(fmap, n: int):
    """(min, max) of log|(f^n)'| per n-cylinder, sampled at both endpoints and the midpoint."""
    cyl = map_core.cylinders(fmap, n)
    samples = [map_core.log_derivative_along(fmap, x, cyl.itin)
               for x in (cyl.left, 0.5 * (cyl.left + cyl.right), cyl.right)]
    S = np.vstack(samples)
    return S.min(axis=0), S.max(axis=0)


@lru_cache(maxsize=32)
def periodic_log_multipliers(fmap, n: int) -> np.ndarray:
    _, logm, _ = map_core.periodic_point_data(fmap, n)
    finite = np.isfinite(logm)
    if not finite.all():
        warnings.warn(f"{int((~finite).sum())} periodic points of period {n} have zero multiplier; dropped")
    return logm[finite]


def _bracket_from_logs(t: float, lmin: np.ndarray, lmax: np.ndarray, n: int):
    if t == 0:
        v = math.log(len(lmin)) / n
        return v, v
    with np.errstate(invalid="ignore", over="ignore"):
        small = -t * (lmax if t > 0 else lmin)
        large = -t * (lmin if t > 0 else lmax)
    return float(logsumexp(small)) / n, float(logsumexp(large)) / n


def pressure_markov(fmap, t: float, n: int):
    """(lower, upper) bracket of P(t) from the n-cylinders of a Markov map."""
    if not fmap.is_markov:
        raise NotMarkov(f"map {fmap.name!r} has no Markov structure")
    if n < 1:
        raise ValidationError("depth must be >= 1")
    lmin, lmax = cylinder_log_derivatives(fmap, n)
    return _bracket_from_logs(float(t), lmin, lmax, n)


def pressure_periodic(fmap, t: float, n: int) -> float:
    """(1/n) log sum over fixed points p of f^n of |(f^n)'(p)|^(-t)."""
    logm = periodic_log_multipliers(fmap, n)
    if logm.size == 0:
        return NEG_INF
    return float(logsumexp(-float(t) * logm)) / n


class PressureEvaluator:
    """Callable t -> P(t) estimate bound to one map, method and depth."""

    def __init__(self, fmap, method: str, depth: int):
        self.fmap, self.method, self.depth = fmap, method, depth
        if method == "markov":
            self._lmin, self._lmax = cylinder_log_derivatives(fmap, depth)
        elif method == "periodic":
            self._logm = periodic_log_multipliers(fmap, depth)
        else:
            raise ValidationError(f"unknown pressure method {method!r}")

    def bracket(self, t: float):
        if self.method == "markov":
            return _bracket_from_logs(float(t), self._lmin, self._lmax, self.depth)
        v = float(logsumexp(-float(t) * self._logm)) / self.depth
        return v, v

    def __call__(self, t: float) -> float:
        lo, up = self.bracket(t)
        return 0.5 * (lo + up)


# -- graphs ----------------------------------------------------------------

@dataclass(frozen=True)
class MarkovGraph:
    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_vertices < 1 or not self.edges:
            raise ValidationError("graph must have vertices and edges")
        out_deg = np.zeros(self.n_vertices, dtype=int)
        in_deg = np.zeros(self.n_vertices, dtype=int)
        for k, l, w in self.edges:
            if not (0 <= k < self.n_vertices and 0 <= l < self.n_vertices):
                raise ValidationError("edge endpoint out of range")
            if not w > 0:
                raise ValidationError("edge weights must be positive")
            out_deg[k] += 1
            in_deg[l] += 1
        if out_deg.min() < 1 or in_deg.min() < 1:
            raise ValidationError("every vertex needs in- and out-degree >= 1")

    def log_matrix(self, t: float) -> np.ndarray:
        """log of the matrix with entries sum over edges k->l of w^(-t)."""
        A = np.full((self.n_vertices, self.n_vertices), NEG_INF)
        for k, l, w in self.edges:
            A[k, l] = np.logaddexp(A[k, l], -t * math.log(w))
        return A


def markov_graph_from_map(fmap) -> MarkovGraph:
    """Vertices are branch intervals; an edge k->l of weight |slope_k| when branch k covers interval l."""
    if not fmap.is_markov:
        raise NotMarkov(f"map {fmap.name!r} has no Markov structure")
    if not all(br.is_affine for br in fmap.branches):
        raise NotExpanding("graph encoding needs affine branches")
    T = fmap.transitions()
    edges = tuple((k, l, abs(fmap.branches[k].coeffs[1]))
                  for k in range(len(fmap.branches)) for l in range(len(fmap.branches)) if T[k, l])
    return MarkovGraph(len(fmap.branches), edges)


def _spectral_radius(M: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0])
    # the shift keeps the iteration primitive without moving the Perron root's ordering
    c = 0.5 * float(M.sum(axis=1).min())
    B = M + c * np.eye(n)
    v = np.full(n, 1.0 / n)
    prev = None
    for _ in range(max_iter):
        w = B @ v
        s = w.sum()
        rho = s / v.sum()
        v = w / s
        if prev is not None and abs(rho - prev) <= tol * abs(rho):
            return float(rho - c)
        prev = rho
    raise ConvergenceError("power iteration did not converge")


def graph_pressure(g: MarkovGraph, t: float) -> float:
    """log spectral radius of the weighted transition matrix at parameter t."""
    A = g.log_matrix(float(t))
    adj = np.isfinite(A)
    ncomp, labels = connected_components(adj.astype(int), directed=True, connection="strong")
    if ncomp > 1:
        warnings.warn("transition graph is reducible; returning the max over strong components",
                      ReducibleGraphWarning)
    best = NEG_INF
    for comp in range(ncomp):
        idx = np.nonzero(labels == comp)[0]
        sub = A[np.ix_(idx, idx)]
        if not np.isfinite(sub).any():
            continue
        shift = float(sub[np.isfinite(sub)].max())
        M = np.exp(sub - shift)
        best = max(best, math.log(_spectral_radius(M)) + shift)
    return best


# -- pressure curve --------------------------------------------------------

def lower_convex_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Values at x of the lower convex hull of the points (x, y); x sorted."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (x[i1] - x[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (x[i] - x[i0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(x, x[hull], y[hull])


def _slope_fit(fn: Callable[[float], float], a: float, b: float, k: int = 17) -> tuple[float, float]:
    ts = np.linspace(a, b, k)
    ps = np.array([fn(t) for t in ts])
    slope, intercept = np.polyfit(ts, ps, 1)
    return float(slope), float(intercept)


KINK_SPAN = 0.2


def locate_kink(fn: Callable[[float], float], t: np.ndarray, P: np.ndarray, lo: float, hi: float,
                span: float = KINK_SPAN):
    """Largest-curvature grid point in [lo, hi] refined by intersecting outer secant lines.

    The secants sit on [tk - 2 span, tk - span] and [tk + span, tk + 2 span], clear
    of the ~1/n rounding that a period-n sum puts on a corner.
    Returns (t_kink, left_slope, right_slope) or None when the window is empty.
    """
    w = float(span)
    d2 = np.full(len(t), -np.inf)
    d2[1:-1] = P[2:] - 2 * P[1:-1] + P[:-2]
    mask = (t >= lo) & (t <= hi)
    mask[[0, -1]] = False
    if not mask.any():
        return None
    i = int(np.argmax(np.where(mask, d2, -np.inf)))
    tk = float(t[i])
    sl = (fn(tk - w) - fn(tk - 2 * w)) / w
    sr = (fn(tk + 2 * w) - fn(tk + w)) / w
    if sr == sl:
        return tk, sl, sr
    # left line through (tk-w), right line through (tk+w)
    x = ((fn(tk + w) - sr * (tk + w)) - (fn(tk - w) - sl * (tk - w))) / (sl - sr)
    return float(x), float(sl), float(sr)


KINK_SLOPE_GAP = 0.25


@dataclass
class PressureCurve:
    t_grid: np.ndarray
    P_lower: np.ndarray
    P_upper: np.ndarray
    P: np.ndarray
    adjustment: np.ndarray
    chi_inf: float
    chi_sup: float
    t0: float
    t_plus: float
    t_minus: float
    method: str
    label: str
    right_intercept: float
    left_intercept: float
    notes: list = field(default_factory=list)
    evaluator: Callable[[float], float] | None = field(default=None, repr=False, compare=False)
    t_search: float = 8.0
    _samples: dict = field(default_factory=dict, repr=False, compare=False)

    def sampled(self, T: float, k: int = 161):
        """(ts, P(ts)) on a uniform grid over [-T, T], memoised since F reuses it for every alpha."""
        if (T, k) not in self._samples:
            ts = np.linspace(-T, T, k)
            self._samples[(T, k)] = (ts, np.array([self(s) for s in ts]))
        return self._samples[(T, k)]

    def __call__(self, t: float) -> float:
        if self.evaluator is not None:
            return float(self.evaluator(t))
        return float(np.interp(t, self.t_grid, self.P))

    def summary(self) -> dict:
        return {"chi_inf": self.chi_inf, "chi_sup": self.chi_sup, "chi_star": chi_star(self),
                "t0": self.t0, "t_plus": self.t_plus, "t_minus": self.t_minus,
                "method": self.method, "label": self.label}


def _root(fn, a, b, tol=1e-12):
    return float(optimize.brentq(fn, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


def _find_t0(fn, t_lo: float, t_hi: float, tol: float = EDGE_TOL) -> float:
    """inf{t : P(t) <= tol} for non-increasing P, by bracketing outward then bisecting."""
    a, b = t_lo, t_hi
    while fn(b) > tol and b < 4 * FAR_FIELD:
        b = b + max(1.0, b - a)
    if fn(b) > tol:
        return math.inf
    while fn(a) <= tol and a > -4 * FAR_FIELD:
        a = a - max(1.0, b - a)
    if fn(a) <= tol:
        return -math.inf
    g = lambda s: fn(s) - tol
    # the root of P - tol and of P differ by ~tol / chi; refine on P itself when it changes sign
    r = _root(g, a, b)
    if fn(a) > 0 and fn(b) < 0:
        r = _root(fn, a, b)
    return r


def curve_from_function(fn: Callable[[float], float], t_range=(-2.0, 2.0), grid_size: int = 81,
                        method: str = "function", t_search: float = 8.0, threads: int = 1) -> PressureCurve:
    """Pressure curve with zero-width brackets from an explicit convex function (used as an oracle)."""
    return _assemble(lambda t: (fn(t), fn(t)), fn, t_range, grid_size, method, "exact function", t_search, threads)


def build_pressure_curve(fmap, t_range=(-2.0, 2.0), grid_size: int = 81, depth: int = 12,
                         method: str = "auto", threads: int = 1, t_search: float = 8.0) -> PressureCurve:
    """Sample, convexify and annotate P(t) for a map."""
    if grid_size < 5:
        raise ValidationError("grid_size must be >= 5")
    if not t_range[0] < t_range[1]:
        raise ValidationError("t_range must be increasing")
    if method == "auto":
        method = "markov" if fmap.is_markov and fmap.is_expanding else "periodic"
    if method == "markov" and not fmap.is_markov:
        raise NotMarkov(f"map {fmap.name!r} has no Markov structure")
    ev = PressureEvaluator(fmap, method, depth)
    label = "bracket" if method == "markov" else "estimate, no bracket"
    return _assemble(ev.bracket, ev, t_range, grid_size, method, label, t_search, threads)


def _assemble(bracket, fn, t_range, grid_size, method, label, t_search, threads) -> PressureCurve:
    t = np.linspace(float(t_range[0]), float(t_range[1]), int(grid_size))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            br = list(pool.map(bracket, t))
    else:
        br = [bracket(s) for s in t]
    lo = np.array([b[0] for b in br])
    up = np.array([b[1] for b in br])
    mid = 0.5 * (lo + up)
    hull = lower_convex_hull(t, mid)
    adj = mid - hull
    width = up - lo
    if np.any(adj > 10 * width + 1e-12 * (1 + np.abs(mid))):
        raise GridTooCoarse("convexification moved a sample by more than 10x its bracket width")

    sr, br_int = _slope_fit(fn, 0.9 * FAR_FIELD, FAR_FIELD)
    sl, bl_int = _slope_fit(fn, -FAR_FIELD, -0.9 * FAR_FIELD)
    chi_inf, chi_sup = -sr, -sl
    t0 = _find_t0(fn, t[0], t[-1])
    notes = []
    t_plus = _edge_root(fn, t, chi_inf, side=+1)
    t_minus = _edge_root(fn, t, chi_sup, side=-1)
    if method == "periodic":
        # finite-period sums smooth every phase transition; look for the kink directly
        t_minus, t_plus = math.inf * -1, math.inf
        k = locate_kink(fn, t, hull, t[0], min(0.0, t[-1]))
        if k is not None and k[2] - k[1] > KINK_SLOPE_GAP:
            t_minus = k[0]
            notes.append(f"kink at t={k[0]:.6g}: secant slopes {k[1]:.6g} / {k[2]:.6g}")
        else:
            notes.append("no kink found on the negative half of the grid")
        k = locate_kink(fn, t, hull, max(0.0, t[0]), t[-1])
        if k is not None and k[2] - k[1] > KINK_SLOPE_GAP:
            t_plus = k[0]
            notes.append(f"kink at t={k[0]:.6g}: secant slopes {k[1]:.6g} / {k[2]:.6g}")
    return PressureCurve(t, lo, up, hull, adj, chi_inf, chi_sup, t0, t_plus, t_minus, method, label,
                         br_int, bl_int, notes, fn, t_search)


def _edge_root(fn, t: np.ndarray, chi: float, side: int) -> float:
    """t_plus (side=+1) = sup{t : P(t) + t chi > tol}; t_minus (side=-1) = inf of the mirror set."""
    g = lambda s: fn(s) + s * chi - EDGE_TOL
    edge = t[-1] if side > 0 else t[0]
    if g(edge) > 0:
        return side * math.inf
    other = t[0] if side > 0 else t[-1]
    if g(other) <= 0:
        return -side * math.inf
    a, b = sorted((edge, other))
    return float(optimize.brentq(g, a, b, xtol=EDGE_TOL))


# -- Legendre-like transform -----------------------------------------------

def legendre_F(curve: PressureCurve, alpha: float) -> float:
    """(1/|alpha|) inf_t (P(t) + alpha t); -inf outside [chi_inf, chi_sup]."""
    alpha = float(alpha)
    if alpha == 0.0:
        raise InvalidArgs("alpha = 0 is handled by the F(0) limit")
    if alpha < curve.chi_inf - 1e-9 or alpha > curve.chi_sup + 1e-9:
        return NEG_INF
    val = _inf_over_t(curve, alpha)
    if -1e-9 < val < 0.0:
        val = 0.0  # rounding at the ends of the spectrum, where the infimum is exactly 0
    return val / abs(alpha)


def _inf_over_t(curve: PressureCurve, alpha: float) -> float:
    T = curve.t_search
    g = lambda s: curve(s) + alpha * s
    while True:
        ts, P = curve.sampled(T)
        vals = P + alpha * ts
        i = int(np.argmin(vals))
        if 0 < i < len(ts) - 1:
            res = optimize.minimize_scalar(g, bounds=(ts[i - 1], ts[i + 1]), method="bounded",
                                           options={"xatol": 1e-12})
            return float(min(res.fun, vals[i]))
        if T >= 4 * FAR_FIELD:
            break
        T *= 2
    # minimiser escapes to infinity: use the fitted asymptote
    if i == len(ts) - 1:
        return curve.right_intercept if abs(alpha - curve.chi_inf) <= 1e-6 else float(vals[i])
    return curve.left_intercept if abs(alpha - curve.chi_sup) <= 1e-6 else float(vals[i])


def chi_star(curve: PressureCurve, h: float = 1e-4) -> float:
    """Negated right derivative of P at t0 (one-sided Richardson difference)."""
    if not math.isfinite(curve.t0):
        return math.nan
    p0 = curve(curve.t0)
    d1 = (curve(curve.t0 + h) - p0) / h
    d2 = (curve(curve.t0 + h / 2) - p0) / (h / 2)
    return -(2 * d2 - d1)


def F0(curve: PressureCurve, kmax: int = 40, tol: float = 1e-9):
    """lim F(alpha) as alpha -> 0+, defined only when chi_inf = 0; None otherwise."""
    if abs(curve.chi_inf) > 1e-9:
        return None
    prev = None
    for k in range(1, kmax + 1):
        v = legendre_F(curve, curve.chi_sup * 2.0 ** (-k))
        if prev is not None and abs(v - prev) < tol:
            return v
        prev = v
    return prev


@dataclass
class SpectrumCurve:
    alpha_grid: np.ndarray
    F: np.ndarray
    chi_star: float
    t0: float
    F0: float | None
    chi_inf: float
    chi_sup: float


def build_spectrum_curve(curve: PressureCurve, n_alpha: int = 81) -> SpectrumCurve:
    lo = max(curve.chi_inf, 1e-12)
    a = np.linspace(lo, curve.chi_sup, n_alpha)
    F = np.array([legendre_F(curve, x) for x in a])
    return SpectrumCurve(a, F, chi_star(curve), curve.t0, F0(curve), curve.chi_inf, curve.chi_sup)


# -- conformal measures ----------------------------------------------------

@dataclass
class ConformalMeasure:
    t: float
    lam: float
    depth: int
    left: np.ndarray
    right: np.ndarray
    itin: np.ndarray
    masses: np.ndarray
    branch_masses: np.ndarray
    identity_error: float

    @property
    def pressure(self) -> float:
        return math.log(self.lam)

    def upsilon(self, delta: float) -> float:
        """min over centres at cylinder endpoints of the mass of cylinders inside B(x, delta)."""
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        best = math.inf
        for x in np.concatenate([self.left, self.right]):
            i0 = np.searchsorted(self.left, x - delta - 1e-15, side="left")
            i1 = np.searchsorted(self.right, x + delta + 1e-15, side="right")
            best = min(best, float(cum[i1] - cum[i0]) if i1 > i0 else 0.0)
        return best


def _perron(M: np.ndarray):
    vals, vecs = np.linalg.eig(M)
    i = int(np.argmax(vals.real))
    v = np.abs(vecs[:, i].real)
    return float(vals[i].real), v / v.sum()


def conformal_eigenmeasure(fmap, t: float, n: int) -> ConformalMeasure:
    """Eigenmeasure with Jacobian e^{P(t)} |f'|^t on an affine Markov map, resolved to depth n.

    The identity mu(f(A)) = e^{P} int_A |f'|^t dmu is checked on every depth-n
    cylinder, with masses taken from the depth-(n+1) partition and f(A)
    located geometrically.
    """
    if not fmap.is_markov:
        raise NotMarkov(f"map {fmap.name!r} has no Markov structure")
    if not fmap.is_expanding or not all(br.is_affine for br in fmap.branches):
        raise NotExpanding("eigenmeasures are built for uniformly expanding affine Markov maps")
    t = float(t)
    s = np.array([abs(br.coeffs[1]) for br in fmap.branches])
    T = fmap.transitions().astype(float)
    M = (s ** (-t))[:, None] * T
    lam, m = _perron(M)

    def masses_at(depth):
        cyl = map_core.cylinders(fmap, depth)
        logw = np.zeros(len(cyl))
        for k in range(depth - 1):
            logw -= t * np.log(s[cyl.itin[:, k]])
        w = np.exp(logw - (depth - 1) * math.log(lam)) * m[cyl.itin[:, -1]]
        return cyl, w

    cyl, mass = masses_at(n)
    fine, fmass = masses_at(n + 1)
    cum = np.concatenate([[0.0], np.cumsum(fmass)])
    err = 0.0
    for i in range(len(cyl)):
        a, b = cyl.left[i], cyl.right[i]
        j = int(cyl.itin[i, 0])
        inside = slice(np.searchsorted(fine.left, a - 1e-15), np.searchsorted(fine.right, b + 1e-15, side="right"))
        muA = fmass[inside].sum()
        br = fmap.branches[j]
        fa, fb = sorted((float(br.value(a)), float(br.value(b))))
        i0 = np.searchsorted(fine.left, fa - 1e-12)
        i1 = np.searchsorted(fine.right, fb + 1e-12, side="right")
        mu_fA = float(cum[i1] - cum[i0]) if i1 > i0 else 0.0
        rhs = lam * (s[j] ** t) * muA
        err = max(err, abs(mu_fA - rhs) / max(abs(rhs), 1e-300))
    return ConformalMeasure(t, lam, n, cyl.left, cyl.right, cyl.itin, mass, m, err)


# -- irregular-set bounds --------------------------------------------------

@dataclass(frozen=True)
class IrregularBound:
    alpha: float
    beta: float
    lower: float
    lower_empty: bool
    upper_weak: float
    upper_strong: float
    alpha_sharp: float
    empty_flag: bool
    theorem_applies: bool


def _F_any(curve: PressureCurve, a: float) -> float:
    if a == 0.0:
        v = F0(curve)
        return NEG_INF if v is None else v
    if a < 0:
        return NEG_INF
    return legendre_F(curve, a)


def irregular_bound(curve: PressureCurve, alpha: float, beta: float, fmap=None) -> IrregularBound:
    """Predicted dimension bounds for points with lower exponent alpha and upper exponent beta."""
    if not (alpha <= beta <= curve.chi_sup + 1e-12 and beta > 0):
        raise InvalidBand("need alpha <= beta <= chi_sup and beta > 0")
    Fa, Fb = _F_any(curve, alpha), _F_any(curve, beta)
    lower = min(Fa, Fb)
    cs = chi_star(curve)
    # F is unimodal with its peak at chi_star, so the max over [alpha, beta] sits at the clamp
    peak = min(max(cs, alpha), beta)
    upper_weak = max(0.0, _F_any(curve, peak), Fa, Fb)
    a_sharp = alpha_sharp(alpha, beta, curve.chi_sup)
    upper_strong = max(0.0, min(_F_any(curve, a_sharp), Fb))
    applies = True
    if fmap is not None:
        applies = fmap.is_interval_union and not fmap.exceptional_flag
    return IrregularBound(float(alpha), float(beta), lower, lower == NEG_INF, upper_weak, upper_strong,
                          a_sharp, a_sharp < curve.chi_inf, applies)


# -- export ----------------------------------------------------------------

def write_pressure_csv(curve: PressureCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "P_lower", "P", "P_upper"])
        for row in zip(curve.t_grid, curve.P_lower, curve.P, curve.P_upper):
            w.writerow([format(float(v), ".17g") for v in row])


def write_spectrum_csv(spec: SpectrumCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "F"])
        for a, f in zip(spec.alpha_grid, spec.F):
            w.writerow([format(float(a), ".17g"), format(float(f), ".17g")])


def summary_json(curve: PressureCurve) -> str:
    return json.dumps(_jsonable(curve.summary()), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj
