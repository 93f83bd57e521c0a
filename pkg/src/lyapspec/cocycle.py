"""Derivative cocycle along orbits, sigma-envelopes, Pliss times and crossing intervals.

The cocycle of a point x is Phi(l) = log|(f^l)'(x)| at integers, extended
affinely between consecutive integers.  Values may be floats or exact
``fractions.Fraction`` objects; the envelope routines work on either.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import map_core
from .errors import (CriticalOrbit, HorizonTooShort, InvalidArgs, InvalidBand,
                     InvalidSigma, TooSparse)

PLISS_TOL = 1e-12


@dataclass(frozen=True)
class Cocycle:
    base_point: float
    values: tuple
    slope_bound: float

    def __post_init__(self):
        if len(self.values) < 1 or self.values[0] != 0:
            raise InvalidArgs("a cocycle starts with Phi(0) = 0")
        steps = np.diff(np.asarray(self.values, dtype=float))
        if steps.size and steps.max() > self.slope_bound * (1 + 1e-12) + 1e-12:
            raise InvalidArgs("cocycle increment exceeds the slope bound L")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return isinstance(self.values[-1], Fraction)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def L0_estimate(self) -> float:
        return window_rate(self.array(), max(1, math.ceil(self.n / 10)))

    def at(self, t: float) -> float:
        """Piecewise-affine interpolation of Phi."""
        return float(np.interp(t, np.arange(self.n + 1), self.array()))


def window_rate(phi: np.ndarray, N: int) -> float:
    """max_k |Phi(k+N) - Phi(k)| / N."""
    if N >= len(phi):
        N = len(phi) - 1
    if N < 1:
        return 0.0
    return float(np.max(np.abs(phi[N:] - phi[:-N])) / N)


def build_cocycle(fmap, x: float, n: int) -> Cocycle:
    """Cocycle of x under the map over n steps; raises CriticalOrbit on an exact critical hit."""
    pts = map_core.orbit(fmap, x, n)[:-1]
    logs = map_core.log_derivatives(fmap, pts)
    return Cocycle(float(x), tuple(np.concatenate([[0.0], np.cumsum(logs)]).tolist()), fmap.slope_bound)


def cocycle_from_itinerary(fmap, itinerary: Sequence[int], anchor: float | None = None) -> Cocycle:
    """Cocycle along the true orbit with the given branch itinerary (stable on Cantor sets)."""
    itin = np.asarray(itinerary, dtype=int)[None, :]
    X = map_core.orbit_from_itinerary(fmap, itin, anchor)[0]
    logd = np.empty(itin.shape[1])
    for k, j in enumerate(itin[0]):
        d = abs(float(fmap.branches[j].deriv(X[k])))
        if d == 0.0:
            raise CriticalOrbit(k)
        logd[k] = math.log(d)
    return Cocycle(float(X[0]), tuple(np.concatenate([[0.0], np.cumsum(logd)]).tolist()), fmap.slope_bound)


def cocycle_from_values(values: Sequence, slope_bound: float | None = None, base_point: float = float("nan")) -> Cocycle:
    vals = tuple(values)
    if slope_bound is None:
        steps = np.diff(np.asarray(vals, dtype=float))
        slope_bound = float(max(steps.max(), 0.0)) if steps.size else 0.0
    return Cocycle(base_point, vals, float(slope_bound))


def finite_time_exponents(c: Cocycle):
    """Birkhoff averages Phi(l)/l for l = 1..n plus running (min, max) as exponent estimates."""
    if c.n < 1:
        raise InvalidArgs("need n >= 1")
    avg = c.array()[1:] / np.arange(1, c.n + 1)
    return avg, np.minimum.accumulate(avg), np.maximum.accumulate(avg)


def _check_sigma(c: Cocycle, sigma) -> None:
    if sigma < 0 or sigma >= c.slope_bound:
        raise InvalidSigma(f"sigma must lie in [0, L={c.slope_bound:.6g})")


def sigma_envelope(c: Cocycle, sigma) -> list:
    """Phi^sigma at integers by the recursion E(t) = max(E(t-1) + sigma, Phi(t))."""
    _check_sigma(c, sigma)
    return envelope_values(c.values, sigma)


def envelope_values(values: Sequence, sigma) -> list:
    # E(t) - E(t-1) - sigma is never accumulated: E(t) is rebuilt from the last time j
    # with E(j) = Phi(j), so floats carry one rounding instead of t of them
    env = [values[0]]
    j = 0
    for t in range(1, len(values)):
        cand = values[j] + sigma * (t - j)
        if values[t] >= cand:
            j, cand = t, values[t]
        env.append(cand)
    return env


def envelope_bruteforce(values: Sequence, sigma) -> list:
    """O(n^2) reference: max over s <= t of Phi(s) + sigma (t - s)."""
    return [max(values[s] + sigma * (t - s) for s in range(t + 1)) for t in range(len(values))]


def is_pliss_time(values: Sequence, n: int, sigma, tol: float = PLISS_TOL) -> bool:
    """Direct check: Phi(n) - Phi(n-k) >= k sigma for every 1 <= k <= n."""
    if n < 1:
        return False
    if isinstance(values[n], Fraction):
        return all(values[n] - values[n - k] >= k * sigma for k in range(1, n + 1))
    phi = np.asarray(values[: n + 1], dtype=float)
    k = np.arange(n, 0, -1)
    return bool(np.all(phi[n] - phi[:n] - k * sigma >= -tol))


@dataclass(frozen=True)
class PlissReport:
    sigma: float
    times: tuple[int, ...]
    upper_density_estimate: float
    envelope: tuple

    def rows(self, c: Cocycle):
        H = set(self.times)
        return [(k, float(c.values[k]), float(self.envelope[k]), int(k in H)) for k in range(c.n + 1)]


def pliss_times(c: Cocycle, sigma, tol: float = PLISS_TOL) -> PlissReport:
    env = sigma_envelope(c, sigma)
    if c.exact:
        H = [k for k in range(1, c.n + 1) if c.values[k] == env[k]]
    else:
        phi = c.array()
        H = [int(k) for k in np.nonzero(phi - np.asarray(env, dtype=float) >= -tol)[0] if k >= 1]
    H = [k for k in H if is_pliss_time(c.values, k, sigma, tol)]
    return PlissReport(float(sigma), tuple(H), upper_density(H, c.n), tuple(env))


def upper_density(H: Sequence[int], n: int) -> float:
    """Tail estimate of limsup #(H cap [1,m]) / m over m in the last half of the horizon."""
    if n < 1:
        return 0.0
    counts = np.zeros(n + 1)
    for h in H:
        counts[h] = 1
    cum = np.cumsum(counts)
    m = np.arange(max(1, n // 2), n + 1)
    return float(np.max(cum[m] / m))


# -- crossing intervals ----------------------------------------------------

@dataclass(frozen=True)
class CrossingInterval:
    tau1: float
    tau2: float
    q1: float
    q2: float
    minimal: bool = True
    count: int = 0
    density: float = 0.0


@dataclass(frozen=True)
class CrossingReport:
    sigma: float
    q1: float
    q2: float
    C: float
    intervals: tuple[CrossingInterval, ...]
    pliss: tuple[int, ...]

    @property
    def all_dense(self) -> bool:
        return all(iv.density >= self.C for iv in self.intervals)


def envelope_pieces(values: Sequence[float], env: Sequence[float], sigma: float):
    """Affine pieces (a, b, intercept, slope) of the real-variable envelope.

    On [m-1, m] the envelope of the interpolated cocycle is the max of the
    sigma-line through E(m-1) and, when the cocycle climbs at rate >= sigma,
    the cocycle segment itself; at most two pieces per unit interval.
    """
    pieces = []
    for m in range(1, len(values)):
        a = m - 1
        lam = values[m] - values[a]
        e0 = env[a]
        line_b = e0 - sigma * a
        if lam < sigma or values[a] + lam <= e0 + sigma:
            pieces.append((a, m, line_b, sigma))
            continue
        phi_b = values[a] - lam * a
        # cocycle segment overtakes the sigma-line at s where they cross
        s = a if lam == sigma else (line_b - phi_b) / (lam - sigma)
        s = min(max(s, a), m)
        if s > a:
            pieces.append((a, s, line_b, sigma))
        pieces.append((s, m, phi_b, lam))
    return pieces


def crossing_intervals(c: Cocycle, sigma: float, q1: float, q2: float) -> CrossingReport:
    """All minimal (q1,q2)-crossing intervals of Phi^sigma with their Pliss-time densities.

    tau1, tau2 are the exact points where Phi^sigma(t)/t equals q1 and q2.
    Since a unit interval (m-1, m] meeting the real contact set forces m
    into the integer contact set, the count uses integers in [tau1, ceil(tau2)]
    and is compared against C = (q2 - q1)/L.
    """
    L = c.slope_bound
    if not (0 <= sigma <= q1 < q2 < L):
        raise InvalidBand("need 0 <= sigma <= q1 < q2 < L")
    _check_sigma(c, sigma)
    phi = c.array()
    env = np.asarray(envelope_values(list(phi), sigma))
    H = np.array(pliss_times(c, sigma).times, dtype=int)
    out = []
    anchor = None
    for a, b, icp, slope in envelope_pieces(phi, env, sigma):
        if b <= a:
            continue
        lo = max(a, 1e-300)
        # g(t) = icp / t + slope is monotone on the piece
        g_a = slope if icp == 0 else icp / lo + slope
        g_b = icp / b + slope

        def root(q):
            return icp / (q - slope)

        if g_a <= q1 and g_b <= q1:
            anchor = b
            continue
        if g_b >= g_a:
            if g_a <= q1 < g_b:
                anchor = min(max(root(q1), a), b)
            if anchor is not None and g_b >= q2 and g_a < q2:
                t2 = min(max(root(q2), a), b)
                if t2 > anchor:
                    cnt = int(np.count_nonzero((H >= anchor) & (H <= math.ceil(t2 - 1e-12))))
                    out.append(CrossingInterval(anchor, t2, q1, q2, True, cnt, cnt / t2))
                anchor = None
        else:
            if g_b <= q1:
                anchor = b
    return CrossingReport(float(sigma), float(q1), float(q2), (q2 - q1) / L, tuple(out), tuple(H.tolist()))


# -- alpha sharp -----------------------------------------------------------

def alpha_sharp(alpha: float, beta: float, chi_sup: float) -> float:
    """beta / (1 + (beta - alpha)/chi_sup); equals alpha when alpha == beta."""
    if not (alpha <= beta and beta > 0 and chi_sup > 0):
        raise InvalidArgs("need alpha <= beta, beta > 0, chi_sup > 0")
    if alpha == beta:
        return alpha
    return beta / (1.0 + (beta - alpha) / chi_sup)


def alpha_sharp_sigma(alpha: float, beta: float, L0: float, sigma: float) -> float:
    """Upper bound on liminf Phi^sigma(t)/t given the exponent band [alpha, beta] and rate L0."""
    if alpha == beta:
        return beta
    r = (beta - alpha) / (L0 - sigma)
    return (beta + sigma * r) / (1.0 + r)


@dataclass(frozen=True)
class AlphaSharpReport:
    alpha: float
    beta: float
    L0: float
    sigma: float
    measured: float
    bound: float
    episodes: int
    ok: bool


def count_episodes(ratio: np.ndarray, lo: float, hi: float) -> int:
    """Number of completed low -> high passages of a sequence between two levels."""
    state, n = None, 0
    for v in ratio:
        if v <= lo:
            state = "low"
        elif v >= hi and state == "low":
            state, n = "high", n + 1
    return n


def check_alpha_sharp_bound(c: Cocycle, sigma: float, tol: float = 1e-6) -> AlphaSharpReport:
    """Compare the tail liminf estimate of Phi^sigma(t)/t with the alpha-sharp bound.

    alpha, beta are the min and max of Phi(t)/t over the last half of the
    horizon (reported as estimates), L0 comes from the cocycle's window rate.
    """
    n = c.n
    phi = c.array()
    t = np.arange(1, n + 1)
    tail = slice(max(0, n // 2 - 1), n)
    ratio = phi[1:] / t
    alpha = float(ratio[tail].min())
    beta = float(ratio[tail].max())
    if not beta > sigma:
        raise InvalidSigma("sigma must be below the upper exponent estimate")
    _check_sigma(c, sigma)
    env = np.asarray(envelope_values(list(phi), sigma))
    measured = float((env[1:] / t)[tail].min())
    L0 = c.L0_estimate
    if beta - alpha <= 1e-12:
        bound = beta
        episodes = 0
    else:
        span = beta - alpha
        episodes = count_episodes(ratio[tail], alpha + span / 3, beta - span / 3)
        if episodes < 3:
            raise HorizonTooShort(f"only {episodes} oscillation episodes in the tail")
        bound = alpha_sharp_sigma(alpha, beta, max(L0, beta), sigma)
    return AlphaSharpReport(alpha, beta, L0, float(sigma), measured, bound, episodes, measured <= bound + tol)


# -- clustering ------------------------------------------------------------

def clustered_subset(J: Sequence[int], n: int, d: float, k: int):
    """k elements of J in [1, n] spanning at most m = floor(2k/d) + 1.

    Requires #J >= d n and m d n / 2 >= m^2 so that a window of length m
    with k elements of J is guaranteed.
    """
    Js = np.unique(np.asarray([j for j in J if 1 <= j <= n], dtype=int))
    if d <= 0 or k < 1:
        raise TooSparse("need d > 0 and k >= 1")
    m = int(math.floor(2 * k / d + 1e-12)) + 1
    if len(Js) < d * n - 1e-9 or m * d * n / 2 < m * m:
        raise TooSparse(f"need #J >= d n and n >= 2m/d (m = {m})")
    if len(Js) >= k:
        spans = Js[k - 1:] - Js[: len(Js) - k + 1]
        i = int(np.argmin(spans))
        if spans[i] <= m:
            return tuple(int(v) for v in Js[i: i + k]), m
    raise TooSparse("no window of length m holds k elements")


# -- csv -------------------------------------------------------------------

def write_cocycle_csv(c: Cocycle, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "phi"])
        for k, v in enumerate(c.values):
            w.writerow([k, format(float(v), ".17g")])


def read_cocycle_csv(path, slope_bound: float | None = None) -> Cocycle:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return cocycle_from_values([float(r["phi"]) for r in rows], slope_bound)


def write_pliss_csv(c: Cocycle, report: PlissReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "phi", "phi_sigma", "is_pliss"])
        for k, p, e, flag in report.rows(c):
            w.writerow([k, format(p, ".17g"), format(e, ".17g"), flag])
