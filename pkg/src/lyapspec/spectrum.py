"""Empirical Lyapunov spectrum from cylinder statistics, and exponent audits."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import map_core
from .errors import DepthTooLarge, NoOverlap, NotMarkov, ValidationError
from .pressure import PressureCurve, SpectrumCurve, cylinder_log_derivatives, legendre_F

MAX_DEPTH = 24
BOUNDARY_ZONE = 0.05


@dataclass
class LevelSetEstimate:
    depth: int
    centers: np.ndarray
    counts: np.ndarray
    estimates: np.ndarray
    bin_width: float
    alpha_min: float
    alpha_max: float

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def occupied(self):
        m = self.counts > 0
        return self.centers[m], self.counts[m], self.estimates[m]


def cylinder_exponents(fmap, n: int) -> np.ndarray:
    """alpha-hat = (1/n) log sup |(f^n)'| for every n-cylinder."""
    _, lmax = cylinder_log_derivatives(fmap, n)
    return lmax / n


def empirical_spectrum(fmap, n: int, bin_width: float | None = None, bins: int = 40) -> LevelSetEstimate:
    """Bin the n-cylinders by alpha-hat; per bin the estimate is log(count) / (n * centre).

    Bin centres sit on alpha_min + k w, so that exponents on a regular lattice
    starting at the smallest one fall on centres rather than edges.
    """
    if not fmap.is_markov:
        raise NotMarkov(f"map {fmap.name!r} has no Markov structure")
    if n < 1:
        raise ValidationError("depth must be >= 1")
    if n > MAX_DEPTH:
        raise DepthTooLarge(f"depth {n} exceeds {MAX_DEPTH}")
    a = cylinder_exponents(fmap, n)
    lo, hi = float(a.min()), float(a.max())
    span = hi - lo
    if bin_width is None:
        bin_width = span / bins if span > 1e-12 else 1.0
    if bin_width <= 0:
        raise ValidationError("bin width must be positive")
    # ties at half-bin go up; the slack stops rounding noise from splitting equal exponents
    idx = np.floor((a - lo) / bin_width + 0.5 + 1e-9).astype(int)
    nb = int(idx.max()) + 1
    counts = np.bincount(idx, minlength=nb)
    centers = lo + bin_width * np.arange(nb)
    with np.errstate(divide="ignore"):
        est = np.where(counts > 0, np.log(np.maximum(counts, 1)) / (n * centers), np.nan)
    return LevelSetEstimate(n, centers, counts, est, float(bin_width), lo, hi)


@dataclass
class Comparison:
    deviation: float
    centers: np.ndarray
    estimates: np.ndarray
    predicted: np.ndarray


def _predict(curve, alpha: np.ndarray) -> np.ndarray:
    if isinstance(curve, PressureCurve):
        return np.array([legendre_F(curve, a) for a in alpha])
    if isinstance(curve, SpectrumCurve):
        return np.interp(alpha, curve.alpha_grid, curve.F)
    raise ValidationError("prediction must be a PressureCurve or SpectrumCurve")


def compare_to_prediction(est: LevelSetEstimate, curve) -> Comparison:
    """Max |estimate - F(centre)| over occupied bins away from the ends of [chi_inf, chi_sup]."""
    ci, cs = curve.chi_inf, curve.chi_sup
    c, _, e = est.occupied()
    span = cs - ci
    if span > 1e-9:
        keep = (c >= ci + BOUNDARY_ZONE * span) & (c <= cs - BOUNDARY_ZONE * span)
    else:
        keep = np.abs(c - ci) <= max(1e-9, est.bin_width / 2)
    if not keep.any():
        raise NoOverlap("no interior bin overlaps the predicted spectrum")
    c, e = c[keep], e[keep]
    F = _predict(curve, c)
    return Comparison(float(np.max(np.abs(e - F))), c, e, F)


@dataclass
class AuditReport:
    chi_inf: float
    chi_sup: float
    tol: float
    lower: np.ndarray
    upper: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def orbit_log_derivatives(fmap, itineraries: np.ndarray, anchor: float | None = None) -> np.ndarray:
    """log|f'| along true orbits realising each itinerary row; shape (m, horizon)."""
    itin = np.atleast_2d(itineraries)
    X = map_core.orbit_from_itinerary(fmap, itin, anchor)[:, :-1]
    out = np.empty(X.shape)
    for j, br in enumerate(fmap.branches):
        m = itin == j
        out[m] = np.log(np.abs(br.deriv(X[m])))
    return out


def exponent_range_audit(fmap, horizon: int, chi_inf: float, chi_sup: float, itineraries=None,
                         points: Sequence[float] | None = None) -> AuditReport:
    """Finite-time (lower, upper) exponents of sample orbits against [chi_inf - tol, chi_sup + tol].

    Samples are given as branch itineraries (orbits are rebuilt backwards, which is
    stable on Cantor sets) or as start points iterated forward.  The lower and upper
    exponents are the min and max of Phi(k)/k over the last half of the horizon;
    tol = 3 horizon^(-1/2) (chi_sup - chi_inf).
    """
    if itineraries is not None:
        logs = orbit_log_derivatives(fmap, np.asarray(itineraries)[:, :horizon])
    elif points is not None:
        logs = np.array([map_core.log_derivatives(fmap, map_core.orbit(fmap, x, horizon)[:-1]) for x in points])
    else:
        raise ValidationError("give itineraries or points")
    phi = np.cumsum(logs, axis=1)
    k = np.arange(1, phi.shape[1] + 1)
    avg = phi / k
    tail = avg[:, max(0, horizon // 2 - 1):]
    lower, upper = tail.min(axis=1), tail.max(axis=1)
    tol = 3.0 * horizon ** -0.5 * (chi_sup - chi_inf)
    bad = np.nonzero((lower < chi_inf - tol) | (upper > chi_sup + tol))[0]
    viol = [(int(i), float(lower[i]), float(upper[i])) for i in bad]
    return AuditReport(chi_inf, chi_sup, tol, lower, upper, viol)


def periodic_exponents(fmap, n: int) -> np.ndarray:
    """(1/n) log|(f^n)'(p)| over all fixed points p of f^n."""
    _, logm, _ = map_core.periodic_point_data(fmap, n)
    return logm / n


def write_spectrum_csv(est: LevelSetEstimate, path, curve=None) -> None:
    c, cnt, e = est.occupied()
    F = _predict(curve, c) if curve is not None else np.full(len(c), np.nan)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha_bin", "count", "dim_estimate", "F_predicted"])
        for row in zip(c, cnt, e, F):
            w.writerow([format(float(row[0]), ".17g"), int(row[1]), format(float(row[2]), ".17g"),
                        format(float(row[3]), ".17g")])
