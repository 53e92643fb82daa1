"""Local linear kernel estimation of a single curve.

Provides the smoother primitive (fit at a point, on a grid, or at arbitrary
locations), simple binning for acceleration, and leave-one-out
cross-validation bandwidth selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .errors import AllCandidatesDegenerate, DegenerateFit
from .types import (CurveSample, EvaluationGrid, Kernel,
                    LocalLinearCoefficients, _frozen_array)

# Binning kicks in above this sample size; below it fits are exact.
BIN_THRESHOLD = 500
MAX_BINS = 400

# Number of log-spaced CV candidates and the lower-edge multiplier on the
# median covariate gap.
N_CANDIDATES = 30
MIN_BANDWIDTH_GAPS = 1.5

# A candidate bandwidth is discarded when the LOO fit is singular for any
# observation mass beyond this fraction.  Zero: all candidates must score
# every observation.  Permitting exclusions makes small bandwidths look
# spuriously good, because the points they drop are exactly the sparse-
# region points that are hardest to predict.
MAX_DEGENERATE_FRACTION = 0.0


@dataclass(frozen=True)
class BinnedSample:
    """Sample compressed onto equally spaced bin centers."""

    bin_centers: np.ndarray
    bin_weights: np.ndarray  # observation counts, zeros allowed
    bin_means: np.ndarray    # mean response per bin (0 where empty)

    def __post_init__(self):
        object.__setattr__(self, "bin_centers", _frozen_array(self.bin_centers))
        object.__setattr__(self, "bin_weights", _frozen_array(self.bin_weights))
        object.__setattr__(self, "bin_means", _frozen_array(self.bin_means))

    @property
    def n_bins(self) -> int:
        return len(self.bin_centers)


def bin_sample(sample: CurveSample, n_bins: int) -> BinnedSample:
    """Snap each observation to its nearest of n_bins equally spaced centers.

    Bin means are within-bin response averages; empty bins keep weight 0.
    """
    if n_bins < 2:
        raise ValueError("need at least 2 bins")
    xs, ys = sample.xs, sample.ys
    lo, hi = float(xs.min()), float(xs.max())
    if not lo < hi:
        raise ValueError("cannot bin a sample with zero covariate span")
    centers = np.linspace(lo, hi, n_bins)
    step = (hi - lo) / (n_bins - 1)
    idx = np.clip(np.rint((xs - lo) / step).astype(int), 0, n_bins - 1)
    weights = np.bincount(idx, minlength=n_bins).astype(float)
    sums = np.bincount(idx, weights=ys, minlength=n_bins)
    means = np.divide(sums, weights, out=np.zeros(n_bins), where=weights > 0)
    return BinnedSample(centers, weights, means)


def _as_arrays(data) -> tuple:
    """(xs sorted, masses, responses) for either sample representation."""
    if isinstance(data, BinnedSample):
        keep = data.bin_weights > 0
        return (np.ascontiguousarray(data.bin_centers[keep]),
                np.ascontiguousarray(data.bin_weights[keep]),
                np.ascontiguousarray(data.bin_means[keep]))
    order = np.argsort(data.xs, kind="stable")
    return (np.ascontiguousarray(data.xs[order]),
            np.ones(len(order)),
            np.ascontiguousarray(data.ys[order]))


def _fit_engine(kernel: Kernel):
    return _engine.epa_fit if kernel is Kernel.EPANECHNIKOV else _engine.gauss_fit


def _cv_engine(kernel: Kernel):
    return _engine.epa_cv if kernel is Kernel.EPANECHNIKOV else _engine.gauss_cv


def _check_bandwidth(h: float) -> float:
    h = float(h)
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be a positive finite real, got {h}")
    return h


def local_linear_fit(data, h: float, x: float,
                     kernel: Kernel = Kernel.EPANECHNIKOV) -> LocalLinearCoefficients:
    """Minimiser (alpha0, alpha1) of the kernel-weighted least squares line
    at x; alpha0 is the curve estimate.  Accepts a raw or binned sample."""
    h = _check_bandwidth(h)
    xs, cs, ys = _as_arrays(data)
    te = np.array([float(x)])
    a0, a1, ok = _fit_engine(kernel)(xs, cs, ys, h, te)
    if not ok[0]:
        raise DegenerateFit(float(x))
    return LocalLinearCoefficients(a0[0], a1[0])


def fit_at_points(data, h: float, points,
                  kernel: Kernel = Kernel.EPANECHNIKOV) -> np.ndarray:
    """Curve estimates at arbitrary locations (any order)."""
    h = _check_bandwidth(h)
    xs, cs, ys = _as_arrays(data)
    points = np.asarray(points, dtype=float)
    order = np.argsort(points, kind="stable")
    a0, _, ok = _fit_engine(kernel)(xs, cs, ys, h, np.ascontiguousarray(points[order]))
    if not ok.all():
        bad = points[order][~ok][0]
        raise DegenerateFit(float(bad))
    out = np.empty_like(a0)
    out[order] = a0
    return out


def fit_on_grid(data, h: float, grid: EvaluationGrid,
                kernel: Kernel = Kernel.EPANECHNIKOV) -> np.ndarray:
    """Curve estimates at every grid point (grid points are sorted)."""
    h = _check_bandwidth(h)
    xs, cs, ys = _as_arrays(data)
    a0, _, ok = _fit_engine(kernel)(xs, cs, ys, h, grid.points)
    if not ok.all():
        bad = grid.points[~ok][0]
        raise DegenerateFit(float(bad), context="grid evaluation")
    return a0


def candidate_bandwidths(xs, count: int = N_CANDIDATES) -> np.ndarray:
    """Log-spaced CV search set from 1.5x the median covariate gap up to the
    covariate range."""
    xs = np.sort(np.asarray(xs, dtype=float))
    span = float(xs[-1] - xs[0])
    if span <= 0:
        raise ValueError("covariate span is zero; no bandwidth scale exists")
    gaps = np.diff(xs)
    med = float(np.median(gaps))
    if med <= 0:  # heavy ties: fall back to the median positive gap
        pos = gaps[gaps > 0]
        med = float(np.median(pos))
    lo = min(MIN_BANDWIDTH_GAPS * med, span)
    return np.geomspace(lo, span, count)


def cv_scores(data, candidates, kernel: Kernel = Kernel.EPANECHNIKOV):
    """CV(h) = sum_i (y_i - m^{-i}(x_i))**2 for every candidate, plus the
    observation count excluded per candidate because its LOO fit was
    singular."""
    xs, cs, ys = _as_arrays(data)
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise ValueError("no candidate bandwidths supplied")
    cv, excl = _cv_engine(kernel)(xs, cs, ys, candidates)
    return cv, excl


def cv_bandwidth(data, candidates=None, kernel: Kernel = Kernel.EPANECHNIKOV,
                 full: bool = False):
    """Leave-one-out cross-validation bandwidth selection.

    Candidates whose LOO fit is singular anywhere are discarded; exact
    ties in CV break toward the larger bandwidth.  With full=True also
    returns per-candidate diagnostics.
    """
    xs, cs, ys = _as_arrays(data)
    if candidates is None:
        candidates = candidate_bandwidths(xs)
    candidates = np.asarray(candidates, dtype=float)
    cv, excl = cv_scores(data, candidates, kernel)
    n_obs = float(cs.sum())
    valid = excl <= MAX_DEGENERATE_FRACTION * n_obs
    if not valid.any():
        raise AllCandidatesDegenerate(
            f"all {len(candidates)} candidates singular for >"
            f"{MAX_DEGENERATE_FRACTION:.0%} of {int(n_obs)} observations"
        )
    # compare candidates by the mean LOO error over the mass they actually
    # scored: a raw sum would hand candidates that exclude observations an
    # unearned discount of roughly the excluded noise mass
    cv_mean = cv / np.maximum(n_obs - excl, 1.0)
    cv_valid = np.where(valid, cv_mean, np.inf)
    cv_min = cv_valid.min()
    tol = 1e-12 * (1.0 + float(np.dot(cs * ys, ys)) / n_obs)
    tied = cv_valid <= cv_min + tol
    h = float(candidates[tied].max())
    if full:
        return h, {"candidates": candidates, "cv": cv, "excluded": excl,
                   "valid": valid}
    return h


def prepare_sample(sample: CurveSample):
    """Apply the binning policy: samples above BIN_THRESHOLD observations
    are compressed to min(MAX_BINS, n) bins, smaller ones stay exact."""
    if sample.n > BIN_THRESHOLD:
        return bin_sample(sample, min(MAX_BINS, sample.n))
    return sample
