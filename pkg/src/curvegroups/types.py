"""Shared domain types: curve samples, grids, partitions and test results.

All types are immutable value objects; arrays are frozen after construction
so instances can be shared freely between threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateCurveId, EmptyCurve, NonFiniteValue


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


class Kernel(enum.Enum):
    """Symmetric density used for local weighting."""

    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self is Kernel.GAUSSIAN:
            return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
        return np.maximum(0.75 * (1.0 - u * u), 0.0)


class Norm(enum.Enum):
    """Distance flavour: CM pairs with L2/means, KS with L1/medians."""

    CM = "cm"
    KS = "ks"


@dataclass(frozen=True)
class CurveSample:
    """One curve's observations (x_i, y_i), i = 1..n."""

    curve_id: str
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _frozen_array(self.xs)
        ys = _frozen_array(self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if xs.ndim != 1 or ys.ndim != 1 or len(xs) != len(ys):
            raise ValueError(
                f"curve {self.curve_id!r}: xs and ys must be 1-d of equal length"
            )
        if len(xs) == 0:
            raise EmptyCurve(self.curve_id)
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise NonFiniteValue(self.curve_id)

    @property
    def n(self) -> int:
        return len(self.xs)


@dataclass(frozen=True)
class CurveCollection:
    """Ordered list of labelled curve samples."""

    samples: tuple

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        seen = set()
        for s in self.samples:
            if s.curve_id in seen:
                raise DuplicateCurveId(s.curve_id)
            seen.add(s.curve_id)

    @property
    def n_curves(self) -> int:
        return len(self.samples)

    @property
    def n_total(self) -> int:
        return sum(s.n for s in self.samples)

    @property
    def curve_ids(self) -> tuple:
        return tuple(s.curve_id for s in self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __len__(self):
        return len(self.samples)


def validate_collection(raw: CurveCollection) -> CurveCollection:
    """Re-check every invariant of a collection and return it unchanged.

    Raises DuplicateCurveId, EmptyCurve or NonFiniteValue naming the
    offending curve.
    """
    seen = set()
    for s in raw.samples:
        if s.curve_id in seen:
            raise DuplicateCurveId(s.curve_id)
        seen.add(s.curve_id)
        if len(s.xs) == 0 or len(s.ys) == 0:
            raise EmptyCurve(s.curve_id)
        if len(s.xs) != len(s.ys):
            raise ValueError(f"curve {s.curve_id!r}: length mismatch")
        if not (np.isfinite(s.xs).all() and np.isfinite(s.ys).all()):
            raise NonFiniteValue(s.curve_id)
    return raw


@dataclass(frozen=True)
class EvaluationGrid:
    """Equally spaced evaluation points on [lo, hi]."""

    lo: float
    hi: float
    size: int
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.size < 2:
            raise ValueError("grid needs at least 2 points")
        pts = np.linspace(self.lo, self.hi, self.size)
        object.__setattr__(self, "points", _frozen_array(pts))

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.size - 1)

    @classmethod
    def for_collection(cls, collection: CurveCollection, size: int = 100,
                       trim: float = 0.025) -> "EvaluationGrid":
        """Common grid over the intersection of per-curve covariate ranges,
        trimmed by `trim` of the span on each side."""
        lo = max(float(s.xs.min()) for s in collection)
        hi = min(float(s.xs.max()) for s in collection)
        if not lo < hi:
            raise ValueError("curve covariate ranges do not overlap")
        span = hi - lo
        return cls(lo + trim * span, hi - trim * span, size)


class LocalLinearCoefficients(tuple):
    """(alpha0, alpha1): fitted value and local slope of the weighted line."""

    __slots__ = ()

    def __new__(cls, alpha0, alpha1):
        return super().__new__(cls, (float(alpha0), float(alpha1)))

    @property
    def alpha0(self):
        return self[0]

    @property
    def alpha1(self):
        return self[1]


@dataclass(frozen=True)
class CurveEstimateMatrix:
    """Per-curve estimates on a common grid, one row per curve."""

    grid: EvaluationGrid
    values: np.ndarray          # shape (J, Q)
    bandwidths: np.ndarray      # shape (J,)
    curve_ids: tuple = ()

    def __post_init__(self):
        values = _frozen_array(self.values)
        bandwidths = _frozen_array(self.bandwidths)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bandwidths", bandwidths)
        if values.ndim != 2 or values.shape[1] != self.grid.size:
            raise ValueError("values must be (J, Q) matching the grid")
        if len(bandwidths) != values.shape[0]:
            raise ValueError("one bandwidth per curve required")
        if not np.isfinite(values).all():
            raise ValueError("estimates contain non-finite values")
        if not (np.isfinite(bandwidths).all() and (bandwidths > 0).all()):
            raise ValueError("bandwidths must be positive and finite")

    @property
    def n_curves(self) -> int:
        return self.values.shape[0]


def _canonical_assignment(assignment: np.ndarray) -> np.ndarray:
    """Relabel groups by first appearance so labels start at 1 and two
    partitions equal up to a label permutation compare equal."""
    mapping = {}
    out = np.empty(len(assignment), dtype=int)
    for i, g in enumerate(assignment):
        if g not in mapping:
            mapping[g] = len(mapping) + 1
        out[i] = mapping[g]
    return out


@dataclass(frozen=True)
class Partition:
    """Assignment of curves 1..J into K nonempty groups.

    Group labels are canonicalised by first appearance, so two partitions
    with the same group structure compare equal regardless of labelling.
    """

    n_groups: int
    assignment: np.ndarray  # length J, values in 1..K

    def __post_init__(self):
        assignment = _canonical_assignment(np.asarray(self.assignment, dtype=int))
        assignment.flags.writeable = False
        object.__setattr__(self, "assignment", assignment)
        labels = np.unique(assignment)
        if len(assignment) == 0:
            raise ValueError("empty assignment")
        if len(labels) != self.n_groups or labels[0] != 1 or labels[-1] != self.n_groups:
            raise ValueError(
                f"assignment must use every label 1..{self.n_groups} at least once"
            )

    @property
    def n_curves(self) -> int:
        return len(self.assignment)

    def groups(self) -> list:
        """Zero-based curve indices per group, in label order."""
        return [np.flatnonzero(self.assignment == k + 1)
                for k in range(self.n_groups)]

    @classmethod
    def from_groups(cls, groups, n_curves: int) -> "Partition":
        assignment = np.zeros(n_curves, dtype=int)
        for k, members in enumerate(groups):
            for i in members:
                if assignment[i] != 0:
                    raise ValueError(f"curve {i} assigned twice")
                assignment[i] = k + 1
        if (assignment == 0).any():
            raise ValueError("groups do not cover all curves")
        return cls(len(list(groups)), assignment)

    @classmethod
    def single_group(cls, n_curves: int) -> "Partition":
        return cls(1, np.ones(n_curves, dtype=int))

    @classmethod
    def singletons(cls, n_curves: int) -> "Partition":
        return cls(n_curves, np.arange(1, n_curves + 1))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (self.n_groups == other.n_groups
                and np.array_equal(self.assignment, other.assignment))

    def __hash__(self):
        return hash((self.n_groups, self.assignment.tobytes()))


def empirical_p_value(statistic: float, boot_stats: np.ndarray) -> float:
    """Exceedance proportion #{b : D*_b >= D} / B (conservative under ties)."""
    boot_stats = np.asarray(boot_stats, dtype=float)
    return float(np.count_nonzero(boot_stats >= statistic) / len(boot_stats))


def rejection_threshold(boot_stats: np.ndarray, alpha: float) -> float:
    """Empirical (1 - alpha) percentile: the ceil((1-alpha) B)-th order
    statistic of the bootstrap values."""
    boot = np.sort(np.asarray(boot_stats, dtype=float))
    k = math.ceil((1.0 - alpha) * len(boot))
    k = min(max(k, 1), len(boot))
    return float(boot[k - 1])


@dataclass(frozen=True)
class TestResult:
    """Outcome of testing whether K groups of equal curves suffice."""

    n_groups: int
    norm: Norm
    statistic: float
    boot_stats: np.ndarray
    p_value: float
    partition: Partition
    alpha: float
    reject: bool

    def __post_init__(self):
        boot = _frozen_array(self.boot_stats)
        object.__setattr__(self, "boot_stats", boot)

    @classmethod
    def from_bootstrap(cls, n_groups, norm, statistic, boot_stats, partition,
                       alpha) -> "TestResult":
        boot = np.asarray(boot_stats, dtype=float)
        return cls(
            n_groups=n_groups,
            norm=norm,
            statistic=float(statistic),
            boot_stats=boot,
            p_value=empirical_p_value(statistic, boot),
            partition=partition,
            alpha=float(alpha),
            reject=bool(statistic > rejection_threshold(boot, alpha)),
        )


@dataclass(frozen=True)
class KSelectionTrace:
    """Record of the sequential K = 1, 2, ... testing procedure."""

    results: tuple           # TestResult per tested K, ascending
    selected_k: int
    final_partition: Partition
    saturated: bool = False  # True when every tested K rejected

    def __post_init__(self):
        object.__setattr__(self, "results", tuple(self.results))
        for r in self.results[:-1]:
            if not r.reject:
                raise ValueError("only the final tested K may fail to reject")
        if not self.saturated and self.results and self.results[-1].reject:
            raise ValueError("unsaturated trace must end in a non-rejection")
