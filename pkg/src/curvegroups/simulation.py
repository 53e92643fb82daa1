"""Monte Carlo scenario generators and the experiment harness.

Three scenario families are provided: a 3-curve setting with four mean
layouts (R1-R4) crossed with four variance functions (V1-V4), a 30-curve
setting in six mean blocks whose fifth block is shifted by a * exp(x), and
a 120-curve setting with five groups of sizes 50/30/20/10/10.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .equality_test import BootstrapConfig, test_h0k
from .errors import NegativeVariance
from .selection import select_k
from .types import (CurveCollection, CurveSample, EvaluationGrid, Kernel,
                    Norm, Partition)

THREE_CURVE_MEANS = {
    "R1": (lambda x: x, lambda x: x, lambda x: x),
    "R2": (lambda x: x, lambda x: x + 0.25, lambda x: x + 0.5),
    "R3": (lambda x: x, lambda x: np.full_like(x, 0.5), lambda x: 1.0 - x),
    "R4": (lambda x: x, lambda x: x,
           lambda x: 1.0 - 48.0 * x + 218.0 * x**2 - 315.0 * x**3 + 145.0 * x**4),
}

THREE_CURVE_VARIANCES = {
    "V1": (lambda x: np.full_like(x, 0.5),) * 3,
    "V2": (lambda x: 0.5 * (0.5 + 2.0 * x),) * 3,
    "V3": (lambda x: x, lambda x: np.full_like(x, 0.5),
           lambda x: 0.5 * (2.5 - 2.0 * x)),
    "V4": (lambda x: x, lambda x: x,
           lambda x: 0.5 * (-4.0 * x**2 + 4.0 * x + 0.5)),
}

# true group layout of the 3-curve means (same mean -> same group)
THREE_CURVE_TRUTH = {
    "R1": (1, 1, 1), "R2": (1, 2, 3), "R3": (1, 2, 3), "R4": (1, 1, 2),
}


def _thirty_curve_mean(j: int, x: np.ndarray, a: float) -> np.ndarray:
    """Block mean for 1-based curve index j of the 30-curve scenario."""
    if j <= 5:
        return x + 2.0
    if j <= 10:
        return x**2 + 3.0
    if j <= 15:
        return 2.0 * np.sin(2.0 * x) - 2.0
    if j <= 20:
        return 2.0 * np.sin(x)
    if j <= 25:
        return 2.0 * np.sin(x) + a * np.exp(x)
    return np.full_like(x, 1.0)


def thirty_curve_truth(a: float) -> Partition:
    """5 groups when a = 0 (blocks 4 and 5 coincide), else 6."""
    blocks = np.repeat(np.arange(1, 7), 5)
    if a == 0.0:
        blocks[(blocks == 5)] = 4
    return Partition(len(np.unique(blocks)), blocks)


def _onetwenty_mean(j: int, x: np.ndarray) -> np.ndarray:
    if j <= 50:
        return np.zeros_like(x)
    if j <= 80:
        return 1.0 - 2.0 * x
    if j <= 100:
        return 0.75 * np.arctan(10.0 * (x - 0.6))
    if j <= 110:
        return 2.5 * (1.0 - x**2) ** 4 * (np.abs(x) <= 1.0)
    return 1.75 * np.arctan(5.0 * (x - 0.6)) + 0.75


ONETWENTY_GROUP_SIZES = (50, 30, 20, 10, 10)


def onetwenty_truth() -> Partition:
    labels = np.repeat(np.arange(1, 6), ONETWENTY_GROUP_SIZES)
    return Partition(5, labels)


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one simulation scenario."""

    family: str                      # "three" | "thirty" | "onetwenty"
    mean_id: str = "R1"              # three-curve only
    var_id: str = "V1"               # three-curve only
    a: float = 0.0                   # thirty-curve block-5 shift
    variance_mode: str = "homoscedastic"  # thirty-curve only
    sample_sizes: tuple | None = None
    n_total: int | None = None       # thirty-curve multinomial total
    variance_is_sd: bool = False     # onetwenty: read N(0, 1.3) as sd

    def __post_init__(self):
        if self.family not in ("three", "thirty", "onetwenty"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "three":
            if self.mean_id not in THREE_CURVE_MEANS:
                raise ValueError(f"unknown mean layout {self.mean_id!r}")
            if self.var_id not in THREE_CURVE_VARIANCES:
                raise ValueError(f"unknown variance layout {self.var_id!r}")
            if self.sample_sizes is None or len(self.sample_sizes) != 3:
                raise ValueError("three-curve scenarios need 3 sample sizes")
        if self.family == "thirty":
            if self.a < 0:
                raise ValueError("a must be >= 0")
            if self.variance_mode not in ("homoscedastic", "heteroscedastic"):
                raise ValueError(f"unknown variance mode {self.variance_mode!r}")
            if self.sample_sizes is None and self.n_total is None:
                raise ValueError("thirty-curve scenarios need sizes or n_total")
        if self.family == "onetwenty" and self.sample_sizes is None:
            raise ValueError("onetwenty scenarios need per-curve sizes")


def _seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def generate_three_curve(mean_id: str, var_id: str, sizes,
                         seed) -> CurveCollection:
    """x ~ U[0,1]; y = m_j(x) + sigma_j(x) Z with the requested layouts."""
    means = THREE_CURVE_MEANS[mean_id]
    variances = THREE_CURVE_VARIANCES[var_id]
    rng = np.random.default_rng(_seedseq(seed))
    samples = []
    for j, (m, v, n) in enumerate(zip(means, variances, sizes), start=1):
        if n < 1:
            raise ValueError("sample sizes must be positive")
        x = rng.uniform(0.0, 1.0, int(n))
        y = m(x) + np.sqrt(v(x)) * rng.standard_normal(int(n))
        samples.append(CurveSample(f"c{j}", x, y))
    return CurveCollection(tuple(samples))


def multinomial_sizes(n_total: int, n_curves: int, seed,
                      min_size: int = 5) -> np.ndarray:
    """Unequal sizes: weights drawn from {1, 1.5, 2, 2.5, 3}, normalised,
    then Multinomial(n_total).  Uses its own seed stream so the size vector
    is reproducible independently of the noise draws; redraws the rare
    vector containing a group below min_size."""
    rng = np.random.default_rng(_seedseq(seed))
    for _ in range(1000):
        w = rng.choice([1.0, 1.5, 2.0, 2.5, 3.0], size=n_curves)
        sizes = rng.multinomial(int(n_total), w / w.sum())
        if sizes.min() >= min_size:
            return sizes
    raise RuntimeError("could not draw a size vector above the minimum")


def generate_thirty_curve(a: float, variance_mode: str, sizes=None,
                          n_total: int | None = None,
                          seed=0) -> CurveCollection:
    """30 curves in six 5-curve mean blocks on x ~ U[-2,2]."""
    if a < 0:
        raise ValueError("a must be >= 0")
    root = _seedseq(seed)
    size_ss, noise_ss = root.spawn(2)
    if sizes is None:
        sizes = multinomial_sizes(n_total, 30, size_ss)
    sizes = np.asarray(sizes, dtype=int)
    if len(sizes) != 30 or sizes.min() < 1:
        raise ValueError("need 30 positive sample sizes")
    hetero = variance_mode == "heteroscedastic"
    if hetero:
        probe = np.linspace(-2.0, 2.0, 2001)
        for j in range(1, 31):
            var = 0.5 + 0.05 * _thirty_curve_mean(j, probe, a)
            if var.min() <= 0:
                raise NegativeVariance(
                    f"curve {j}: min variance {var.min():.4f} on [-2, 2]")
    rng = np.random.default_rng(noise_ss)
    samples = []
    for j in range(1, 31):
        n = int(sizes[j - 1])
        x = rng.uniform(-2.0, 2.0, n)
        m = _thirty_curve_mean(j, x, a)
        var = 0.5 + 0.05 * m if hetero else np.full(n, 0.5)
        y = m + np.sqrt(var) * rng.standard_normal(n)
        samples.append(CurveSample(f"c{j:02d}", x, y))
    return CurveCollection(tuple(samples))


def generate_hundred_twenty_curve(sizes, seed=0,
                                  variance_is_sd: bool = False) -> CurveCollection:
    """120 curves in five mean groups of sizes 50/30/20/10/10 on x ~ U[0,1].

    The noise is N(0, 1.3) read as variance 1.3; variance_is_sd switches to
    the sd = 1.3 reading for sensitivity checks."""
    sizes = np.asarray(sizes, dtype=int)
    if len(sizes) != 120 or sizes.min() < 1:
        raise ValueError("need 120 positive sample sizes")
    sd = 1.3 if variance_is_sd else np.sqrt(1.3)
    rng = np.random.default_rng(_seedseq(seed))
    samples = []
    for j in range(1, 121):
        n = int(sizes[j - 1])
        x = rng.uniform(0.0, 1.0, n)
        y = _onetwenty_mean(j, x) + sd * rng.standard_normal(n)
        samples.append(CurveSample(f"c{j:03d}", x, y))
    return CurveCollection(tuple(samples))


def generate(spec: ScenarioSpec, seed) -> tuple:
    """Draw one dataset; returns (collection, true partition)."""
    if spec.family == "three":
        coll = generate_three_curve(spec.mean_id, spec.var_id,
                                    spec.sample_sizes, seed)
        truth = Partition(len(set(THREE_CURVE_TRUTH[spec.mean_id])),
                          np.asarray(THREE_CURVE_TRUTH[spec.mean_id]))
        return coll, truth
    if spec.family == "thirty":
        coll = generate_thirty_curve(spec.a, spec.variance_mode,
                                     sizes=spec.sample_sizes,
                                     n_total=spec.n_total, seed=seed)
        return coll, thirty_curve_truth(spec.a)
    coll = generate_hundred_twenty_curve(spec.sample_sizes, seed,
                                         spec.variance_is_sd)
    return coll, onetwenty_truth()


def misclassification_count(estimated: Partition, truth: Partition) -> int:
    """Minimum number of disagreeing curves over all bijective matchings of
    estimated group labels to true group labels (optimal assignment on the
    confusion matrix)."""
    if estimated.n_curves != truth.n_curves:
        raise ValueError("partitions cover different numbers of curves")
    k = max(estimated.n_groups, truth.n_groups)
    confusion = np.zeros((k, k), dtype=int)
    for e, t in zip(estimated.assignment, truth.assignment):
        confusion[e - 1, t - 1] += 1
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return int(estimated.n_curves - confusion[rows, cols].sum())


@dataclass
class MonteCarloReport:
    """Aggregated results of repeated scenario runs."""

    metric: str                   # "reject" or "select_k"
    runs: int
    records: list = field(default_factory=list)  # one dict per completed run
    failures: list = field(default_factory=list)  # (run index, message)

    @property
    def n_completed(self) -> int:
        return len(self.records)

    @property
    def rejection_rate(self) -> float:
        if self.metric != "reject" or not self.records:
            raise ValueError("rejection_rate needs completed 'reject' runs")
        return sum(r["reject"] for r in self.records) / len(self.records)

    def selected_k_histogram(self) -> dict:
        hist = {}
        for r in self.records:
            hist[r["selected_k"]] = hist.get(r["selected_k"], 0) + 1
        return dict(sorted(hist.items()))

    def misclassification_histogram(self) -> dict:
        hist = {}
        for r in self.records:
            hist[r["misclassified"]] = hist.get(r["misclassified"], 0) + 1
        return dict(sorted(hist.items()))

    def to_json(self, path) -> None:
        payload = {
            "metric": self.metric,
            "runs": self.runs,
            "completed": self.n_completed,
            "failures": [{"run": i, "error": msg} for i, msg in self.failures],
            "records": self.records,
        }
        if self.metric == "reject" and self.records:
            payload["rejection_rate"] = self.rejection_rate
        if self.metric == "select_k" and self.records:
            payload["selected_k_histogram"] = {
                str(k): v for k, v in self.selected_k_histogram().items()}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path) -> None:
        if not self.records:
            raise ValueError("nothing to write")
        fields = sorted(self.records[0])
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.records)


def run_monte_carlo(spec: ScenarioSpec, runs: int, metric: str = "reject",
                    n_groups: int = 1, norm: Norm = Norm.CM,
                    n_boot: int = 200, alpha: float = 0.05, seed: int = 0,
                    k_max: int | None = None,
                    kernel: Kernel = Kernel.EPANECHNIKOV,
                    grid_size: int = 100) -> MonteCarloReport:
    """Repeatedly draw a dataset and run either a single H0(K) test
    (metric="reject") or the full sequential selection (metric="select_k").

    Every run derives its own data and test seeds from (seed, run index),
    so results do not depend on execution order and individual runs can be
    reproduced in isolation.  Failed runs are recorded and excluded."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if metric not in ("reject", "select_k"):
        raise ValueError(f"unknown metric {metric!r}")
    report = MonteCarloReport(metric=metric, runs=runs)
    for r in range(runs):
        root = np.random.SeedSequence(entropy=[int(seed), r])
        data_ss, test_ss = root.spawn(2)
        test_seed = int(test_ss.generate_state(1, np.uint64)[0] >> 1)
        cfg = BootstrapConfig(n_boot=n_boot, alpha=alpha, seed=test_seed)
        try:
            collection, truth = generate(spec, data_ss)
            grid = EvaluationGrid.for_collection(collection, size=grid_size)
            if metric == "reject":
                res = test_h0k(collection, n_groups, norm, cfg,
                               kernel=kernel, grid=grid)
                report.records.append({
                    "run": r, "seed": test_seed, "reject": int(res.reject),
                    "p_value": res.p_value, "statistic": res.statistic,
                })
            else:
                trace = select_k(collection, norm, cfg, kernel=kernel,
                                 grid=grid, k_max=k_max)
                report.records.append({
                    "run": r, "seed": test_seed,
                    "selected_k": trace.selected_k,
                    "saturated": int(trace.saturated),
                    "misclassified": misclassification_count(
                        trace.final_partition, truth),
                })
        except Exception as exc:  # noqa: BLE001 - per-run isolation
            report.failures.append((r, f"{type(exc).__name__}: {exc}"))
    return report
