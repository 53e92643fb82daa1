"""Scenario generators, misclassification metric and Monte Carlo harness."""

import json

import numpy as np
import pytest

from curvegroups import (
    MonteCarloReport,
    Norm,
    Partition,
    ScenarioSpec,
    generate,
    misclassification_count,
    run_monte_carlo,
)
from curvegroups.simulation import (ONETWENTY_GROUP_SIZES,
                                    _onetwenty_mean, _thirty_curve_mean,
                                    multinomial_sizes, onetwenty_truth,
                                    thirty_curve_truth)

X10 = np.array([0.03, 0.11, 0.24, 0.38, 0.47, 0.55, 0.63, 0.78, 0.86, 0.97])


def test_three_curve_mean_formulas():
    from curvegroups.simulation import THREE_CURVE_MEANS
    m = THREE_CURVE_MEANS
    assert np.allclose(m["R2"][1](X10), X10 + 0.25, atol=1e-12)
    assert np.allclose(m["R2"][2](X10), X10 + 0.5, atol=1e-12)
    assert np.allclose(m["R3"][1](X10), 0.5, atol=1e-12)
    assert np.allclose(m["R3"][2](X10), 1.0 - X10, atol=1e-12)
    quartic = (1.0 - 48.0 * X10 + 218.0 * X10**2 - 315.0 * X10**3
               + 145.0 * X10**4)
    assert np.allclose(m["R4"][2](X10), quartic, atol=1e-12)


def test_three_curve_variance_formulas():
    from curvegroups.simulation import THREE_CURVE_VARIANCES
    v = THREE_CURVE_VARIANCES
    assert np.allclose(v["V1"][0](X10), 0.5, atol=1e-12)
    assert np.allclose(v["V2"][0](X10), 0.5 * (0.5 + 2.0 * X10), atol=1e-12)
    assert np.allclose(v["V3"][2](X10), 0.5 * (2.5 - 2.0 * X10), atol=1e-12)
    assert np.allclose(v["V4"][2](X10),
                       0.5 * (-4.0 * X10**2 + 4.0 * X10 + 0.5), atol=1e-12)


def test_three_curve_generation_moments():
    spec = ScenarioSpec(family="three", mean_id="R1", var_id="V1",
                        sample_sizes=(4000, 4000, 4000))
    coll, truth = generate(spec, seed=3)
    assert truth == Partition.single_group(3)
    for s in coll:
        assert s.n == 4000
        assert 0.0 <= s.xs.min() and s.xs.max() <= 1.0
        resid = s.ys - s.xs
        assert abs(resid.mean()) < 4 * np.sqrt(0.5 / 4000)
        assert resid.var() == pytest.approx(0.5, rel=0.1)


def test_thirty_curve_means_and_truth():
    x = np.linspace(-2.0, 2.0, 7)
    assert np.allclose(_thirty_curve_mean(3, x, 0.7), x + 2.0)
    assert np.allclose(_thirty_curve_mean(8, x, 0.7), x**2 + 3.0)
    assert np.allclose(_thirty_curve_mean(13, x, 0.7), 2 * np.sin(2 * x) - 2)
    assert np.allclose(_thirty_curve_mean(18, x, 0.7), 2 * np.sin(x))
    assert np.allclose(_thirty_curve_mean(23, x, 0.7),
                       2 * np.sin(x) + 0.7 * np.exp(x))
    assert np.allclose(_thirty_curve_mean(28, x, 0.7), 1.0)
    assert thirty_curve_truth(0.5).n_groups == 6
    assert thirty_curve_truth(0.0).n_groups == 5
    # a = 0 merges blocks four and five
    t0 = thirty_curve_truth(0.0)
    assert np.array_equal(t0.assignment[15:25], np.full(10, 4))


def test_thirty_curve_generation_and_sizes():
    spec = ScenarioSpec(family="thirty", a=0.2, n_total=1000)
    coll, truth = generate(spec, seed=5)
    assert coll.n_curves == 30
    assert coll.n_total == 1000
    assert truth.n_groups == 6
    assert all(s.xs.min() >= -2.0 and s.xs.max() <= 2.0 for s in coll)
    # deterministic in the seed
    coll2, _ = generate(spec, seed=5)
    assert all(np.array_equal(a.ys, b.ys) for a, b in zip(coll, coll2))


def test_thirty_curve_heteroscedastic_mode():
    # sigma^2(x) = 0.5 + 0.05 m_j(x) stays positive on [-2, 2] for every
    # block (worst case: block 3 with m >= -4 gives 0.3), so generation
    # succeeds and the residual variance tracks the mean level
    spec = ScenarioSpec(family="thirty", a=0.0,
                        variance_mode="heteroscedastic",
                        sample_sizes=(4000,) * 30)
    coll, _ = generate(spec, seed=1)
    s = coll.samples[29]  # block 6: constant mean 1, variance 0.55
    assert (s.ys - 1.0).var() == pytest.approx(0.55, rel=0.1)


def test_multinomial_sizes_reproducible_and_bounded():
    sizes = multinomial_sizes(1000, 30, seed=7)
    assert sizes.sum() == 1000
    assert sizes.min() >= 5
    assert np.array_equal(sizes, multinomial_sizes(1000, 30, seed=7))


def test_onetwenty_means_and_truth():
    assert np.allclose(_onetwenty_mean(25, X10), 0.0)
    assert np.allclose(_onetwenty_mean(60, X10), 1.0 - 2.0 * X10)
    assert np.allclose(_onetwenty_mean(90, X10),
                       0.75 * np.arctan(10.0 * (X10 - 0.6)))
    assert np.allclose(_onetwenty_mean(105, X10), 2.5 * (1 - X10**2) ** 4)
    assert np.allclose(_onetwenty_mean(115, X10),
                       1.75 * np.arctan(5.0 * (X10 - 0.6)) + 0.75)
    truth = onetwenty_truth()
    assert truth.n_groups == 5
    counts = np.bincount(truth.assignment)[1:]
    assert tuple(counts) == ONETWENTY_GROUP_SIZES


def test_onetwenty_noise_readings():
    spec = ScenarioSpec(family="onetwenty", sample_sizes=(3000,) * 120)
    coll, _ = generate(spec, seed=9)
    resid = coll.samples[0].ys  # group 1 mean is zero
    assert resid.var() == pytest.approx(1.3, rel=0.1)
    spec_sd = ScenarioSpec(family="onetwenty", sample_sizes=(3000,) * 120,
                           variance_is_sd=True)
    coll_sd, _ = generate(spec_sd, seed=9)
    assert coll_sd.samples[0].ys.var() == pytest.approx(1.69, rel=0.1)


def test_misclassification_count_oracle():
    truth = Partition(3, [1, 1, 2, 2, 3, 3])
    assert misclassification_count(truth, truth) == 0
    # same structure under a label permutation: still zero
    permuted = Partition(3, [3, 3, 1, 1, 2, 2])
    assert misclassification_count(permuted, truth) == 0
    # one curve moved
    moved = Partition(3, [1, 2, 2, 2, 3, 3])
    assert misclassification_count(moved, truth) == 1
    # different group counts are allowed
    merged = Partition(2, [1, 1, 1, 1, 2, 2])
    assert misclassification_count(merged, truth) == 2
    with pytest.raises(ValueError):
        misclassification_count(Partition.single_group(3), truth)


def test_scenario_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec(family="nine")
    with pytest.raises(ValueError):
        ScenarioSpec(family="three", mean_id="R9", sample_sizes=(1, 2, 3))
    with pytest.raises(ValueError):
        ScenarioSpec(family="three", sample_sizes=(10, 10))
    with pytest.raises(ValueError):
        ScenarioSpec(family="thirty", a=-0.1, n_total=100)
    with pytest.raises(ValueError):
        ScenarioSpec(family="onetwenty")


def test_run_monte_carlo_reject_metric(tmp_path):
    spec = ScenarioSpec(family="three", mean_id="R2", var_id="V1",
                        sample_sizes=(80, 90, 100))
    rep = run_monte_carlo(spec, runs=3, metric="reject", n_groups=1,
                          n_boot=30, seed=21)
    assert rep.n_completed == 3
    assert 0.0 <= rep.rejection_rate <= 1.0
    rep2 = run_monte_carlo(spec, runs=3, metric="reject", n_groups=1,
                           n_boot=30, seed=21)
    assert [r["statistic"] for r in rep.records] == \
        [r["statistic"] for r in rep2.records]
    out = tmp_path / "rep.json"
    rep.to_json(out)
    payload = json.loads(out.read_text())
    assert payload["completed"] == 3
    assert payload["rejection_rate"] == rep.rejection_rate
    csv_path = tmp_path / "rep.csv"
    rep.to_csv(csv_path)
    assert csv_path.read_text().count("\n") == 4  # header + 3 rows


def test_run_monte_carlo_select_k_metric():
    spec = ScenarioSpec(family="three", mean_id="R3", var_id="V1",
                        sample_sizes=(150, 150, 150))
    rep = run_monte_carlo(spec, runs=2, metric="select_k", n_boot=30,
                          seed=31)
    assert rep.n_completed == 2
    hist = rep.selected_k_histogram()
    assert sum(hist.values()) == 2
    assert all("misclassified" in r for r in rep.records)


def test_report_records_failures():
    report = MonteCarloReport(metric="reject", runs=2)
    report.failures.append((0, "ValueError: boom"))
    report.records.append({"run": 1, "seed": 0, "reject": 1,
                           "p_value": 0.0, "statistic": 1.0})
    assert report.n_completed == 1
    assert report.rejection_rate == 1.0
