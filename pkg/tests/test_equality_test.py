"""Wild-bootstrap equality test: weights, deviation process, statistic
closed forms, residuals and end-to-end determinism."""

import numpy as np
import pytest

from curvegroups import (
    BootstrapConfig,
    CurveCollection,
    CurveSample,
    EvaluationGrid,
    Kernel,
    Norm,
    Partition,
    estimate_curves,
    pooled_fit,
    statistic,
    v_process,
    wild_weights,
)
from curvegroups import test_h0k as run_h0k
from curvegroups.equality_test import (_P_LOW, _W_HIGH, _W_LOW,
                                       bootstrap_replicate, null_residuals)


def test_wild_weight_support_and_probability():
    sqrt5 = np.sqrt(5.0)
    assert _W_LOW == pytest.approx((1.0 - sqrt5) / 2.0)
    assert _W_HIGH == pytest.approx((1.0 + sqrt5) / 2.0)
    assert _P_LOW == pytest.approx((5.0 + sqrt5) / 10.0)
    # exact moments of the two-point law
    p, q = _P_LOW, 1.0 - _P_LOW
    assert p * _W_LOW + q * _W_HIGH == pytest.approx(0.0, abs=1e-15)
    assert p * _W_LOW**2 + q * _W_HIGH**2 == pytest.approx(1.0)
    assert p * _W_LOW**3 + q * _W_HIGH**3 == pytest.approx(1.0)


def test_wild_weights_draws():
    rng = np.random.default_rng(42)
    w = wild_weights(5000, rng)
    assert set(np.unique(w)) == {_W_LOW, _W_HIGH}
    frac_low = np.mean(w == _W_LOW)
    assert frac_low == pytest.approx(_P_LOW, abs=0.02)
    w2 = wild_weights(5000, np.random.default_rng(42))
    assert np.array_equal(w, w2)
    with pytest.raises(ValueError):
        wild_weights(0, rng)


def _linear_collection(slopes, intercepts, n=80, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    samples = []
    for j, (a, b) in enumerate(zip(slopes, intercepts)):
        x = rng.uniform(0.0, 1.0, n)
        y = a * x + b + noise * rng.standard_normal(n)
        samples.append(CurveSample(f"c{j}", x, y))
    return CurveCollection(tuple(samples))


def test_estimate_curves_shapes_and_exactness():
    coll = _linear_collection([1.0, 1.0, -2.0], [0.0, 0.0, 1.0])
    grid = EvaluationGrid(0.1, 0.9, 30)
    est = estimate_curves(coll, grid)
    assert est.values.shape == (3, 30)
    assert est.curve_ids == ("c0", "c1", "c2")
    assert np.allclose(est.values[0], grid.points, atol=1e-10)
    assert np.allclose(est.values[2], 1.0 - 2.0 * grid.points, atol=1e-10)


def test_pooled_fit_on_common_line():
    # two curves on the same line: the pooled fit reproduces that line
    coll = _linear_collection([2.0, 2.0], [1.0, 1.0])
    grid = EvaluationGrid(0.1, 0.9, 20)
    pooled = pooled_fit(coll, Partition.single_group(2), grid)
    assert pooled.n_groups == 1
    assert np.allclose(pooled.group_values[0], 2.0 * grid.points + 1.0,
                       atol=1e-9)


def test_v_process_arithmetic():
    coll = _linear_collection([1.0, 1.0, 3.0, 3.0], [0.0, 0.5, 0.0, 0.0])
    grid = EvaluationGrid(0.1, 0.9, 25)
    est = estimate_curves(coll, grid)
    part = Partition(2, [1, 1, 2, 2])
    pooled = pooled_fit(coll, part, grid)
    v = v_process(est, pooled, part)
    assert v.shape == (4, 25)
    assert np.allclose(v, est.values
                       - pooled.group_values[part.assignment - 1])
    # curves 3 and 4 share their group's exact line: V ~ 0
    assert np.max(np.abs(v[2:])) < 1e-9
    with pytest.raises(ValueError):
        v_process(est, pooled, Partition.single_group(4))


def test_statistic_closed_forms():
    grid = EvaluationGrid(0.0, 2.0, 51)
    c = -0.7
    v = np.full((5, 51), c)
    # constant deviation c on a length-L interval: CM = J c^2 L, KS = J |c| L
    assert statistic(v, grid, Norm.CM) == pytest.approx(5 * c * c * 2.0)
    assert statistic(v, grid, Norm.KS) == pytest.approx(5 * abs(c) * 2.0)
    # linear deviation v(z) = z on [0, 2]: CM = 8/3 per curve, KS = 2
    v2 = np.tile(grid.points, (2, 1))
    assert statistic(v2, grid, Norm.CM) == pytest.approx(2 * 8.0 / 3.0,
                                                         rel=1e-3)
    assert statistic(v2, grid, Norm.KS) == pytest.approx(2 * 2.0, rel=1e-12)


def test_statistic_matches_trapezoid_oracle():
    rng = np.random.default_rng(14)
    grid = EvaluationGrid(0.2, 1.7, 40)
    v = rng.normal(size=(6, 40))
    dz = grid.step
    cm = sum(np.trapezoid(row**2, dx=dz) for row in v)
    ks = sum(np.trapezoid(np.abs(row), dx=dz) for row in v)
    assert statistic(v, grid, Norm.CM) == pytest.approx(cm)
    assert statistic(v, grid, Norm.KS) == pytest.approx(ks)


def test_null_residuals_zero_on_common_line_and_linear_in_y():
    coll = _linear_collection([1.5, 1.5], [-0.3, -0.3])
    grid = EvaluationGrid(0.1, 0.9, 20)
    part = Partition.single_group(2)
    pooled = pooled_fit(coll, part, grid)
    res = null_residuals(coll, part, pooled)
    assert all(np.max(np.abs(r)) < 1e-9 for r in res)
    # shift every response by the same constant: the pooled local linear
    # fit shifts along (it reproduces constants), so residuals are unchanged
    shifted = CurveCollection(tuple(
        CurveSample(s.curve_id, s.xs, s.ys + 2.0) for s in coll))
    res2 = null_residuals(shifted, part, pooled)
    assert all(np.allclose(a, b, atol=1e-9) for a, b in zip(res2, res))


def test_bootstrap_replicate_zero_residuals_gives_small_statistic():
    coll = _linear_collection([1.0, 1.0, 1.0], [0.2, 0.2, 0.2])
    grid = EvaluationGrid(0.1, 0.9, 30)
    part = Partition.single_group(3)
    pooled = pooled_fit(coll, part, grid)
    zeros = [np.zeros(s.n) for s in coll]
    d = bootstrap_replicate(coll, part, pooled, zeros,
                            np.random.default_rng(3), BootstrapConfig(),
                            norm=Norm.CM, grid=grid)
    assert d < 1e-12  # noiseless linear refits are exact


@pytest.mark.parametrize("norm", [Norm.CM, Norm.KS])
def test_test_h0k_deterministic_and_decision_fields(norm):
    coll = _linear_collection([1.0, 1.0, -1.0], [0.0, 0.0, 1.0],
                              n=60, noise=0.15, seed=5)
    cfg = BootstrapConfig(n_boot=40, alpha=0.05, seed=11)
    r1 = run_h0k(coll, 2, norm, cfg)
    r2 = run_h0k(coll, 2, norm, cfg)
    assert r1.statistic == r2.statistic
    assert np.array_equal(r1.boot_stats, r2.boot_stats)
    assert r1.partition == r2.partition
    assert len(r1.boot_stats) == 40
    assert 0.0 <= r1.p_value <= 1.0
    # the obviously distinct third curve lands alone
    assert r1.partition == Partition(2, [1, 1, 2])


def test_test_h0k_seed_sensitivity_and_k_validation():
    coll = _linear_collection([1.0, 1.0], [0.0, 0.0], n=50, noise=0.2)
    cfg_a = BootstrapConfig(n_boot=30, seed=1)
    cfg_b = BootstrapConfig(n_boot=30, seed=2)
    ra = run_h0k(coll, 1, Norm.CM, cfg_a)
    rb = run_h0k(coll, 1, Norm.CM, cfg_b)
    assert not np.array_equal(ra.boot_stats, rb.boot_stats)
    with pytest.raises(ValueError):
        run_h0k(coll, 3, Norm.CM, cfg_a)
    with pytest.raises(ValueError):
        run_h0k(coll, 0, Norm.CM, cfg_a)


def test_test_h0k_accepts_true_null_and_rejects_clear_alternative():
    rng = np.random.default_rng(77)
    xs = [rng.uniform(0, 1, 150) for _ in range(3)]
    same = CurveCollection(tuple(
        CurveSample(f"c{j}", x, np.sin(3 * x) + 0.1 * rng.standard_normal(150))
        for j, x in enumerate(xs)))
    cfg = BootstrapConfig(n_boot=60, seed=3)
    assert not run_h0k(same, 1, Norm.CM, cfg).reject
    apart = CurveCollection(tuple(
        CurveSample(f"c{j}", x,
                    j * 1.0 + np.sin(3 * x) + 0.1 * rng.standard_normal(150))
        for j, x in enumerate(xs)))
    assert run_h0k(apart, 1, Norm.CM, cfg).reject


def test_config_validation():
    with pytest.raises(ValueError):
        BootstrapConfig(n_boot=0)
    with pytest.raises(ValueError):
        BootstrapConfig(alpha=1.0)
