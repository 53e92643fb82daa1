"""Testing whether regression curves form groups.

Simulates five curves whose means fall into two groups, tests H0(1)
(all curves equal) and H0(2), then lets the sequential procedure pick
the number of groups automatically.
"""

import numpy as np

from curvegroups import (BootstrapConfig, CurveCollection, CurveSample,
                         EvaluationGrid, Norm, select_k, test_h0k)


def make_collection(seed=7, n=150):
    rng = np.random.default_rng(seed)
    means = [np.sin, np.sin, np.sin,
             lambda t: np.sin(t) + 1.0, lambda t: np.sin(t) + 1.0]
    samples = []
    for j, m in enumerate(means):
        x = rng.uniform(0.0, 3.0, n)
        y = m(x) + rng.normal(0.0, 0.3, n)
        samples.append(CurveSample(f"curve{j + 1}", x, y))
    return CurveCollection(tuple(samples))


def main():
    coll = make_collection()
    grid = EvaluationGrid.for_collection(coll)
    cfg = BootstrapConfig(n_boot=200, seed=1)

    for k in (1, 2):
        res = test_h0k(coll, k, Norm.CM, cfg, grid=grid)
        verdict = "rejected" if res.reject else "not rejected"
        print(f"H0({k}): D = {res.statistic:.4f}, "
              f"p = {res.p_value:.3f} -> {verdict}")

    trace = select_k(coll, Norm.CM, cfg, grid=grid)
    print(f"selected K = {trace.selected_k}, "
          f"assignment = {trace.final_partition.assignment.tolist()}")


if __name__ == "__main__":
    main()
