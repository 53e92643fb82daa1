"""Automatic choice of the number of groups by sequential testing.

Tests H0(K) for K = 1, 2, ... and stops at the first K that is not
rejected.  No multiplicity correction is applied across the sequence.
"""

from __future__ import annotations

from .equality_test import BootstrapConfig, test_h0k
from .types import (CurveCollection, EvaluationGrid, Kernel, KSelectionTrace,
                    Norm)


def select_k(collection: CurveCollection, norm: Norm, cfg: BootstrapConfig,
             kernel: Kernel = Kernel.EPANECHNIKOV,
             grid: EvaluationGrid | None = None,
             k_max: int | None = None) -> KSelectionTrace:
    """Sequential K = 1, 2, ... testing; returns the first non-rejected K,
    its partition and the per-K trace.

    Each K draws an independent sub-seed from cfg.seed, so changing k_max
    never perturbs the randomness of earlier tests.  If every K <= k_max
    rejects, selected_k = k_max with the saturation flag set.
    """
    j = collection.n_curves
    if k_max is None:
        k_max = j
    if not 1 <= k_max <= j:
        raise ValueError(f"need 1 <= k_max <= J, got k_max={k_max}, J={j}")
    if grid is None:
        grid = EvaluationGrid.for_collection(collection)
    results = []
    for k in range(1, k_max + 1):
        try:
            res = test_h0k(collection, k, norm, cfg, kernel=kernel, grid=grid)
        except Exception as exc:
            exc.args = (f"while testing K={k}: {exc}",)
            raise
        results.append(res)
        if not res.reject:
            return KSelectionTrace(results=tuple(results), selected_k=k,
                                   final_partition=res.partition,
                                   saturated=False)
    return KSelectionTrace(results=tuple(results), selected_k=k_max,
                           final_partition=results[-1].partition,
                           saturated=True)
