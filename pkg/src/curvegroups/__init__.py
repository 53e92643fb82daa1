"""Grouping of nonparametric regression curves.

Local linear estimation with cross-validated bandwidths, a wild-bootstrap
test for equality of group mean curves, sequential selection of the number
of groups, Monte Carlo scenario generators and a polar-coordinate path for
scanned cross-section point clouds.
"""

from .equality_test import (BootstrapConfig, estimate_curves, pooled_fit,
                            statistic, test_h0k, v_process, wild_weights)
from .errors import (AllCandidatesDegenerate, CurveGroupsError, DegenerateFit,
                     DuplicateCurveId, EmptyClusterUnrecoverable, EmptyCurve,
                     NegativeVariance, NonFiniteValue, OriginPoint,
                     ParseError, TooLarge)
from .io import (PointCloudSection, from_polar, read_curves_csv,
                 read_result_json, to_polar, write_curves_csv,
                 write_result_json)
from .partitioning import (ClusterConfig, brute_force_partition, cluster_rows,
                           partition_cost, stirling2)
from .regression import (cv_bandwidth, cv_scores, candidate_bandwidths,
                         bin_sample, fit_at_points, fit_on_grid,
                         local_linear_fit)
from .selection import select_k
from .simulation import (MonteCarloReport, ScenarioSpec, generate,
                         misclassification_count, run_monte_carlo)
from .types import (CurveCollection, CurveEstimateMatrix, CurveSample,
                    EvaluationGrid, Kernel, KSelectionTrace, Norm, Partition,
                    TestResult)

__version__ = "0.1.0"

__all__ = [
    "AllCandidatesDegenerate", "BootstrapConfig", "ClusterConfig",
    "CurveCollection", "CurveEstimateMatrix", "CurveGroupsError",
    "CurveSample", "DegenerateFit", "DuplicateCurveId",
    "EmptyClusterUnrecoverable", "EmptyCurve", "EvaluationGrid", "Kernel",
    "KSelectionTrace", "MonteCarloReport", "NegativeVariance",
    "NonFiniteValue", "Norm", "OriginPoint", "ParseError", "Partition",
    "PointCloudSection", "ScenarioSpec", "TestResult", "TooLarge",
    "bin_sample", "brute_force_partition", "candidate_bandwidths",
    "cluster_rows", "cv_bandwidth", "cv_scores", "estimate_curves",
    "fit_at_points", "fit_on_grid", "from_polar", "generate",
    "local_linear_fit", "misclassification_count", "partition_cost",
    "pooled_fit", "read_curves_csv", "read_result_json", "run_monte_carlo",
    "select_k", "statistic", "stirling2", "test_h0k", "to_polar",
    "v_process", "wild_weights", "write_curves_csv", "write_result_json",
]
