"""Grouping of estimated curves: K-means (L2) / K-medians (L1) on the rows
of the curve estimate matrix, plus an exhaustive oracle for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyClusterUnrecoverable, TooLarge
from .types import CurveEstimateMatrix, Norm, Partition

ENUMERATION_BOUND = 10**6


@dataclass(frozen=True)
class ClusterConfig:
    norm: Norm = Norm.CM
    restarts: int = 20
    max_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")


def _rows(matrix) -> np.ndarray:
    if isinstance(matrix, CurveEstimateMatrix):
        return np.asarray(matrix.values, dtype=float)
    return np.asarray(matrix, dtype=float)


def _distances(rows: np.ndarray, centers: np.ndarray, norm: Norm) -> np.ndarray:
    diff = rows[:, None, :] - centers[None, :, :]
    if norm is Norm.CM:
        return np.einsum("jkq,jkq->jk", diff, diff)
    return np.abs(diff).sum(axis=2)


def _center(rows: np.ndarray, norm: Norm) -> np.ndarray:
    if norm is Norm.CM:
        return rows.mean(axis=0)
    # coordinate-wise lower median: for even counts take the lower of the
    # two middle order statistics (an L1 minimiser, deterministic)
    return np.sort(rows, axis=0)[(len(rows) - 1) // 2]


def _centers_for(rows: np.ndarray, labels: np.ndarray, k: int,
                 norm: Norm) -> np.ndarray:
    return np.stack([_center(rows[labels == g], norm) for g in range(k)])


def partition_cost(rows, assignment, norm: Norm) -> float:
    """Within-group cost: sum of squared L2 (CM) or L1 (KS) row-to-center
    distances, centers being group means (CM) or lower medians (KS)."""
    rows = _rows(rows)
    labels = np.asarray(assignment, dtype=int)
    cost = 0.0
    for g in np.unique(labels):
        sub = rows[labels == g]
        c = _center(sub, norm)
        diff = sub - c
        if norm is Norm.CM:
            cost += float((diff * diff).sum())
        else:
            cost += float(np.abs(diff).sum())
    return cost


def _seed_centers(rows: np.ndarray, k: int, norm: Norm, rng) -> np.ndarray:
    """k-means++-style seeding: first center uniform, then sample rows with
    probability proportional to their distance to the nearest chosen center
    (distance in the matching norm)."""
    n = len(rows)
    centers = [rows[rng.integers(n)]]
    for _ in range(1, k):
        d = _distances(rows, np.stack(centers), norm).min(axis=1)
        total = d.sum()
        if total <= 0:  # duplicate rows: fall back to a uniform draw
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d / total)
        centers.append(rows[idx])
    return np.stack(centers)


def _group_cost(sub: np.ndarray, norm: Norm) -> float:
    diff = sub - _center(sub, norm)
    if norm is Norm.CM:
        return float((diff * diff).sum())
    return float(np.abs(diff).sum())


def _improve(rows: np.ndarray, labels: np.ndarray, k: int, norm: Norm,
             max_sweeps: int = 20) -> np.ndarray:
    """Hartigan-style refinement: move single rows between groups while any
    move strictly lowers the partition cost.  Lloyd iteration stops when no
    row is closer to another group's *current* center, which is weaker than
    cost optimality because moving a row also shifts both centers."""
    labels = labels.copy()
    n = len(rows)
    tol = 1e-12 * (1.0 + float(np.abs(rows).sum()))
    for _ in range(max_sweeps):
        improved = False
        counts = np.bincount(labels, minlength=k).astype(float)
        if norm is Norm.CM:
            centers = _centers_for(rows, labels, k, norm)
        for i in range(n):
            s = int(labels[i])
            if counts[s] <= 1:
                continue
            if norm is Norm.CM:
                x = rows[i]
                ds = x - centers[s]
                removal = counts[s] / (counts[s] - 1) * float(ds @ ds)
                best_delta, best_t = -tol, -1
                for t in range(k):
                    if t == s:
                        continue
                    dt = x - centers[t]
                    delta = (counts[t] / (counts[t] + 1) * float(dt @ dt)
                             - removal)
                    if delta < best_delta:
                        best_delta, best_t = delta, t
                if best_t >= 0:
                    m, p = counts[s], counts[best_t]
                    centers[s] = (m * centers[s] - x) / (m - 1)
                    centers[best_t] = (p * centers[best_t] + x) / (p + 1)
                    counts[s] -= 1
                    counts[best_t] += 1
                    labels[i] = best_t
                    improved = True
            else:
                in_s = labels == s
                base_s = _group_cost(rows[in_s], norm)
                in_s[i] = False
                rem_s = _group_cost(rows[in_s], norm)
                best_delta, best_t = -tol, -1
                for t in range(k):
                    if t == s:
                        continue
                    in_t = labels == t
                    base_t = _group_cost(rows[in_t], norm)
                    in_t[i] = True
                    delta = rem_s + _group_cost(rows[in_t], norm) \
                        - base_s - base_t
                    if delta < best_delta:
                        best_delta, best_t = delta, t
                if best_t >= 0:
                    counts[s] -= 1
                    counts[best_t] += 1
                    labels[i] = best_t
                    improved = True
        if not improved:
            break
    return labels


def _lloyd(rows: np.ndarray, k: int, norm: Norm, rng, max_iters: int):
    centers = _seed_centers(rows, k, norm, rng)
    labels = None
    for _ in range(max_iters):
        new_labels = _distances(rows, centers, norm).argmin(axis=1)
        # re-seed empty groups with the row farthest from its center
        for g in range(k):
            if not (new_labels == g).any():
                far = _distances(rows, centers, norm).min(axis=1).argmax()
                new_labels[far] = g
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centers = _centers_for(rows, labels, k, norm)
    if labels is None or len(np.unique(labels)) != k:
        return None, np.inf
    labels = _improve(rows, labels, k, norm)
    return labels, partition_cost(rows, labels, norm)


def cluster_rows(matrix, k: int, cfg: ClusterConfig) -> Partition:
    """Best-of-restarts Lloyd iteration grouping the J rows into K groups."""
    rows = _rows(matrix)
    j = len(rows)
    if not 1 <= k <= j:
        raise ValueError(f"need 1 <= K <= J, got K={k}, J={j}")
    if k == 1:
        return Partition.single_group(j)
    if k == j:
        return Partition.singletons(j)
    best_labels, best_cost = None, np.inf
    for r in range(cfg.restarts):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(r,)))
        labels, cost = _lloyd(rows, k, cfg.norm, rng, cfg.max_iters)
        if labels is not None and cost < best_cost:
            best_labels, best_cost = labels, cost
    if best_labels is None:
        raise EmptyClusterUnrecoverable(
            f"no restart produced {k} nonempty groups")
    return Partition(k, best_labels + 1)


def stirling2(n: int, k: int) -> int:
    """Number of partitions of an n-set into k nonempty blocks."""
    if k < 0 or k > n:
        return 0
    row = [1] + [0] * k
    for i in range(1, n + 1):
        for j in range(min(i, k), 0, -1):
            row[j] = j * row[j] + row[j - 1]
        row[0] = 0 if i > 0 else 1
    return row[k]


def _restricted_growth_strings(n: int, k: int):
    """Yield every assignment of n items into exactly k blocks, as a
    0-based label vector in restricted growth form."""
    labels = np.zeros(n, dtype=int)

    def rec(i: int, used: int):
        if i == n:
            if used == k:
                yield labels.copy()
            return
        for g in range(used + 1):  # existing blocks, or open block g == used
            new_used = used + (1 if g == used else 0)
            if new_used > k:
                continue
            if new_used + (n - i - 1) < k:  # not enough positions left
                continue
            labels[i] = g
            yield from rec(i + 1, new_used)

    if n > 0:
        yield from rec(1, 1)


def brute_force_partition(matrix, k: int, norm: Norm):
    """Exhaustive minimum-cost partition into exactly K nonempty groups.

    Exists as a correctness oracle for the clustering heuristic; refuses
    instances beyond ENUMERATION_BOUND candidate partitions.
    """
    rows = _rows(matrix)
    j = len(rows)
    if not 1 <= k <= j:
        raise ValueError(f"need 1 <= K <= J, got K={k}, J={j}")
    count = stirling2(j, k)
    if count > ENUMERATION_BOUND:
        raise TooLarge(f"S({j},{k}) = {count} exceeds {ENUMERATION_BOUND}")
    best, best_cost = None, np.inf
    for labels in _restricted_growth_strings(j, k):
        cost = partition_cost(rows, labels, norm)
        if cost < best_cost:
            best, best_cost = labels, cost
    return Partition(k, best + 1), float(best_cost)
