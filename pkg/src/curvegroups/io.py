"""CSV/JSON ingestion and emission, plus the Cartesian-to-polar transform
for cross-section point clouds."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import OriginPoint, ParseError
from .types import (CurveCollection, CurveEstimateMatrix, CurveSample,
                    KSelectionTrace, TestResult, validate_collection,
                    _frozen_array)


@dataclass(frozen=True)
class PointCloudSection:
    """One planar cross-section of a scanned point cloud, in Cartesian
    coordinates."""

    section_id: str
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _frozen_array(self.xs)
        ys = _frozen_array(self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) != len(ys) or len(xs) < 3:
            raise ValueError(
                f"section {self.section_id!r}: need >= 3 (x, y) pairs")
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise ValueError(f"section {self.section_id!r}: non-finite point")


def to_polar(section: PointCloudSection) -> CurveSample:
    """Radius-vs-angle sample: covariate = full-quadrant polar angle in
    [-pi, pi), response = distance to the origin."""
    r = np.hypot(section.xs, section.ys)
    zero = np.flatnonzero(r == 0.0)
    if zero.size:
        raise OriginPoint(int(zero[0]))
    angle = np.arctan2(section.ys, section.xs)
    angle[angle == math.pi] = -math.pi
    return CurveSample(section.section_id, angle, r)


def from_polar(angles, radii) -> np.ndarray:
    """Inverse transform; returns an (n, 2) array of Cartesian points."""
    angles = np.asarray(angles, dtype=float)
    radii = np.asarray(radii, dtype=float)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def read_curves_csv(path) -> CurveCollection:
    """Load a `curve_id,x,y` CSV, grouping rows by curve in first-appearance
    order."""
    order = []
    xs = {}
    ys = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:3]] != \
                ["curve_id", "x", "y"]:
            raise ParseError(1, "expected header 'curve_id,x,y'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 3:
                raise ParseError(lineno, f"expected 3 fields, got {len(row)}")
            cid = row[0].strip()
            try:
                x = float(row[1])
                y = float(row[2])
            except ValueError:
                raise ParseError(lineno, f"malformed real in {row[1:3]!r}") from None
            if cid not in xs:
                order.append(cid)
                xs[cid] = []
                ys[cid] = []
            xs[cid].append(x)
            ys[cid].append(y)
    samples = tuple(CurveSample(cid, xs[cid], ys[cid]) for cid in order)
    return validate_collection(CurveCollection(samples))


def write_curves_csv(collection: CurveCollection, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve_id", "x", "y"])
        for s in collection:
            for x, y in zip(s.xs, s.ys):
                writer.writerow([s.curve_id, _fmt(x), _fmt(y)])


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


def _round15(obj):
    """Round every float to 15 significant digits for stable serialization."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _grid_payload(grid) -> dict:
    return {"lo": grid.lo, "hi": grid.hi, "size": grid.size}


def _test_result_payload(res: TestResult) -> dict:
    return {
        "n_groups": res.n_groups,
        "norm": res.norm.value,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "alpha": res.alpha,
        "reject": bool(res.reject),
        "assignment": res.partition.assignment.tolist(),
        "boot_stats": res.boot_stats.tolist(),
    }


def result_payload(result) -> dict:
    """JSON-ready dict for a test result, selection trace or estimate
    matrix."""
    if isinstance(result, TestResult):
        return {"kind": "test_result", **_test_result_payload(result)}
    if isinstance(result, KSelectionTrace):
        return {
            "kind": "k_selection",
            "selected_k": result.selected_k,
            "saturated": bool(result.saturated),
            "assignment": result.final_partition.assignment.tolist(),
            "tests": [_test_result_payload(r) for r in result.results],
        }
    if isinstance(result, CurveEstimateMatrix):
        return {
            "kind": "curve_estimates",
            "grid": _grid_payload(result.grid),
            "grid_points": result.grid.points.tolist(),
            "curve_ids": list(result.curve_ids),
            "bandwidths": result.bandwidths.tolist(),
            "values": result.values.tolist(),
        }
    raise TypeError(f"cannot serialize {type(result).__name__}")


def write_result_json(result, path) -> None:
    """Serialize a result with floats at 15 significant digits; identical
    inputs produce byte-identical files."""
    payload = _round15(result_payload(result))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write result to {path}: {exc}") from exc


def read_result_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_profile_csv(rows, path) -> None:
    """Plot-ready `section_id,angle,radius,group` profile file."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["section_id", "angle", "radius", "group"])
        for section_id, angle, radius, group in rows:
            writer.writerow([section_id, _fmt(angle), _fmt(radius), group])
