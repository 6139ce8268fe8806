"""Evaluation: volumes in mL, overlap/Dice, summary statistics, correlation tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConstantSeriesError, EmptyInputError, IncompleteTableError
from .grid import BinaryMask, require_congruent


@dataclass(frozen=True)
class VolumeRecord:
    case_id: str
    method: str
    volume_ml: float


@dataclass(frozen=True)
class OverlapSummary:
    object_name: str
    mean: float
    std: float
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def row(self) -> tuple[float, ...]:
        return (self.mean, self.std, self.min, self.q1, self.median, self.q3, self.max)


def volume_ml(mask: BinaryMask) -> float:
    """Mask volume in milliliters: voxel count times voxel volume."""
    return mask.count() * mask.geometry.voxel_volume_mm3 / 1000.0


def overlap_coefficient(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    require_congruent(a, b)
    aa, bb = a.as_bool(), b.as_bool()
    union = int((aa | bb).sum())
    if union == 0:
        return 1.0
    return int((aa & bb).sum()) / union


def dice_coefficient(a: BinaryMask, b: BinaryMask) -> float:
    """2|A∩B| / (|A| + |B|); 1.0 when both masks are empty."""
    require_congruent(a, b)
    aa, bb = a.as_bool(), b.as_bool()
    total = int(aa.sum()) + int(bb.sum())
    if total == 0:
        return 1.0
    return 2.0 * int((aa & bb).sum()) / total


def summary_stats(values, object_name: str = "") -> OverlapSummary:
    """Mean, population std, extremes, and quartiles (linear interpolation
    between order statistics, the inclusive convention)."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise EmptyInputError("summary of an empty list")
    q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0], method="linear")
    # a constant list has std exactly 0; np.std leaves rounding residue there
    std = 0.0 if arr.min() == arr.max() else float(arr.std())
    return OverlapSummary(
        object_name=object_name,
        mean=float(arr.mean()),
        std=std,  # population std: divide by n
        min=float(arr.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        max=float(arr.max()),
    )


def pearson_correlation_matrix(records) -> tuple[list[str], np.ndarray]:
    """Pearson r between the per-case volume vectors of each pair of methods.

    Methods are ordered by first appearance; every method must cover every
    case exactly once, at least two cases, no constant series.
    """
    records = list(records)
    methods: list[str] = []
    cases: list[str] = []
    table: dict[tuple[str, str], float] = {}
    for rec in records:
        if rec.method not in methods:
            methods.append(rec.method)
        if rec.case_id not in cases:
            cases.append(rec.case_id)
        key = (rec.case_id, rec.method)
        if key in table:
            raise IncompleteTableError(f"duplicate volume for case {rec.case_id}, method {rec.method}")
        table[key] = rec.volume_ml
    if len(cases) < 2:
        raise IncompleteTableError("need at least two cases")
    missing = [
        (case, method) for case in cases for method in methods if (case, method) not in table
    ]
    if missing:
        raise IncompleteTableError(f"missing volumes for {missing[:3]}{'...' if len(missing) > 3 else ''}")

    columns = np.array([[table[(case, m)] for case in cases] for m in methods], dtype=float)
    stds = columns.std(axis=1)
    flat = [methods[i] for i in np.nonzero(stds == 0)[0]]
    if flat:
        raise ConstantSeriesError(f"zero variance for method(s): {', '.join(flat)}")
    matrix = np.corrcoef(columns)
    return methods, matrix


def read_volume_records(path) -> list[VolumeRecord]:
    """Cohort CSV with header ``case_id,method,volume_ml``."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"case_id", "method", "volume_ml"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IncompleteTableError(f"expected header case_id,method,volume_ml in {path}")
        return [
            VolumeRecord(row["case_id"].strip(), row["method"].strip(), float(row["volume_ml"]))
            for row in reader
        ]


def read_overlap_manifest(path) -> list[tuple[str, str, str]]:
    """Batch-evaluation CSV with header ``case_id,reference_path,predicted_path``."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"case_id", "reference_path", "predicted_path"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IncompleteTableError(
                f"expected header case_id,reference_path,predicted_path in {path}"
            )
        return [
            (row["case_id"].strip(), row["reference_path"].strip(), row["predicted_path"].strip())
            for row in reader
        ]


def render_correlation_table(methods: list[str], matrix: np.ndarray) -> str:
    """Lower-triangular correlation report."""
    width = max(len(m) for m in methods)
    lines = [" " * (width + 2) + "  ".join(f"{m:>8}" for m in methods)]
    for i, name in enumerate(methods):
        cells = "  ".join(f"{matrix[i, j]:8.3f}" for j in range(i + 1))
        lines.append(f"{name:<{width}}  {cells}")
    return "\n".join(lines)


def render_overlap_table(summaries: list[OverlapSummary]) -> str:
    """Per-object summary rows plus a final score row (mean of object means)."""
    header = f"{'obj':<12}" + "".join(f"{c:>8}" for c in ("mean", "std", "min", "Q1", "median", "Q3", "max"))
    lines = [header]
    for s in summaries:
        lines.append(f"{s.object_name:<12}" + "".join(f"{v:8.3f}" for v in s.row()))
    score = float(np.mean([s.mean for s in summaries]))
    lines.append(f"{'score':<12}{score:8.3f}")
    lines.append("(score = mean of the per-object mean overlaps)")
    return "\n".join(lines)
