"""Detection-to-ground-truth matching and MODA/MODP style metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ZeroGroundTruth

DEFAULT_GATE = 0.5


@dataclass(frozen=True)
class GroundTruthFrame:
    frame_id: int
    annotations: Tuple[Tuple[int, float, float], ...]

    def __post_init__(self):
        ids = [a[0] for a in self.annotations]
        if len(set(ids)) != len(ids):
            raise ValueError(f"frame {self.frame_id}: duplicate person_id")
        if not all(np.isfinite(a[1]) and np.isfinite(a[2]) for a in self.annotations):
            raise ValueError(f"frame {self.frame_id}: non-finite annotation")

    @property
    def positions(self) -> List[Tuple[float, float]]:
        return [(a[1], a[2]) for a in self.annotations]


@dataclass(frozen=True)
class MatchResult:
    pairs: Tuple[Tuple[int, int, float], ...]
    unmatched_detections: Tuple[int, ...]
    unmatched_annotations: Tuple[int, ...]
    gate: float = DEFAULT_GATE

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.unmatched_detections)

    @property
    def fn(self) -> int:
        return len(self.unmatched_annotations)


@dataclass(frozen=True)
class MetricsReport:
    TP: int
    FP: int
    FN: int
    GT: int
    MODA: float
    MODP: float
    precision: float
    recall: float
    f_score: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def hungarian_match(
    detections: Sequence[Tuple[float, float]],
    annotations: Sequence[Tuple[float, float]],
    gate: float = DEFAULT_GATE,
) -> MatchResult:
    """Optimal one-to-one assignment of detections to annotations.

    Only pairs strictly closer than ``gate`` may match. The matching has
    maximum cardinality and, among those, minimum total distance.
    """
    if gate <= 0:
        raise ValueError("gate must be positive")
    det = np.asarray(detections, dtype=float).reshape(-1, 2)
    ann = np.asarray(annotations, dtype=float).reshape(-1, 2)
    n, m = len(det), len(ann)
    pairs = []
    if n and m:
        dist = np.hypot(det[:, None, 0] - ann[None, :, 0], det[:, None, 1] - ann[None, :, 1])
        valid = dist < gate
        # one extra valid pair must always outweigh any total of gated distances
        forbidden = gate * (min(n, m) + 1)
        cost = np.where(valid, dist, forbidden)
        rows, cols = linear_sum_assignment(cost)
        pairs = [(int(r), int(c), float(dist[r, c])) for r, c in zip(rows, cols) if valid[r, c]]
    matched_d = {p[0] for p in pairs}
    matched_a = {p[1] for p in pairs}
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_detections=tuple(i for i in range(n) if i not in matched_d),
        unmatched_annotations=tuple(j for j in range(m) if j not in matched_a),
        gate=gate,
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics_from_counts(tp: int, fp: int, fn: int, gt: int, localization: float = 0.0) -> MetricsReport:
    """Build a report from summed counts.

    ``localization`` is the sum over matched pairs of ``1 - d / gate``.
    """
    if gt <= 0:
        raise ZeroGroundTruth("no ground-truth annotations")
    if tp + fn != gt:
        raise ValueError(f"TP + FN ({tp + fn}) != GT ({gt})")
    precision = _ratio(tp, tp + fp)
    recall = tp / gt
    return MetricsReport(
        TP=tp,
        FP=fp,
        FN=fn,
        GT=gt,
        MODA=1.0 - (fp + fn) / gt,
        MODP=_ratio(localization, tp),
        precision=precision,
        recall=recall,
        f_score=_ratio(2 * precision * recall, precision + recall),
    )


def compute_metrics(matches: Sequence[MatchResult], gt_counts: Sequence[int]) -> MetricsReport:
    """Micro-averaged metrics over frames."""
    if not matches:
        raise ValueError("at least one frame is required")
    if len(matches) != len(gt_counts):
        raise ValueError("one ground-truth count per frame is required")
    tp = sum(m.tp for m in matches)
    fp = sum(m.fp for m in matches)
    fn = sum(m.fn for m in matches)
    localization = sum(1.0 - d / m.gate for m in matches for _, _, d in m.pairs)
    return metrics_from_counts(tp, fp, fn, int(sum(gt_counts)), localization)


def evaluate_frames(
    detections: Dict[int, Sequence[Tuple[float, float]]],
    ground_truth: Sequence[GroundTruthFrame],
    gate: float = DEFAULT_GATE,
) -> MetricsReport:
    """Match every ground-truth frame against its detections (missing = none)."""
    matches = []
    counts = []
    for frame in ground_truth:
        matches.append(hungarian_match(detections.get(frame.frame_id, []), frame.positions, gate))
        counts.append(len(frame.annotations))
    return compute_metrics(matches, counts)
