"""Distance-based accuracy metrics for decoder evaluation.

Errors are Euclidean distances in image space, computed over visible
joints only. PCK at threshold ``t`` is the fraction of visible joints
with ``error / norm_length`` strictly below ``t`` (an error of exactly
``t * norm_length`` counts as incorrect).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .heatmaps import Coord, Heatmap

DEFAULT_PCK_THRESHOLDS = (0.1, 0.5)


@dataclass
class SyntheticSample:
    """One labeled sample: heatmaps, ground truth and a PCK normalizer."""

    heatmaps: list[Heatmap]
    truth: list[Coord]
    visible: list[bool]
    norm_length: float

    def __post_init__(self):
        if not (len(self.heatmaps) == len(self.truth) == len(self.visible)):
            raise ValueError("heatmaps, truth and visible must share length")
        if not (self.norm_length > 0):
            raise ValueError("norm_length must be > 0")
        for hm, coord in zip(self.heatmaps, self.truth):
            pt = coord.to_image(hm.stride)
            if not (
                0.0 <= pt.x <= (hm.width - 1) * hm.stride
                and 0.0 <= pt.y <= (hm.height - 1) * hm.stride
            ):
                raise ValueError(f"truth point {(pt.x, pt.y)} outside the image extent")

    @property
    def joints(self) -> int:
        return len(self.heatmaps)


@dataclass
class EvalReport:
    """Aggregate and per-joint accuracy of one decoder run."""

    mean_error: float
    median_error: float
    pck: dict[float, float]
    per_joint: list[dict] = field(default_factory=list)
    visible_count: int = 0

    def to_dict(self) -> dict:
        return {
            "mean_error": self.mean_error,
            "median_error": self.median_error,
            "pck": {f"{t:g}": v for t, v in self.pck.items()},
            "per_joint": self.per_joint,
            "visible_count": self.visible_count,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def csv_fields(self) -> dict[str, float | int]:
        row: dict[str, float | int] = {
            "samples": self.visible_count,
            "mean_error": self.mean_error,
            "median_error": self.median_error,
        }
        for t, v in self.pck.items():
            row[f"pck_{t:g}"] = v
        return row


def _flatten(samples: list[SyntheticSample], predictions: list[list[Coord]]):
    if len(samples) != len(predictions):
        raise ValueError("predictions must align 1:1 with samples")
    errors = []
    norms = []
    joint_ids = []
    for sample, preds in zip(samples, predictions):
        if len(preds) != sample.joints:
            raise ValueError("predictions must align 1:1 with sample joints")
        for j, (hm, truth, vis, pred) in enumerate(
            zip(sample.heatmaps, sample.truth, sample.visible, preds)
        ):
            if not vis:
                continue
            t = truth.to_image(hm.stride)
            p = pred.to_image(hm.stride)
            errors.append(np.hypot(p.x - t.x, p.y - t.y))
            norms.append(sample.norm_length)
            joint_ids.append(j)
    return np.asarray(errors), np.asarray(norms), np.asarray(joint_ids)


def pck(errors: np.ndarray, norms: np.ndarray, threshold: float) -> float:
    """Fraction of errors strictly below ``threshold * norm``."""
    if errors.size == 0:
        return 0.0
    return float(np.mean(errors / norms < threshold))


def evaluate(
    samples: list[SyntheticSample],
    predictions: list[list[Coord]],
    thresholds: tuple[float, ...] = DEFAULT_PCK_THRESHOLDS,
) -> EvalReport:
    """Score predictions against ground truth over visible joints."""
    errors, norms, joint_ids = _flatten(samples, predictions)
    if errors.size == 0:
        raise ValueError("no visible joints to evaluate")
    pcks = {float(t): pck(errors, norms, t) for t in thresholds}
    per_joint = []
    for j in range(int(joint_ids.max()) + 1):
        mask = joint_ids == j
        if not mask.any():
            continue
        entry = {
            "joint": j,
            "count": int(mask.sum()),
            "mean_error": float(errors[mask].mean()),
        }
        for t in thresholds:
            entry[f"pck_{t:g}"] = pck(errors[mask], norms[mask], t)
        per_joint.append(entry)
    return EvalReport(
        mean_error=float(errors.mean()),
        median_error=float(np.median(errors)),
        pck=pcks,
        per_joint=per_joint,
        visible_count=int(errors.size),
    )
