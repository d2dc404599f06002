"""Grid search for the window-trim value on a labeled dataset.

For each candidate trim the whole dataset is decoded with the
windowed-mean decoder and scored; the trim with the best score wins,
ties resolving toward the smaller trim (smaller cuts keep more of the
distribution). Candidates that empty the integration window on more
than half of the joints are flagged and scored minus infinity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .decoding import (
    STATUS_EMPTY_REGION,
    DecoderConfig,
    Method,
    Pattern,
    decode_batch,
)
from .errors import CalibrationError
from .heatmaps import gaussian_kernel1d
from .metrics import SyntheticSample


@dataclass(frozen=True)
class Objective:
    """Maximize-better score: negative mean error, or PCK at a threshold."""

    kind: str = "mean_error_neg"
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in ("mean_error_neg", "pck"):
            raise ValueError(f"unknown objective kind: {self.kind!r}")
        if self.kind == "pck" and not (self.threshold and self.threshold > 0):
            raise ValueError("pck objective needs a positive threshold")

    @classmethod
    def mean_error_neg(cls) -> "Objective":
        return cls("mean_error_neg")

    @classmethod
    def pck_at(cls, threshold: float) -> "Objective":
        return cls("pck", float(threshold))

    @classmethod
    def parse(cls, text: str) -> "Objective":
        text = text.strip().lower()
        if text in ("mean_error_neg", "mean_error", "neg_mean_error"):
            return cls.mean_error_neg()
        if text.startswith("pck@"):
            return cls.pck_at(float(text[4:]))
        raise ValueError(f"cannot parse objective {text!r}")

    @property
    def name(self) -> str:
        if self.kind == "pck":
            return f"pck@{self.threshold:g}"
        return self.kind

    def score(self, errors: np.ndarray, norms: np.ndarray) -> float:
        if self.kind == "pck":
            return float(np.mean(errors / norms < self.threshold))
        return float(-errors.mean())


def default_candidates(sigma: float) -> tuple[int, ...]:
    """Trim candidates from -2 up to ``sigma + 4`` inclusive."""
    return tuple(range(-2, int(round(sigma)) + 5))


@dataclass(frozen=True)
class CalibrationSpec:
    candidates: tuple[int, ...]
    pattern: Pattern = Pattern.BR
    presmooth: float | None = None
    objective: Objective = Objective.mean_error_neg()

    def __post_init__(self):
        cands = tuple(int(c) for c in self.candidates)
        if not cands:
            raise ValueError("candidate list must be non-empty")
        if any(b <= a for a, b in zip(cands, cands[1:])):
            raise ValueError("candidates must be strictly increasing")
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "pattern", Pattern(self.pattern))


@dataclass
class CalibrationReport:
    """Per-trim score curve and the selected optimum."""

    curve: list[tuple[int, float]]
    delta_opt: int
    objective: str
    pattern: str
    presmooth: float | None
    samples: int

    def score_at(self, delta: int) -> float:
        for d, s in self.curve:
            if d == delta:
                return s
        raise KeyError(delta)

    @property
    def best_score(self) -> float:
        return self.score_at(self.delta_opt)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "pattern": self.pattern,
            "presmooth": self.presmooth,
            # -inf (flagged trim) is not representable in strict JSON
            "curve": [[d, None if math.isinf(s) else s] for d, s in self.curve],
            "delta_opt": self.delta_opt,
            "samples": self.samples,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationReport":
        curve = [(int(d), -math.inf if s is None else float(s)) for d, s in data["curve"]]
        return cls(
            curve=curve,
            delta_opt=int(data["delta_opt"]),
            objective=str(data["objective"]),
            pattern=str(data["pattern"]),
            presmooth=None if data.get("presmooth") is None else float(data["presmooth"]),
            samples=int(data["samples"]),
        )


def _gather(samples: list[SyntheticSample]):
    if not samples:
        raise ValueError("dataset must be non-empty")
    first = samples[0].heatmaps[0]
    stride, sigma = first.stride, first.sigma
    stacks, truths, norms = [], [], []
    for sample in samples:
        for hm, truth, vis in zip(sample.heatmaps, sample.truth, sample.visible):
            if not vis:
                continue
            if hm.stride != stride or hm.sigma != sigma:
                raise ValueError("all heatmaps in a calibration dataset must share stride and sigma")
            stacks.append(hm.values)
            pt = truth.to_image(stride)
            truths.append((pt.x, pt.y))
            norms.append(sample.norm_length)
    if not stacks:
        raise ValueError("dataset has no visible joints")
    return (
        np.ascontiguousarray(np.stack(stacks)),
        np.asarray(truths, dtype=np.float64),
        np.asarray(norms, dtype=np.float64),
        stride,
        sigma,
    )


def calibrate(samples: list[SyntheticSample], spec: CalibrationSpec) -> CalibrationReport:
    """Sweep the candidate trims over the dataset and pick the best."""
    stack, truths, norms, stride, sigma = _gather(samples)
    if spec.presmooth is not None:
        kern = _backend.kernels()
        kernel = gaussian_kernel1d(spec.presmooth)
        stack = np.stack([kern.smooth2d(stack[i], kernel) for i in range(stack.shape[0])])

    curve: list[tuple[int, float]] = []
    flagged = 0
    for delta in spec.candidates:
        if delta > 3.0 * sigma + 1.0:
            curve.append((delta, -math.inf))
            flagged += 1
            continue
        config = DecoderConfig(method=Method.DAEC, delta=delta, pattern=spec.pattern)
        coords, status = decode_batch(stack, stride, sigma, config)
        empties = int(np.count_nonzero(status == STATUS_EMPTY_REGION))
        if empties * 2 > len(status):
            curve.append((delta, -math.inf))
            flagged += 1
            continue
        errors = np.hypot(coords[:, 0] - truths[:, 0], coords[:, 1] - truths[:, 1])
        curve.append((delta, spec.objective.score(errors, norms)))

    if flagged == len(curve):
        raise CalibrationError(
            f"every candidate trim was flagged (candidates={list(spec.candidates)}, sigma={sigma:g})"
        )
    best_delta, best_score = curve[0]
    for d, s in curve[1:]:
        if s > best_score:
            best_delta, best_score = d, s
    return CalibrationReport(
        curve=curve,
        delta_opt=best_delta,
        objective=spec.objective.name,
        pattern=spec.pattern.value,
        presmooth=spec.presmooth,
        samples=len(samples),
    )


def smoothing_shift_check(
    samples: list[SyntheticSample], spec: CalibrationSpec
) -> tuple[int, int]:
    """Calibrate with smoothing off and on (kernel sigma = encoding sigma).

    Returns ``(delta_opt_unsmoothed, delta_opt_smoothed)``.
    """
    sigma = samples[0].heatmaps[0].sigma if samples else 2.0
    plain = calibrate(samples, replace(spec, presmooth=None))
    smoothed = calibrate(samples, replace(spec, presmooth=sigma))
    return plain.delta_opt, smoothed.delta_opt
