"""Batch buffer API over the hmdecode coordinate decoders.

This package is the in-process integration surface for array-producing
frameworks: it accepts any object implementing the buffer protocol as a
C-contiguous float32 ``(N, H, W)`` stack, decodes or calibrates through
the host library's compiled batch kernels (which release the GIL), and
returns plain ndarrays / dicts. Inputs are validated, never silently
copied: a non-contiguous or mistyped buffer is rejected.

Outputs are bitwise identical to the host library and CLI on the same
bytes, because the same kernel path runs underneath; the equivalence
tests enforce that.
"""

from __future__ import annotations

import numpy as np

import hmdecode
from hmdecode import (
    CalibrationSpec,
    Coord,
    DecoderConfig,
    Heatmap,
    Method,
    Objective,
    Pattern,
    Space,
    SyntheticSample,
)
from hmdecode import read_hmz, write_hmz  # re-exported container helpers

__all__ = ["decode_batch", "calibrate_batch", "read_hmz", "write_hmz"]

__version__ = "0.1.0"


def _as_f32_stack(buffer, name="buffer") -> np.ndarray:
    """Zero-copy view of a buffer-protocol object as (N, H, W) float32."""
    try:
        view = memoryview(buffer)
    except TypeError as exc:
        raise TypeError(f"{name} must support the buffer protocol") from exc
    if view.format not in ("f", "<f"):
        raise TypeError(f"{name} must hold little-endian float32, got format {view.format!r}")
    if view.ndim != 3:
        raise ValueError(f"{name} must have shape (N, H, W), got {view.ndim} dimension(s)")
    if not view.c_contiguous:
        raise ValueError(f"{name} must be C-contiguous; refusing to copy")
    arr = np.asarray(view)
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    return arr


def _config(method, delta, pattern, presmooth) -> DecoderConfig:
    return DecoderConfig(
        method=Method(method),
        delta=int(delta),
        pattern=Pattern(pattern),
        presmooth=presmooth,
    )


def decode_batch(
    buffer,
    stride: float,
    sigma: float,
    method: str = "daec",
    delta: int = 0,
    pattern: str = "br",
    presmooth: float | None = None,
) -> np.ndarray:
    """Decode a (N, H, W) float32 stack to (N, 2) image-space coordinates."""
    stack = _as_f32_stack(buffer)
    config = _config(method, delta, pattern, presmooth)
    coords, status = hmdecode.decode_batch(stack, stride, sigma, config)
    bad = np.flatnonzero(status == hmdecode.STATUS_EMPTY_REGION)
    if bad.size:
        raise ValueError(f"empty integration window for heatmap index {int(bad[0])}")
    return coords


def calibrate_batch(
    buffer,
    truths,
    stride: float,
    sigma: float,
    candidates=None,
    pattern: str = "br",
    presmooth: float | None = None,
    objective: str = "mean_error_neg",
    norm_length: float = 1.0,
    visible=None,
) -> dict:
    """Grid-search the window trim over a labeled stack.

    ``truths`` is an (N, 2) array of image-space points aligned with the
    stack. Returns the report as a plain dict in its JSON schema.
    """
    stack = _as_f32_stack(buffer)
    pts = np.asarray(truths, dtype=np.float64)
    if pts.shape != (stack.shape[0], 2):
        raise ValueError(f"truths must have shape ({stack.shape[0]}, 2), got {pts.shape}")
    if visible is None:
        visible = [True] * stack.shape[0]
    samples = [
        SyntheticSample(
            heatmaps=[Heatmap(stack[i], stride=stride, sigma=sigma)],
            truth=[Coord(float(pts[i, 0]), float(pts[i, 1]), Space.IMAGE)],
            visible=[bool(visible[i])],
            norm_length=float(norm_length),
        )
        for i in range(stack.shape[0])
    ]
    spec = CalibrationSpec(
        candidates=tuple(candidates) if candidates else hmdecode.default_candidates(sigma),
        pattern=Pattern(pattern),
        presmooth=presmooth,
        objective=Objective.parse(objective),
    )
    return hmdecode.calibrate(samples, spec).to_dict()
