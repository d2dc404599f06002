"""Coordinate decoders: argmax, quarter-shift, quadratic-fit and windowed mean.

All decoders share the same argmax tie rule (row-major first occurrence)
so that cross-decoder comparisons isolate the refinement step. Every
decoder is a pure function returning image-space coordinates.

The windowed-mean decoder integrates activation over a peak-centered
window spanning ``6*sigma + 3`` pixels per axis, with an integer trim
``delta`` cut from one corner of the window (the compensation pattern)
before clipping to the grid. Positive trims shrink the window from that
corner; negative trims expand it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend, _kernels_py
from .heatmaps import Coord, Heatmap, Space, gaussian_kernel1d


class Method(str, Enum):
    STANDARD = "standard"
    SHIFTING = "shifting"
    DARKLITE = "darklite"
    DAEC = "daec"


class Pattern(str, Enum):
    """Window corner the trim is cut from (y axis points down)."""

    BR = "br"
    UR = "ur"
    BL = "bl"
    UL = "ul"


_METHOD_CODE = {
    Method.STANDARD: _kernels_py.METHOD_STANDARD,
    Method.SHIFTING: _kernels_py.METHOD_SHIFTING,
    Method.DARKLITE: _kernels_py.METHOD_DARKLITE,
    Method.DAEC: _kernels_py.METHOD_DAEC,
}

_PATTERN_CODE = {Pattern.BR: 0, Pattern.UR: 1, Pattern.BL: 2, Pattern.UL: 3}

STATUS_OK = _kernels_py.STATUS_OK
STATUS_ZERO_MASS = _kernels_py.STATUS_ZERO_MASS
STATUS_EMPTY_REGION = _kernels_py.STATUS_EMPTY_REGION


class DeltaTooLargeError(ValueError):
    """The window trim exceeds the window half-span for this sigma."""


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder selection plus windowed-mean parameters.

    ``delta`` and ``pattern`` only apply to the windowed-mean method;
    ``presmooth`` (a kernel sigma) applies to any method.
    """

    method: Method = Method.DAEC
    delta: int = 0
    pattern: Pattern = Pattern.BR
    presmooth: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "pattern", Pattern(self.pattern))
        object.__setattr__(self, "delta", int(self.delta))
        if self.presmooth is not None and not (self.presmooth > 0):
            raise ValueError("presmooth kernel sigma must be > 0")

    def label(self) -> str:
        parts = [self.method.value]
        if self.method is Method.DAEC:
            parts.append(f"d{self.delta}")
            parts.append(self.pattern.value)
        if self.presmooth is not None:
            parts.append(f"s{self.presmooth:g}")
        return "_".join(parts)


@dataclass(frozen=True)
class IntegralRegion:
    """Inclusive pixel bounds of the integration window."""

    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int

    @property
    def width(self) -> int:
        return self.x_hi - self.x_lo + 1

    @property
    def height(self) -> int:
        return self.y_hi - self.y_lo + 1


def max_delta(sigma: float) -> int:
    """Largest trim that leaves the peak inside the window: ``3*sigma + 1``."""
    return int(np.floor(3.0 * sigma + 1.0))


def _check_delta(delta: int, sigma: float) -> None:
    if delta > 3.0 * sigma + 1.0:
        raise DeltaTooLargeError(
            f"delta {delta} exceeds window half-span {max_delta(sigma)} for sigma {sigma:g}"
        )


def build_region(hm: Heatmap, delta: int = 0, pattern: Pattern = Pattern.BR) -> IntegralRegion:
    """Peak-centered window bounds after the corner trim and grid clipping.

    The trim applies to the ideal (unclipped) bounds so its meaning does
    not depend on the peak position; clipping happens after.
    """
    _check_delta(delta, hm.sigma)
    ix, iy = hm.argmax()
    x_lo, x_hi, y_lo, y_hi = _kernels_py.region_bounds(
        hm.width, hm.height, ix, iy, hm.sigma, int(delta), _PATTERN_CODE[Pattern(pattern)]
    )
    if x_lo > x_hi or y_lo > y_hi:
        raise DeltaTooLargeError(
            f"delta {delta} empties the integration window on this heatmap"
        )
    return IntegralRegion(x_lo, x_hi, y_lo, y_hi)


def _as_stack(values: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
        raise ValueError("expected a (N, H, W) stack of heatmaps")
    return arr


def decode_batch(
    stack: np.ndarray,
    stride: float,
    sigma: float,
    config: DecoderConfig,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Decode a stack of heatmaps to image-space coordinates.

    Returns ``(coords, status)`` where ``coords`` is (N, 2) float64 in
    image space and ``status`` is (N,) int32 (0 ok, 1 zero windowed mass,
    2 empty window after trim+clip; both non-zero statuses carry the
    argmax fallback coordinates).
    """
    arr = _as_stack(stack)
    if not (stride > 0) or not (sigma > 0):
        raise ValueError("stride and sigma must be > 0")
    config = config if isinstance(config, DecoderConfig) else DecoderConfig(config)
    if config.method is Method.SHIFTING and arr.shape[1] * arr.shape[2] < 2:
        raise ValueError("shifting decode needs at least 2 pixels")
    if config.method is Method.DAEC:
        _check_delta(config.delta, sigma)
    kernel = None
    if config.presmooth is not None:
        kernel = gaussian_kernel1d(config.presmooth)
    n = arr.shape[0]
    out = np.empty((n, 2), dtype=np.float64)
    status = np.zeros(n, dtype=np.int32)
    kern = _backend.kernels(backend)
    kern.decode_batch(
        arr,
        _METHOD_CODE[config.method],
        float(sigma),
        int(config.delta),
        _PATTERN_CODE[config.pattern],
        kernel,
        out,
        status,
    )
    out *= float(stride)
    return out, status


def _decode_single(hm: Heatmap, config: DecoderConfig) -> tuple[Coord, int]:
    coords, status = decode_batch(hm.values, hm.stride, hm.sigma, config)
    return Coord(float(coords[0, 0]), float(coords[0, 1]), Space.IMAGE), int(status[0])


def decode(hm: Heatmap, config: DecoderConfig) -> Coord:
    """Decode one heatmap with an arbitrary decoder config."""
    coord, _ = _decode_single(hm, config)
    return coord


def decode_standard(hm: Heatmap) -> Coord:
    """Argmax pixel scaled to image space; ties resolve row-major."""
    coord, _ = _decode_single(hm, DecoderConfig(method=Method.STANDARD))
    return coord


def decode_shifting(hm: Heatmap) -> Coord:
    """Argmax moved a quarter pixel toward its highest 4-neighbor.

    Neighbors outside the grid are skipped; ties between neighbors
    resolve in the fixed order +x, -x, +y, -y.
    """
    coord, _ = _decode_single(hm, DecoderConfig(method=Method.SHIFTING))
    return coord


def decode_darklite(hm: Heatmap) -> Coord:
    """Quadratic log-domain refinement of the argmax.

    Newton step from central finite differences of ``log(max(values, 1e-10))``
    at the peak, clamped to one pixel per axis. Falls back to the argmax when
    the peak touches the border or the curvature is not a proper maximum.
    """
    coord, _ = _decode_single(hm, DecoderConfig(method=Method.DARKLITE))
    return coord


def decode_daec(hm: Heatmap, config: DecoderConfig | None = None) -> Coord:
    """Intensity-weighted mean over the trimmed peak window.

    Zero windowed mass falls back to the argmax (surfaced as a status by
    :func:`decode_batch`); an over-large trim raises
    :class:`DeltaTooLargeError`.
    """
    if config is None:
        config = DecoderConfig(method=Method.DAEC)
    if config.method is not Method.DAEC:
        config = DecoderConfig(
            method=Method.DAEC,
            delta=config.delta,
            pattern=config.pattern,
            presmooth=config.presmooth,
        )
    coord, _ = _decode_single(hm, config)
    return coord
