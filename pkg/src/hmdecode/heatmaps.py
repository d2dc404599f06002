"""Heatmap container, Gaussian encoding, smoothing and synthetic noise.

Coordinate conventions used throughout the package:

- Pixel ``(i, j)`` samples the continuous field at integer coordinates,
  i.e. integer coordinates are pixel centers (no half-pixel shift).
- ``x`` runs along grid columns (width), ``y`` along rows (height); the
  value grid is row-major ``values[y, x]``.
- Image-space coordinates are heatmap-space coordinates times the output
  stride, per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend


class Space(str, Enum):
    """Coordinate space tag."""

    HEATMAP = "heatmap"
    IMAGE = "image"


@dataclass(frozen=True)
class Coord:
    """A continuous 2D point with an explicit coordinate-space tag."""

    x: float
    y: float
    space: Space = Space.IMAGE

    def to_image(self, stride: float) -> "Coord":
        if self.space is Space.IMAGE:
            return self
        return Coord(self.x * stride, self.y * stride, Space.IMAGE)

    def to_heatmap(self, stride: float) -> "Coord":
        if self.space is Space.HEATMAP:
            return self
        return Coord(self.x / stride, self.y / stride, Space.HEATMAP)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(eq=False)
class Heatmap:
    """A 2D activation grid with stride and encoding-sigma metadata.

    ``values`` is stored as a read-only, C-contiguous float32 array; the
    constructor always copies its input, so heatmaps are immutable and safe
    to share across threads.
    """

    values: np.ndarray
    stride: float = 1.0
    sigma: float = 2.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float32, order="C", copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("heatmap values must be a non-empty 2D grid")
        if not (self.stride > 0):
            raise ValueError("stride must be > 0")
        if not (self.sigma > 0):
            raise ValueError("sigma must be > 0")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "stride", float(self.stride))
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def argmax(self) -> tuple[int, int]:
        """Row-major first-occurrence argmax as ``(x, y)`` pixel indices."""
        ix, iy = _backend.kernels().argmax2d(self.values)
        return int(ix), int(iy)

    def with_values(self, values: np.ndarray) -> "Heatmap":
        return Heatmap(values, stride=self.stride, sigma=self.sigma)


class NoiseKind(str, Enum):
    NONE = "none"
    WHITE_GAUSSIAN = "white_gaussian"
    GHOST_GAUSSIAN = "ghost_gaussian"
    RAMP = "ramp"


@dataclass(frozen=True)
class NoiseSpec:
    """Additive perturbation of a heatmap.

    ``white_gaussian`` adds i.i.d. zero-mean noise (random error),
    ``ghost_gaussian`` adds a secondary bump displaced from the peak
    (directionally biased error), ``ramp`` adds a planar gradient
    (smooth biased error). The result is always clamped at zero from
    below. Identical spec + seed + input gives identical output.
    """

    kind: NoiseKind = NoiseKind.NONE
    amplitude: float = 0.0
    offset: tuple[float, float] = (0.0, 0.0)
    gradient: tuple[float, float] = (0.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.amplitude < 0:
            raise ValueError("noise amplitude must be >= 0")

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "amplitude": self.amplitude, "seed": self.seed}
        if self.kind is NoiseKind.GHOST_GAUSSIAN:
            out["offset"] = list(self.offset)
        if self.kind is NoiseKind.RAMP:
            out["gradient"] = list(self.gradient)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseSpec":
        return cls(
            kind=NoiseKind(data.get("kind", "none")),
            amplitude=float(data.get("amplitude", 0.0)),
            offset=tuple(data.get("offset", (0.0, 0.0))),
            gradient=tuple(data.get("gradient", (0.0, 0.0))),
            seed=int(data.get("seed", 0)),
        )


def encode(
    center: Coord,
    width: int,
    height: int,
    stride: float = 1.0,
    sigma: float = 2.0,
    normalized: bool = False,
) -> Heatmap:
    """Encode an image-space point as an isotropic Gaussian heatmap.

    The grid value at pixel ``(x, y)`` is the Gaussian with mean
    ``center / stride`` and covariance ``sigma**2 * I`` evaluated at the
    pixel center. By default the peak is left unnormalized (value 1 at the
    mean); with ``normalized=True`` the density constant
    ``1 / (2 * pi * sigma**2)`` is applied. Decoding by intensity-weighted
    mean is invariant to this global scale.
    """
    if center.space is not Space.IMAGE:
        raise ValueError("encode() expects an image-space center")
    if not (sigma > 0) or not (stride > 0):
        raise ValueError("sigma and stride must be > 0")
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be >= 1")
    mx = center.x / stride
    my = center.y / stride
    if not (0.0 <= mx <= width - 1 and 0.0 <= my <= height - 1):
        raise ValueError(
            f"center {(center.x, center.y)} maps to {(mx, my)} outside the "
            f"{width}x{height} heatmap grid"
        )
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    d2 = (xs[None, :] - mx) ** 2 + (ys[:, None] - my) ** 2
    grid = np.exp(-d2 / (2.0 * sigma * sigma))
    if normalized:
        grid *= 1.0 / (2.0 * math.pi * sigma * sigma)
    return Heatmap(grid, stride=stride, sigma=sigma)


def gaussian_kernel1d(kernel_sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian taps with truncation radius ``ceil(3*sigma)``."""
    if not (kernel_sigma > 0):
        raise ValueError("kernel_sigma must be > 0")
    radius = int(math.ceil(3.0 * kernel_sigma))
    ks = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(ks * ks) / (2.0 * kernel_sigma * kernel_sigma))
    return w / w.sum()


def smooth(hm: Heatmap, kernel_sigma: float) -> Heatmap:
    """Separable Gaussian smoothing with symmetric (reflected) borders.

    The per-axis kernel is normalized to sum 1, so smoothing preserves the
    total mass of interior-supported heatmaps; output dimensions are
    unchanged.
    """
    kernel = gaussian_kernel1d(kernel_sigma)
    out = _backend.kernels().smooth2d(hm.values, kernel)
    return hm.with_values(out)


def inject_noise(hm: Heatmap, spec: NoiseSpec) -> Heatmap:
    """Apply an additive noise spec; values are clamped at 0 from below."""
    if spec.kind is NoiseKind.NONE:
        return hm
    vals = hm.values.astype(np.float64)
    h, w = vals.shape
    if spec.kind is NoiseKind.WHITE_GAUSSIAN:
        rng = np.random.default_rng(spec.seed)
        vals = vals + rng.normal(0.0, spec.amplitude, size=(h, w))
    elif spec.kind is NoiseKind.GHOST_GAUSSIAN:
        ix, iy = hm.argmax()
        gx = ix + spec.offset[0]
        gy = iy + spec.offset[1]
        xs = np.arange(w, dtype=np.float64)
        ys = np.arange(h, dtype=np.float64)
        d2 = (xs[None, :] - gx) ** 2 + (ys[:, None] - gy) ** 2
        vals = vals + spec.amplitude * np.exp(-d2 / (2.0 * hm.sigma * hm.sigma))
    elif spec.kind is NoiseKind.RAMP:
        xs = np.arange(w, dtype=np.float64)
        ys = np.arange(h, dtype=np.float64)
        plane = spec.gradient[0] * xs[None, :] + spec.gradient[1] * ys[:, None]
        vals = vals + spec.amplitude * plane / max(w, h)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown noise kind: {spec.kind}")
    return hm.with_values(np.maximum(vals, 0.0))


def mirror_lr(hm: Heatmap) -> Heatmap:
    """Left-right mirror of the value grid (metadata unchanged)."""
    return hm.with_values(hm.values[:, ::-1])
