"""Binary heatmap container (.hmz).

Layout, all little-endian:

- bytes 0-3: magic ``HMZ1``
- u32 count N, u32 height, u32 width
- f32 stride, f32 sigma
- N * H * W f32 values, row-major, heatmap-major

Round trips are bit-exact; note stride and sigma are stored at f32
precision.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from .errors import FormatError
from .heatmaps import Heatmap

MAGIC = b"HMZ1"
_HEADER = struct.Struct("<4sIIIff")


@dataclass
class HmzBundle:
    """In-memory contents of one container file."""

    values: np.ndarray  # (N, H, W) float32
    stride: float
    sigma: float

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> Heatmap:
        return Heatmap(self.values[i], stride=self.stride, sigma=self.sigma)

    def heatmaps(self) -> Iterator[Heatmap]:
        for i in range(len(self)):
            yield self[i]


def _coerce_stack(
    heatmaps: np.ndarray | Iterable[Heatmap],
    stride: float | None,
    sigma: float | None,
) -> HmzBundle:
    if isinstance(heatmaps, np.ndarray):
        if stride is None or sigma is None:
            raise ValueError("stride and sigma are required with a raw array")
        arr = np.ascontiguousarray(heatmaps, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3:
            raise ValueError("expected a (N, H, W) array")
        return HmzBundle(arr, float(stride), float(sigma))
    hms = list(heatmaps)
    if not hms:
        raise ValueError("cannot write an empty container")
    first = hms[0]
    for hm in hms:
        if (hm.width, hm.height, hm.stride, hm.sigma) != (
            first.width,
            first.height,
            first.stride,
            first.sigma,
        ):
            raise ValueError("all heatmaps in a container must share shape, stride and sigma")
    stack = np.stack([hm.values for hm in hms])
    return HmzBundle(stack, first.stride, first.sigma)


def write_hmz(
    dest: str | Path | BinaryIO,
    heatmaps: np.ndarray | Iterable[Heatmap],
    stride: float | None = None,
    sigma: float | None = None,
) -> None:
    """Write heatmaps to a container file or binary stream."""
    bundle = _coerce_stack(heatmaps, stride, sigma)
    n, h, w = bundle.values.shape
    header = _HEADER.pack(MAGIC, n, h, w, bundle.stride, bundle.sigma)
    payload = np.ascontiguousarray(bundle.values, dtype="<f4").tobytes()
    if hasattr(dest, "write"):
        dest.write(header)
        dest.write(payload)
    else:
        with open(dest, "wb") as fh:
            fh.write(header)
            fh.write(payload)


def read_hmz(src: str | Path | BinaryIO) -> HmzBundle:
    """Read a container file or binary stream."""
    if hasattr(src, "read"):
        raw = src.read()
    else:
        raw = Path(src).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError("container too short for header")
    magic, n, h, w, stride, sigma = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if n < 1 or h < 1 or w < 1:
        raise FormatError(f"bad dimensions N={n} H={h} W={w}")
    if not (stride > 0) or not (sigma > 0):
        raise FormatError(f"bad metadata stride={stride} sigma={sigma}")
    expected = _HEADER.size + 4 * n * h * w
    if len(raw) != expected:
        raise FormatError(f"payload size mismatch: {len(raw)} bytes, expected {expected}")
    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n, h, w)
    return HmzBundle(np.ascontiguousarray(values), float(stride), float(sigma))
