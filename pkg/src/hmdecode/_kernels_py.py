"""Pure-Python decode kernels.

Fallback twin of the compiled extension. Every function keeps the exact
accumulation order and float64 intermediate precision of the compiled
kernels so both backends produce bit-identical results. Per-pixel loops
here are plain Python; the batch entry point is the same shape as the
compiled one.

Method codes: 0 standard, 1 shifting, 2 darklite, 3 daec.
Pattern codes: 0 BR, 1 UR, 2 BL, 3 UL.
Status codes: 0 ok, 1 zero windowed mass (fell back to standard),
2 empty region after cut+clip (fell back to standard; callers surface it).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

METHOD_STANDARD = 0
METHOD_SHIFTING = 1
METHOD_DARKLITE = 2
METHOD_DAEC = 3

STATUS_OK = 0
STATUS_ZERO_MASS = 1
STATUS_EMPTY_REGION = 2

_LOG_FLOOR = 1e-10


def argmax2d(values: np.ndarray) -> tuple[int, int]:
    """Row-major first-occurrence argmax, returned as (ix, iy)."""
    flat = int(np.argmax(values))
    w = values.shape[1]
    return flat % w, flat // w


def smooth2d(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable correlation with symmetric border reflection.

    Accumulates in float64, tap index ascending per axis (x pass then y
    pass), casting to float32 once at the end.
    """
    r = (len(kernel) - 1) // 2
    src = values.astype(np.float64)
    h, w = src.shape
    padded = np.pad(src, ((0, 0), (r, r)), mode="symmetric")
    tmp = np.zeros((h, w), dtype=np.float64)
    for k in range(2 * r + 1):
        tmp += kernel[k] * padded[:, k : k + w]
    padded = np.pad(tmp, ((r, r), (0, 0)), mode="symmetric")
    out = np.zeros((h, w), dtype=np.float64)
    for k in range(2 * r + 1):
        out += kernel[k] * padded[k : k + h, :]
    return out.astype(np.float32)


def _decode_standard(values: np.ndarray) -> tuple[float, float]:
    ix, iy = argmax2d(values)
    return float(ix), float(iy)


def _decode_shifting(values: np.ndarray) -> tuple[float, float]:
    h, w = values.shape
    ix, iy = argmax2d(values)
    item = values.item
    best = -math.inf
    bdx = bdy = 0
    # candidate order fixes tie-breaking: +x, -x, +y, -y
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nx, ny = ix + dx, iy + dy
        if 0 <= nx < w and 0 <= ny < h:
            val = item(ny, nx)
            if val > best:
                best = val
                bdx, bdy = dx, dy
    return ix + 0.25 * bdx, iy + 0.25 * bdy


def _decode_darklite(values: np.ndarray) -> tuple[float, float]:
    h, w = values.shape
    ix, iy = argmax2d(values)
    if ix < 1 or ix > w - 2 or iy < 1 or iy > h - 2:
        return float(ix), float(iy)
    item = values.item

    def L(yy, xx):
        return math.log(max(item(yy, xx), _LOG_FLOOR))

    gx = (L(iy, ix + 1) - L(iy, ix - 1)) / 2.0
    gy = (L(iy + 1, ix) - L(iy - 1, ix)) / 2.0
    dxx = L(iy, ix + 1) - 2.0 * L(iy, ix) + L(iy, ix - 1)
    dyy = L(iy + 1, ix) - 2.0 * L(iy, ix) + L(iy - 1, ix)
    dxy = (L(iy + 1, ix + 1) - L(iy + 1, ix - 1) - L(iy - 1, ix + 1) + L(iy - 1, ix - 1)) / 4.0
    det = dxx * dyy - dxy * dxy
    if not (det > 0.0 and dxx < 0.0):
        return float(ix), float(iy)
    ox = -((dyy * gx - dxy * gy) / det)
    oy = -((dxx * gy - dxy * gx) / det)
    if ox > 1.0:
        ox = 1.0
    elif ox < -1.0:
        ox = -1.0
    if oy > 1.0:
        oy = 1.0
    elif oy < -1.0:
        oy = -1.0
    return ix + ox, iy + oy


def region_bounds(
    w: int, h: int, ix: int, iy: int, sigma: float, delta: int, pattern: int
) -> tuple[int, int, int, int]:
    """Peak-centered window bounds: cut the pattern corner, then clip."""
    half = int(math.ceil(3.0 * sigma)) + 1
    x_lo = ix - half
    x_hi = ix + half
    y_lo = iy - half
    y_hi = iy + half
    if pattern == 0:  # BR
        x_hi -= delta
        y_hi -= delta
    elif pattern == 1:  # UR
        x_hi -= delta
        y_lo += delta
    elif pattern == 2:  # BL
        x_lo += delta
        y_hi -= delta
    else:  # UL
        x_lo += delta
        y_lo += delta
    return max(x_lo, 0), min(x_hi, w - 1), max(y_lo, 0), min(y_hi, h - 1)


def _decode_daec(
    values: np.ndarray, sigma: float, delta: int, pattern: int
) -> tuple[float, float, int]:
    h, w = values.shape
    ix, iy = argmax2d(values)
    x_lo, x_hi, y_lo, y_hi = region_bounds(w, h, ix, iy, sigma, delta, pattern)
    if x_lo > x_hi or y_lo > y_hi:
        return float(ix), float(iy), STATUS_EMPTY_REGION
    item = values.item
    mass = 0.0
    sx = 0.0
    sy = 0.0
    for yy in range(y_lo, y_hi + 1):
        for xx in range(x_lo, x_hi + 1):
            val = item(yy, xx)
            mass += val
            sx += val * xx
            sy += val * yy
    if mass <= 0.0:
        return float(ix), float(iy), STATUS_ZERO_MASS
    return sx / mass, sy / mass, STATUS_OK


def decode_batch(
    stack: np.ndarray,
    method: int,
    sigma: float,
    delta: int,
    pattern: int,
    kernel: np.ndarray | None,
    out: np.ndarray,
    status: np.ndarray,
) -> None:
    """Decode every heatmap in ``stack`` into heatmap-space coordinates.

    ``out`` is (N, 2) float64, ``status`` (N,) int32; both written in place.
    ``kernel`` (optional) is applied per heatmap before decoding.
    """
    n = stack.shape[0]
    for i in range(n):
        values = stack[i]
        if kernel is not None:
            values = smooth2d(values, kernel)
        st = STATUS_OK
        if method == METHOD_STANDARD:
            x, y = _decode_standard(values)
        elif method == METHOD_SHIFTING:
            x, y = _decode_shifting(values)
        elif method == METHOD_DARKLITE:
            x, y = _decode_darklite(values)
        else:
            x, y, st = _decode_daec(values, sigma, delta, pattern)
        out[i, 0] = x
        out[i, 1] = y
        status[i] = st
