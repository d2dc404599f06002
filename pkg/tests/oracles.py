"""Independent reference implementations used to pin expected values.

Everything here is deliberately brute force (per-pixel loops, fsum,
dense convolution) and shares no code with the library paths it checks.
"""

import math

import numpy as np


def gaussian_value(x, y, mux, muy, sigma, normalized=False):
    norm = 1.0 / (2.0 * math.pi * sigma * sigma) if normalized else 1.0
    d2 = (x - mux) ** 2 + (y - muy) ** 2
    return norm * math.exp(-d2 / (2.0 * sigma * sigma))


def gaussian_grid(width, height, mux, muy, sigma, normalized=False):
    out = np.empty((height, width), dtype=np.float64)
    for yy in range(height):
        for xx in range(width):
            out[yy, xx] = gaussian_value(xx, yy, mux, muy, sigma, normalized)
    return out


def argmax_rowmajor(values):
    best = None
    bx = by = 0
    h, w = values.shape
    for yy in range(h):
        for xx in range(w):
            v = float(values[yy, xx])
            if best is None or v > best:
                best = v
                bx, by = xx, yy
    return bx, by


def dense_filter2d(values, kernel2d):
    """Full 2D correlation with symmetric border reflection."""
    h, w = values.shape
    kh, kw = kernel2d.shape
    ry, rx = kh // 2, kw // 2
    padded = np.pad(values.astype(np.float64), ((ry, ry), (rx, rx)), mode="symmetric")
    out = np.empty((h, w), dtype=np.float64)
    for yy in range(h):
        for xx in range(w):
            acc = 0.0
            for ky in range(kh):
                for kx in range(kw):
                    acc += kernel2d[ky, kx] * padded[yy + ky, xx + kx]
            out[yy, xx] = acc
    return out


def windowed_mean(values, x_lo, x_hi, y_lo, y_hi):
    """Intensity-weighted mean over an inclusive window, via fsum."""
    tm, tx, ty = [], [], []
    for yy in range(y_lo, y_hi + 1):
        for xx in range(x_lo, x_hi + 1):
            v = float(values[yy, xx])
            tm.append(v)
            tx.append(v * xx)
            ty.append(v * yy)
    mass = math.fsum(tm)
    return math.fsum(tx) / mass, math.fsum(ty) / mass


def windowed_sum(values, x_lo, x_hi, y_lo, y_hi):
    return math.fsum(
        float(values[yy, xx])
        for yy in range(y_lo, y_hi + 1)
        for xx in range(x_lo, x_hi + 1)
    )


def full_grid_mean(values):
    h, w = values.shape
    return windowed_mean(values, 0, w - 1, 0, h - 1)
