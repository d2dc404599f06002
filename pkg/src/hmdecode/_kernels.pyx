# cython: language_level=3
"""Compiled decode kernels.

Semantics twin of ``_kernels_py``: float64 accumulation over the float32
grid, identical operation order, same libm calls, so results match the
fallback bit for bit (the extension is built with -ffp-contract=off to
keep it that way). The batch loop releases the GIL.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, fmax, log

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    M_STANDARD = 0
    M_SHIFTING = 1
    M_DARKLITE = 2
    M_DAEC = 3

cdef enum:
    S_OK = 0
    S_ZERO_MASS = 1
    S_EMPTY_REGION = 2

cdef double LOG_FLOOR = 1e-10

METHOD_STANDARD = M_STANDARD
METHOD_SHIFTING = M_SHIFTING
METHOD_DARKLITE = M_DARKLITE
METHOD_DAEC = M_DAEC

STATUS_OK = S_OK
STATUS_ZERO_MASS = S_ZERO_MASS
STATUS_EMPTY_REGION = S_EMPTY_REGION


cdef inline Py_ssize_t _mirror(Py_ssize_t idx, Py_ssize_t n) noexcept nogil:
    # symmetric reflection with edge repeat, iterated for any radius
    while idx < 0 or idx >= n:
        if idx < 0:
            idx = -idx - 1
        else:
            idx = 2 * n - 1 - idx
    return idx


cdef void _smooth(const float* src, double* tmp, float* dst,
                  Py_ssize_t h, Py_ssize_t w,
                  const double* kw, Py_ssize_t r) noexcept nogil:
    cdef Py_ssize_t x, y, k
    cdef double acc
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for k in range(2 * r + 1):
                acc = acc + kw[k] * <double>src[y * w + _mirror(x + k - r, w)]
            tmp[y * w + x] = acc
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for k in range(2 * r + 1):
                acc = acc + kw[k] * tmp[_mirror(y + k - r, h) * w + x]
            dst[y * w + x] = <float>acc


cdef inline void _argmax(const float* v, Py_ssize_t h, Py_ssize_t w,
                         Py_ssize_t* oix, Py_ssize_t* oiy) noexcept nogil:
    cdef Py_ssize_t i, best_i = 0
    cdef Py_ssize_t n = h * w
    cdef float best = v[0]
    for i in range(1, n):
        if v[i] > best:
            best = v[i]
            best_i = i
    oix[0] = best_i % w
    oiy[0] = best_i // w


cdef int _decode_shifting(const float* v, Py_ssize_t h, Py_ssize_t w,
                          double* ox, double* oy) noexcept nogil:
    cdef Py_ssize_t ix, iy, nx, ny, c
    cdef Py_ssize_t dxs[4]
    cdef Py_ssize_t dys[4]
    cdef double val, best
    cdef Py_ssize_t bdx = 0, bdy = 0
    _argmax(v, h, w, &ix, &iy)
    dxs[0] = 1; dys[0] = 0
    dxs[1] = -1; dys[1] = 0
    dxs[2] = 0; dys[2] = 1
    dxs[3] = 0; dys[3] = -1
    best = -1e308
    for c in range(4):
        nx = ix + dxs[c]
        ny = iy + dys[c]
        if 0 <= nx < w and 0 <= ny < h:
            val = <double>v[ny * w + nx]
            if val > best:
                best = val
                bdx = dxs[c]
                bdy = dys[c]
    ox[0] = ix + 0.25 * bdx
    oy[0] = iy + 0.25 * bdy
    return S_OK


cdef int _decode_darklite(const float* v, Py_ssize_t h, Py_ssize_t w,
                          double* ox, double* oy) noexcept nogil:
    cdef Py_ssize_t ix, iy
    cdef double l_c, l_xp, l_xm, l_yp, l_ym, l_pp, l_pm, l_mp, l_mm
    cdef double gx, gy, dxx, dyy, dxy, det, cx, cy
    _argmax(v, h, w, &ix, &iy)
    if ix < 1 or ix > w - 2 or iy < 1 or iy > h - 2:
        ox[0] = <double>ix
        oy[0] = <double>iy
        return S_OK
    l_c = log(fmax(<double>v[iy * w + ix], LOG_FLOOR))
    l_xp = log(fmax(<double>v[iy * w + ix + 1], LOG_FLOOR))
    l_xm = log(fmax(<double>v[iy * w + ix - 1], LOG_FLOOR))
    l_yp = log(fmax(<double>v[(iy + 1) * w + ix], LOG_FLOOR))
    l_ym = log(fmax(<double>v[(iy - 1) * w + ix], LOG_FLOOR))
    l_pp = log(fmax(<double>v[(iy + 1) * w + ix + 1], LOG_FLOOR))
    l_pm = log(fmax(<double>v[(iy + 1) * w + ix - 1], LOG_FLOOR))
    l_mp = log(fmax(<double>v[(iy - 1) * w + ix + 1], LOG_FLOOR))
    l_mm = log(fmax(<double>v[(iy - 1) * w + ix - 1], LOG_FLOOR))
    gx = (l_xp - l_xm) / 2.0
    gy = (l_yp - l_ym) / 2.0
    dxx = l_xp - 2.0 * l_c + l_xm
    dyy = l_yp - 2.0 * l_c + l_ym
    dxy = (l_pp - l_pm - l_mp + l_mm) / 4.0
    det = dxx * dyy - dxy * dxy
    if not (det > 0.0 and dxx < 0.0):
        ox[0] = <double>ix
        oy[0] = <double>iy
        return S_OK
    cx = -((dyy * gx - dxy * gy) / det)
    cy = -((dxx * gy - dxy * gx) / det)
    if cx > 1.0:
        cx = 1.0
    elif cx < -1.0:
        cx = -1.0
    if cy > 1.0:
        cy = 1.0
    elif cy < -1.0:
        cy = -1.0
    ox[0] = ix + cx
    oy[0] = iy + cy
    return S_OK


cdef int _decode_daec(const float* v, Py_ssize_t h, Py_ssize_t w,
                      double sigma, long delta, int pattern,
                      double* ox, double* oy) noexcept nogil:
    cdef Py_ssize_t ix, iy, half, x_lo, x_hi, y_lo, y_hi, xx, yy
    cdef double mass = 0.0, sx = 0.0, sy = 0.0, val
    _argmax(v, h, w, &ix, &iy)
    half = <Py_ssize_t>ceil(3.0 * sigma) + 1
    x_lo = ix - half
    x_hi = ix + half
    y_lo = iy - half
    y_hi = iy + half
    if pattern == 0:    # BR
        x_hi -= delta
        y_hi -= delta
    elif pattern == 1:  # UR
        x_hi -= delta
        y_lo += delta
    elif pattern == 2:  # BL
        x_lo += delta
        y_hi -= delta
    else:               # UL
        x_lo += delta
        y_lo += delta
    if x_lo < 0:
        x_lo = 0
    if x_hi > w - 1:
        x_hi = w - 1
    if y_lo < 0:
        y_lo = 0
    if y_hi > h - 1:
        y_hi = h - 1
    if x_lo > x_hi or y_lo > y_hi:
        ox[0] = <double>ix
        oy[0] = <double>iy
        return S_EMPTY_REGION
    for yy in range(y_lo, y_hi + 1):
        for xx in range(x_lo, x_hi + 1):
            val = <double>v[yy * w + xx]
            mass += val
            sx += val * <double>xx
            sy += val * <double>yy
    if mass <= 0.0:
        ox[0] = <double>ix
        oy[0] = <double>iy
        return S_ZERO_MASS
    ox[0] = sx / mass
    oy[0] = sy / mass
    return S_OK


cdef int _decode_one(const float* v, Py_ssize_t h, Py_ssize_t w,
                     int method, double sigma, long delta, int pattern,
                     double* ox, double* oy) noexcept nogil:
    cdef Py_ssize_t ix, iy
    if method == M_STANDARD:
        _argmax(v, h, w, &ix, &iy)
        ox[0] = <double>ix
        oy[0] = <double>iy
        return S_OK
    elif method == M_SHIFTING:
        return _decode_shifting(v, h, w, ox, oy)
    elif method == M_DARKLITE:
        return _decode_darklite(v, h, w, ox, oy)
    return _decode_daec(v, h, w, sigma, delta, pattern, ox, oy)


def argmax2d(values):
    """Row-major first-occurrence argmax, returned as (ix, iy)."""
    cdef const float[:, ::1] v = values
    cdef Py_ssize_t ix, iy
    with nogil:
        _argmax(&v[0, 0], v.shape[0], v.shape[1], &ix, &iy)
    return ix, iy


def smooth2d(values, kernel):
    """Separable correlation with symmetric border reflection."""
    cdef const float[:, ::1] v = values
    cdef const double[::1] kw = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = v.shape[0]
    cdef Py_ssize_t w = v.shape[1]
    cdef Py_ssize_t r = (kw.shape[0] - 1) // 2
    out_arr = np.empty((h, w), dtype=np.float32)
    tmp_arr = np.empty((h, w), dtype=np.float64)
    cdef float[:, ::1] out = out_arr
    cdef double[:, ::1] tmp = tmp_arr
    with nogil:
        _smooth(&v[0, 0], &tmp[0, 0], &out[0, 0], h, w, &kw[0], r)
    return out_arr


def decode_batch(stack, int method, double sigma, long delta, int pattern,
                 kernel, out, status):
    """Decode every heatmap in ``stack`` into heatmap-space coordinates.

    ``out`` is (N, 2) float64, ``status`` (N,) int32; both written in place.
    ``kernel`` (optional) is applied per heatmap before decoding.
    """
    cdef const float[:, :, ::1] st = stack
    cdef double[:, ::1] o = out
    cdef int[::1] sts = status
    cdef Py_ssize_t n = st.shape[0]
    cdef Py_ssize_t h = st.shape[1]
    cdef Py_ssize_t w = st.shape[2]
    cdef bint do_smooth = kernel is not None
    cdef const double[::1] kw
    cdef const double* kw_ptr = NULL
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t i
    cdef double x, y
    cdef const float* v
    cdef double* tmp_ptr = NULL
    cdef float* sm_ptr = NULL

    tmp_arr = None
    sm_arr = None
    if do_smooth:
        kw = np.ascontiguousarray(kernel, dtype=np.float64)
        kw_ptr = &kw[0]
        r = (kw.shape[0] - 1) // 2
        tmp_arr = np.empty((h, w), dtype=np.float64)
        sm_arr = np.empty((h, w), dtype=np.float32)
        tmp_ptr = <double*>cnp.PyArray_DATA(tmp_arr)
        sm_ptr = <float*>cnp.PyArray_DATA(sm_arr)

    with nogil:
        for i in range(n):
            v = &st[i, 0, 0]
            if do_smooth:
                _smooth(v, tmp_ptr, sm_ptr, h, w, kw_ptr, r)
                v = sm_ptr
            sts[i] = _decode_one(v, h, w, method, sigma, delta, pattern, &x, &y)
            o[i, 0] = x
            o[i, 1] = y
