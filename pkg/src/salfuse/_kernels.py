"""JIT-compiled inner loops: separable convolution, box mean, bilinear resize.

Every kernel is deterministic: no fastmath, and parallel loops only split work
across independent output rows, so results are bit-identical for any thread
count.  All arrays are C-contiguous float64.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def conv_h(src, w, out):
    """Horizontal 1-D correlation with edge replication.

    ``w`` has odd length 2r+1; symmetric kernels make correlation equal
    convolution.  Border columns clamp their reads; interior columns run
    without bounds checks.
    """
    h, wd = src.shape
    r = (w.size - 1) // 2
    lo = min(r, wd)
    hi = max(wd - r, lo)
    for y in prange(h):
        for x in range(lo):
            acc = 0.0
            for i in range(-r, r + 1):
                xx = min(max(x + i, 0), wd - 1)
                acc += w[i + r] * src[y, xx]
            out[y, x] = acc
        for x in range(lo, hi):
            acc = 0.0
            for i in range(-r, r + 1):
                acc += w[i + r] * src[y, x + i]
            out[y, x] = acc
        for x in range(hi, wd):
            acc = 0.0
            for i in range(-r, r + 1):
                xx = min(max(x + i, 0), wd - 1)
                acc += w[i + r] * src[y, xx]
            out[y, x] = acc


@njit(cache=True, parallel=True)
def conv_v(src, w, out):
    """Vertical 1-D correlation with edge replication.

    Accumulates tap-by-tap along contiguous rows, which is much friendlier to
    the cache than walking columns.
    """
    h, wd = src.shape
    r = (w.size - 1) // 2
    for y in prange(h):
        for i in range(-r, r + 1):
            yy = min(max(y + i, 0), h - 1)
            wi = w[i + r]
            if i == -r:
                for x in range(wd):
                    out[y, x] = wi * src[yy, x]
            else:
                for x in range(wd):
                    out[y, x] += wi * src[yy, x]


@njit(cache=True, parallel=True)
def box_mean_k(src, r, out):
    """Windowed mean over (2r+1)^2 windows clipped to the image bounds.

    O(1) per pixel: builds a summed-area table, then each output pixel is one
    four-corner lookup divided by its true (clipped) window population.
    """
    h, w = src.shape
    ii = np.zeros((h + 1, w + 1))
    for y in prange(h):
        acc = 0.0
        for x in range(w):
            acc += src[y, x]
            ii[y + 1, x + 1] = acc
    for y in range(1, h + 1):
        for x in range(1, w + 1):
            ii[y, x] += ii[y - 1, x]
    for y in prange(h):
        y0 = y - r
        if y0 < 0:
            y0 = 0
        y1 = y + r + 1
        if y1 > h:
            y1 = h
        cy = y1 - y0
        for x in range(w):
            x0 = x - r
            if x0 < 0:
                x0 = 0
            x1 = x + r + 1
            if x1 > w:
                x1 = w
            s = ii[y1, x1] - ii[y1, x0] - ii[y0, x1] + ii[y0, x0]
            out[y, x] = s / (cy * (x1 - x0))


@njit(cache=True, parallel=True)
def bilinear_k(src, y0a, y1a, fya, x0a, x1a, fxa, out):
    """Gather-based bilinear resample using precomputed per-axis coordinates.

    At integer source coordinates the fractional weights are exactly 0.0 and
    the source sample is reproduced bit-exactly.
    """
    th, tw = out.shape
    for y in prange(th):
        y0 = y0a[y]
        y1 = y1a[y]
        fy = fya[y]
        for x in range(tw):
            x0 = x0a[x]
            x1 = x1a[x]
            fx = fxa[x]
            top = src[y0, x0] + (src[y0, x1] - src[y0, x0]) * fx
            bot = src[y1, x0] + (src[y1, x1] - src[y1, x0]) * fx
            out[y, x] = top + (bot - top) * fy
