"""numba inner loops for resampling and warping.

All kernels are sequential and IEEE-strict (no fastmath), so results are
bit-identical across runs and thread counts. Sample positions follow the
half-pixel-center convention: source position of output index i is
(i + 0.5) * (src / dst) - 0.5, clamped to the source extent. Position and
weight arithmetic is float64; stored samples are float32.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "axis_positions",
    "block_mean",
    "resize_nearest",
    "resize_bilinear",
    "resize_bicubic",
    "warp_bilinear",
    "warm_up",
]


def axis_positions(src: int, dst: int) -> np.ndarray:
    """Source-space sample positions for each destination index, float64."""
    return (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5


def linear_taps(src: int, dst: int):
    """Two-tap index/weight tables for one axis, clamped at borders."""
    pos = np.clip(axis_positions(src, dst), 0.0, src - 1.0)
    i0 = np.floor(pos).astype(np.int64)
    frac = pos - i0
    i1 = np.minimum(i0 + 1, src - 1)
    return i0, i1, frac


def nearest_taps(src: int, dst: int) -> np.ndarray:
    pos = np.clip(axis_positions(src, dst), 0.0, src - 1.0)
    return np.floor(pos + 0.5).astype(np.int64).clip(0, src - 1)


def cubic_taps(src: int, dst: int):
    """Four-tap Catmull-Rom (a = -0.5) index/weight tables for one axis."""
    pos = np.clip(axis_positions(src, dst), 0.0, src - 1.0)
    base = np.floor(pos).astype(np.int64)
    f = pos - base
    f2 = f * f
    f3 = f2 * f
    weights = np.stack(
        [
            -0.5 * f3 + f2 - 0.5 * f,
            1.5 * f3 - 2.5 * f2 + 1.0,
            -1.5 * f3 + 2.0 * f2 + 0.5 * f,
            0.5 * f3 - 0.5 * f2,
        ],
        axis=1,
    )
    idx = np.stack([base - 1, base, base + 1, base + 2], axis=1).clip(0, src - 1)
    return idx, weights


@njit(cache=True, nogil=True)
def block_mean(img, out):
    h, w, c = out.shape
    by = img.shape[0] // h
    bx = img.shape[1] // w
    inv = 1.0 / (by * bx)
    for oy in range(h):
        for ox in range(w):
            for ch in range(c):
                acc = 0.0
                for iy in range(oy * by, (oy + 1) * by):
                    for ix in range(ox * bx, (ox + 1) * bx):
                        acc += img[iy, ix, ch]
                out[oy, ox, ch] = np.float32(acc * inv)


@njit(cache=True, nogil=True)
def resize_nearest(img, out, xi, yi):
    th, tw, c = out.shape
    for oy in range(th):
        sy = yi[oy]
        for ox in range(tw):
            sx = xi[ox]
            for ch in range(c):
                out[oy, ox, ch] = img[sy, sx, ch]


@njit(cache=True, nogil=True)
def resize_bilinear(img, out, x0, x1, fx, y0, y1, fy):
    th, tw, c = out.shape
    for oy in range(th):
        ya = y0[oy]
        yb = y1[oy]
        wy = fy[oy]
        for ox in range(tw):
            xa = x0[ox]
            xb = x1[ox]
            wx = fx[ox]
            for ch in range(c):
                top = img[ya, xa, ch] + (img[ya, xb, ch] - img[ya, xa, ch]) * wx
                bot = img[yb, xa, ch] + (img[yb, xb, ch] - img[yb, xa, ch]) * wx
                out[oy, ox, ch] = np.float32(top + (bot - top) * wy)


@njit(cache=True, nogil=True)
def resize_bicubic(img, out, xidx, xw, yidx, yw):
    th, tw, c = out.shape
    for oy in range(th):
        for ox in range(tw):
            for ch in range(c):
                acc = 0.0
                for j in range(4):
                    row = 0.0
                    for i in range(4):
                        row += xw[ox, i] * img[yidx[oy, j], xidx[ox, i], ch]
                    acc += yw[oy, j] * row
                out[oy, ox, ch] = np.float32(acc)


@njit(cache=True, nogil=True)
def upsample_sub(img, small, out, x0, x1, fx, y0, y1, fy):
    """out = img - bilinear_upsample(small); one pass, no temporaries.

    Bit-identical to resize_bilinear followed by a float32 subtraction.
    """
    th, tw, c = out.shape
    for oy in range(th):
        ya = y0[oy]
        yb = y1[oy]
        wy = fy[oy]
        for ox in range(tw):
            xa = x0[ox]
            xb = x1[ox]
            wx = fx[ox]
            for ch in range(c):
                top = small[ya, xa, ch] + (small[ya, xb, ch] - small[ya, xa, ch]) * wx
                bot = small[yb, xa, ch] + (small[yb, xb, ch] - small[yb, xa, ch]) * wx
                out[oy, ox, ch] = img[oy, ox, ch] - np.float32(top + (bot - top) * wy)


@njit(cache=True, nogil=True)
def warp_coarse_field_add(img, cfield, x0, x1, fx, y0, y1, fy, rx, ry, out):
    """out += warp(img, upsample_field(cfield, img size)); one pass.

    The coarse (dx, dy) field is bilinearly sampled per pixel and rescaled by
    (rx, ry); rounding matches the unfused upsample_field -> warp -> add
    composition bit for bit.
    """
    h, w, c = img.shape
    for y in range(h):
        ya = y0[y]
        yb = y1[y]
        wy = fy[y]
        for x in range(w):
            xa = x0[x]
            xb = x1[x]
            wx = fx[x]
            t0 = cfield[ya, xa, 0] + (cfield[ya, xb, 0] - cfield[ya, xa, 0]) * wx
            b0 = cfield[yb, xa, 0] + (cfield[yb, xb, 0] - cfield[yb, xa, 0]) * wx
            dx = np.float32(t0 + (b0 - t0) * wy) * rx
            t1 = cfield[ya, xa, 1] + (cfield[ya, xb, 1] - cfield[ya, xa, 1]) * wx
            b1 = cfield[yb, xa, 1] + (cfield[yb, xb, 1] - cfield[yb, xa, 1]) * wx
            dy = np.float32(t1 + (b1 - t1) * wy) * ry
            sx = x + np.float64(dx)
            sy = y + np.float64(dy)
            if sx < 0.0:
                sx = 0.0
            elif sx > w - 1:
                sx = np.float64(w - 1)
            if sy < 0.0:
                sy = 0.0
            elif sy > h - 1:
                sy = np.float64(h - 1)
            ix0 = int(sx)
            iy0 = int(sy)
            ix1 = ix0 + 1 if ix0 + 1 < w else w - 1
            iy1 = iy0 + 1 if iy0 + 1 < h else h - 1
            gx = sx - ix0
            gy = sy - iy0
            for ch in range(c):
                tl = np.float64(img[iy0, ix0, ch])
                tr = np.float64(img[iy0, ix1, ch])
                bl = np.float64(img[iy1, ix0, ch])
                br = np.float64(img[iy1, ix1, ch])
                top = tl + (tr - tl) * gx
                bot = bl + (br - bl) * gx
                out[y, x, ch] = out[y, x, ch] + np.float32(top + (bot - top) * gy)


@njit(cache=True, nogil=True)
def clamp_count(data):
    """Clamp samples to [-1, 1] in place; returns how many were outside."""
    h, w, c = data.shape
    n = 0
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                v = data[y, x, ch]
                if v < np.float32(-1.0):
                    data[y, x, ch] = np.float32(-1.0)
                    n += 1
                elif v > np.float32(1.0):
                    data[y, x, ch] = np.float32(1.0)
                    n += 1
    return n


@njit(cache=True, nogil=True)
def warp_bilinear(img, dx, dy, out):
    h, w, c = img.shape
    for y in range(h):
        for x in range(w):
            sx = x + np.float64(dx[y, x])
            sy = y + np.float64(dy[y, x])
            if sx < 0.0:
                sx = 0.0
            elif sx > w - 1:
                sx = np.float64(w - 1)
            if sy < 0.0:
                sy = 0.0
            elif sy > h - 1:
                sy = np.float64(h - 1)
            x0 = int(sx)
            y0 = int(sy)
            x1 = x0 + 1 if x0 + 1 < w else w - 1
            y1 = y0 + 1 if y0 + 1 < h else h - 1
            fx = sx - x0
            fy = sy - y0
            for ch in range(c):
                tl = np.float64(img[y0, x0, ch])
                tr = np.float64(img[y0, x1, ch])
                bl = np.float64(img[y1, x0, ch])
                br = np.float64(img[y1, x1, ch])
                top = tl + (tr - tl) * fx
                bot = bl + (br - bl) * fx
                out[y, x, ch] = np.float32(top + (bot - top) * fy)


def warm_up():
    """Force JIT compilation of every kernel (cached on disk afterwards)."""
    img = np.zeros((2, 2, 1), dtype=np.float32)
    out = np.zeros((2, 2, 1), dtype=np.float32)
    block_mean(np.zeros((4, 4, 1), dtype=np.float32), out)
    resize_nearest(img, out, nearest_taps(2, 2), nearest_taps(2, 2))
    x0, x1, fx = linear_taps(2, 2)
    resize_bilinear(img, out, x0, x1, fx, x0, x1, fx)
    idx, wts = cubic_taps(2, 2)
    resize_bicubic(img, out, idx, wts, idx, wts)
    warp_bilinear(img, np.zeros((2, 2), np.float32), np.zeros((2, 2), np.float32), out)
    upsample_sub(img, img, out, x0, x1, fx, x0, x1, fx)
    warp_coarse_field_add(img, np.zeros((2, 2, 2), np.float32), x0, x1, fx,
                          x0, x1, fx, np.float32(1.0), np.float32(1.0), out)
    clamp_count(out)
