"""Blur kernels: disk (defocus), pixel shuffling (glass), line (motion), zoom, Gaussian."""

from __future__ import annotations

import math

import numpy as np

from corruptbench.imaging import convolve2d, gaussian_filter, resize_bilinear


def disk_kernel(radius: float) -> np.ndarray:
    """Normalised binary disk: all lattice points within ``radius`` of the centre."""
    r = int(math.floor(radius))
    t = np.arange(-r, r + 1)
    yy, xx = np.meshgrid(t, t, indexing="ij")
    disk = (xx**2 + yy**2 <= radius**2).astype(np.float64)
    return disk / disk.sum()


def line_kernel(length: float, angle_deg: float) -> np.ndarray:
    """Normalised straight-line kernel centred on the origin.

    Points are sampled densely along the segment and splatted bilinearly, so
    arbitrary angles give smooth kernels. ``length <= 1`` yields the identity.
    """
    if length <= 1:
        return np.ones((1, 1))
    half = length / 2.0
    radius = int(math.ceil(half))
    size = 2 * radius + 1
    theta = math.radians(angle_deg)
    n = int(math.ceil(length)) * 4 + 1
    t = np.linspace(-half, half, n)
    # image rows grow downwards; positive angles tilt the line upwards
    px = radius + t * math.cos(theta)
    py = radius - t * math.sin(theta)
    x0 = np.floor(px).astype(int)
    y0 = np.floor(py).astype(int)
    fx = px - x0
    fy = py - y0
    k = np.zeros((size, size))
    for dy, dx, w in (
        (0, 0, (1 - fy) * (1 - fx)),
        (0, 1, (1 - fy) * fx),
        (1, 0, fy * (1 - fx)),
        (1, 1, fy * fx),
    ):
        yy = np.clip(y0 + dy, 0, size - 1)
        xx = np.clip(x0 + dx, 0, size - 1)
        np.add.at(k, (yy, xx), w)
    return k / k.sum()


def defocus(x: np.ndarray, radius: float) -> np.ndarray:
    h, w = x.shape[:2]
    radius = min(radius, max(h, w))
    if radius < 1:
        return x.copy()
    return np.clip(convolve2d(x, disk_kernel(radius)), 0, 1)


def local_shuffle(x: np.ndarray, max_delta: int, iterations: int, rng: np.random.Generator) -> np.ndarray:
    """Swap every pixel with a random partner at most ``max_delta`` away, ``iterations`` times.

    Swaps are issued on a lattice of stride ``2 * max_delta + 1`` so that the
    neighbourhoods of one batch never overlap and each batch is one vectorised
    exchange; the lattice phase then sweeps the whole image.
    """
    out = x.copy()
    h, w = out.shape[:2]
    d = int(max_delta)
    if d < 1:
        return out
    stride = 2 * d + 1
    for _ in range(iterations):
        for py in range(stride):
            ys = np.arange(py, h, stride)
            if ys.size == 0:
                continue
            for px in range(stride):
                xs = np.arange(px, w, stride)
                if xs.size == 0:
                    continue
                gy, gx = np.meshgrid(ys, xs, indexing="ij")
                ty = np.clip(gy + rng.integers(-d, d + 1, size=gy.shape), 0, h - 1)
                tx = np.clip(gx + rng.integers(-d, d + 1, size=gx.shape), 0, w - 1)
                a = out[gy, gx].copy()
                out[gy, gx] = out[ty, tx]
                out[ty, tx] = a
    return out


def glass(x: np.ndarray, sigma: float, max_delta: int, iterations: int, rng: np.random.Generator) -> np.ndarray:
    h, w = x.shape[:2]
    max_delta = min(int(max_delta), max(h, w) - 1)
    out = gaussian_filter(x, sigma)
    out = local_shuffle(out, max_delta, iterations, rng)
    return np.clip(gaussian_filter(out, sigma), 0, 1)


def motion(x: np.ndarray, length: float, angle_deg: float) -> np.ndarray:
    h, w = x.shape[:2]
    length = min(length, math.hypot(h, w))
    kernel = line_kernel(length, angle_deg)
    if kernel.size == 1:
        return x.copy()
    return np.clip(convolve2d(x, kernel), 0, 1)


def clipped_zoom(x: np.ndarray, factor: float) -> np.ndarray:
    """Enlarge the central ``1/factor`` crop back to the full frame."""
    h, w = x.shape[:2]
    ch = max(1, int(math.ceil(h / factor)))
    cw = max(1, int(math.ceil(w / factor)))
    top = (h - ch) // 2
    left = (w - cw) // 2
    crop = x[top : top + ch, left : left + cw]
    return resize_bilinear(crop, w, h)


def zoom_ladder(max_zoom: float, step: float) -> np.ndarray:
    """Arithmetic ladder ``1, 1 + step, ...`` up to and including ``max_zoom``."""
    n = int(round((max_zoom - 1.0) / step))
    return 1.0 + step * np.arange(n + 1)


def zoom(x: np.ndarray, max_zoom: float, step: float) -> np.ndarray:
    ladder = zoom_ladder(max_zoom, step)
    acc = np.zeros_like(x)
    for factor in ladder:
        acc += x if factor == 1.0 else clipped_zoom(x, factor)
    return np.clip(acc / len(ladder), 0, 1)


def gaussian(x: np.ndarray, sigma: float) -> np.ndarray:
    return np.clip(gaussian_filter(x, sigma), 0, 1)
