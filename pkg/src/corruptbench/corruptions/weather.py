"""Weather-like corruptions: plasma fog, frost overlay, snow, spatter."""

from __future__ import annotations

import math

import numpy as np

from corruptbench import assets
from corruptbench.corruptions.blur import line_kernel
from corruptbench.imaging import convolve2d, gaussian_filter, resize_bilinear, to_luminance


def diamond_square(exponent: int, decay: float, rng: np.random.Generator, amplitude: float = 1.0):
    """Midpoint-displacement height field on a ``(2**exponent + 1)``-square grid.

    Displacements at octave ``k`` are uniform in ``[-a_k, a_k]`` with
    ``a_k = amplitude / decay**k``. Returns the raw field together with the
    list of per-octave amplitudes that were used.
    """
    n = 2**exponent
    grid = np.zeros((n + 1, n + 1))
    amps = []
    amp = float(amplitude)
    step = n
    while step > 1:
        half = step // 2
        amps.append(amp)
        sub = grid[::half, ::half]  # view: corners at even, new points at odd indices
        m = sub.shape[0]

        # square step: cell centres from four diagonal corners
        corners = sub[0:-1:2, 0:-1:2] + sub[2::2, 0:-1:2] + sub[0:-1:2, 2::2] + sub[2::2, 2::2]
        sub[1::2, 1::2] = corners / 4 + rng.uniform(-amp, amp, size=corners.shape)

        # diamond step: edge midpoints from their (up to four) axial neighbours
        total = np.zeros((m, m))
        count = np.zeros((m, m))
        total[1:, :] += sub[:-1, :]
        count[1:, :] += 1
        total[:-1, :] += sub[1:, :]
        count[:-1, :] += 1
        total[:, 1:] += sub[:, :-1]
        count[:, 1:] += 1
        total[:, :-1] += sub[:, 1:]
        count[:, :-1] += 1
        idx = np.add.outer(np.arange(m), np.arange(m)) % 2 == 1
        noise = rng.uniform(-amp, amp, size=int(idx.sum()))
        sub[idx] = total[idx] / count[idx] + noise

        step = half
        amp /= decay
    return grid, amps


def plasma_fractal(height: int, width: int, decay: float, rng: np.random.Generator) -> np.ndarray:
    """Plasma field in [0, 1], cropped from the smallest covering 2**n + 1 grid."""
    exponent = max(1, math.ceil(math.log2(max(height, width, 2) - 1)))
    grid, _ = diamond_square(exponent, decay, rng)
    grid -= grid.min()
    peak = grid.max()
    if peak > 0:
        grid /= peak
    return grid[:height, :width]


def fog(x: np.ndarray, strength: float, decay: float, rng: np.random.Generator) -> np.ndarray:
    h, w = x.shape[:2]
    peak = x.max()
    field = plasma_fractal(h, w, decay, rng)[..., None]
    # rescaling by peak/(peak+strength) keeps the brightest pixel's level
    return np.clip((x + strength * field) * peak / (peak + strength), 0, 1)


def frost_layer(height: int, width: int, channels: int, rng: np.random.Generator) -> np.ndarray:
    """Random crop of a randomly chosen bundled frost texture, as a float raster.

    Textures smaller than the target are upscaled so their shorter side covers
    the larger image dimension.
    """
    textures = assets.frost_textures()
    tex = textures[int(rng.integers(len(textures)))]
    th, tw = tex.shape[:2]
    need = max(height, width)
    if th < height or tw < width:
        scale = need / min(th, tw)
        tw, th = max(width, int(math.ceil(tw * scale))), max(height, int(math.ceil(th * scale)))
        tex = resize_bilinear(tex, tw, th)
    top = int(rng.integers(0, th - height + 1))
    left = int(rng.integers(0, tw - width + 1))
    crop = tex[top : top + height, left : left + width].astype(np.float64) / 255.0
    if channels == 1:
        crop = to_luminance(crop)
    return crop


def frost(x: np.ndarray, image_weight: float, frost_weight: float, rng: np.random.Generator) -> np.ndarray:
    h, w, c = x.shape
    layer = frost_layer(h, w, c, rng)
    return np.clip(image_weight * x + frost_weight * layer, 0, 1)


def snow(
    x: np.ndarray,
    flake_mean: float,
    flake_std: float,
    flake_zoom: float,
    threshold: float,
    streak: float,
    blend: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sparse flakes, streaked by a line blur, over a brightened copy of the image."""
    h, w, c = x.shape
    sh = max(1, int(math.ceil(h / flake_zoom)))
    sw = max(1, int(math.ceil(w / flake_zoom)))
    flakes = rng.normal(flake_mean, flake_std, size=(sh, sw))
    flakes = resize_bilinear(flakes[..., None], w, h)
    flakes[flakes < threshold] = 0
    # flakes fall roughly downwards
    angle = float(rng.uniform(-135.0, -45.0))
    streak = min(streak, math.hypot(h, w))
    flakes = np.clip(convolve2d(flakes, line_kernel(streak, angle)), 0, 1)

    gray = to_luminance(x) if c == 3 else x
    lifted = blend * x + (1 - blend) * np.maximum(x, gray * 1.5 + 0.5)
    return np.clip(lifted + flakes + flakes[::-1, ::-1], 0, 1)


WATER = np.array([0.68, 0.86, 0.93])
MUD = np.array([0.25, 0.17, 0.08])


def spatter(
    x: np.ndarray, sigma: float, threshold: float, opacity: float, mud: bool, rng: np.random.Generator
) -> np.ndarray:
    """Composite liquid blobs taken from thresholded, smoothed white noise."""
    h, w, c = x.shape
    field = gaussian_filter(rng.normal(size=(h, w)), sigma)
    std = field.std()
    if std > 0:
        field = (field - field.mean()) / std
    # soft edge of half a std unit above the threshold
    mask = np.clip((field - threshold) / 0.5, 0, 1)
    mask = gaussian_filter(mask, 0.5 * sigma)[..., None]
    color = MUD if mud else WATER
    if c == 1:
        color = np.array([color @ np.array([0.299, 0.587, 0.114])])
    return np.clip(x * (1 - opacity * mask) + color * opacity * mask, 0, 1)
