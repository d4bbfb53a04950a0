"""Photometric and encoding corruptions, plus the elastic warp."""

from __future__ import annotations

import io
import math

import numpy as np
from PIL import Image
from scipy import ndimage

from corruptbench.imaging import from_float, gaussian_filter, hsv_to_rgb, resize_bilinear, rgb_to_hsv


def brightness(x: np.ndarray, offset: float) -> np.ndarray:
    hsv = rgb_to_hsv(x)
    hsv[..., 2] = np.clip(hsv[..., 2] + offset, 0, 1)
    return np.clip(hsv_to_rgb(hsv), 0, 1)


def saturate(x: np.ndarray, gain: float, offset: float) -> np.ndarray:
    hsv = rgb_to_hsv(x)
    hsv[..., 1] = np.clip(hsv[..., 1] * gain + offset, 0, 1)
    return np.clip(hsv_to_rgb(hsv), 0, 1)


def contrast(x: np.ndarray, factor: float) -> np.ndarray:
    means = x.mean(axis=(0, 1), keepdims=True)
    return np.clip((x - means) * factor + means, 0, 1)


def _smooth_field(h: int, w: int, smooth: float, rng: np.random.Generator) -> np.ndarray:
    # Drawn on a coarse grid (about 4 px per smoothing length) and upsampled,
    # which keeps large smoothing scales cheap on big images.
    cell = max(smooth / 4.0, 1.0)
    gh, gw = max(2, int(math.ceil(h / cell))), max(2, int(math.ceil(w / cell)))
    field = gaussian_filter(rng.uniform(-1, 1, size=(gh, gw)), smooth / cell)
    field = resize_bilinear(field, w, h)
    std = field.std()
    return field / std if std > 0 else field


def elastic_warp(
    x: np.ndarray,
    displacement: float,
    smooth: float,
    affine: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Warp by a random affine map plus a smooth random displacement field.

    ``displacement`` is the RMS of each displacement component in pixels,
    ``smooth`` the field's Gaussian correlation length in pixels, and
    ``affine`` the maximum jitter (pixels) of the three anchor points that
    define the affine part. All-zero parameters give the identity.
    """
    h, w, c = x.shape
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")

    if affine > 0:
        # anchors: centre and two points a third of the short side away
        cy, cx = (h - 1) / 2, (w - 1) / 2
        r = min(h, w) / 3
        src = np.array([[cy, cx], [cy - r, cx], [cy, cx + r]])
        dst = src + rng.uniform(-affine, affine, size=src.shape)
        # solve dst -> src so we can pull samples from the source
        a = np.hstack([dst, np.ones((3, 1))])
        coef = np.linalg.lstsq(a, src, rcond=None)[0]
        sy = coef[0, 0] * yy + coef[1, 0] * xx + coef[2, 0]
        sx = coef[0, 1] * yy + coef[1, 1] * xx + coef[2, 1]
    else:
        sy, sx = yy, xx

    if displacement > 0:
        sy = sy + displacement * _smooth_field(h, w, smooth, rng)
        sx = sx + displacement * _smooth_field(h, w, smooth, rng)

    out = np.empty_like(x)
    for ch in range(c):
        out[..., ch] = ndimage.map_coordinates(x[..., ch], [sy, sx], order=1, mode="mirror")
    return np.clip(out, 0, 1)


def elastic(x: np.ndarray, displacement_frac: float, smooth_frac: float, affine_frac: float, rng) -> np.ndarray:
    side = min(x.shape[:2])
    return elastic_warp(x, displacement_frac * side, max(smooth_frac * side, 1.0), affine_frac * side, rng)


def _pil(x: np.ndarray) -> Image.Image:
    arr = from_float(x)
    if arr.shape[2] == 1:
        return Image.fromarray(arr[:, :, 0], mode="L")
    return Image.fromarray(arr, mode="RGB")


def _from_pil(im: Image.Image, channels: int) -> np.ndarray:
    arr = np.asarray(im, dtype=np.float64) / 255.0
    if channels == 1:
        arr = arr[..., None]
    return arr


def pixelate(x: np.ndarray, factor: float) -> np.ndarray:
    h, w, c = x.shape
    small = (max(1, int(w * factor)), max(1, int(h * factor)))
    im = _pil(x).resize(small, Image.Resampling.BOX).resize((w, h), Image.Resampling.BOX)
    return _from_pil(im, c)


def jpeg(x: np.ndarray, quality: int) -> np.ndarray:
    buf = io.BytesIO()
    _pil(x).save(buf, format="JPEG", quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as im:
        im.load()
        return _from_pil(im, x.shape[2])
