"""Image buffers, colour/geometry primitives and seeded randomness.

Images are plain ``numpy`` arrays of shape ``(H, W, C)`` with ``C`` in ``{1, 3}``
and dtype ``uint8``. Corruption kernels work on float rasters in ``[0, 1]`` and
re-quantize with :func:`from_float`.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

__all__ = [
    "as_image",
    "to_float",
    "from_float",
    "resize_bilinear",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "to_luminance",
    "gaussian_kernel1d",
    "gaussian_filter",
    "convolve2d",
    "derive_seed",
    "seeded_rng",
    "read_image",
    "write_image",
]

# ITU-R BT.601 luma weights, as used by PIL's "L" conversion.
LUMA = np.array([0.299, 0.587, 0.114])


def as_image(img) -> np.ndarray:
    """Validate and normalise an image to an ``(H, W, C)`` uint8 array.

    2-D input is treated as grayscale; a fourth (alpha) channel is dropped.
    """
    arr = np.asarray(img)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"expected an (H, W) or (H, W, C) array, got shape {arr.shape}")
    if arr.shape[2] == 4:
        arr = arr[:, :, :3]
    if arr.shape[2] not in (1, 3):
        raise ValueError(f"expected 1 or 3 channels, got {arr.shape[2]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got {arr.shape[1]}x{arr.shape[0]}")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"expected 8-bit intensities, got dtype {arr.dtype}")
    return arr


def to_float(img) -> np.ndarray:
    """Map 8-bit intensities to float64 values in [0, 1]."""
    return as_image(img).astype(np.float64) / 255.0


def from_float(raster) -> np.ndarray:
    """Clamp to [0, 1], scale by 255 and round half-to-even into uint8."""
    x = np.clip(np.asarray(raster, dtype=np.float64), 0.0, 1.0) * 255.0
    # np.rint rounds half to even
    return np.rint(x).astype(np.uint8)


def _bilinear_axis(n_in: int, n_out: int):
    # half-pixel centres; source coordinates clamped to the valid range
    scale = n_in / n_out
    src = (np.arange(n_out) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, frac


def resize_bilinear(img, new_w: int, new_h: int) -> np.ndarray:
    """Bilinear resize with half-pixel centres.

    Accepts uint8 images (returns uint8) or float rasters (returns float64).
    Resizing to the source size is the exact identity.
    """
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target size must be positive, got {new_w}x{new_h}")
    arr = np.asarray(img)
    is_uint8 = arr.dtype == np.uint8
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    h, w = arr.shape[:2]
    if (h, w) == (new_h, new_w):
        out = arr.copy()
        return out[:, :, 0] if squeeze else out

    x = arr.astype(np.float64)
    ylo, yhi, yf = _bilinear_axis(h, new_h)
    xlo, xhi, xf = _bilinear_axis(w, new_w)
    # separable: interpolate rows first, then columns
    yf = yf[:, None, None]
    xf = xf[None, :, None]
    rows = np.take(x, ylo, axis=0) * (1 - yf) + np.take(x, yhi, axis=0) * yf
    out = np.take(rows, xlo, axis=1) * (1 - xf) + np.take(rows, xhi, axis=1) * xf
    if is_uint8:
        out = np.rint(np.clip(out, 0, 255)).astype(np.uint8)
    return out[:, :, 0] if squeeze else out


def rgb_to_hsv(raster) -> np.ndarray:
    """Hexcone RGB -> HSV for float rasters in [0, 1]; H is in [0, 1)."""
    rgb = np.asarray(raster, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ValueError(f"rgb_to_hsv needs 3 channels, got {rgb.shape[-1]}")
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = v - mn
    s = np.where(v > 0, delta / np.where(v > 0, v, 1.0), 0.0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.zeros_like(v)
    rmax = (v == r) & (delta > 0)
    gmax = (v == g) & (delta > 0) & ~rmax
    bmax = (delta > 0) & ~rmax & ~gmax
    h = np.where(rmax, ((g - b) / safe) % 6.0, h)
    h = np.where(gmax, (b - r) / safe + 2.0, h)
    h = np.where(bmax, (r - g) / safe + 4.0, h)
    h = (h / 6.0) % 1.0
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(raster) -> np.ndarray:
    """Inverse of :func:`rgb_to_hsv`."""
    hsv = np.asarray(raster, dtype=np.float64)
    if hsv.shape[-1] != 3:
        raise ValueError(f"hsv_to_rgb needs 3 channels, got {hsv.shape[-1]}")
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h6 = (h % 1.0) * 6.0
    sector = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1 - s)
    q = v * (1 - s * f)
    t = v * (1 - s * (1 - f))
    choices_r = [v, q, p, p, t, v]
    choices_g = [t, v, v, q, p, p]
    choices_b = [p, p, t, v, v, q]
    r = np.choose(sector, choices_r)
    g = np.choose(sector, choices_g)
    b = np.choose(sector, choices_b)
    return np.stack([r, g, b], axis=-1)


def to_luminance(raster) -> np.ndarray:
    """Collapse an (H, W, 3) float raster to (H, W, 1) luma."""
    x = np.asarray(raster, dtype=np.float64)
    return (x @ LUMA)[..., None]


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalised 1-D Gaussian taps truncated at radius ceil(3*sigma)."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return np.ones(1)
    radius = math.ceil(3 * sigma)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_filter(raster, sigma: float) -> np.ndarray:
    """Separable Gaussian blur over the two spatial axes.

    Boundaries are mirrored without repeating the edge sample.
    """
    kernel = gaussian_kernel1d(sigma)
    x = np.asarray(raster, dtype=np.float64)
    if kernel.size == 1:
        return x.copy()
    out = ndimage.correlate1d(x, kernel, axis=0, mode="mirror")
    return ndimage.correlate1d(out, kernel, axis=1, mode="mirror")


def convolve2d(raster, kernel) -> np.ndarray:
    """Correlate every channel of an (H, W, C) raster with a 2-D kernel.

    Uses FFTs on a mirror-padded copy, so large kernels stay cheap.
    """
    from scipy.signal import fftconvolve

    x = np.asarray(raster, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    kh, kw = k.shape
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x, ((ph, kh - 1 - ph), (pw, kw - 1 - pw), (0, 0)), mode="reflect")
    # fftconvolve flips the kernel; flip it back to correlate
    flipped = k[::-1, ::-1][:, :, None]
    return fftconvolve(padded, flipped, mode="valid", axes=(0, 1))


def derive_seed(seed: int, image_id: str = "", corruption: str = "", severity: int = 0) -> int:
    """Stable 64-bit seed from the derivation tuple (BLAKE2b, first 8 bytes)."""
    key = f"{int(seed)}\x1f{image_id}\x1f{corruption}\x1f{int(severity)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def seeded_rng(seed: int, image_id: str = "", corruption: str = "", severity: int = 0) -> np.random.Generator:
    """A PCG64 generator seeded from :func:`derive_seed`."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, image_id, corruption, severity)))


def read_image(path) -> np.ndarray:
    """Read a PNG/JPEG as an (H, W, C) uint8 array; alpha is dropped."""
    with Image.open(path) as im:
        if im.mode in ("L", "RGB"):
            arr = np.asarray(im)
        elif im.mode in ("LA", "I;16", "I", "F", "1"):
            arr = np.asarray(im.convert("L"))
        else:
            arr = np.asarray(im.convert("RGB"))
    return as_image(arr)


def write_image(path, img) -> None:
    """Write an image; format follows the file suffix."""
    arr = as_image(img)
    path = Path(path)
    mode = "L" if arr.shape[2] == 1 else "RGB"
    data = arr[:, :, 0] if mode == "L" else arr
    im = Image.fromarray(data, mode=mode)
    if path.suffix.lower() in (".jpg", ".jpeg"):
        im.save(path, quality=95)
    else:
        im.save(path)
