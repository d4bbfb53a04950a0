"""The 15 benchmark corruptions and 4 validation corruptions.

Each ``<name>(img, severity, rng)`` function takes an ``(H, W, C)`` uint8 image,
a severity in 1..5 and a ``numpy.random.Generator`` and returns a uint8 image
of the same shape. :func:`corrupt` is the seeded entry point used by the CLI.

>>> import numpy as np
>>> from corruptbench.corruptions import corrupt
>>> img = np.full((32, 48, 3), 128, dtype=np.uint8)
>>> corrupt(img, "fog", 3, seed=0).shape
(32, 48, 3)
"""

from __future__ import annotations

import numpy as np

from corruptbench.corruptions import blur, digital, noise, weather
from corruptbench.corruptions.catalog import (
    ALL_CORRUPTIONS,
    BENCHMARK_CORRUPTIONS,
    BENCHMARK_GROUPS,
    GROUP_OF,
    SEVERITIES,
    SEVERITY_TABLE,
    VALIDATION_CORRUPTIONS,
    VALIDATION_GROUPS,
    CorruptionSpec,
    params,
    table_hash,
)
from corruptbench.imaging import as_image, from_float, seeded_rng, to_float, to_luminance

__all__ = [
    "ALL_CORRUPTIONS",
    "BENCHMARK_CORRUPTIONS",
    "BENCHMARK_GROUPS",
    "GROUP_OF",
    "SEVERITIES",
    "SEVERITY_TABLE",
    "VALIDATION_CORRUPTIONS",
    "VALIDATION_GROUPS",
    "CorruptionSpec",
    "corrupt",
    "get_corruption",
    "params",
    "table_hash",
    *ALL_CORRUPTIONS,
]


def _color_only(fn, x):
    # colour-space kernels run on replicated gray and collapse back to luma
    if x.shape[2] == 3:
        return fn(x)
    return to_luminance(fn(np.repeat(x, 3, axis=2)))


def gaussian_noise(img, severity, rng):
    return from_float(noise.add_gaussian_noise(to_float(img), params("gaussian_noise", severity), rng))


def shot_noise(img, severity, rng):
    return from_float(noise.add_shot_noise(to_float(img), params("shot_noise", severity), rng))


def impulse_noise(img, severity, rng):
    return from_float(noise.add_impulse_noise(to_float(img), params("impulse_noise", severity), rng))


def speckle_noise(img, severity, rng):
    return from_float(noise.add_speckle_noise(to_float(img), params("speckle_noise", severity), rng))


def defocus_blur(img, severity, rng):
    return from_float(blur.defocus(to_float(img), params("defocus_blur", severity)))


def glass_blur(img, severity, rng):
    sigma, delta, iterations = params("glass_blur", severity)
    return from_float(blur.glass(to_float(img), sigma, delta, iterations, rng))


# motion direction is drawn uniformly from this range (degrees)
MOTION_ANGLE_RANGE = (-45.0, 45.0)


def motion_blur(img, severity, rng):
    angle = float(rng.uniform(*MOTION_ANGLE_RANGE))
    return from_float(blur.motion(to_float(img), params("motion_blur", severity), angle))


def zoom_blur(img, severity, rng):
    return from_float(blur.zoom(to_float(img), *params("zoom_blur", severity)))


def gaussian_blur(img, severity, rng):
    return from_float(blur.gaussian(to_float(img), params("gaussian_blur", severity)))


def snow(img, severity, rng):
    return from_float(weather.snow(to_float(img), *params("snow", severity), rng=rng))


def frost(img, severity, rng):
    return from_float(weather.frost(to_float(img), *params("frost", severity), rng=rng))


def fog(img, severity, rng):
    return from_float(weather.fog(to_float(img), *params("fog", severity), rng=rng))


def spatter(img, severity, rng):
    return from_float(weather.spatter(to_float(img), *params("spatter", severity), rng=rng))


def brightness(img, severity, rng):
    offset = params("brightness", severity)
    return from_float(_color_only(lambda x: digital.brightness(x, offset), to_float(img)))


def contrast(img, severity, rng):
    return from_float(digital.contrast(to_float(img), params("contrast", severity)))


def saturate(img, severity, rng):
    gain, offset = params("saturate", severity)
    return from_float(_color_only(lambda x: digital.saturate(x, gain, offset), to_float(img)))


def elastic_transform(img, severity, rng):
    return from_float(digital.elastic(to_float(img), *params("elastic_transform", severity), rng=rng))


def pixelate(img, severity, rng):
    return from_float(digital.pixelate(to_float(img), params("pixelate", severity)))


def jpeg_compression(img, severity, rng):
    return from_float(digital.jpeg(to_float(img), params("jpeg_compression", severity)))


_KERNELS = {name: globals()[name] for name in ALL_CORRUPTIONS}


def get_corruption(name: str):
    """Return the severity-level kernel for ``name``."""
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown corruption {name!r}; expected one of {', '.join(ALL_CORRUPTIONS)}") from None


def corrupt(image, name, severity: int | None = None, seed: int = 0, image_id: str = "") -> np.ndarray:
    """Apply one corruption with a generator derived from ``(seed, image_id, name, severity)``.

    ``name`` may also be a :class:`CorruptionSpec`, in which case ``severity``
    is taken from it. Severity 0 returns the input unchanged, as do 1x1 images.
    """
    if isinstance(name, CorruptionSpec):
        spec = name
    else:
        get_corruption(name)
        spec = CorruptionSpec(name, 0 if severity is None else severity)
    img = as_image(image)
    if spec.severity == 0 or img.shape[:2] == (1, 1):
        return img.copy()
    rng = seeded_rng(seed, image_id, spec.name, spec.severity)
    out = _KERNELS[spec.name](img, spec.severity, rng)
    assert out.shape == img.shape and out.dtype == np.uint8
    return out
