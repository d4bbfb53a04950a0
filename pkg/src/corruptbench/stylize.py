"""Adaptive instance normalization (AdaIN) on channel-first feature tensors.

A feature tensor is a ``(C, H, W)`` float array (any trailing spatial shape
works). :func:`adain` re-targets each content channel's mean and standard
deviation to those of the style. :func:`stylize_image` applies the same
operation in pixel space, treating an RGB image as a 3-channel tensor, which
amounts to a colour-statistics transfer.

>>> import numpy as np
>>> mu, sigma = channel_stats(np.array([[0.0, 2.0]]))
>>> float(mu[0]), round(float(sigma[0]), 6)
(1.0, 1.000005)
"""

from __future__ import annotations

import numpy as np

from corruptbench.imaging import as_image, from_float, to_float

EPS = 1e-5


def _as_tensor(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim < 2:
        raise ValueError(f"feature tensor needs a channel axis and spatial axes, got shape {t.shape}")
    if t[0].size < 2:
        raise ValueError("feature tensor needs at least two spatial positions per channel")
    if not np.all(np.isfinite(t)):
        raise ValueError("feature tensor contains non-finite values")
    return t


def channel_stats(t, eps: float = EPS) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and ``sqrt(population variance + eps)``."""
    t = _as_tensor(t)
    flat = t.reshape(t.shape[0], -1)
    mu = flat.mean(axis=1)
    sigma = np.sqrt(flat.var(axis=1) + eps)
    return mu, sigma


def adain(content, style, alpha: float = 1.0, eps: float = EPS) -> np.ndarray:
    """Normalize ``content`` per channel and rescale it to the statistics of ``style``.

    The result is ``alpha * adain + (1 - alpha) * content``; spatial sizes of
    content and style may differ but channel counts must agree.
    """
    content, style = _as_tensor(content), _as_tensor(style)
    if content.shape[0] != style.shape[0]:
        raise ValueError(f"channel mismatch: content has {content.shape[0]}, style has {style.shape[0]}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return content.copy()
    expand = (slice(None),) + (None,) * (content.ndim - 1)
    mu_c, sd_c = channel_stats(content, eps)
    mu_s, sd_s = channel_stats(style, eps)
    out = (content - mu_c[expand]) / sd_c[expand] * sd_s[expand] + mu_s[expand]
    if alpha == 1.0:
        return out
    return alpha * out + (1.0 - alpha) * content


def stylize_image(content, style, alpha: float = 1.0) -> np.ndarray:
    """Pixel-space AdaIN: transfer per-channel colour statistics from ``style`` to ``content``.

    Both are uint8 images; grayscale and RGB mixes are resolved by replicating
    the grayscale image to three channels. The output has the content's
    shape unless the style is colour and the content is grayscale, in which
    case it is RGB.
    """
    c, s = as_image(content), as_image(style)
    if c.shape[2] != s.shape[2]:
        c = np.repeat(c, 3, axis=2) if c.shape[2] == 1 else c
        s = np.repeat(s, 3, axis=2) if s.shape[2] == 1 else s
    out = adain(np.moveaxis(to_float(c), 2, 0), np.moveaxis(to_float(s), 2, 0), alpha)
    return from_float(np.moveaxis(out, 0, 2))
