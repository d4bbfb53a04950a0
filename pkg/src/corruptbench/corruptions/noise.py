"""Additive, count-limited, salt-and-pepper and multiplicative noise."""

from __future__ import annotations

import numpy as np


def add_gaussian_noise(x: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0:
        return x.copy()
    return np.clip(x + rng.normal(scale=sigma, size=x.shape), 0, 1)


def add_shot_noise(x: np.ndarray, photons: float, rng: np.random.Generator) -> np.ndarray:
    """Poisson sampling of ``x * photons`` counts, rescaled back to [0, 1]."""
    return np.clip(rng.poisson(x * photons) / photons, 0, 1)


def add_impulse_noise(x: np.ndarray, amount: float, rng: np.random.Generator) -> np.ndarray:
    """Replace a fraction ``amount`` of samples with 0 or 1 (equal odds).

    Channels are hit independently, as with the classic salt-and-pepper model.
    """
    hit = rng.random(x.shape) < amount
    salt = rng.random(x.shape) < 0.5
    out = x.copy()
    out[hit] = salt[hit].astype(np.float64)
    return out


def add_speckle_noise(x: np.ndarray, scale: float, rng: np.random.Generator) -> np.ndarray:
    return np.clip(x + x * rng.normal(scale=scale, size=x.shape), 0, 1)
