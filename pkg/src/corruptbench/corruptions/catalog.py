"""Corruption names, groups and the five-level severity table.

Every numeric parameter used by a corruption kernel lives in ``SEVERITY_TABLE``.
Benchmark scores are only comparable between runs that share the same table,
which is why :func:`table_hash` is recorded in manifests and reports.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

BENCHMARK_GROUPS = {
    "noise": ("gaussian_noise", "shot_noise", "impulse_noise"),
    "blur": ("defocus_blur", "glass_blur", "motion_blur", "zoom_blur"),
    "weather": ("snow", "frost", "fog", "brightness"),
    "digital": ("contrast", "elastic_transform", "pixelate", "jpeg_compression"),
}

VALIDATION_GROUPS = {
    "noise": ("speckle_noise",),
    "blur": ("gaussian_blur",),
    "weather": ("spatter",),
    "digital": ("saturate",),
}

BENCHMARK_CORRUPTIONS = tuple(name for names in BENCHMARK_GROUPS.values() for name in names)
VALIDATION_CORRUPTIONS = tuple(name for names in VALIDATION_GROUPS.values() for name in names)
ALL_CORRUPTIONS = BENCHMARK_CORRUPTIONS + VALIDATION_CORRUPTIONS

GROUP_OF = {
    name: group
    for groups in (BENCHMARK_GROUPS, VALIDATION_GROUPS)
    for group, names in groups.items()
    for name in names
}

SEVERITIES = (1, 2, 3, 4, 5)

# Parameters are per severity level 1..5. Units: intensities are on the [0, 1]
# scale, lengths in pixels unless a name ends in ``_frac`` (fraction of the
# shorter image side).
SEVERITY_TABLE = {
    # noise std
    "gaussian_noise": (0.08, 0.12, 0.18, 0.26, 0.38),
    # photon budget per unit intensity
    "shot_noise": (60, 25, 12, 5, 3),
    # fraction of samples set to 0 or 1
    "impulse_noise": (0.03, 0.06, 0.09, 0.17, 0.27),
    # multiplicative noise std
    "speckle_noise": (0.35, 0.45, 0.6, 0.8, 1.0),
    # disk radius
    "defocus_blur": (3, 4, 6, 8, 10),
    # (sigma, max_delta, iterations)
    "glass_blur": ((0.7, 1, 2), (0.9, 2, 1), (1.0, 2, 3), (1.1, 3, 2), (1.5, 4, 2)),
    # line length
    "motion_blur": (6, 10, 16, 24, 32),
    # (max zoom, ladder step)
    "zoom_blur": ((1.10, 0.01), (1.15, 0.01), (1.20, 0.02), (1.25, 0.02), (1.30, 0.03)),
    # sigma
    "gaussian_blur": (1, 2, 3, 4, 6),
    # (flake mean, flake std, flake zoom, threshold, streak length, image blend)
    "snow": (
        (0.1, 0.3, 3.0, 0.5, 10, 0.8),
        (0.2, 0.3, 2.0, 0.55, 12, 0.7),
        (0.55, 0.3, 4.0, 0.9, 12, 0.65),
        (0.55, 0.3, 4.5, 0.85, 12, 0.6),
        (0.55, 0.3, 2.5, 0.85, 12, 0.5),
    ),
    # (image weight, frost weight)
    "frost": ((0.9, 0.35), (0.8, 0.45), (0.7, 0.55), (0.6, 0.65), (0.5, 0.75)),
    # (haze strength, plasma decay)
    "fog": ((1.0, 2.0), (1.5, 2.0), (2.2, 1.9), (3.2, 1.8), (6.0, 1.7)),
    # (blob sigma, threshold in field std units, opacity, mud)
    "spatter": (
        (2.0, 1.6, 0.6, False),
        (2.0, 1.3, 0.7, False),
        (2.5, 1.1, 0.75, False),
        (3.0, 0.6, 0.85, True),
        (3.0, 0.3, 0.95, True),
    ),
    # HSV value offset
    "brightness": (0.1, 0.2, 0.3, 0.4, 0.5),
    # scale about the per-channel mean
    "contrast": (0.4, 0.3, 0.2, 0.1, 0.05),
    # (HSV saturation gain, offset)
    "saturate": ((1.5, 0.0), (2.0, 0.0), (3.0, 0.05), (5.0, 0.1), (10.0, 0.2)),
    # (rms displacement frac, smoothing frac, affine jitter frac)
    "elastic_transform": (
        (0.006, 0.03, 0.005),
        (0.010, 0.03, 0.010),
        (0.014, 0.025, 0.015),
        (0.018, 0.02, 0.020),
        (0.024, 0.02, 0.025),
    ),
    # downsampling factor
    "pixelate": (0.6, 0.5, 0.4, 0.3, 0.25),
    # JPEG quality
    "jpeg_compression": (25, 18, 15, 10, 7),
}


@dataclass(frozen=True)
class CorruptionSpec:
    """A corruption name plus severity; severity 0 means clean data."""

    name: str
    severity: int

    def __post_init__(self):
        if self.name not in GROUP_OF:
            raise ValueError(f"unknown corruption {self.name!r}")
        if not isinstance(self.severity, (int,)) or not 0 <= self.severity <= 5:
            raise ValueError(f"severity must be an integer in 0..5, got {self.severity!r}")

    @property
    def group(self) -> str:
        return GROUP_OF[self.name]

    @property
    def is_validation(self) -> bool:
        return self.name in VALIDATION_CORRUPTIONS


def params(name: str, severity: int):
    """Look up the severity-table entry for ``name`` at level ``severity`` (1..5)."""
    if name not in SEVERITY_TABLE:
        raise ValueError(f"unknown corruption {name!r}")
    if severity not in SEVERITIES:
        raise ValueError(f"severity must be in 1..5, got {severity!r}")
    return SEVERITY_TABLE[name][severity - 1]


def table_hash() -> str:
    """SHA-256 over a canonical JSON dump of the severity table."""
    blob = json.dumps(SEVERITY_TABLE, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
