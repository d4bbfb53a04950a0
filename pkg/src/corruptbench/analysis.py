"""Corruption impact analysis: RMSE and SSIM against clean images versus rPC.

For each corruption the corpus is corrupted at every severity, the mean RMSE
and SSIM to the clean images are taken over images and severities, and these
are correlated with the per-corruption relative performance of a model.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from corruptbench.benchmark import PerformanceGrid
from corruptbench.corruptions import GROUP_OF, SEVERITIES, corrupt
from corruptbench.imaging import as_image

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
DATA_RANGE = 255.0
C1 = (0.01 * DATA_RANGE) ** 2
C2 = (0.03 * DATA_RANGE) ** 2


class ConstantSeriesError(ValueError):
    """A correlation was requested for a series with zero variance."""


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def rmse(a, b) -> float:
    """Root mean square difference over all pixels and channels, in 0..255 units."""
    a, b = _pair(a, b)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def _ssim_window() -> np.ndarray:
    r = SSIM_WINDOW // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / SSIM_SIGMA) ** 2)
    return k / k.sum()


def _local_mean(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    # separable weighted mean, keeping only windows fully inside the image
    r = len(k) // 2
    out = ndimage.correlate1d(x, k, axis=0, mode="constant")
    out = ndimage.correlate1d(out, k, axis=1, mode="constant")
    return out[r:-r, r:-r]


def ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-window SSIM for two single-channel float rasters (valid windows only)."""
    k = _ssim_window()
    mu_a, mu_b = _local_mean(a, k), _local_mean(b, k)
    var_a = _local_mean(a * a, k) - mu_a**2
    var_b = _local_mean(b * b, k) - mu_b**2
    cov = _local_mean(a * b, k) - mu_a * mu_b
    num = (2 * mu_a * mu_b + C1) * (2 * cov + C2)
    den = (mu_a**2 + mu_b**2 + C1) * (var_a + var_b + C2)
    return num / den


def ssim(a, b) -> float:
    """Structural similarity with an 11x11 Gaussian window (sigma 1.5) on the 0..255 scale.

    Images are ``(H, W)`` or ``(H, W, C)``; the score is the mean over valid
    windows, averaged over channels.
    """
    a, b = _pair(a, b)
    if a.ndim == 2:
        a, b = a[..., None], b[..., None]
    if a.shape[0] < SSIM_WINDOW or a.shape[1] < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape[:2]}")
    if np.array_equal(a, b):
        return 1.0
    return float(np.mean([ssim_map(a[..., c], b[..., c]).mean() for c in range(a.shape[2])]))


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-D series of equal length")
    if len(x) < 2:
        raise ValueError("pearson needs at least two points")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(np.sum(dx * dx)), np.sqrt(np.sum(dy * dy))
    if sx == 0 or sy == 0:
        raise ConstantSeriesError("correlation undefined for a constant series")
    return float(np.clip(np.sum(dx * dy) / (sx * sy), -1.0, 1.0))


# --------------------------------------------------------------- impact table


def severity_profile(corpus, name: str, seed: int = 0, severities=SEVERITIES) -> dict[int, tuple[float, float]]:
    """Corpus-mean (RMSE, SSIM) of corruption ``name`` at each severity.

    ``corpus`` is a sequence of ``(image_id, image)`` pairs; the image id seeds
    the per-image generator, so results do not depend on corpus order.
    """
    items = sorted(corpus, key=lambda item: item[0])
    if not items:
        raise ValueError("empty corpus")
    out = {}
    for s in severities:
        r, q = [], []
        for image_id, img in items:
            clean = as_image(img)
            noisy = corrupt(clean, name, s, seed=seed, image_id=image_id)
            r.append(rmse(clean, noisy))
            q.append(ssim(clean, noisy))
        out[s] = (float(np.mean(r)), float(np.mean(q)))
    return out


@dataclass
class CorruptionImpact:
    corruption: str
    group: str
    rmse: float
    ssim: float
    rpc: float


@dataclass
class ImpactTable:
    rows: list[CorruptionImpact]
    pearson_rmse: float
    pearson_ssim: float
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["corruption", "group", "rmse", "ssim", "rpc"])
        for r in self.rows:
            w.writerow([r.corruption, r.group, f"{r.rmse:.6f}", f"{r.ssim:.6f}", f"{r.rpc:.6f}"])
        w.writerow(["pearson_rmse", "", "", "", f"{self.pearson_rmse:.6f}"])
        w.writerow(["pearson_ssim", "", "", "", f"{self.pearson_ssim:.6f}"])
        return buf.getvalue()


def corruption_rpc(grid: PerformanceGrid, name: str) -> float:
    """Severity-mean performance under ``name`` relative to clean performance, in percent."""
    if not grid.p_clean:
        raise ValueError("grid has no positive clean performance")
    store = grid.cells if (name, SEVERITIES[0]) in grid.cells else grid.validation
    try:
        vals = [store[(name, s)] for s in SEVERITIES]
    except KeyError:
        raise ValueError(f"grid lacks results for {name!r}") from None
    return 100.0 * float(np.mean(vals)) / grid.p_clean


def impact_table(corpus, grid: PerformanceGrid, corruptions=None, seed: int = 0) -> ImpactTable:
    """Per-corruption RMSE, SSIM and rPC, plus the two rPC correlations.

    RMSE and SSIM are averaged over corpus images and all five severities.
    ``corruptions`` defaults to the grid's benchmark corruptions.

    Raises:
        ValueError: empty corpus or a corruption missing from the grid.
        ConstantSeriesError: when rPC (or a distortion measure) is identical
            across corruptions, leaving the correlations undefined.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    names = list(grid.corruptions if corruptions is None else corruptions)
    rows = []
    for name in names:
        rpc_value = corruption_rpc(grid, name)
        prof = severity_profile(corpus, name, seed=seed)
        rows.append(
            CorruptionImpact(
                corruption=name,
                group=GROUP_OF[name],
                rmse=float(np.mean([v[0] for v in prof.values()])),
                ssim=float(np.mean([v[1] for v in prof.values()])),
                rpc=rpc_value,
            )
        )
    rpcs = [r.rpc for r in rows]
    meta = {
        "n_images": len(corpus),
        "severities": list(SEVERITIES),
        "averaging": "mean over corpus images and all severities",
        "seed": seed,
    }
    return ImpactTable(rows, pearson(rpcs, [r.rmse for r in rows]), pearson(rpcs, [r.ssim for r in rows]), meta)
