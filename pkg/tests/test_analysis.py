import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corruptbench.analysis import (
    C1,
    ConstantSeriesError,
    impact_table,
    pearson,
    rmse,
    severity_profile,
    ssim,
)
from corruptbench.benchmark import PerformanceGrid
from corruptbench.corruptions import BENCHMARK_CORRUPTIONS, SEVERITIES, corrupt


def test_rmse_examples():
    a = np.random.default_rng(0).integers(0, 200, (10, 12, 3), dtype=np.uint8)
    assert rmse(a, a) == 0.0
    assert rmse(a, a + 10) == pytest.approx(10.0)
    board = (np.indices((8, 8)).sum(axis=0) % 2 * 255).astype(np.uint8)
    assert rmse(board, 255 - board) == pytest.approx(255.0)
    with pytest.raises(ValueError):
        rmse(a, a[:5])


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_rmse_symmetric_and_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.integers(0, 256, (9, 7, 3), dtype=np.uint8) for _ in range(3))
    assert rmse(a, b) == rmse(b, a)
    assert rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-9


def test_ssim_identical_and_constant_closed_form():
    a = np.random.default_rng(0).integers(0, 256, (20, 30, 3), dtype=np.uint8)
    assert ssim(a, a) == 1.0
    x = np.full((16, 16), 100, np.uint8)
    y = np.full((16, 16), 150, np.uint8)
    expected = (2 * 100 * 150 + C1) / (100**2 + 150**2 + C1)
    assert abs(ssim(x, y) - expected) < 1e-9


def test_ssim_errors():
    with pytest.raises(ValueError):
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))
    with pytest.raises(ValueError):
        ssim(np.zeros((20, 20)), np.zeros((20, 21)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ssim_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, 256, (2, 24, 19, 3), dtype=np.uint8)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1.0 <= ssim(a, b) <= 1.0


def test_ssim_matches_scikit_image(corpus):
    metrics = pytest.importorskip("skimage.metrics")
    for image_id, img in corpus[:4]:
        noisy = corrupt(img, "gaussian_noise", 2, seed=0, image_id=image_id)
        ref = metrics.structural_similarity(
            img[..., 0] if img.shape[2] == 1 else img,
            noisy[..., 0] if img.shape[2] == 1 else noisy,
            gaussian_weights=True,
            sigma=1.5,
            use_sample_covariance=False,
            data_range=255,
            channel_axis=None if img.shape[2] == 1 else 2,
        )
        assert ssim(img, noisy) == pytest.approx(ref, abs=1e-9)


def test_ssim_orders_noise_severity(corpus):
    img = corpus[0][1]
    s1 = ssim(img, corrupt(img, "gaussian_noise", 1, seed=0))
    s5 = ssim(img, corrupt(img, "gaussian_noise", 5, seed=0))
    assert s5 < s1


def test_pearson_examples():
    x = np.array([1.0, 2.0, 4.0, 7.0, 11.0])
    assert pearson(x, 2 * x + 3) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    y = np.array([2.0, 1.0, 5.0, 4.0, 9.0])
    # covariance formula by hand: mean x = 5, mean y = 4.2
    dx, dy = x - 5.0, y - 4.2
    expected = (dx @ dy) / np.sqrt((dx @ dx) * (dy @ dy))
    assert pearson(x, y) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ConstantSeriesError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [2])


def _grid(rpc_by_corruption, p_clean=50.0):
    grid = PerformanceGrid(p_clean=p_clean)
    for c, r in rpc_by_corruption.items():
        for s in SEVERITIES:
            grid.set(c, s, r * p_clean / 100)
    return grid


NAMES = ["gaussian_noise", "fog", "contrast"]


def test_impact_rows_equal_independent_means(corpus):
    small = corpus[:3]
    grid = _grid({"gaussian_noise": 40.0, "fog": 70.0, "contrast": 55.0})
    table = impact_table(small, grid, corruptions=NAMES, seed=0)
    for row in table.rows:
        r, q = [], []
        for s in SEVERITIES:
            for image_id, img in small:
                out = corrupt(img, row.corruption, s, seed=0, image_id=image_id)
                r.append(rmse(img, out))
                q.append(ssim(img, out))
        assert row.rmse == pytest.approx(np.mean(r), rel=1e-12)
        assert row.ssim == pytest.approx(np.mean(q), rel=1e-12)
    assert [r.rpc for r in table.rows] == pytest.approx([40.0, 70.0, 55.0])
    csv = table.to_csv().splitlines()
    assert csv[0] == "corruption,group,rmse,ssim,rpc"
    assert csv[-2].startswith("pearson_rmse,") and csv[-1].startswith("pearson_ssim,")


def test_impact_linear_rpc_gives_unit_correlation(corpus):
    small = corpus[:2]
    rm = {n: np.mean([v[0] for v in severity_profile(small, n).values()]) for n in NAMES}
    grid = _grid({n: 90.0 - 0.5 * rm[n] for n in NAMES})
    table = impact_table(small, grid, corruptions=NAMES)
    assert table.pearson_rmse == pytest.approx(-1.0, abs=1e-9)


def test_impact_equal_harm_is_an_explicit_error(corpus):
    grid = _grid({n: 60.0 for n in BENCHMARK_CORRUPTIONS})
    with pytest.raises(ConstantSeriesError, match="constant"):
        impact_table(corpus[:1], grid, corruptions=NAMES)


def test_impact_requires_corpus():
    with pytest.raises(ValueError, match="empty corpus"):
        impact_table([], _grid({n: 50.0 for n in NAMES}), corruptions=NAMES)
