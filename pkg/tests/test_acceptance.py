"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import hashlib
import shutil
import time

import numpy as np

from corruptbench import cli
from corruptbench.analysis import C1, severity_profile, ssim
from corruptbench.assets import corpus_paths, toy_dir
from corruptbench.benchmark import BenchmarkReport, markdown_table, mpc, round1, rpc, run_grid
from corruptbench.corruptions import ALL_CORRUPTIONS, SEVERITIES, corrupt
from corruptbench.deteval import (
    TP,
    FP,
    EvalConfig,
    average_precision,
    evaluate,
    load_ground_truth,
    match_detections,
)
from corruptbench.stylize import adain, channel_stats

from test_deteval import brute_force_labels, random_dataset, random_instance


# ------------------------------------------------------------------------ 1


def test_criterion_1_metric_arithmetic(acceptance):
    start = time.perf_counter()
    rows = [
        # (mPC, P_clean, published rPC)
        (48.6, 80.5, 60.4),
        (18.2, 36.3, 50.2),
        (56.2, 80.4, 69.9),
    ]
    got = [rpc(m, p) for m, p, _ in rows]
    ok = all(abs(g - want) <= 0.1 + 1e-9 for g, (_, _, want) in zip(got, rows))
    ok &= round1(got[0]) == 60.4 and round1(got[2]) == 69.9 and abs(got[1] - 50.1) <= 0.1
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    acceptance(1, ok, f"rPC = {got[0]:.3f}, {got[1]:.3f}, {got[2]:.3f} vs 60.4, 50.2, 69.9 (tol 0.1); {elapsed * 1e3:.2f} ms")
    assert ok


# ------------------------------------------------------------------------ 2


def test_criterion_2_grid_completeness(acceptance):
    rng = np.random.default_rng(2)
    big = rng.integers(0, 256, (1024, 2048, 3), dtype=np.uint8)
    shapes = [(1, 1), (7, 13), (480, 640), (640, 480), (1024, 2048)]
    failures = []
    for h, w in shapes:
        for c in (1, 3):
            img = big[:h, :w, :c].copy()
            for name in ALL_CORRUPTIONS:
                for s in SEVERITIES:
                    try:
                        out = corrupt(img, name, s, seed=0, image_id=f"{h}x{w}x{c}")
                    except Exception as exc:  # noqa: BLE001 - any crash is a failure here
                        failures.append(f"{name}/{s} on {h}x{w}x{c}: {exc}")
                        continue
                    if out.shape != img.shape or out.dtype != np.uint8:
                        failures.append(f"{name}/{s} on {h}x{w}x{c}: shape {out.shape}")

    frame = np.asarray(np.random.default_rng(3).integers(0, 256, (480, 640, 3)), dtype=np.uint8)
    start = time.perf_counter()
    for name in ALL_CORRUPTIONS:
        for s in SEVERITIES:
            corrupt(frame, name, s, seed=1)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30.0
    detail = f"19x5 grid on {len(shapes) * 2} shape/channel cases, {len(failures)} failures; 640x480 RGB grid {elapsed:.1f} s (< 30 s)"
    acceptance(2, ok, detail)
    assert not failures, failures[:5]
    assert elapsed < 30.0


# ------------------------------------------------------------------------ 3


def test_criterion_3_severity_monotonicity(acceptance, corpus):
    assert len(corpus) == 20
    bad = []
    min_rmse_step = min_ssim_step = np.inf
    for name in ALL_CORRUPTIONS:
        prof = severity_profile(corpus, name, seed=0)
        r = [prof[s][0] for s in SEVERITIES]
        q = [prof[s][1] for s in SEVERITIES]
        dr, dq = np.diff(r), -np.diff(q)
        min_rmse_step = min(min_rmse_step, dr.min())
        min_ssim_step = min(min_ssim_step, dq.min())
        if not (np.all(dr > 0) and np.all(dq > 0)):
            bad.append(name)
    ok = not bad
    acceptance(
        3,
        ok,
        f"corpus-mean RMSE up and SSIM down for {19 - len(bad)}/19 corruptions "
        f"(smallest steps {min_rmse_step:.3f} RMSE, {min_ssim_step:.4f} SSIM){'; failing ' + ', '.join(bad) if bad else ''}",
    )
    assert ok


# ------------------------------------------------------------------------ 4


def _tree_hashes(root):
    return {
        p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_criterion_4_determinism(acceptance, tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    for p in corpus_paths()[5:8]:  # includes a grayscale image
        shutil.copy(p, src / p.name)
    trees = []
    for run, jobs in enumerate((1, 3)):
        out = tmp_path / f"out{run}"
        assert cli.main(["corrupt", "--in", str(src), "--out", str(out), "--seed", "42", "--jobs", str(jobs)]) == 0
        trees.append(_tree_hashes(out))
    ok = trees[0] == trees[1] and len(trees[0]) == 3 * 75 + 1
    acceptance(4, ok, f"{len(trees[0])} files (75 conditions x 3 images + manifest) byte-identical for --jobs 1 and --jobs 3")
    assert ok


# ------------------------------------------------------------------------ 5


def test_criterion_5_ap_evaluator(acceptance):
    rng = np.random.default_rng(5)
    mismatches = 0
    for _ in range(1000):
        dets, gts, ignore = random_instance(rng, max_dets=6, max_gts=4)
        t = float(rng.choice([0.5, 0.75]))
        if match_detections(dets, gts, t, ignore).tolist() != brute_force_labels(dets, gts, t, ignore):
            mismatches += 1

    perfect = average_precision([TP, TP], [0.9, 0.1], 2)
    empty = average_precision([], [], 3)
    three = average_precision([TP, FP, TP], [0.9, 0.8, 0.7], 2, "coco101")
    three_ok = abs(three - (51 + 50 * 2 / 3) / 101) < 1e-12

    rng = np.random.default_rng(55)
    violations = 0
    for _ in range(100):
        d, g = random_dataset(rng)
        if evaluate(d, g, EvalConfig.coco()) > evaluate(d, g, EvalConfig.pascal()):
            violations += 1
    ok = mismatches == 0 and perfect == 1.0 and empty == 0.0 and three_ok and violations == 0
    acceptance(
        5,
        ok,
        f"matcher vs exhaustive oracle {1000 - mismatches}/1000; AP perfect={perfect}, empty={empty}, "
        f"3-point={three:.6f}; COCO <= PASCAL on {100 - violations}/100 fixtures",
    )
    assert ok


# ------------------------------------------------------------------------ 6


def test_criterion_6_ssim_closed_form(acceptance):
    worst = 0.0
    for m1, m2 in [(100, 150), (0, 255), (30, 31), (200, 10), (128, 128)]:
        a = np.full((32, 24, 3), m1, np.uint8)
        b = np.full((32, 24, 3), m2, np.uint8)
        expected = (2 * m1 * m2 + C1) / (m1**2 + m2**2 + C1)
        worst = max(worst, abs(ssim(a, b) - expected))
    img = np.random.default_rng(6).integers(0, 256, (40, 40, 3), dtype=np.uint8)
    identical = ssim(img, img.copy())
    ok = worst < 1e-9 and identical == 1.0
    acceptance(6, ok, f"constant-image SSIM max error {worst:.2e} (tol 1e-9); identical images -> {identical!r}")
    assert ok


# ------------------------------------------------------------------------ 7


def test_criterion_7_adain_properties(acceptance):
    # unit-variance Gaussian feature tensors with random channel means, >= 8x8 positions
    rng = np.random.default_rng(7)
    stat_err = idem_err = 0.0
    alpha0_exact = True
    for _ in range(100):
        c = int(rng.integers(1, 16))
        content = rng.normal(rng.normal(0, 2, (c, 1, 1)), 1.0, (c, *rng.integers(8, 33, 2)))
        style = rng.normal(rng.normal(0, 2, (c, 1, 1)), 1.0, (c, *rng.integers(8, 33, 2)))
        out = adain(content, style, 1.0)
        stat_err = max(stat_err, float(np.max(np.abs(np.array(channel_stats(out)) - np.array(channel_stats(style))))))
        idem_err = max(idem_err, float(np.max(np.abs(adain(out, style, 1.0) - out))))
        alpha0_exact &= bool(np.array_equal(adain(content, style, 0.0), content))
    ok = stat_err <= 1e-5 and idem_err <= 1e-5 and alpha0_exact
    acceptance(
        7,
        ok,
        f"100 tensors: stats error {stat_err:.2e}, idempotence error {idem_err:.2e} (tol 1e-5); alpha=0 exact: {alpha0_exact}",
    )
    assert ok


# ------------------------------------------------------------------------ 8

# Expected values from per-cell oracles run once offline: COCO mode with
# pycocotools on every condition file, PASCAL mode with an independent
# VOC-devkit style all-point evaluator; mPC is the mean of the 75 cells.
TOY_EXPECTED = {
    "coco": (78.25082508250824, 31.562464246424636, 40.33499226767889),
    "pascal": (100.0, 59.89166666666668, 59.89166666666668),
}


def test_criterion_8_end_to_end_toy_pipeline(acceptance, tmp_path):
    gts = load_ground_truth(toy_dir() / "gt.json")
    parts = []
    ok = True
    for mode, (p_exp, m_exp, r_exp) in TOY_EXPECTED.items():
        out = tmp_path / f"{mode}.json"
        assert cli.main(["bench", "run", "--gt", str(toy_dir() / "gt.json"), "--dets", str(toy_dir() / "dets"),
                         "--mode", mode, "--out", str(out), "--model", "toy"]) == 0
        report = BenchmarkReport.from_json(out.read_text())
        grid = run_grid(gts, toy_dir() / "dets", EvalConfig.for_mode(mode))
        good = (
            abs(report.p_clean - p_exp) < 1e-9
            and abs(report.mpc - m_exp) < 1e-9
            and abs(report.rpc - r_exp) < 1e-9
            and abs(mpc(grid) - m_exp) < 1e-9
        )
        ok &= good
        parts.append(f"{mode} P={report.p_clean:.2f} mPC={report.mpc:.2f} rPC={report.rpc:.2f}")
    md = markdown_table(BenchmarkReport("toy", "", "toy", "coco", *TOY_EXPECTED["coco"], {}, {}))
    ok &= "| 78.3 | 31.6 | 40.3 |" in md
    acceptance(
        8,
        ok,
        "toy pipeline matches per-cell oracles (tol 1e-9): " + "; ".join(parts)
        + ". Declared not reproducible here: published detector scores, the RMSE/SSIM correlations"
        " and stylized-training gains (need trained detectors)",
    )
    assert ok
