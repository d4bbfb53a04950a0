import json
import shutil

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from corruptbench.assets import toy_dir
from corruptbench.benchmark import (
    BenchmarkReport,
    IncompleteGridError,
    PerformanceGrid,
    emit_report,
    group_means,
    load_report,
    markdown_table,
    mpc,
    round1,
    rpc,
    run_grid,
)
from corruptbench.corruptions import BENCHMARK_CORRUPTIONS, SEVERITIES, VALIDATION_CORRUPTIONS
from corruptbench.deteval import EvalConfig, FormatError, evaluate, load_detections

grid_values = arrays(np.float64, (15, 5), elements=st.floats(0, 100))


def test_rpc_table_rows():
    # published aggregates: (P_clean, mPC, rPC)
    assert round1(rpc(48.6, 80.5)) == 60.4
    assert abs(rpc(18.2, 36.3) - 50.2) <= 0.1 + 1e-9
    assert round1(rpc(56.2, 80.4)) == 69.9
    assert rpc(37.0, 37.0) == 100.0
    with pytest.raises(ValueError):
        rpc(10.0, 0.0)


def test_round_half_to_even():
    assert round1(0.25) == 0.2 and round1(0.35) == 0.4 and round1(60.37) == 60.4
    assert round1(50.14) == 50.1


def test_mpc_constant_and_single_corruption():
    assert mpc(PerformanceGrid.from_matrix(50, np.full((15, 5), 42.0))) == pytest.approx(42.0)
    m = np.zeros((15, 5))
    m[3] = 75.0
    assert mpc(PerformanceGrid.from_matrix(50, m)) == pytest.approx(5.0)


def test_missing_cells_are_listed():
    grid = PerformanceGrid(p_clean=80.0)
    grid.set("fog", 1, 40.0)
    with pytest.raises(IncompleteGridError) as err:
        mpc(grid)
    assert ("gaussian_noise", 1) in err.value.missing and ("fog", 1) not in err.value.missing
    assert len(err.value.missing) == 74


def test_grid_rejects_out_of_range_values():
    grid = PerformanceGrid()
    with pytest.raises(ValueError):
        grid.set("fog", 1, 101.0)
    with pytest.raises(ValueError):
        grid.set("fog", 6, 10.0)
    with pytest.raises(ValueError):
        grid.set("rain", 1, 10.0)


@settings(max_examples=50)
@given(grid_values, st.floats(1, 100))
def test_aggregation_linearity_and_identity(m, p_clean):
    grid = PerformanceGrid.from_matrix(p_clean, m)
    value = mpc(grid)
    assert value == pytest.approx(np.mean(list(grid.corruption_means().values())), abs=1e-9)
    assert value == pytest.approx(np.mean(list(grid.severity_means().values())), abs=1e-9)
    assert rpc(value, p_clean) == pytest.approx(100 * m.mean() / p_clean, rel=1e-12)


@settings(max_examples=50)
@given(grid_values, st.floats(1, 100), st.floats(0.01, 1.0))
def test_rpc_scale_invariance(m, p_clean, k):
    a = PerformanceGrid.from_matrix(p_clean, m)
    b = PerformanceGrid.from_matrix(p_clean * k, m * k)
    assert rpc(mpc(b), b.p_clean) == pytest.approx(rpc(mpc(a), a.p_clean), rel=1e-9)


@settings(max_examples=30)
@given(grid_values, arrays(np.float64, (4, 5), elements=st.floats(0, 100)))
def test_validation_results_never_change_mpc(m, v):
    grid = PerformanceGrid.from_matrix(60.0, m)
    before = mpc(grid)
    for i, c in enumerate(VALIDATION_CORRUPTIONS):
        for j, s in enumerate(SEVERITIES):
            grid.set(c, s, v[i, j])
    assert mpc(grid) == before
    assert len(grid.cells) == 75 and len(grid.validation) == 20


def _copy_dets(tmp_path, keep):
    out = tmp_path / "dets"
    out.mkdir()
    shutil.copy(toy_dir() / "dets" / "clean.json", out / "clean.json")
    for c, s in keep:
        (out / c).mkdir(exist_ok=True)
        shutil.copy(toy_dir() / "dets" / c / f"{s}.json", out / c / f"{s}.json")
    return out


def test_run_grid_clean_only_refuses_aggregation(tmp_path, toy_gt):
    dets = _copy_dets(tmp_path, [])
    with pytest.raises(IncompleteGridError) as err:
        run_grid(toy_gt, dets, EvalConfig.pascal())
    assert len(err.value.missing) == 75
    grid = run_grid(toy_gt, dets, EvalConfig.pascal(), allow_partial=True)
    assert grid.p_clean == pytest.approx(100.0)
    with pytest.raises(IncompleteGridError):
        mpc(grid)


def test_run_grid_identical_files_give_full_rpc(tmp_path, toy_gt):
    dets = _copy_dets(tmp_path, [])
    for c in BENCHMARK_CORRUPTIONS:
        (dets / c).mkdir()
        for s in SEVERITIES:
            shutil.copy(dets / "clean.json", dets / c / f"{s}.json")
    grid = run_grid(toy_gt, dets, EvalConfig.coco())
    assert set(grid.cells.values()) == {grid.p_clean}
    assert mpc(grid) == pytest.approx(grid.p_clean)
    assert rpc(mpc(grid), grid.p_clean) == pytest.approx(100.0)


def test_run_grid_cells_equal_independent_evaluations(toy_gt):
    cfg = EvalConfig.coco()
    grid = run_grid(toy_gt, toy_dir() / "dets", cfg, jobs=4)
    for (c, s), value in grid.cells.items():
        single = evaluate(load_detections(toy_dir() / "dets" / c / f"{s}.json", toy_gt), toy_gt, cfg)
        assert value == single
    assert len(grid.validation) == 20


def test_report_round_trip_and_metadata(tmp_path, toy_gt):
    grid = run_grid(toy_gt, toy_dir() / "dets", EvalConfig.pascal())
    report = BenchmarkReport.from_grid(grid, model="toy", backbone="r50", dataset="toy", mode="pascal", seed=3)
    path = tmp_path / "r.json"
    emit_report(report, "json", path)
    again = load_report(path)
    assert again == report
    assert again.rpc == pytest.approx(100 * again.mpc / again.p_clean)
    assert np.mean(list(again.per_corruption.values())) == pytest.approx(again.mpc)
    assert len(again.table_hash) == 64 and again.version
    assert set(again.validation) == set(VALIDATION_CORRUPTIONS)
    assert set(group_means(again)) == {"noise", "blur", "weather", "digital"}
    assert again.performance_grid().cells == grid.cells


def _report(model, p, m):
    return BenchmarkReport(model, "r50", "voc", "pascal", p, m, rpc(m, p), {}, {})


def test_markdown_row_for_published_aggregates():
    md = markdown_table(_report("Faster", 80.5, 48.6))
    assert "| Faster | r50 | 80.5 | 48.6 | 60.4 |" in md


def test_reports_ranked_by_mpc():
    md = emit_report([_report("a", 80.0, 40.0), _report("b", 70.0, 45.0), _report("c", 90.0, 41.0)], "md")
    rows = [line.split("|")[1].strip() for line in md.splitlines()[2:]]
    assert rows == ["b", "c", "a"]


def test_csv_report(toy_gt):
    grid = run_grid(toy_gt, toy_dir() / "dets", EvalConfig.pascal())
    text = emit_report(BenchmarkReport.from_grid(grid, model="toy"), "csv")
    header, row = text.strip().splitlines()
    assert header.split(",")[:7] == ["model", "backbone", "dataset", "mode", "p_clean", "mpc", "rpc"]
    assert len(row.split(",")) == 7 + 15


def test_partial_report_has_no_aggregate(tmp_path, toy_gt):
    dets = _copy_dets(tmp_path, [("fog", 1)])
    grid = run_grid(toy_gt, dets, EvalConfig.pascal(), allow_partial=True)
    with pytest.raises(IncompleteGridError):
        BenchmarkReport.from_grid(grid)
    rep = BenchmarkReport.from_grid(grid, allow_partial=True)
    assert rep.mpc is None and rep.rpc is None and len(rep.missing) == 74
    assert BenchmarkReport.from_json(rep.to_json()) == rep
    with pytest.raises(IncompleteGridError):
        emit_report(rep, "md")


def test_load_report_errors(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"model": "x"}))
    with pytest.raises(FormatError, match="p_clean"):
        load_report(p)
    p.write_text("[1,")
    with pytest.raises(FormatError, match="invalid JSON"):
        load_report(p)
