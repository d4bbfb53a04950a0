"""Running the corruption benchmark on a directory of detection files.

A benchmark run scores clean.json and one file per (corruption, severity).
It reports clean performance P, mPC (the mean over the 15 x 5 corrupted
cells) and rPC (mPC relative to P). Validation corruptions are scored too but
never enter mPC.

    python demos/03_benchmark_grid.py
"""

from corruptbench.assets import toy_dir
from corruptbench.benchmark import BenchmarkReport, emit_report, group_means, rpc, run_grid
from corruptbench.deteval import EvalConfig, load_ground_truth

gts = load_ground_truth(toy_dir() / "gt.json")
grid = run_grid(gts, toy_dir() / "dets", EvalConfig.coco())
report = BenchmarkReport.from_grid(grid, model="toy-detector", backbone="r50", dataset="toy", mode="coco")

print(f"P_clean {report.p_clean:.1f}   mPC {report.mpc:.1f}   rPC {report.rpc:.1f}")
print("per group:", {g: round(v, 1) for g, v in group_means(report).items()})
print("per severity:", {s: round(v, 1) for s, v in report.per_severity.items()})
print("validation (excluded from mPC):", {c: round(v, 1) for c, v in report.validation.items()})

# Reports can be merged into a submission table ranked by mPC.
other = BenchmarkReport("published-baseline", "r50", "voc", "pascal", 80.5, 48.6, rpc(48.6, 80.5), {}, {})
print()
print(emit_report([report, other], "md"))
