"""Relating image distortion to performance loss.

For each corruption the corpus is corrupted at all severities. The script
measures RMSE and SSIM against the clean images and correlates both with
each corruption's relative performance under a model's benchmark grid.

    python demos/04_corruption_impact.py [--images 5]
"""

import argparse

from corruptbench.analysis import impact_table
from corruptbench.assets import corpus_paths, toy_dir
from corruptbench.benchmark import run_grid
from corruptbench.deteval import EvalConfig, load_ground_truth
from corruptbench.imaging import read_image

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--images", type=int, default=5, help="number of corpus images to use")
args = parser.parse_args()

corpus = [(p.name, read_image(p)) for p in corpus_paths()[: args.images]]
grid = run_grid(load_ground_truth(toy_dir() / "gt.json"), toy_dir() / "dets", EvalConfig.pascal())
table = impact_table(corpus, grid, seed=0)

print(f"{'corruption':<18} {'group':<8} {'RMSE':>7} {'SSIM':>6} {'rPC':>6}")
for row in sorted(table.rows, key=lambda r: r.rmse):
    print(f"{row.corruption:<18} {row.group:<8} {row.rmse:7.2f} {row.ssim:6.3f} {row.rpc:6.1f}")
print(f"r(rPC, RMSE) = {table.pearson_rmse:+.2f}   r(rPC, SSIM) = {table.pearson_ssim:+.2f}")
print("averaging:", table.metadata["averaging"])
