"""Scoring detections with PASCAL and COCO style average precision.

The toy fixture has three images with cars and people, including one crowd
region. Detections are COCO results JSON. PASCAL mode scores AP at IoU 0.5.
COCO mode averages AP over IoU 0.50 to 0.95.

    python demos/02_evaluate_detections.py
"""

from corruptbench.assets import toy_dir
from corruptbench.deteval import (
    FP,
    TP,
    BoundingBox,
    EvalConfig,
    average_precision,
    evaluate_detailed,
    iou,
    load_detections,
    load_ground_truth,
)

# IoU of two 2x2 boxes offset by one pixel: one pixel of overlap out of seven.
print("IoU:", iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 2, 2)))

# A ranked list hit, miss, hit against two positives, under each interpolation.
for mode in ("coco101", "all_point", "voc07"):
    print(f"AP[{mode}] for TP, FP, TP:", round(average_precision([TP, FP, TP], [0.9, 0.8, 0.7], 2, mode), 6))

gts = load_ground_truth(toy_dir() / "gt.json")
for condition in ("clean.json", "fog/1.json", "fog/5.json"):
    dets = load_detections(toy_dir() / "dets" / condition, gts)
    for name, cfg in (("pascal", EvalConfig.pascal()), ("voc07", EvalConfig.pascal(voc07=True)), ("coco", EvalConfig.coco())):
        res = evaluate_detailed(dets, gts, cfg)
        per_class = ", ".join(f"{gts.categories[c]}={100 * sum(v) / len(v):.1f}" for c, v in res.ap.items())
        print(f"{condition:<11} {name:<6} P = {res.value:5.1f}   ({per_class})")

# In COCO mode the per-threshold breakdown shows where localisation fails.
res = evaluate_detailed(load_detections(toy_dir() / "dets" / "fog" / "5.json", gts), gts, EvalConfig.coco())
print("fog/5 AP by IoU threshold:", [f"{res.at(k):.0f}" for k in range(10)])
