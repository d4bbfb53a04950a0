"""Box detection evaluation: PASCAL AP50 and COCO-style AP@[.50:.95].

Ground truth and detections are read from COCO-format JSON. Matching is the
usual greedy protocol: detections are visited in descending score order and
each claims the still-unmatched ground truth of its category with the highest
IoU at or above the threshold. Ignore-flagged (crowd) ground truths absorb any
detection that found no regular match; such detections are dropped rather than
counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TP, FP, IGNORED = 1, 0, -1

COCO_IOU_THRESHOLDS = tuple(np.round(np.linspace(0.5, 0.95, 10), 2).tolist())
INTERPOLATIONS = ("coco101", "voc07", "all_point")


class FormatError(ValueError):
    """Malformed annotation or result file; the message names the path and field."""


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError(f"box extent must be non-negative, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class GroundTruth:
    category_id: int
    box: BoundingBox
    ignore: bool = False


@dataclass(frozen=True)
class Detection:
    category_id: int
    box: BoundingBox
    score: float


@dataclass
class GroundTruthSet:
    """Annotations per image id, plus the declared categories (id -> name)."""

    images: dict[int, list[GroundTruth]]
    categories: dict[int, str]

    def __post_init__(self):
        for image_id, items in self.images.items():
            for gt in items:
                if gt.category_id not in self.categories:
                    raise ValueError(f"image {image_id}: undeclared category {gt.category_id}")


@dataclass
class DetectionSet:
    images: dict[int, list[Detection]] = field(default_factory=dict)

    def scaled(self, factor: float) -> "DetectionSet":
        return DetectionSet(
            {k: [Detection(d.category_id, d.box, d.score * factor) for d in v] for k, v in self.images.items()}
        )


@dataclass(frozen=True)
class EvalConfig:
    iou_thresholds: tuple[float, ...] = (0.5,)
    interpolation: str = "all_point"
    max_dets: int | None = None

    def __post_init__(self):
        t = self.iou_thresholds
        if not t or any(not 0 < v <= 1 for v in t) or any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError(f"IoU thresholds must be strictly increasing values in (0, 1], got {t}")
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(f"interpolation must be one of {INTERPOLATIONS}, got {self.interpolation!r}")
        if self.max_dets is not None and self.max_dets < 1:
            raise ValueError(f"max_dets must be positive, got {self.max_dets}")

    @classmethod
    def pascal(cls, voc07: bool = False) -> "EvalConfig":
        """AP50, all-point interpolation (or VOC2007 11-point), no detection cap."""
        return cls((0.5,), "voc07" if voc07 else "all_point", None)

    @classmethod
    def coco(cls, max_dets: int = 100) -> "EvalConfig":
        """AP averaged over IoU 0.50:0.05:0.95, 101 recall points, ``max_dets`` per image and class."""
        return cls(COCO_IOU_THRESHOLDS, "coco101", max_dets)

    @classmethod
    def for_mode(cls, mode: str, voc07: bool = False) -> "EvalConfig":
        if mode == "pascal":
            return cls.pascal(voc07)
        if mode == "coco":
            return cls.coco()
        raise ValueError(f"mode must be 'pascal' or 'coco', got {mode!r}")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    inter = max(iw, 0.0) * max(ih, 0.0)
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def iou_matrix(dets: list[BoundingBox], gts: list[BoundingBox], crowd=None) -> np.ndarray:
    """Pairwise IoU, shape ``(len(dets), len(gts))``.

    For ground truths flagged in ``crowd`` the overlap is intersection over the
    detection's own area, so a detection lying inside a crowd region counts as
    covered by it.
    """
    if not dets or not gts:
        return np.zeros((len(dets), len(gts)))
    d = np.array([[b.x, b.y, b.w, b.h] for b in dets], dtype=np.float64)
    g = np.array([[b.x, b.y, b.w, b.h] for b in gts], dtype=np.float64)
    iw = np.minimum(d[:, None, 0] + d[:, None, 2], g[None, :, 0] + g[None, :, 2]) - np.maximum(d[:, None, 0], g[None, :, 0])
    ih = np.minimum(d[:, None, 1] + d[:, None, 3], g[None, :, 1] + g[None, :, 3]) - np.maximum(d[:, None, 1], g[None, :, 1])
    inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
    det_area = (d[:, 2] * d[:, 3])[:, None]
    union = det_area + (g[:, 2] * g[:, 3])[None, :] - inter
    if crowd is not None:
        union = np.where(np.asarray(crowd, dtype=bool)[None, :], det_area, union)
    return np.divide(inter, union, out=np.zeros_like(inter), where=union > 0)


def match_detections(
    dets: list[BoundingBox],
    gts: list[BoundingBox],
    iou_threshold: float,
    gt_ignore: list[bool] | None = None,
    ious: np.ndarray | None = None,
) -> np.ndarray:
    """Label each detection TP (1), FP (0) or IGNORED (-1).

    ``dets`` must already be in descending score order. Ties between equally
    good ground truths go to the lower index.
    """
    ignore = np.zeros(len(gts), dtype=bool) if gt_ignore is None else np.asarray(gt_ignore, dtype=bool)
    if ious is None:
        ious = iou_matrix(dets, gts, ignore)
    labels = np.full(len(dets), FP, dtype=np.int8)
    taken = np.zeros(len(gts), dtype=bool)
    for i in range(len(dets)):
        if not len(gts):
            break
        row = ious[i]
        eligible = (row >= iou_threshold) & ~ignore & ~taken
        if eligible.any():
            j = int(np.argmax(np.where(eligible, row, -1.0)))
            taken[j] = True
            labels[i] = TP
        elif ((row >= iou_threshold) & ignore).any():
            labels[i] = IGNORED
    return labels


def _envelope(precision: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(precision[::-1])[::-1]


def average_precision(labels, scores, n_positives: int, interpolation: str = "coco101") -> float | None:
    """Area under the monotone precision envelope.

    ``labels`` are TP/FP/IGNORED per detection; ignored detections are dropped.
    Detections are ranked by descending score with ties kept in input order.
    Returns ``None`` when there are no positives (the class is skipped).
    """
    if interpolation not in INTERPOLATIONS:
        raise ValueError(f"interpolation must be one of {INTERPOLATIONS}, got {interpolation!r}")
    if n_positives <= 0:
        return None
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    keep = labels != IGNORED
    labels, scores = labels[keep], scores[keep]
    if labels.size == 0:
        return 0.0
    order = np.argsort(-scores, kind="stable")
    tp = np.cumsum(labels[order] == TP)
    fp = np.cumsum(labels[order] == FP)
    recall = tp / n_positives
    precision = tp / (tp + fp)

    if interpolation == "coco101":
        env = _envelope(precision)
        thresholds = np.linspace(0.0, 1.0, 101)
        idx = np.searchsorted(recall, thresholds, side="left")
        sampled = np.where(idx < len(env), env[np.minimum(idx, len(env) - 1)], 0.0)
        return float(sampled.mean())
    if interpolation == "voc07":
        total = 0.0
        for t in np.arange(0.0, 1.1, 0.1):
            above = precision[recall >= t - 1e-12]
            total += above.max() if above.size else 0.0
        return float(total / 11.0)
    mrec = np.concatenate([[0.0], recall, [1.0]])
    mpre = _envelope(np.concatenate([[0.0], precision, [0.0]]))
    steps = np.nonzero(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


@dataclass
class EvalResult:
    """Per-category AP at each threshold (``None`` where a category has no positives)."""

    ap: dict[int, list[float | None]]
    config: EvalConfig

    @property
    def value(self) -> float:
        vals = [v for per_t in self.ap.values() for v in per_t if v is not None]
        if not vals:
            raise ValueError("no category has any non-ignored ground truth")
        return 100.0 * float(np.mean(vals))

    def at(self, threshold_index: int) -> float:
        vals = [per_t[threshold_index] for per_t in self.ap.values() if per_t[threshold_index] is not None]
        return 100.0 * float(np.mean(vals))


def evaluate_detailed(dets: DetectionSet, gts: GroundTruthSet, cfg: EvalConfig) -> EvalResult:
    unknown = set(dets.images) - set(gts.images)
    if unknown:
        raise ValueError(f"detections reference unknown image ids: {sorted(unknown)[:5]}")
    n_pos = {c: 0 for c in gts.categories}
    for items in gts.images.values():
        for gt in items:
            if not gt.ignore:
                n_pos[gt.category_id] += 1
    if not any(n_pos.values()):
        raise ValueError("ground truth is empty across all categories")

    n_t = len(cfg.iou_thresholds)
    labels = {c: [[] for _ in range(n_t)] for c in gts.categories}
    scores = {c: [] for c in gts.categories}
    # canonical image order keeps ties across images independent of dict order
    for image_id in sorted(gts.images):
        g_items = gts.images[image_id]
        d_items = dets.images.get(image_id, [])
        for cat in gts.categories:
            cd = [d for d in d_items if d.category_id == cat]
            order = sorted(range(len(cd)), key=lambda i: -cd[i].score)
            cd = [cd[i] for i in order]
            if cfg.max_dets is not None:
                cd = cd[: cfg.max_dets]
            if not cd:
                continue
            cg = [g for g in g_items if g.category_id == cat]
            boxes = [d.box for d in cd]
            ign = [g.ignore for g in cg]
            ious = iou_matrix(boxes, [g.box for g in cg], ign)
            for k, t in enumerate(cfg.iou_thresholds):
                labels[cat][k].append(match_detections(boxes, [g.box for g in cg], t, ign, ious))
            scores[cat].extend(d.score for d in cd)

    ap = {}
    for cat in gts.categories:
        per_t = []
        for k in range(n_t):
            lab = np.concatenate(labels[cat][k]) if labels[cat][k] else np.zeros(0, dtype=np.int8)
            per_t.append(average_precision(lab, scores[cat], n_pos[cat], cfg.interpolation))
        ap[cat] = per_t
    return EvalResult(ap, cfg)


def evaluate(dets: DetectionSet, gts: GroundTruthSet, cfg: EvalConfig) -> float:
    """Dataset performance P in percent: mean AP over categories and IoU thresholds."""
    return evaluate_detailed(dets, gts, cfg).value


# ------------------------------------------------------------------ file I/O


def _load_json(source):
    if isinstance(source, (str, Path)):
        path = str(source)
        try:
            with open(source) as fh:
                return json.load(fh), path
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return source, "<memory>"


def _bbox(value, where: str) -> BoundingBox:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise FormatError(f"{where}.bbox: expected [x, y, w, h], got {value!r}")
    try:
        x, y, w, h = (float(v) for v in value)
    except (TypeError, ValueError):
        raise FormatError(f"{where}.bbox: non-numeric entry in {value!r}") from None
    if not all(math.isfinite(v) for v in (x, y, w, h)) or w < 0 or h < 0:
        raise FormatError(f"{where}.bbox: invalid box {value!r}")
    return BoundingBox(x, y, w, h)


def load_ground_truth(source) -> GroundTruthSet:
    """Parse a COCO annotation file (path or already-decoded dict).

    ``iscrowd`` or ``ignore`` set on an annotation marks it as ignored.
    """
    data, path = _load_json(source)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object with images/annotations/categories")
    for key in ("images", "annotations", "categories"):
        if not isinstance(data.get(key), list):
            raise FormatError(f"{path}: missing or non-list field '{key}'")
    categories = {}
    for i, cat in enumerate(data["categories"]):
        if "id" not in cat:
            raise FormatError(f"{path}: categories[{i}].id missing")
        categories[int(cat["id"])] = str(cat.get("name", cat["id"]))
    images: dict[int, list[GroundTruth]] = {}
    for i, im in enumerate(data["images"]):
        if "id" not in im:
            raise FormatError(f"{path}: images[{i}].id missing")
        image_id = int(im["id"])
        if image_id in images:
            raise FormatError(f"{path}: images[{i}].id duplicates image {image_id}")
        images[image_id] = []
    for i, ann in enumerate(data["annotations"]):
        where = f"{path}: annotations[{i}]"
        for key in ("image_id", "category_id", "bbox"):
            if key not in ann:
                raise FormatError(f"{where}.{key} missing")
        image_id = int(ann["image_id"])
        if image_id not in images:
            raise FormatError(f"{where}.image_id: unknown image {image_id}")
        cat = int(ann["category_id"])
        if cat not in categories:
            raise FormatError(f"{where}.category_id: undeclared category {cat}")
        ignore = bool(ann.get("iscrowd", 0)) or bool(ann.get("ignore", 0))
        images[image_id].append(GroundTruth(cat, _bbox(ann["bbox"], where), ignore))
    return GroundTruthSet(images, categories)


def load_detections(source, gts: GroundTruthSet | None = None) -> DetectionSet:
    """Parse a COCO results file: a JSON array of ``{image_id, category_id, bbox, score}``."""
    data, path = _load_json(source)
    if not isinstance(data, list):
        raise FormatError(f"{path}: expected a JSON array of detections")
    images: dict[int, list[Detection]] = {}
    for i, det in enumerate(data):
        where = f"{path}: [{i}]"
        if not isinstance(det, dict):
            raise FormatError(f"{where}: expected an object")
        for key in ("image_id", "category_id", "bbox", "score"):
            if key not in det:
                raise FormatError(f"{where}.{key} missing")
        image_id = int(det["image_id"])
        if gts is not None and image_id not in gts.images:
            raise FormatError(f"{where}.image_id: unknown image {image_id}")
        try:
            score = float(det["score"])
        except (TypeError, ValueError):
            raise FormatError(f"{where}.score: not a number ({det['score']!r})") from None
        if not math.isfinite(score):
            raise FormatError(f"{where}.score: not finite ({det['score']!r})")
        images.setdefault(image_id, []).append(Detection(int(det["category_id"]), _bbox(det["bbox"], where), score))
    return DetectionSet(images)
