"""Regenerate the bundled data under src/corruptbench/data.

Everything is procedural and seeded, so rerunning reproduces the committed files:

    python scripts/make_assets.py

* ``frost/``  six frost textures (ice-crystal dendrites over a cold haze)
* ``corpus/`` twenty small synthetic outdoor scenes (two of them grayscale)
* ``toy/``    a three-image detection benchmark: COCO ground truth plus one
  detection file per condition, laid out as ``dets/clean.json`` and
  ``dets/<corruption>/<severity>.json``
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter

from corruptbench.corruptions.catalog import ALL_CORRUPTIONS, SEVERITIES
from corruptbench.corruptions.weather import plasma_fractal
from corruptbench.imaging import derive_seed

DATA = Path(__file__).resolve().parents[1] / "src" / "corruptbench" / "data"


def _rng(*key) -> np.random.Generator:
    return np.random.default_rng(derive_seed(2019, "assets", "/".join(map(str, key))))


# --------------------------------------------------------------------- frost


def _dendrite(draw, rng, x, y, angle, length, depth, width):
    if depth == 0 or length < 2:
        return
    x2 = x + length * math.cos(angle)
    y2 = y + length * math.sin(angle)
    draw.line([(x, y), (x2, y2)], fill=int(rng.integers(170, 256)), width=width)
    n_side = int(rng.integers(2, 5))
    for _ in range(n_side):
        t = rng.uniform(0.2, 0.9)
        bx, by = x + t * (x2 - x), y + t * (y2 - y)
        side = rng.choice([-1.0, 1.0]) * rng.uniform(math.radians(45), math.radians(75))
        _dendrite(draw, rng, bx, by, angle + side, length * rng.uniform(0.25, 0.45), depth - 1, max(1, width - 1))
    _dendrite(draw, rng, x2, y2, angle + rng.normal(0, 0.25), length * 0.7, depth - 1, width)


def make_frost(index: int, width: int, height: int) -> np.ndarray:
    rng = _rng("frost", index)
    haze = plasma_fractal(height, width, 1.8, rng)
    crystals = Image.new("L", (width, height), 0)
    draw = ImageDraw.Draw(crystals)
    n_seeds = int(width * height / 2500)
    for _ in range(n_seeds):
        _dendrite(
            draw,
            rng,
            rng.uniform(0, width),
            rng.uniform(0, height),
            rng.uniform(0, 2 * math.pi),
            rng.uniform(15, 45),
            depth=4,
            width=int(rng.integers(1, 3)),
        )
    sharp = np.asarray(crystals.filter(ImageFilter.GaussianBlur(0.7)), dtype=np.float64) / 255
    glow = np.asarray(crystals.filter(ImageFilter.GaussianBlur(5)), dtype=np.float64) / 255
    sparkle = (rng.random((height, width)) < 0.004) * rng.uniform(0.3, 0.8, (height, width))
    f = 0.2 + 0.25 * haze + 0.55 * sharp + 0.9 * glow + sparkle
    tint = np.array([0.86, 0.93, 1.0])
    rgb = np.clip(f[..., None] * tint, 0, 1)
    return np.rint(rgb * 255).astype(np.uint8)


# -------------------------------------------------------------------- corpus


def _vertical_gradient(h, w, top, bottom):
    t = np.linspace(0, 1, h)[:, None, None]
    return (1 - t) * np.asarray(top) + t * np.asarray(bottom) * np.ones((1, w, 1))


def make_scene(index: int, width: int, height: int, gray: bool) -> np.ndarray:
    rng = _rng("scene", index)
    horizon = int(height * rng.uniform(0.35, 0.65))
    sky_top = rng.uniform([60, 90, 150], [130, 170, 240])
    sky_low = rng.uniform([170, 190, 210], [230, 235, 250])
    ground = rng.uniform([40, 60, 20], [140, 130, 90])
    img = _vertical_gradient(height, width, sky_top, sky_low)
    texture = plasma_fractal(height, width, 1.6, rng)[..., None]
    img[horizon:] = ground * (0.7 + 0.6 * texture[horizon:])

    canvas = Image.fromarray(np.clip(img, 0, 255).astype(np.uint8), "RGB")
    draw = ImageDraw.Draw(canvas)
    if rng.random() < 0.6:
        r = rng.uniform(0.04, 0.09) * width
        cx, cy = rng.uniform(0.1, 0.9) * width, rng.uniform(0.08, 0.3) * height
        draw.ellipse([cx - r, cy - r, cx + r, cy + r], fill=(255, 240, 190))
    for _ in range(int(rng.integers(2, 6))):
        bw = rng.uniform(0.08, 0.22) * width
        bh = rng.uniform(0.15, 0.45) * height
        x0 = rng.uniform(-0.05, 0.95) * width
        y1 = horizon + rng.uniform(0, 0.1) * height
        color = tuple(int(v) for v in rng.uniform([60, 50, 50], [220, 200, 190]))
        draw.rectangle([x0, y1 - bh, x0 + bw, y1], fill=color, outline=(30, 30, 30))
        win = tuple(int(v) for v in rng.uniform([150, 150, 90], [255, 240, 160]))
        step = max(4.0, bw / 5)
        for wx in np.arange(x0 + step / 2, x0 + bw - step / 2, step):
            for wy in np.arange(y1 - bh + step / 2, y1 - step, step * 1.3):
                draw.rectangle([wx, wy, wx + step / 3, wy + step / 3], fill=win)
    for _ in range(int(rng.integers(2, 7))):
        rx, ry = rng.uniform(0.03, 0.08) * width, rng.uniform(0.05, 0.12) * height
        cx, cy = rng.uniform(0, 1) * width, horizon + rng.uniform(-0.05, 0.3) * height
        leaf = tuple(int(v) for v in rng.uniform([20, 70, 20], [80, 160, 70]))
        draw.rectangle([cx - rx / 6, cy, cx + rx / 6, cy + ry * 1.4], fill=(90, 60, 30))
        draw.ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=leaf, outline=(15, 40, 15))
    for _ in range(int(rng.integers(1, 4))):
        pts = [(rng.uniform(0, width), rng.uniform(horizon, height)) for _ in range(int(rng.integers(3, 6)))]
        draw.polygon(pts, fill=tuple(int(v) for v in rng.uniform(0, 255, 3)))

    canvas = canvas.filter(ImageFilter.GaussianBlur(0.6))
    out = np.asarray(canvas, dtype=np.float64) + rng.normal(0, 3.0, (height, width, 3))
    out = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    if gray:
        return np.asarray(Image.fromarray(out, "RGB").convert("L"))
    return out


# ----------------------------------------------------------------------- toy

TOY_CATEGORIES = [{"id": 1, "name": "car"}, {"id": 2, "name": "person"}]

TOY_IMAGES = [
    {"id": 1, "file_name": "street.png", "width": 200, "height": 150},
    {"id": 2, "file_name": "park.png", "width": 180, "height": 160},
    {"id": 3, "file_name": "plaza.png", "width": 220, "height": 140},
]

# (image_id, category_id, [x, y, w, h], iscrowd)
TOY_GT = [
    (1, 1, [10, 60, 60, 35], 0),
    (1, 1, [110, 70, 70, 40], 0),
    (1, 2, [80, 40, 18, 50], 0),
    (2, 2, [20, 30, 22, 60], 0),
    (2, 2, [60, 35, 20, 55], 0),
    (2, 1, [100, 90, 70, 45], 0),
    (2, 2, [130, 10, 40, 30], 1),
    (3, 2, [15, 50, 20, 55], 0),
    (3, 2, [45, 45, 22, 60], 0),
    (3, 2, [160, 60, 18, 50], 0),
    (3, 1, [80, 70, 65, 40], 0),
]


def _jitter(box, amount, rng):
    x, y, w, h = box
    dx, dy = rng.normal(0, amount * w), rng.normal(0, amount * h)
    sw, sh = np.exp(rng.normal(0, amount, 2))
    return [round(float(v), 2) for v in (x + dx, y + dy, max(1.0, w * sw), max(1.0, h * sh))]


def toy_detections(condition: str, severity: int) -> list[dict]:
    """Per-condition detections: harm grows with a corruption-specific sensitivity times severity."""
    rng = _rng("toy", condition, severity)
    if severity == 0:
        harm = 0.0
    else:
        sensitivity = 0.15 + 0.85 * _rng("sensitivity", condition).random()
        harm = sensitivity * severity / 5
    dets = []
    for image_id, cat, box, crowd in TOY_GT:
        if crowd:
            continue
        if rng.random() < 0.8 * harm:
            continue
        score = float(np.clip(0.95 - 0.6 * harm + rng.normal(0, 0.05), 0.05, 1.0))
        dets.append(
            {"image_id": image_id, "category_id": cat, "bbox": _jitter(box, 0.03 + 0.2 * harm, rng), "score": round(score, 4)}
        )
    n_fp = 1 + int(rng.poisson(4 * harm))
    for _ in range(n_fp):
        img = TOY_IMAGES[int(rng.integers(len(TOY_IMAGES)))]
        w, h = rng.uniform(10, 50), rng.uniform(10, 50)
        dets.append(
            {
                "image_id": img["id"],
                "category_id": int(rng.integers(1, 3)),
                "bbox": [round(float(v), 2) for v in (rng.uniform(0, img["width"] - w), rng.uniform(0, img["height"] - h), w, h)],
                "score": round(float(rng.uniform(0.05, 0.5 + 0.4 * harm)), 4),
            }
        )
    return dets


def write_toy(root: Path) -> None:
    gt = {
        "images": TOY_IMAGES,
        "categories": TOY_CATEGORIES,
        "annotations": [
            {"id": i + 1, "image_id": im, "category_id": c, "bbox": b, "area": b[2] * b[3], "iscrowd": crowd}
            for i, (im, c, b, crowd) in enumerate(TOY_GT)
        ],
    }
    (root / "gt.json").write_text(json.dumps(gt, indent=1))
    dets = root / "dets"
    dets.mkdir(parents=True, exist_ok=True)
    (dets / "clean.json").write_text(json.dumps(toy_detections("clean", 0)))
    for name in ALL_CORRUPTIONS:
        (dets / name).mkdir(exist_ok=True)
        for s in SEVERITIES:
            (dets / name / f"{s}.json").write_text(json.dumps(toy_detections(name, s)))


FROST_SIZES = [(512, 384), (600, 400), (480, 480), (640, 427), (560, 420), (500, 500)]
SCENE_SIZES = [(160, 120), (128, 96), (150, 100), (120, 160), (176, 132)]


def main() -> None:
    (DATA / "frost").mkdir(parents=True, exist_ok=True)
    for i, (w, h) in enumerate(FROST_SIZES, start=1):
        Image.fromarray(make_frost(i, w, h), "RGB").save(DATA / "frost" / f"frost{i}.png", optimize=True)
    (DATA / "corpus").mkdir(parents=True, exist_ok=True)
    for i in range(20):
        w, h = SCENE_SIZES[i % len(SCENE_SIZES)]
        arr = make_scene(i, w, h, gray=i in (7, 15))
        Image.fromarray(arr).save(DATA / "corpus" / f"scene{i:02d}.png", optimize=True)
    write_toy(DATA / "toy")


if __name__ == "__main__":
    main()
