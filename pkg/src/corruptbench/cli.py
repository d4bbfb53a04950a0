"""Command line interface: ``corruptbench <command> ...``.

Commands: ``corrupt``, ``evaluate``, ``bench run``, ``bench report``,
``analyze impact`` and ``stylize``. Every command accepts ``--json`` for
machine-readable stdout and ``--config`` for a TOML file of defaults
(``seed``, ``jobs``, ``mode``). Precedence is command-line flag, then config
file, then the ``CORRUPTBENCH_SEED`` environment variable (seed only).

Exit status: 0 on success, 1 on invalid input, 2 on I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from corruptbench import __version__
from corruptbench.analysis import impact_table
from corruptbench.assets import IMAGE_SUFFIXES
from corruptbench.benchmark import BenchmarkReport, emit_report, load_report, round1, run_grid
from corruptbench.corruptions import (
    ALL_CORRUPTIONS,
    BENCHMARK_CORRUPTIONS,
    SEVERITIES,
    VALIDATION_CORRUPTIONS,
    corrupt,
    table_hash,
)
from corruptbench.deteval import EvalConfig, evaluate_detailed, load_detections, load_ground_truth
from corruptbench.imaging import read_image, write_image
from corruptbench.stylize import stylize_image

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
MANIFEST_NAME = "manifest.json"
DEFAULTS = {"seed": 0, "jobs": 1, "mode": "pascal"}


class UsageError(ValueError):
    """Invalid combination of arguments or configuration values."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; here 2 is reserved for I/O failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# -------------------------------------------------------------------- config


def load_config(path) -> dict:
    """Read ``seed``, ``jobs`` and ``mode`` defaults from a TOML file."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"{path}: {exc}") from None
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
    for key in ("seed", "jobs"):
        if key in data and (not isinstance(data[key], int) or isinstance(data[key], bool)):
            raise UsageError(f"{path}: '{key}' must be an integer")
    if "mode" in data and data["mode"] not in ("pascal", "coco"):
        raise UsageError(f"{path}: 'mode' must be 'pascal' or 'coco'")
    return data


def resolve_settings(args, environ=None) -> None:
    """Fill unset ``seed``/``jobs``/``mode`` on ``args``: flag > config > environment > default."""
    environ = os.environ if environ is None else environ
    config = load_config(args.config) if getattr(args, "config", None) else {}
    for key, default in DEFAULTS.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in config:
            value = config[key]
        elif key == "seed" and environ.get("CORRUPTBENCH_SEED"):
            try:
                value = int(environ["CORRUPTBENCH_SEED"])
            except ValueError:
                raise UsageError(f"CORRUPTBENCH_SEED must be an integer, got {environ['CORRUPTBENCH_SEED']!r}") from None
        else:
            value = default
        setattr(args, key, value)
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be at least 1")


# -------------------------------------------------------------------- output


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def _write_manifest(path: Path, command: str, settings: dict, outputs) -> None:
    manifest = {
        "tool_version": __version__,
        "severity_table_hash": table_hash(),
        "command": command,
        "settings": settings,
        "outputs": [{"path": str(p), "sha256": sha256_file(p)} for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------------- corrupt


def _list_images(in_dir: Path) -> list[Path]:
    return sorted(p.relative_to(in_dir) for p in in_dir.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def _corrupt_one(task):
    """Worker: corrupt one image under every condition. Returns (records, error)."""
    in_dir, out_dir, rel, conditions, seed = task
    image_id = rel.as_posix()
    try:
        img = read_image(in_dir / rel)
    except (OSError, ValueError) as exc:
        return [], {"path": image_id, "error": f"{type(exc).__name__}: {exc}"}
    records = []
    for name, severity in conditions:
        out = out_dir / name / str(severity) / rel
        out.parent.mkdir(parents=True, exist_ok=True)
        write_image(out, corrupt(img, name, severity, seed=seed, image_id=image_id))
        records.append(
            {
                "path": image_id,
                "corruption": name,
                "severity": severity,
                "output": out.relative_to(out_dir).as_posix(),
                "sha256": sha256_file(out),
            }
        )
    return records, None


def corrupt_dataset(in_dir, out_dir, corruptions=None, severities=None, seed: int = 0, jobs: int = 1) -> dict:
    """Materialize ``<out>/<corruption>/<severity>/<relpath>`` and return the run manifest.

    Unreadable images are skipped and listed under ``errors``. The manifest is
    also written to ``<out>/manifest.json``.
    """
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    if not in_dir.is_dir():
        raise FileNotFoundError(f"input directory not found: {in_dir}")
    corruptions = list(corruptions or BENCHMARK_CORRUPTIONS)
    severities = list(severities or SEVERITIES)
    conditions = [(c, s) for c in corruptions for s in severities]
    rels = _list_images(in_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(in_dir, out_dir, rel, conditions, seed) for rel in rels]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_corrupt_one, tasks))
    else:
        results = [_corrupt_one(t) for t in tasks]
    records = sorted((r for recs, _ in results for r in recs), key=lambda r: (r["corruption"], r["severity"], r["path"]))
    errors = [err for _, err in results if err is not None]
    manifest = {
        "tool_version": __version__,
        "severity_table_hash": table_hash(),
        "seed": seed,
        "input": str(in_dir),
        "corruptions": corruptions,
        "severities": severities,
        "n_images": len(rels),
        "records": records,
        "errors": errors,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def cmd_corrupt(args) -> int:
    if args.validation:
        allowed = VALIDATION_CORRUPTIONS
    else:
        allowed = BENCHMARK_CORRUPTIONS
    names = args.corruption or list(allowed)
    bad = [n for n in names if n not in allowed]
    if bad:
        kind = "validation" if args.validation else "benchmark"
        hint = "" if args.validation or not set(bad) <= set(ALL_CORRUPTIONS) else " (use --validation)"
        raise UsageError(f"not a {kind} corruption: {', '.join(bad)}{hint}")
    manifest = corrupt_dataset(args.input, args.output, names, args.severity, seed=args.seed, jobs=args.jobs)
    n_ok = manifest["n_images"] - len(manifest["errors"])
    summary = {
        "outputs": len(manifest["records"]),
        "images": manifest["n_images"],
        "failed": len(manifest["errors"]),
        "manifest": str(Path(args.output) / MANIFEST_NAME),
    }
    _emit(args, summary, f"wrote {summary['outputs']} images for {n_ok}/{summary['images']} inputs; manifest {summary['manifest']}")
    for err in manifest["errors"]:
        print(f"skipped {err['path']}: {err['error']}", file=sys.stderr)
    if manifest["n_images"] == 0:
        print(f"no images found under {args.input}", file=sys.stderr)
        return EXIT_IO
    return EXIT_IO if n_ok == 0 else EXIT_OK


# ------------------------------------------------------------------ evaluate


def cmd_evaluate(args) -> int:
    gts = load_ground_truth(args.gt)
    dets = load_detections(args.dets, gts)
    cfg = EvalConfig.for_mode(args.mode, voc07=args.voc07)
    result = evaluate_detailed(dets, gts, cfg)
    value = result.value
    payload = {
        "mode": args.mode,
        "interpolation": cfg.interpolation,
        "P": value,
        "per_category": {
            str(c): (None if all(v is None for v in aps) else 100.0 * sum(v for v in aps if v is not None) / len(aps))
            for c, aps in result.ap.items()
        },
    }
    _emit(args, payload, f"P = {round1(value):.1f} ({args.mode}, {cfg.interpolation})")
    return EXIT_OK


# --------------------------------------------------------------------- bench


def cmd_bench_run(args) -> int:
    gts = load_ground_truth(args.gt)
    cfg = EvalConfig.for_mode(args.mode, voc07=args.voc07)
    grid = run_grid(gts, args.dets, cfg, allow_partial=args.allow_partial, jobs=args.jobs)
    report = BenchmarkReport.from_grid(
        grid,
        model=args.model,
        backbone=args.backbone,
        dataset=args.dataset or Path(args.gt).stem,
        mode=args.mode,
        allow_partial=args.allow_partial,
        interpolation=cfg.interpolation,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    emit_report(report, "json", out)
    settings = {"gt": str(args.gt), "dets": str(args.dets), "mode": args.mode, "voc07": args.voc07,
                "allow_partial": args.allow_partial}
    _write_manifest(out.with_name(out.name + ".manifest.json"), "bench run", settings, [out])
    payload = {"P_clean": report.p_clean, "mPC": report.mpc, "rPC": report.rpc, "missing": report.missing, "out": str(out)}
    if report.is_partial:
        human = f"P_clean = {round1(report.p_clean):.1f}; partial grid, {len(report.missing)} cells missing; wrote {out}"
    else:
        human = (f"P_clean = {round1(report.p_clean):.1f}  mPC = {round1(report.mpc):.1f}  "
                 f"rPC = {round1(report.rpc):.1f}; wrote {out}")
    _emit(args, payload, human)
    return EXIT_OK


def cmd_bench_report(args) -> int:
    reports = [load_report(p) for p in args.inputs]
    text = emit_report(reports[0] if len(reports) == 1 else reports, args.format)
    if args.out:
        Path(args.out).write_text(text)
        _write_manifest(Path(args.out + ".manifest.json"), "bench report",
                        {"inputs": [str(p) for p in args.inputs], "format": args.format}, [Path(args.out)])
    if args.json:
        print(json.dumps({"format": args.format, "content": text, "out": args.out}, sort_keys=True))
    elif not args.out:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------- analyze


def cmd_analyze_impact(args) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")
    corpus = [(rel.as_posix(), read_image(corpus_dir / rel)) for rel in _list_images(corpus_dir)]
    grid = load_report(args.grid).performance_grid()
    table = impact_table(corpus, grid, corruptions=args.corruption, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(table.to_csv())
    settings = {"corpus": str(corpus_dir), "grid": str(args.grid), "seed": args.seed, **table.metadata}
    _write_manifest(out.with_name(out.name + ".manifest.json"), "analyze impact", settings, [out])
    payload = {"rows": len(table.rows), "pearson_rmse": table.pearson_rmse, "pearson_ssim": table.pearson_ssim, "out": str(out)}
    _emit(args, payload, f"r(rPC, RMSE) = {table.pearson_rmse:.3f}  r(rPC, SSIM) = {table.pearson_ssim:.3f}; wrote {out}")
    return EXIT_OK


# ------------------------------------------------------------------- stylize


def cmd_stylize(args) -> int:
    out_img = stylize_image(read_image(args.content), read_image(args.style), alpha=args.alpha)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_image(out, out_img)
    settings = {"content": str(args.content), "style": str(args.style), "alpha": args.alpha}
    _write_manifest(out.with_name(out.name + ".manifest.json"), "stylize", settings, [out])
    _emit(args, {"out": str(out), "shape": list(out_img.shape)}, f"wrote {out}")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _severity(text: str) -> int:
    value = int(text)
    if value not in SEVERITIES:
        raise argparse.ArgumentTypeError(f"severity must be in 1..5, got {text}")
    return value


def _alpha(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in [0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print machine-readable JSON to stdout")
    common.add_argument("--config", metavar="FILE", help="TOML file with default seed, jobs and mode")

    parser = _Parser(prog="corruptbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", parents=[common], help="write corrupted copies of an image directory")
    p.add_argument("--in", dest="input", required=True, metavar="DIR", help="directory of clean images")
    p.add_argument("--out", dest="output", required=True, metavar="DIR", help="output root")
    p.add_argument("--corruption", action="append", choices=ALL_CORRUPTIONS, metavar="NAME",
                   help="restrict to this corruption (repeatable); default is all benchmark corruptions")
    p.add_argument("--severity", action="append", type=_severity, metavar="S", help="restrict to severity 1..5 (repeatable)")
    p.add_argument("--validation", action="store_true", help="use the four validation corruptions instead")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1); output does not depend on it")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("evaluate", parents=[common], help="score one detection file")
    p.add_argument("--gt", required=True, help="COCO-format ground truth JSON")
    p.add_argument("--dets", required=True, help="COCO-format results JSON")
    p.add_argument("--mode", choices=("pascal", "coco"), help="AP50 (pascal) or AP@[.50:.95] (coco)")
    p.add_argument("--voc07", action="store_true", help="pascal mode: 11-point interpolation instead of all-point")
    p.set_defaults(func=cmd_evaluate)

    bench = sub.add_parser("bench", help="corruption-grid benchmark").add_subparsers(dest="bench_command", required=True)
    p = bench.add_parser("run", parents=[common], help="evaluate every condition and write a report")
    p.add_argument("--gt", required=True, help="COCO-format ground truth JSON")
    p.add_argument("--dets", required=True, help="directory with clean.json and <corruption>/<severity>.json")
    p.add_argument("--mode", choices=("pascal", "coco"), help="performance measure")
    p.add_argument("--voc07", action="store_true", help="pascal mode: 11-point interpolation")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--model", default="model", help="model name for the report")
    p.add_argument("--backbone", default="", help="backbone name for the report")
    p.add_argument("--dataset", default="", help="dataset name (default: ground-truth file stem)")
    p.add_argument("--allow-partial", action="store_true", help="write a report even if cells are missing (no mPC/rPC)")
    p.add_argument("--jobs", type=int, help="parallel evaluations")
    p.set_defaults(func=cmd_bench_run)

    p = bench.add_parser("report", parents=[common], help="render reports as json, md or csv")
    p.add_argument("--in", dest="inputs", action="append", required=True, metavar="REPORT",
                   help="report JSON (repeatable; rows are ranked by mPC)")
    p.add_argument("--format", choices=("json", "md", "csv"), default="md")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_bench_report)

    analyze = sub.add_parser("analyze", help="corruption impact analysis").add_subparsers(dest="analyze_command", required=True)
    p = analyze.add_parser("impact", parents=[common], help="RMSE/SSIM per corruption against rPC")
    p.add_argument("--corpus", required=True, help="directory of clean images")
    p.add_argument("--grid", required=True, help="report JSON from 'bench run'")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--corruption", action="append", choices=ALL_CORRUPTIONS, metavar="NAME",
                   help="restrict to this corruption (repeatable)")
    p.add_argument("--seed", type=int, help="base seed for corrupting the corpus")
    p.set_defaults(func=cmd_analyze_impact)

    p = sub.add_parser("stylize", parents=[common], help="pixel-space AdaIN colour transfer")
    p.add_argument("--content", required=True, help="content image")
    p.add_argument("--style", required=True, help="style image")
    p.add_argument("--alpha", type=_alpha, default=1.0, help="blend weight in [0, 1] (default 1)")
    p.add_argument("--out", required=True, help="output image path")
    p.set_defaults(func=cmd_stylize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return int(exc.code or 0)
    try:
        resolve_settings(args)
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
