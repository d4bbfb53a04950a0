"""Corruption-grid benchmark: P_clean, mPC, rPC and report emission.

mPC is the flat mean of P over the 15 benchmark corruptions and 5 severities;
rPC is mPC relative to clean performance. Validation-corruption results are
kept in a separate store and never enter either aggregate.

>>> round(rpc(48.6, 80.5), 1)
60.4
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np

from corruptbench import __version__
from corruptbench.corruptions.catalog import (
    BENCHMARK_CORRUPTIONS,
    GROUP_OF,
    SEVERITIES,
    VALIDATION_CORRUPTIONS,
    table_hash,
)
from corruptbench.deteval import EvalConfig, FormatError, GroundTruthSet, evaluate, load_detections

Cell = tuple[str, int]


class IncompleteGridError(ValueError):
    """Raised when aggregation is attempted on a grid with missing cells."""

    def __init__(self, missing: list[Cell]):
        self.missing = list(missing)
        shown = ", ".join(f"({c}, {s})" for c, s in self.missing[:10])
        more = f" and {len(self.missing) - 10} more" if len(self.missing) > 10 else ""
        super().__init__(f"{len(self.missing)} missing grid cells: {shown}{more}")


def round1(value: float) -> float:
    """Round half-to-even to one decimal on the decimal representation."""
    return float(Decimal(repr(float(value))).quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN))


def _check_percent(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 100.0:
        raise ValueError(f"{what} must be a percentage in [0, 100], got {value}")
    return value


@dataclass
class PerformanceGrid:
    """Clean performance plus P for each (corruption, severity) cell, all in percent.

    ``cells`` holds benchmark corruptions only; validation corruptions go into
    ``validation``. :meth:`set` routes by name.
    """

    p_clean: float | None = None
    cells: dict[Cell, float] = field(default_factory=dict)
    validation: dict[Cell, float] = field(default_factory=dict)
    corruptions: tuple[str, ...] = BENCHMARK_CORRUPTIONS
    severities: tuple[int, ...] = SEVERITIES

    def set(self, corruption: str, severity: int, value: float) -> None:
        value = _check_percent(value, f"P[{corruption}, {severity}]")
        if severity not in self.severities:
            raise ValueError(f"severity must be one of {self.severities}, got {severity}")
        if corruption in self.corruptions:
            self.cells[(corruption, severity)] = value
        elif corruption in VALIDATION_CORRUPTIONS:
            self.validation[(corruption, severity)] = value
        else:
            raise ValueError(f"unknown corruption {corruption!r}")

    @classmethod
    def from_matrix(cls, p_clean: float, matrix, corruptions=BENCHMARK_CORRUPTIONS) -> "PerformanceGrid":
        """Build a grid from an ``(n_corruptions, 5)`` array in ``corruptions`` order."""
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (len(corruptions), len(SEVERITIES)):
            raise ValueError(f"expected a {len(corruptions)}x{len(SEVERITIES)} matrix, got {m.shape}")
        grid = cls(p_clean=_check_percent(p_clean, "p_clean"), corruptions=tuple(corruptions))
        for i, c in enumerate(corruptions):
            for j, s in enumerate(SEVERITIES):
                grid.set(c, s, m[i, j])
        return grid

    def missing(self) -> list[Cell]:
        return [(c, s) for c in self.corruptions for s in self.severities if (c, s) not in self.cells]

    def is_complete(self) -> bool:
        return self.p_clean is not None and not self.missing()

    def matrix(self) -> np.ndarray:
        missing = self.missing()
        if missing:
            raise IncompleteGridError(missing)
        return np.array([[self.cells[(c, s)] for s in self.severities] for c in self.corruptions])

    def corruption_means(self) -> dict[str, float]:
        m = self.matrix()
        return {c: float(v) for c, v in zip(self.corruptions, m.mean(axis=1))}

    def severity_means(self) -> dict[int, float]:
        m = self.matrix()
        return {s: float(v) for s, v in zip(self.severities, m.mean(axis=0))}

    def to_dict(self) -> dict:
        return {"p_clean": self.p_clean, "cells": _nest(self.cells), "validation": _nest(self.validation)}

    @classmethod
    def from_dict(cls, data: dict) -> "PerformanceGrid":
        grid = cls(p_clean=data.get("p_clean"))
        for key in ("cells", "validation"):
            for c, row in (data.get(key) or {}).items():
                for s, v in row.items():
                    grid.set(c, int(s), v)
        return grid


def _nest(cells: dict[Cell, float]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for (c, s), v in sorted(cells.items()):
        out.setdefault(c, {})[str(s)] = v
    return out


def mpc(grid: PerformanceGrid) -> float:
    """Mean performance under corruption: the flat mean over all grid cells."""
    return float(grid.matrix().mean())


def rpc(mpc_value: float, p_clean: float) -> float:
    """Relative performance under corruption, in percent."""
    if p_clean <= 0:
        raise ValueError(f"clean performance must be positive, got {p_clean}")
    return 100.0 * mpc_value / p_clean


# ------------------------------------------------------------------ running


def condition_path(dets_dir: Path, corruption: str | None = None, severity: int | None = None) -> Path:
    if corruption is None:
        return Path(dets_dir) / "clean.json"
    return Path(dets_dir) / corruption / f"{severity}.json"


def run_grid(
    gts: GroundTruthSet,
    dets_dir,
    cfg: EvalConfig,
    allow_partial: bool = False,
    include_validation: bool = True,
    jobs: int = 1,
) -> PerformanceGrid:
    """Evaluate ``clean.json`` and every ``<corruption>/<severity>.json`` under ``dets_dir``.

    Missing benchmark cells raise :class:`IncompleteGridError` listing all of
    them, unless ``allow_partial`` is set; missing validation files are skipped.
    """
    dets_dir = Path(dets_dir)
    clean = condition_path(dets_dir)
    if not clean.is_file():
        raise FileNotFoundError(f"clean detections not found: {clean}")
    conditions = [(c, s) for c in BENCHMARK_CORRUPTIONS for s in SEVERITIES]
    missing = [cell for cell in conditions if not condition_path(dets_dir, *cell).is_file()]
    if missing and not allow_partial:
        raise IncompleteGridError(missing)
    todo = [cell for cell in conditions if cell not in missing]
    if include_validation:
        todo += [(c, s) for c in VALIDATION_CORRUPTIONS for s in SEVERITIES if condition_path(dets_dir, c, s).is_file()]

    def score(path: Path) -> float:
        return evaluate(load_detections(path, gts), gts, cfg)

    grid = PerformanceGrid(p_clean=score(clean))
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        values = list(pool.map(lambda cell: score(condition_path(dets_dir, *cell)), todo))
    for (c, s), v in zip(todo, values):
        grid.set(c, s, v)
    return grid


# ------------------------------------------------------------------ reports


@dataclass
class BenchmarkReport:
    """Aggregates of one complete grid plus the metadata that makes it comparable."""

    model: str
    backbone: str
    dataset: str
    mode: str
    p_clean: float
    mpc: float | None
    rpc: float | None
    per_corruption: dict[str, float]
    per_severity: dict[int, float]
    validation: dict[str, float] = field(default_factory=dict)
    grid: dict | None = None
    missing: list = field(default_factory=list)
    seed: int | None = None
    interpolation: str = ""
    version: str = __version__
    table_hash: str = field(default_factory=table_hash)

    @classmethod
    def from_grid(
        cls, grid: PerformanceGrid, model="model", backbone="", dataset="", mode="pascal", allow_partial=False, **meta
    ):
        """Aggregate ``grid``; with ``allow_partial`` an incomplete grid yields a
        report that lists its missing cells and carries no mPC/rPC."""
        if grid.p_clean is None:
            raise IncompleteGridError([("clean", 0)])
        missing = grid.missing()
        if missing and not allow_partial:
            raise IncompleteGridError(missing)
        validation = {}
        for c in VALIDATION_CORRUPTIONS:
            vals = [grid.validation[(c, s)] for s in SEVERITIES if (c, s) in grid.validation]
            if len(vals) == len(SEVERITIES):
                validation[c] = float(np.mean(vals))
        if missing:
            m = r = None
            per_corruption = {
                c: float(np.mean([grid.cells[(c, s)] for s in SEVERITIES]))
                for c in grid.corruptions
                if all((c, s) in grid.cells for s in SEVERITIES)
            }
            per_severity = {}
        else:
            m = mpc(grid)
            r = rpc(m, grid.p_clean)
            per_corruption, per_severity = grid.corruption_means(), grid.severity_means()
        return cls(
            model=model,
            backbone=backbone,
            dataset=dataset,
            mode=mode,
            p_clean=grid.p_clean,
            mpc=m,
            rpc=r,
            per_corruption=per_corruption,
            per_severity=per_severity,
            validation=validation,
            grid=grid.to_dict(),
            missing=[list(cell) for cell in missing],
            **meta,
        )

    @property
    def is_partial(self) -> bool:
        return bool(self.missing)

    def performance_grid(self) -> PerformanceGrid:
        if self.grid is None:
            raise ValueError("report does not embed its performance grid")
        return PerformanceGrid.from_dict(self.grid)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_severity"] = {str(k): v for k, v in self.per_severity.items()}
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BenchmarkReport":
        data = dict(data)
        data["per_severity"] = {int(k): float(v) for k, v in (data.get("per_severity") or {}).items()}
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValueError(f"not a benchmark report: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkReport":
        return cls.from_dict(json.loads(text))


def load_report(path) -> BenchmarkReport:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a report object")
    for key in ("model", "p_clean", "mpc", "rpc", "per_corruption"):
        if key not in data:
            raise FormatError(f"{path}: report field '{key}' missing")
    try:
        return BenchmarkReport.from_dict(data)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _ranked(reports) -> list[BenchmarkReport]:
    if isinstance(reports, BenchmarkReport):
        reports = [reports]
    for r in reports:
        if r.is_partial:
            raise IncompleteGridError([tuple(cell) for cell in r.missing])
    return sorted(reports, key=lambda r: -r.mpc)


def markdown_table(reports) -> str:
    """Submission table, one row per report, ranked by mPC."""
    lines = ["| model | backbone | P | mPC | rPC |", "|---|---|---|---|---|"]
    for r in _ranked(reports):
        lines.append(f"| {r.model} | {r.backbone} | {round1(r.p_clean):.1f} | {round1(r.mpc):.1f} | {round1(r.rpc):.1f} |")
    return "\n".join(lines) + "\n"


def csv_table(reports) -> str:
    """One row per report with the headline numbers and per-corruption means."""
    ranked = _ranked(reports)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "backbone", "dataset", "mode", "p_clean", "mpc", "rpc", *BENCHMARK_CORRUPTIONS])
    for r in ranked:
        writer.writerow(
            [r.model, r.backbone, r.dataset, r.mode, round1(r.p_clean), round1(r.mpc), round1(r.rpc)]
            + [round1(r.per_corruption[c]) for c in BENCHMARK_CORRUPTIONS]
        )
    return buf.getvalue()


def emit_report(reports, fmt: str = "json", path=None) -> str:
    """Render one or more reports as ``json``, ``md`` or ``csv``; optionally write to ``path``."""
    if fmt == "json":
        if isinstance(reports, BenchmarkReport):
            text = reports.to_json() + "\n"
        else:
            text = json.dumps([r.to_dict() for r in _ranked(reports)], indent=2, sort_keys=True) + "\n"
    elif fmt == "md":
        text = markdown_table(reports)
    elif fmt == "csv":
        text = csv_table(reports)
    else:
        raise ValueError(f"format must be json, md or csv, got {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def group_means(report: BenchmarkReport) -> dict[str, float]:
    """Mean P per corruption group (noise, blur, weather, digital)."""
    groups: dict[str, list[float]] = {}
    for c, v in report.per_corruption.items():
        groups.setdefault(GROUP_OF[c], []).append(v)
    return {g: float(np.mean(v)) for g, v in groups.items()}
