"""Access to bundled data: frost textures, the mini corpus and the toy benchmark fixture."""

from __future__ import annotations

from functools import lru_cache
from importlib.resources import files
from pathlib import Path

import numpy as np

from corruptbench.imaging import read_image

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def data_dir() -> Path:
    return Path(str(files("corruptbench") / "data"))


@lru_cache(maxsize=1)
def frost_textures() -> tuple[np.ndarray, ...]:
    """The bundled frost textures as RGB uint8 arrays, in file-name order."""
    paths = sorted(p for p in (data_dir() / "frost").iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise FileNotFoundError("no frost textures bundled under data/frost")
    textures = []
    for p in paths:
        tex = read_image(p)
        if tex.shape[2] == 1:
            tex = np.repeat(tex, 3, axis=2)
        tex.setflags(write=False)
        textures.append(tex)
    return tuple(textures)


def corpus_dir() -> Path:
    return data_dir() / "corpus"


def corpus_paths() -> list[Path]:
    return sorted(p for p in corpus_dir().iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def load_corpus() -> list[np.ndarray]:
    """The 20-image mini corpus, sorted by file name."""
    return [read_image(p) for p in corpus_paths()]


def toy_dir() -> Path:
    """Root of the toy benchmark: ``gt.json`` and ``dets/`` laid out for ``bench run``."""
    return data_dir() / "toy"
