import numpy as np
import pytest

from corruptbench.assets import corpus_paths, toy_dir
from corruptbench.imaging import read_image
from corruptbench.deteval import load_ground_truth


@pytest.fixture(scope="session")
def corpus():
    """The shipped mini corpus as (image_id, image) pairs."""
    return [(p.name, read_image(p)) for p in corpus_paths()]


@pytest.fixture(scope="session")
def toy_gt():
    return load_ground_truth(toy_dir() / "gt.json")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rgb_image(rng):
    return rng.integers(0, 256, (48, 64, 3), dtype=np.uint8)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion; printed again in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"[criterion {number}] {'PASS' if passed else 'FAIL'}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
