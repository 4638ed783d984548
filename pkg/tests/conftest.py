from pathlib import Path
from typing import Callable

import numpy as np
import pytest
from dotenv import load_dotenv

from muskat.models.grid import GridFunction, PeriodicGrid

load_dotenv()

CONFIG_DIR = Path(__file__).resolve().parent.parent / "muskat" / "configs"


@pytest.fixture
def grid64() -> PeriodicGrid:
    return PeriodicGrid(64)


@pytest.fixture
def grid256() -> PeriodicGrid:
    return PeriodicGrid(256)


@pytest.fixture
def cosine() -> Callable[..., GridFunction]:
    """Factory for a * cos(mode x) + offset on a given grid."""

    def _cosine(grid: PeriodicGrid, amplitude: float = 1.0, mode: int = 1, offset: float = 0.0):
        return GridFunction.from_function(
            grid, lambda x: amplitude * np.cos(mode * x) + offset
        )

    return _cosine


@pytest.fixture
def band_limited() -> Callable[..., GridFunction]:
    """Seeded random trigonometric polynomial with modes 1..top and no Nyquist content."""

    def _band_limited(grid: PeriodicGrid, top: int = 4, seed: int = 0):
        rng = np.random.default_rng(seed)
        k = np.arange(1, top + 1)
        a, b = rng.standard_normal(top), rng.standard_normal(top)
        x = grid.nodes
        values = np.cos(np.outer(x, k)) @ a + np.sin(np.outer(x, k)) @ b
        return GridFunction(grid, values)

    return _band_limited


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Writes a flat key = value config into the test's temporary directory."""

    def _write(name: str = "run.cfg", **values) -> Path:
        path = tmp_path / name
        lines = [f"{key} = {value}" for key, value in values.items()]
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "out"
