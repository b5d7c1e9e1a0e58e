from pathlib import Path

import numpy as np
import pytest

from phashbench.imageio import RasterImage, read_image

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN_FILE = FIXTURES / "golden" / "goldens.json"


def noise_image(seed: int, width: int, height: int) -> RasterImage:
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))


def smooth_image(seed: int, width: int, height: int) -> RasterImage:
    """Low-frequency random field, closer to a photo than white noise."""
    rng = np.random.default_rng(seed)
    coarse = rng.uniform(0, 255, (6, 6, 3))
    ys = np.linspace(0, 5, height)
    xs = np.linspace(0, 5, width)
    yi = np.clip(ys.astype(int), 0, 4)
    xi = np.clip(xs.astype(int), 0, 4)
    fy = (ys - yi)[:, None, None]
    fx = (xs - xi)[None, :, None]
    top = coarse[yi][:, xi] * (1 - fx) + coarse[yi][:, xi + 1] * fx
    bot = coarse[yi + 1][:, xi] * (1 - fx) + coarse[yi + 1][:, xi + 1] * fx
    return RasterImage(np.rint(top * (1 - fy) + bot * fy).astype(np.uint8))


def fixture_image(name: str = "fx000.jpg") -> RasterImage:
    return read_image(FIXTURES / "golden" / name)


@pytest.fixture(scope="session")
def photo() -> RasterImage:
    """A 545x494 natural photograph from the fixture set."""
    return fixture_image("fx000.jpg")


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
