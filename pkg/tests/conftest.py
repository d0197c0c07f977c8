"""Shared helpers: random labeled images and random ellipse parameters."""

import numpy as np
import pytest

from perifit import EllipseParams, LabeledImage, interior_table

CLASS_CODES = np.array([0, 1, 2, 3, 255], dtype=np.uint8)


def random_labels(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    return CLASS_CODES[rng.integers(0, len(CLASS_CODES), size=(height, width))]


def random_image(rng: np.random.Generator, width: int, height: int) -> LabeledImage:
    return LabeledImage(random_labels(rng, width, height))


def random_params(rng: np.random.Generator, width: int, height: int,
                  snap_probability: float = 0.3) -> EllipseParams:
    """Random ellipse around (and sometimes off) the image.

    A fraction of draws is snapped to integers to stress pixels that land
    exactly on the outline (E == 1).
    """
    params = EllipseParams(
        rng.uniform(0.0, 360.0),
        rng.uniform(-0.3 * width, 1.3 * width),
        rng.uniform(-0.3 * height, 1.3 * height),
        rng.uniform(0.5, 0.8 * width),
        rng.uniform(0.5, 0.8 * height),
    )
    if rng.random() < snap_probability:
        params = EllipseParams(
            round(params.theta),
            round(params.x_c),
            round(params.y_c),
            max(1.0, round(params.a)),
            max(1.0, round(params.b)),
        )
    return params


def span_membership(params: EllipseParams, width: int, height: int) -> np.ndarray:
    """Boolean grid of the pixels covered by the scanline interior."""
    grid = np.zeros((height, width), dtype=bool)
    ys, lo, hi = interior_table(params, width, height)
    for y, left, right in zip(ys, lo, hi):
        grid[y, left : right + 1] = True
    return grid


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
