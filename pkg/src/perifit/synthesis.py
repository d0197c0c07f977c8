"""Synthetic phantoms with planted ellipses and a brute-force grid oracle.

A phantom mimics the structure of a manually labeled slice: the planted
ellipse interior holds red pixels (at a configurable fill fraction, the
rest of the interior being "other" tissue), a green ring of configurable
thickness surrounds it, a few grey blobs sit outside the ring, and
everything else is black.  Optional label noise reassigns a fraction of
pixels to random classes.  Because the planted parameters are known,
recovery quality of the optimizer is measurable.

The grid oracle evaluates the naive objective at every lattice point of a
parameter grid, which bounds from below what any search should achieve.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry, scoring
from .errors import GridSizeError, PhantomError
from .evolve import ParameterRanges
from .geometry import EllipseParams
from .scoring import ClassWeights, LabeledImage, PixelClass

__all__ = [
    "PhantomSpec",
    "GridSpec",
    "MAX_GRID_POINTS",
    "generate_phantom",
    "grid_search",
]

MAX_GRID_POINTS = 10**8

_NOISE_CLASSES = np.array(
    [int(PixelClass.BLACK), int(PixelClass.RED), int(PixelClass.GREEN),
     int(PixelClass.GREY), int(PixelClass.OTHER)],
    dtype=np.uint8,
)

_BLOB_ATTEMPTS = 200


def _default_planted() -> EllipseParams:
    return EllipseParams(theta=30.0, x_c=256.0, y_c=256.0, a=150.0, b=110.0)


@dataclass(frozen=True)
class PhantomSpec:
    """Recipe for one phantom; the planted ellipse plus its green ring must fit."""

    width: int = 512
    height: int = 512
    planted: EllipseParams = field(default_factory=_default_planted)
    ring_thickness: float = 14.0
    red_fill_fraction: float = 0.5
    grey_blob_count: int = 6
    noise_flip_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise PhantomError("phantom dimensions must be positive")
        if self.ring_thickness < 0.0:
            raise PhantomError("ring_thickness must be >= 0")
        if not 0.0 <= self.red_fill_fraction <= 1.0:
            raise PhantomError("red_fill_fraction must lie in [0, 1]")
        if not 0.0 <= self.noise_flip_fraction <= 1.0:
            raise PhantomError("noise_flip_fraction must lie in [0, 1]")
        if self.grey_blob_count < 0:
            raise PhantomError("grey_blob_count must be >= 0")
        x_lo, x_hi, y_lo, y_hi = geometry.bounding_box(self.dilated())
        if x_lo < 0.0 or y_lo < 0.0 or x_hi > self.width - 1 or y_hi > self.height - 1:
            raise PhantomError(
                f"planted ellipse plus ring exceeds the {self.width}x{self.height} image bounds"
            )

    def dilated(self) -> EllipseParams:
        """Planted ellipse grown by the ring thickness on both axes."""
        p = self.planted
        return EllipseParams(p.theta, p.x_c, p.y_c, p.a + self.ring_thickness,
                             p.b + self.ring_thickness)


def generate_phantom(spec: PhantomSpec) -> tuple[LabeledImage, EllipseParams]:
    """Build the phantom image; returns it with the planted parameters."""
    rng = np.random.default_rng(spec.seed)
    w, h = spec.width, spec.height
    labels = np.full((h, w), int(PixelClass.BLACK), dtype=np.uint8)

    dilated = spec.dilated()
    dilated_values = geometry.values_grid(dilated, w, h)
    labels[dilated_values < 1.0] = int(PixelClass.GREEN)

    interior = geometry.values_grid(spec.planted, w, h) < 1.0
    flat_interior = np.flatnonzero(interior)
    labels.flat[flat_interior] = int(PixelClass.OTHER)
    n_red = int(round(spec.red_fill_fraction * flat_interior.size))
    if n_red:
        chosen = rng.choice(flat_interior.size, size=n_red, replace=False)
        labels.flat[flat_interior[chosen]] = int(PixelClass.RED)

    max_radius = max(2.0, min(w, h) / 48.0)
    for blob in range(spec.grey_blob_count):
        for _ in range(_BLOB_ATTEMPTS):
            cx = rng.uniform(0.0, w - 1.0)
            cy = rng.uniform(0.0, h - 1.0)
            radius = rng.uniform(1.5, max_radius)
            x0, x1 = math.ceil(cx - radius), math.floor(cx + radius)
            y0, y1 = math.ceil(cy - radius), math.floor(cy + radius)
            if x0 < 0 or y0 < 0 or x1 > w - 1 or y1 > h - 1:
                continue
            xs = np.arange(x0, x1 + 1, dtype=np.float64) - cx
            ys = np.arange(y0, y1 + 1, dtype=np.float64) - cy
            disc = xs[np.newaxis, :] ** 2 + ys[:, np.newaxis] ** 2 <= radius * radius
            if not disc.any():
                continue
            window = dilated_values[y0 : y1 + 1, x0 : x1 + 1]
            if (window[disc] < 1.0).any():  # would touch the ring or interior
                continue
            labels[y0 : y1 + 1, x0 : x1 + 1][disc] = int(PixelClass.GREY)
            break
        else:
            raise PhantomError(
                f"could not place grey blob {blob + 1} of {spec.grey_blob_count} "
                f"outside the ring after {_BLOB_ATTEMPTS} attempts"
            )

    flips = int(round(spec.noise_flip_fraction * w * h))
    if flips:
        pixels = rng.choice(w * h, size=flips, replace=False)
        labels.flat[pixels] = _NOISE_CLASSES[rng.integers(0, 5, size=flips)]

    return LabeledImage(labels), spec.planted


@dataclass(frozen=True)
class GridSpec:
    """Lattice over a ParameterRanges box, defined by per-parameter step sizes."""

    ranges: ParameterRanges
    theta_step: float = 30.0
    x_step: float = 4.0
    y_step: float = 4.0
    a_step: float = 4.0
    b_step: float = 4.0

    def __post_init__(self):
        for name in ("theta_step", "x_step", "y_step", "a_step", "b_step"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")

    def axis_values(self) -> tuple[list[float], ...]:
        steps = (self.theta_step, self.x_step, self.y_step, self.a_step, self.b_step)
        axes = []
        for (lo, hi), step in zip(self.ranges.as_tuples(), steps):
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            axes.append([lo + i * step for i in range(count)])
        return tuple(axes)

    def cardinality(self) -> int:
        return math.prod(len(axis) for axis in self.axis_values())


def grid_search(
    image: LabeledImage, weights: ClassWeights, grid: GridSpec
) -> tuple[EllipseParams, float]:
    """Evaluate fitness_naive at every grid point; return the maximizer.

    Points are visited in ascending lexicographic (theta, x_c, y_c, a, b)
    order and ties keep the first maximizer, so results are deterministic.
    """
    total = grid.cardinality()
    if total > MAX_GRID_POINTS:
        raise GridSizeError(
            f"grid holds {total} points, above the {MAX_GRID_POINTS} evaluation budget",
            total,
        )
    best_params: EllipseParams | None = None
    best_fitness = -math.inf
    for theta, x_c, y_c, a, b in itertools.product(*grid.axis_values()):
        params = EllipseParams(theta, x_c, y_c, a, b)
        value = scoring.fitness_naive(image, weights, params)
        if value > best_fitness:
            best_fitness = value
            best_params = params
    assert best_params is not None  # axes are never empty
    return best_params, best_fitness
