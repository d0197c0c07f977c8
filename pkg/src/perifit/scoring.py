"""Pixel-class objective and evaluation indices for labeled images.

A labeled image assigns every pixel one of five classes: red (epicardial
fat), green (mediastinal fat), grey (other fat), black (background) or
other.  The objective of a candidate ellipse is

    score = q_r * (#red inside) - (q_g * #green + q_c * #grey + q_b * #black inside)

over pixels strictly inside the ellipse.  ``fitness`` enumerates the
interior through row spans and per-row cumulative class counts;
``fitness_naive`` tests every pixel of the image and serves as the oracle.
Both reduce to the same four integer counts and apply the same final
expression, so their results are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import geometry
from .geometry import EllipseParams

__all__ = [
    "PixelClass",
    "SCORED_CLASSES",
    "LabeledImage",
    "ClassWeights",
    "Metrics",
    "fitness",
    "fitness_naive",
    "compute_metrics",
]


class PixelClass(IntEnum):
    """Pixel classes; numeric values double as the PGM class-map encoding."""

    BLACK = 0
    RED = 1
    GREEN = 2
    GREY = 3
    OTHER = 255


# Classes that carry weight in the objective, in (r, g, c, b) order.
SCORED_CLASSES = (PixelClass.RED, PixelClass.GREEN, PixelClass.GREY, PixelClass.BLACK)

_VALID_CODES = frozenset(int(c) for c in PixelClass)


@dataclass(frozen=True)
class ClassWeights:
    """Objective coefficients; signs are applied by the objective itself."""

    q_r: float = 85.0
    q_g: float = 3.0
    q_c: float = 4.0
    q_b: float = 2.5

    def __post_init__(self):
        for name in ("q_r", "q_g", "q_c", "q_b"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Metrics:
    """Per-class capture percentages and the general-fit ratio.

    pr/pg/pc/pb are the percentages of the image's red/green/grey/black
    pixels falling strictly inside the ellipse, each relative to the
    whole-image total of its class.  gf = pr / (pg + pc + pb); when the
    denominator is zero gf is reported as +inf.
    """

    pr: float
    pg: float
    pc: float
    pb: float
    gf: float


class LabeledImage:
    """Immutable 2D grid of pixel class labels with cached class statistics.

    ``labels`` is a read-only (height, width) uint8 array holding
    :class:`PixelClass` codes, row-major, indexed as labels[y, x].
    """

    def __init__(self, labels):
        arr = np.array(labels, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("labels must be a non-empty 2D array")
        codes = np.unique(arr)
        bad = [int(c) for c in codes if int(c) not in _VALID_CODES]
        if bad:
            raise ValueError(f"unknown class codes in label grid: {bad}")
        arr.setflags(write=False)
        self._labels = arr
        height, width = arr.shape
        self._masks = {cls: arr == int(cls) for cls in SCORED_CLASSES}
        # Per-row cumulative counts, shape (H, W+1): cum[y, x] counts class
        # pixels in labels[y, :x], so a span sum is two lookups per row.
        self._cumsum = {}
        for cls, mask in self._masks.items():
            cum = np.zeros((height, width + 1), dtype=np.int32)
            np.cumsum(mask, axis=1, dtype=np.int32, out=cum[:, 1:])
            self._cumsum[cls] = cum
        totals = {cls: int(np.count_nonzero(mask)) for cls, mask in self._masks.items()}
        totals[PixelClass.OTHER] = int(arr.size - sum(totals.values()))
        self._totals = totals

    @property
    def width(self) -> int:
        return self._labels.shape[1]

    @property
    def height(self) -> int:
        return self._labels.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def class_totals(self) -> dict[PixelClass, int]:
        return dict(self._totals)

    def class_total(self, cls: PixelClass) -> int:
        return self._totals[cls]

    def scored_total(self) -> int:
        """Number of pixels that carry any weight in the objective."""
        return sum(self._totals[cls] for cls in SCORED_CLASSES)

    def __eq__(self, other):
        if not isinstance(other, LabeledImage):
            return NotImplemented
        return self._labels.shape == other._labels.shape and bool(
            np.array_equal(self._labels, other._labels)
        )

    def __repr__(self):
        return f"LabeledImage({self.width}x{self.height})"


def _interior_counts(image: LabeledImage, params: EllipseParams) -> tuple[int, int, int, int]:
    """Exact (red, green, grey, black) counts strictly inside the ellipse."""
    ys, lo, hi = geometry.interior_table(params, image.width, image.height)
    if ys.size == 0:
        return (0, 0, 0, 0)
    counts = []
    for cls in SCORED_CLASSES:
        cum = image._cumsum[cls]
        counts.append(int(np.sum(cum[ys, hi + 1] - cum[ys, lo], dtype=np.int64)))
    return tuple(counts)


def _naive_counts(image: LabeledImage, params: EllipseParams) -> tuple[int, int, int, int]:
    """Same counts, by testing the membership predicate on every pixel."""
    inside = geometry.values_grid(params, image.width, image.height) < 1.0
    return tuple(
        int(np.count_nonzero(inside & image._masks[cls])) for cls in SCORED_CLASSES
    )


def _score(counts: tuple[int, int, int, int], weights: ClassWeights) -> float:
    r, g, c, b = counts
    return weights.q_r * r - (weights.q_g * g + weights.q_c * c + weights.q_b * b)


def fitness(image: LabeledImage, weights: ClassWeights, params: EllipseParams) -> float:
    """Objective value of ``params`` on ``image`` (span-accelerated)."""
    return _score(_interior_counts(image, params), weights)


def fitness_naive(image: LabeledImage, weights: ClassWeights, params: EllipseParams) -> float:
    """Objective value computed pixel by pixel; oracle for :func:`fitness`."""
    return _score(_naive_counts(image, params), weights)


def compute_metrics(image: LabeledImage, params: EllipseParams) -> Metrics:
    """Capture percentages of each class plus the general-fit ratio."""
    counts = _interior_counts(image, params)

    def pct(inside: int, cls: PixelClass) -> float:
        total = image.class_total(cls)
        return 100.0 * inside / total if total else 0.0

    pr = pct(counts[0], PixelClass.RED)
    pg = pct(counts[1], PixelClass.GREEN)
    pc = pct(counts[2], PixelClass.GREY)
    pb = pct(counts[3], PixelClass.BLACK)
    denom = pg + pc + pb
    gf = pr / denom if denom > 0.0 else math.inf
    return Metrics(pr=pr, pg=pg, pc=pc, pb=pb, gf=gf)
