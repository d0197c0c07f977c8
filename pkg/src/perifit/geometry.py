"""Rotated-ellipse membership math and fast interior enumeration.

Coordinates follow the raster convention: ``x`` is the column, ``y`` the
row, and a pixel is the lattice point ``(x, y)``.  The ellipse value at a
pixel is

    E = (dx*cos(t) + dy*sin(t))^2 / a^2 + (dx*sin(t) - dy*cos(t))^2 / b^2

with ``dx = x - x_c``, ``dy = y - y_c`` and ``t`` the rotation converted to
radians.  A pixel is interior iff ``E < 1`` (strict, boundary excluded).

The scanline helpers reproduce that per-pixel predicate bit for bit: span
endpoints are seeded from the per-row quadratic in ``dx`` and then snapped
with the exact same floating-point expression the predicate uses, so
enumerating the interior through spans and testing every pixel always agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "EllipseParams",
    "PixelPoint",
    "RowSpan",
    "ellipse_value",
    "contains",
    "values_at",
    "values_grid",
    "bounding_box",
    "interior_table",
    "interior_spans",
]

PARAM_NAMES = ("theta", "x_c", "y_c", "a", "b")


@dataclass(frozen=True)
class EllipseParams:
    """One candidate ellipse: rotation in degrees, center and semi-axes in pixels.

    ``theta`` is normalized into [0, 360) on construction; the semi-axes must
    be positive.  Field order matches the chromosome indexing used by the
    optimizer: Phi(0)=theta, Phi(1)=x_c, Phi(2)=y_c, Phi(3)=a, Phi(4)=b.
    """

    theta: float
    x_c: float
    y_c: float
    a: float
    b: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.a <= 0.0 or self.b <= 0.0:
            raise ValueError(f"semi-axes must be positive, got a={self.a}, b={self.b}")
        object.__setattr__(self, "theta", self.theta % 360.0)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.theta, self.x_c, self.y_c, self.a, self.b)


class PixelPoint(NamedTuple):
    """Integer pixel coordinates (column, row)."""

    x: int
    y: int


class RowSpan(NamedTuple):
    """Inclusive run of interior columns on one image row."""

    y: int
    x_min: int
    x_max: int


def _coeffs(params: EllipseParams) -> tuple[float, float, float, float]:
    # Shared by every evaluation path so scalar and vectorized results match
    # bit for bit (same cos/sin values, same squared axes).
    t = math.radians(params.theta)
    return math.cos(t), math.sin(t), params.a * params.a, params.b * params.b


def ellipse_value(params: EllipseParams, p) -> float:
    """Ellipse value E at pixel ``p``; 0 at the center, 1 on the outline."""
    ct, st, aa, bb = _coeffs(params)
    x, y = p
    dx = x - params.x_c
    dy = y - params.y_c
    u = dx * ct + dy * st
    v = dx * st - dy * ct
    return (u * u) / aa + (v * v) / bb


def contains(params: EllipseParams, p) -> bool:
    """True iff ``p`` lies strictly inside the ellipse (E < 1)."""
    return ellipse_value(params, p) < 1.0


def values_at(params: EllipseParams, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized ellipse_value at paired pixel coordinates."""
    ct, st, aa, bb = _coeffs(params)
    dx = np.asarray(xs, dtype=np.float64) - params.x_c
    dy = np.asarray(ys, dtype=np.float64) - params.y_c
    u = dx * ct + dy * st
    v = dx * st - dy * ct
    return (u * u) / aa + (v * v) / bb


def values_grid(params: EllipseParams, width: int, height: int) -> np.ndarray:
    """Ellipse values for every pixel of a ``width x height`` image.

    Returns a (height, width) float64 array whose entries equal
    ``ellipse_value(params, (x, y))`` exactly.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    ct, st, aa, bb = _coeffs(params)
    dx = np.arange(width, dtype=np.float64) - params.x_c
    dy = np.arange(height, dtype=np.float64) - params.y_c
    u = dx[np.newaxis, :] * ct + (dy * st)[:, np.newaxis]
    v = dx[np.newaxis, :] * st - (dy * ct)[:, np.newaxis]
    return (u * u) / aa + (v * v) / bb


def bounding_box(params: EllipseParams) -> tuple[float, float, float, float]:
    """Tight axis-aligned box (x_lo, x_hi, y_lo, y_hi) around the ellipse.

    Half-extents are sqrt(a^2 cos^2 t + b^2 sin^2 t) horizontally and
    sqrt(a^2 sin^2 t + b^2 cos^2 t) vertically.
    """
    ct, st, aa, bb = _coeffs(params)
    w = math.sqrt(aa * ct * ct + bb * st * st)
    h = math.sqrt(aa * st * st + bb * ct * ct)
    return (params.x_c - w, params.x_c + w, params.y_c - h, params.y_c + h)


_EMPTY = (
    np.empty(0, dtype=np.int64),
    np.empty(0, dtype=np.int64),
    np.empty(0, dtype=np.int64),
)


def interior_table(
    params: EllipseParams, width: int, height: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-row interior column ranges as three int64 arrays (ys, x_min, x_max).

    Array form of :func:`interior_spans`; x_max is inclusive.  The union of
    the ranges equals exactly the set of in-bounds pixels with
    ``contains(params, p)`` true.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    ct, st, aa, bb = _coeffs(params)
    box_x_lo, box_x_hi, box_y_lo, box_y_hi = bounding_box(params)
    # Pad the candidate window by one pixel: rounding can push the membership
    # predicate below 1 a hair outside the real box, and the exact per-row
    # snap rejects rows that hold no interior pixels anyway.
    y0 = max(0, math.ceil(box_y_lo) - 1)
    y1 = min(height - 1, math.floor(box_y_hi) + 1)
    if y0 > y1 or box_x_hi < -1.0 or box_x_lo > float(width):
        return _EMPTY

    ys = np.arange(y0, y1 + 1, dtype=np.int64)
    dy = ys.astype(np.float64) - params.y_c
    # Membership along a row is A*dx^2 + B*dx + C < 0 with A > 0.
    coef_a = (ct * ct) / aa + (st * st) / bb
    coef_b = (2.0 * ct * st * (1.0 / aa - 1.0 / bb)) * dy
    coef_c = (dy * dy) * ((st * st) / aa + (ct * ct) / bb) - 1.0
    four_ac = (4.0 * coef_a) * coef_c
    disc = coef_b * coef_b - four_ac
    # Keep rows whose discriminant is merely within rounding of zero; the
    # exact snap below decides whether they really hold interior pixels.
    # The margin needs an absolute floor (the 4A*(|C|+2) term): near tangent
    # rows C cancels to ~0 and a purely relative bound would vanish exactly
    # where coefficient rounding must be tolerated.
    eps = np.finfo(np.float64).eps
    margin = 128.0 * eps * (coef_b * coef_b + (4.0 * coef_a) * (np.abs(coef_c) + 2.0))
    cand = disc > -margin
    if not cand.any():
        return _EMPTY
    ys = ys[cand]
    coef_b = coef_b[cand]
    coef_c = coef_c[cand]
    disc = disc[cand]

    # Numerically stable roots; rows in the margin band collapse to the vertex.
    sq = np.sqrt(np.maximum(disc, 0.0))
    q = -0.5 * (coef_b + np.copysign(sq, coef_b))
    vertex = coef_b * (-0.5 / coef_a)
    r1 = q / coef_a
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(q != 0.0, coef_c / q, vertex)
    pos = disc > 0.0
    dx_min = np.where(pos, np.minimum(r1, r2), vertex)
    dx_max = np.where(pos, np.maximum(r1, r2), vertex)

    lo = np.ceil(params.x_c + dx_min)
    hi = np.floor(params.x_c + dx_max)
    np.clip(lo, 0.0, float(width), out=lo)
    np.clip(hi, -1.0, float(width - 1), out=hi)
    lo = lo.astype(np.int64)
    hi = hi.astype(np.int64)

    # Every candidate row enters the snap loop, including rows whose seeds
    # crossed (lo = hi + 1 after clipping or a rootless vertex): rounding can
    # put a true interior pixel one step outside the seeded span, and the
    # extend step below is what recovers it.
    valid = np.ones(ys.size, dtype=bool)
    active = np.ones(ys.size, dtype=bool)
    yf = ys.astype(np.float64)
    # Snap endpoints to the exact strict-interior set.  Root error is far
    # below one pixel, so this settles in one or two rounds; the bound only
    # guards pathological conditioning.
    for _ in range(width + 4):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        lo_a = lo[idx]
        hi_a = hi[idx]
        xs = np.concatenate((lo_a - 1, lo_a, hi_a, hi_a + 1)).astype(np.float64)
        yq = np.tile(yf[idx], 4)
        inside = values_at(params, xs, yq) < 1.0
        n = idx.size
        in_lm1 = inside[:n]
        in_lo = inside[n : 2 * n]
        in_hi = inside[2 * n : 3 * n]
        in_hp1 = inside[3 * n :]
        ext_l = in_lm1 & (lo_a - 1 >= 0)
        shr_l = ~in_lo & ~ext_l
        ext_r = in_hp1 & (hi_a + 1 <= width - 1)
        shr_r = ~in_hi & ~ext_r
        lo[idx] = lo_a + shr_l.astype(np.int64) - ext_l.astype(np.int64)
        hi[idx] = hi_a + ext_r.astype(np.int64) - shr_r.astype(np.int64)
        dead = lo[idx] > hi[idx]
        if dead.any():
            valid[idx[dead]] = False
            active[idx[dead]] = False
        settled = ~(ext_l | shr_l | ext_r | shr_r) & ~dead
        if settled.any():
            active[idx[settled]] = False

    return ys[valid], lo[valid], hi[valid]


def interior_spans(params: EllipseParams, width: int, height: int) -> list[RowSpan]:
    """All interior pixels of an image, one inclusive span per occupied row."""
    ys, lo, hi = interior_table(params, width, height)
    return [RowSpan(int(y), int(a), int(b)) for y, a, b in zip(ys, lo, hi)]
