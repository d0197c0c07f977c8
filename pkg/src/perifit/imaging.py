"""Palette decoding, raster file I/O and ellipse outline overlays.

Rasters are uint8 numpy arrays of shape (height, width, 3) in RGB order.
Supported input formats are PNG (8-bit RGB/RGBA, alpha ignored) and binary
PPM (P6); overlays are written as PNG.  Decoded label grids can be cached
as binary PGM (P5) class maps using the PixelClass codes (0 black, 1 red,
2 green, 3 grey, 255 other); the PGM loader and saver round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import geometry
from .errors import DecodeError, RasterFormatError
from .geometry import EllipseParams
from .scoring import SCORED_CLASSES, LabeledImage, PixelClass

__all__ = [
    "ClassPalette",
    "OutlineStyle",
    "DEFAULT_OTHER_COLOR",
    "decode_label_image",
    "encode_label_image",
    "render_overlay",
    "load_raster",
    "save_png",
    "load_class_map",
    "save_class_map",
    "is_class_map",
    "load_labeled",
]

DEFAULT_OTHER_COLOR = (255, 255, 255)

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _check_color(name: str, color) -> tuple[int, int, int]:
    color = tuple(int(c) for c in color)
    if len(color) != 3 or any(c < 0 or c > 255 for c in color):
        raise ValueError(f"{name} must be an RGB triple of 0..255 values, got {color!r}")
    return color


@dataclass(frozen=True)
class ClassPalette:
    """Reference RGB colors for the four scored classes plus a match tolerance.

    A pixel matches a class when every channel differs from the reference by
    at most ``tolerance``.  The four references must be pairwise distinct by
    more than twice the tolerance on some channel, which makes matches
    unambiguous.
    """

    red: tuple[int, int, int] = (255, 0, 0)
    green: tuple[int, int, int] = (0, 255, 0)
    grey: tuple[int, int, int] = (128, 128, 128)
    black: tuple[int, int, int] = (0, 0, 0)
    tolerance: int = 8

    def __post_init__(self):
        for name in ("red", "green", "grey", "black"):
            object.__setattr__(self, name, _check_color(name, getattr(self, name)))
        tol = int(self.tolerance)
        if tol < 0 or tol > 255:
            raise ValueError(f"tolerance must be within 0..255, got {tol}")
        object.__setattr__(self, "tolerance", tol)
        entries = self.class_colors()
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                ci, cj = entries[i][1], entries[j][1]
                gap = max(abs(a - b) for a, b in zip(ci, cj))
                if gap <= 2 * tol:
                    raise ValueError(
                        f"palette colors for {entries[i][0].name} and {entries[j][0].name} "
                        f"are within 2x tolerance of each other"
                    )

    def class_colors(self) -> tuple[tuple[PixelClass, tuple[int, int, int]], ...]:
        return (
            (PixelClass.RED, self.red),
            (PixelClass.GREEN, self.green),
            (PixelClass.GREY, self.grey),
            (PixelClass.BLACK, self.black),
        )


@dataclass(frozen=True)
class OutlineStyle:
    """Outline band half-width (in E units) and draw color."""

    epsilon: float = 0.02
    color: tuple[int, int, int] = (0, 0, 255)

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon!r}")
        object.__setattr__(self, "color", _check_color("color", self.color))


def _as_raster(pixels) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] < 3 or arr.size == 0:
        raise ValueError("raster must be a non-empty (height, width, 3) array")
    if arr.shape[2] > 3:
        arr = arr[:, :, :3]
    return np.ascontiguousarray(arr, dtype=np.uint8)


def decode_label_image(pixels, palette: ClassPalette) -> LabeledImage:
    """Map an RGB raster to pixel classes; unmatched pixels become Other."""
    arr = _as_raster(pixels)
    signed = arr.astype(np.int16)
    matches = []
    for _, color in palette.class_colors():
        diff = np.abs(signed - np.array(color, dtype=np.int16))
        matches.append((diff <= palette.tolerance).all(axis=2))
    stack = np.stack(matches)
    multi = stack.sum(axis=0) > 1
    if multi.any():
        y, x = map(int, np.argwhere(multi)[0])
        hit = [cls for (cls, _), m in zip(palette.class_colors(), stack) if m[y, x]]
        raise DecodeError(
            f"ambiguous pixel ({x}, {y}): matches both {hit[0].name} and {hit[1].name}"
        )
    labels = np.full(arr.shape[:2], int(PixelClass.OTHER), dtype=np.uint8)
    for (cls, _), mask in zip(palette.class_colors(), stack):
        labels[mask] = int(cls)
    return LabeledImage(labels)


def encode_label_image(
    image: LabeledImage,
    palette: ClassPalette,
    other_color: tuple[int, int, int] = DEFAULT_OTHER_COLOR,
) -> np.ndarray:
    """Render a label grid back to an RGB raster using the palette colors."""
    other_color = _check_color("other_color", other_color)
    for cls, color in palette.class_colors():
        if max(abs(a - b) for a, b in zip(color, other_color)) <= palette.tolerance:
            raise ValueError(
                f"other_color {other_color} collides with the {cls.name} palette entry"
            )
    raster = np.empty((image.height, image.width, 3), dtype=np.uint8)
    raster[:] = other_color
    for cls, color in palette.class_colors():
        raster[image.labels == int(cls)] = color
    return raster


def render_overlay(raster, params: EllipseParams, style: OutlineStyle) -> np.ndarray:
    """Copy of ``raster`` with pixels whose E value is in [1-eps, 1+eps] recolored."""
    arr = _as_raster(raster)
    height, width = arr.shape[:2]
    values = geometry.values_grid(params, width, height)
    band = (values >= 1.0 - style.epsilon) & (values <= 1.0 + style.epsilon)
    out = arr.copy()
    out[band] = style.color
    return out


# --- file I/O --------------------------------------------------------------


def load_raster(path) -> np.ndarray:
    """Read a PNG or binary PPM (P6) file into an RGB raster."""
    path = Path(path)
    head = path.read_bytes()
    if head.startswith(_PNG_MAGIC):
        with Image.open(path) as img:
            arr = np.asarray(img)
        if arr.ndim == 3 and arr.shape[2] == 4:
            return np.ascontiguousarray(arr[:, :, :3])
        if arr.ndim == 3 and arr.shape[2] == 3:
            return np.ascontiguousarray(arr)
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB")).copy()
    if head.startswith(b"P6"):
        width, height, payload = _parse_pnm(head, b"P6", path, samples_per_pixel=3)
        return payload.reshape(height, width, 3)
    raise RasterFormatError(f"{path}: not a PNG or binary PPM (P6) file")


def save_png(path, raster) -> None:
    """Write an RGB raster as a PNG file."""
    arr = _as_raster(raster)
    Image.fromarray(arr, mode="RGB").save(str(path), format="PNG")


def save_class_map(path, image: LabeledImage) -> None:
    """Write a label grid as a binary PGM (P5) class map."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.labels.tobytes())


def load_class_map(path) -> LabeledImage:
    """Read a binary PGM (P5) class map back into a LabeledImage."""
    path = Path(path)
    data = path.read_bytes()
    width, height, payload = _parse_pnm(data, b"P5", path, samples_per_pixel=1)
    labels = payload.reshape(height, width)
    try:
        return LabeledImage(labels)
    except ValueError as exc:
        raise RasterFormatError(f"{path}: {exc}") from exc


def is_class_map(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(2) == b"P5"


def load_labeled(path, palette: ClassPalette) -> LabeledImage:
    """Read a labeled image from a PGM class map or a palette-colored raster."""
    if is_class_map(path):
        return load_class_map(path)
    return decode_label_image(load_raster(path), palette)


def _parse_pnm(data: bytes, magic: bytes, path, samples_per_pixel: int):
    """Parse a binary PNM header (magic, width, height, maxval) plus payload."""
    if not data.startswith(magic):
        raise RasterFormatError(f"{path}: expected {magic.decode()} magic")
    pos = len(magic)
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise RasterFormatError(f"{path}: malformed {magic.decode()} header")
        fields.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise RasterFormatError(f"{path}: malformed {magic.decode()} header")
    pos += 1  # single whitespace byte before the payload
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise RasterFormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise RasterFormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    expected = width * height * samples_per_pixel
    payload = data[pos:]
    if len(payload) != expected:
        raise RasterFormatError(
            f"{path}: payload holds {len(payload)} bytes, expected {expected}"
        )
    return width, height, np.frombuffer(payload, dtype=np.uint8)
