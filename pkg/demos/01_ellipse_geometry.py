"""Ellipse membership, scanline spans and bounding boxes.

The core primitive is the ellipse value E: 0 at the center, 1 on the
outline, growing outward.  A pixel is "inside" when E < 1, strictly, so
outline pixels never count.  The scanline enumeration reproduces that
per-pixel test exactly while touching only the occupied rows.
"""

import numpy as np

from perifit import (
    EllipseParams,
    bounding_box,
    contains,
    ellipse_value,
    interior_spans,
    values_grid,
)

params = EllipseParams(theta=30.0, x_c=12.0, y_c=8.0, a=9.0, b=4.0)
print("candidate ellipse:", params)

print("\nellipse values along the major axis direction:")
for x in range(4, 22, 3):
    value = ellipse_value(params, (x, 8))
    print(f"  E({x:2d}, 8) = {value:7.3f}   inside: {contains(params, (x, 8))}")

box = bounding_box(params)
print(f"\nbounding box: x in [{box[0]:.2f}, {box[1]:.2f}], y in [{box[2]:.2f}, {box[3]:.2f}]")

width, height = 25, 17
spans = interior_spans(params, width, height)
print(f"\ninterior spans on a {width}x{height} image (one per occupied row):")
for span in spans:
    print(f"  row {span.y:2d}: columns {span.x_min}..{span.x_max}")

print("\nthe same interior as ASCII art ('#' inside, '.' outside):")
inside = values_grid(params, width, height) < 1.0
for row in inside:
    print("  " + "".join("#" if v else "." for v in row))

# spans and the per-pixel predicate always agree, pixel for pixel
span_grid = np.zeros((height, width), dtype=bool)
for span in spans:
    span_grid[span.y, span.x_min : span.x_max + 1] = True
print("\nspans equal the per-pixel membership test:", np.array_equal(span_grid, inside))
