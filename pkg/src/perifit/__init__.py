"""Rotated-ellipse fitting on class-labeled rasters with a steady-state GA.

The package separates exact geometry (membership tests, scanline interior
enumeration), the pixel-class objective and its indices, the genetic
optimizer, palette/raster handling, phantom synthesis with a brute-force
oracle, and batch reporting.  See the demos/ directory for narrative
walkthroughs of each capability.
"""

from .errors import (
    ConfigError,
    DecodeError,
    GridSizeError,
    PerifitError,
    PhantomError,
    RasterFormatError,
)
from .evolve import (
    FitResult,
    GAConfig,
    Individual,
    ParameterRanges,
    make_child,
    random_individual,
    run_ga,
    var,
)
from .geometry import (
    EllipseParams,
    PixelPoint,
    RowSpan,
    bounding_box,
    contains,
    ellipse_value,
    interior_spans,
    interior_table,
    values_at,
    values_grid,
)
from .imaging import (
    ClassPalette,
    OutlineStyle,
    decode_label_image,
    encode_label_image,
    load_class_map,
    load_labeled,
    load_raster,
    render_overlay,
    save_class_map,
    save_png,
)
from .reporting import AggregateReport, RunRecord, aggregate, format_report
from .scoring import (
    ClassWeights,
    LabeledImage,
    Metrics,
    PixelClass,
    compute_metrics,
    fitness,
    fitness_naive,
)
from .synthesis import GridSpec, PhantomSpec, generate_phantom, grid_search

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "ClassPalette",
    "ClassWeights",
    "ConfigError",
    "DecodeError",
    "EllipseParams",
    "FitResult",
    "GAConfig",
    "GridSizeError",
    "GridSpec",
    "Individual",
    "LabeledImage",
    "Metrics",
    "OutlineStyle",
    "ParameterRanges",
    "PerifitError",
    "PhantomError",
    "PhantomSpec",
    "PixelClass",
    "PixelPoint",
    "RasterFormatError",
    "RowSpan",
    "RunRecord",
    "aggregate",
    "bounding_box",
    "compute_metrics",
    "contains",
    "decode_label_image",
    "ellipse_value",
    "encode_label_image",
    "fitness",
    "fitness_naive",
    "format_report",
    "generate_phantom",
    "grid_search",
    "interior_spans",
    "interior_table",
    "load_class_map",
    "load_labeled",
    "load_raster",
    "make_child",
    "random_individual",
    "render_overlay",
    "run_ga",
    "save_class_map",
    "save_png",
    "values_at",
    "values_grid",
    "var",
]
