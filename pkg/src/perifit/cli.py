"""Command-line front end: fit, batch, synth, oracle, overlay and report.

Configuration precedence is flags over config-file values over built-in
defaults; the defaults are the reference constants (population 20, 40
children per generation, m=5, u=20, weights 85/3/4/2.5) with parameter
ranges scaled to the input image size.  Config files are flat ``key=value``
text; ``#`` starts a comment.  Exit codes: 0 success, 1 input or
configuration error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import imaging, reporting, synthesis
from .errors import ConfigError, PerifitError
from .evolve import FitResult, GAConfig, ParameterRanges, run_ga
from .geometry import EllipseParams
from .imaging import ClassPalette, OutlineStyle
from .reporting import RunRecord
from .scoring import ClassWeights, LabeledImage
from .synthesis import GridSpec, PhantomSpec, generate_phantom, grid_search

__all__ = ["main", "FitTask", "run_batch"]

_RANGE_KEYS = ("theta", "xc", "yc", "a", "b")

_KNOWN_CONFIG_KEYS = frozenset(
    ["population_size", "children_per_generation", "generations", "m", "u",
     "seed", "stagnation_window",
     "q_r", "q_g", "q_c", "q_b",
     "palette_red", "palette_green", "palette_grey", "palette_black",
     "palette_tolerance", "epsilon", "outline_color"]
    + [f"{key}_min" for key in _RANGE_KEYS]
    + [f"{key}_max" for key in _RANGE_KEYS]
)


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors map to exit code 1, not 2."""

    def error(self, message):
        raise ConfigError(message)


# --- configuration resolution ----------------------------------------------


def _read_config_file(path) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _load_config(args) -> dict[str, str]:
    return _read_config_file(args.config) if getattr(args, "config", None) else {}


def _pick(flag_value, cfg: dict[str, str], key: str, default, parse):
    if flag_value is not None:
        return flag_value
    if key in cfg:
        try:
            return parse(cfg[key])
        except ValueError as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc
    return default


def _parse_color(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected R,G,B, got {text!r}")
    color = tuple(int(p.strip()) for p in parts)
    if any(c < 0 or c > 255 for c in color):
        raise ValueError(f"channels must be within 0..255, got {text!r}")
    return color


def _resolve_weights(args, cfg) -> ClassWeights:
    return ClassWeights(
        q_r=_pick(getattr(args, "q_red", None), cfg, "q_r", 85.0, float),
        q_g=_pick(getattr(args, "q_green", None), cfg, "q_g", 3.0, float),
        q_c=_pick(getattr(args, "q_grey", None), cfg, "q_c", 4.0, float),
        q_b=_pick(getattr(args, "q_black", None), cfg, "q_b", 2.5, float),
    )


def _resolve_palette(args, cfg) -> ClassPalette:
    defaults = ClassPalette()
    return ClassPalette(
        red=_pick(getattr(args, "palette_red", None), cfg, "palette_red",
                  defaults.red, _parse_color),
        green=_pick(getattr(args, "palette_green", None), cfg, "palette_green",
                    defaults.green, _parse_color),
        grey=_pick(getattr(args, "palette_grey", None), cfg, "palette_grey",
                   defaults.grey, _parse_color),
        black=_pick(getattr(args, "palette_black", None), cfg, "palette_black",
                    defaults.black, _parse_color),
        tolerance=_pick(getattr(args, "palette_tolerance", None), cfg,
                        "palette_tolerance", defaults.tolerance, int),
    )


def _resolve_style(args, cfg) -> OutlineStyle:
    defaults = OutlineStyle()
    return OutlineStyle(
        epsilon=_pick(getattr(args, "epsilon", None), cfg, "epsilon",
                      defaults.epsilon, float),
        color=_pick(getattr(args, "outline_color", None), cfg, "outline_color",
                    defaults.color, _parse_color),
    )


def _resolve_range_overrides(args, cfg) -> dict[str, tuple[float, float]]:
    """Only the ranges the user set explicitly; the rest scale per image."""
    overrides: dict[str, tuple[float, float]] = {}
    for key in _RANGE_KEYS:
        flag = getattr(args, f"{key}_range", None)
        if flag is not None:
            overrides[key] = (float(flag[0]), float(flag[1]))
            continue
        lo_key, hi_key = f"{key}_min", f"{key}_max"
        if lo_key in cfg or hi_key in cfg:
            if not (lo_key in cfg and hi_key in cfg):
                raise ConfigError(f"config must set both {lo_key} and {hi_key}")
            overrides[key] = (float(cfg[lo_key]), float(cfg[hi_key]))
    return overrides


def _build_ranges(overrides: dict[str, tuple[float, float]],
                  width: int, height: int) -> ParameterRanges:
    base = ParameterRanges.for_image(width, height)
    merged = {
        "theta": overrides.get("theta", base.theta),
        "x_c": overrides.get("xc", base.x_c),
        "y_c": overrides.get("yc", base.y_c),
        "a": overrides.get("a", base.a),
        "b": overrides.get("b", base.b),
    }
    return ParameterRanges(**merged)


@dataclass(frozen=True)
class _GASettings:
    """Image-size independent GA settings; ranges resolve per image."""

    population_size: int
    children_per_generation: int
    generations: int
    m: int
    u: int
    stagnation_window: int | None
    range_overrides: dict[str, tuple[float, float]]

    def config_for(self, width: int, height: int, seed: int) -> GAConfig:
        return GAConfig(
            population_size=self.population_size,
            children_per_generation=self.children_per_generation,
            n=self.generations,
            m=self.m,
            u=self.u,
            ranges=_build_ranges(self.range_overrides, width, height),
            seed=seed,
            stagnation_window=self.stagnation_window,
        )


def _resolve_ga_settings(args, cfg) -> _GASettings:
    return _GASettings(
        population_size=_pick(getattr(args, "population_size", None), cfg,
                              "population_size", 20, int),
        children_per_generation=_pick(getattr(args, "children", None), cfg,
                                      "children_per_generation", 40, int),
        generations=_pick(getattr(args, "generations", None), cfg,
                          "generations", 100, int),
        m=_pick(getattr(args, "m", None), cfg, "m", 5, int),
        u=_pick(getattr(args, "u", None), cfg, "u", 20, int),
        stagnation_window=_pick(getattr(args, "stagnation_window", None), cfg,
                                "stagnation_window", None, int),
        range_overrides=_resolve_range_overrides(args, cfg),
    )


# --- batch running -----------------------------------------------------------


@dataclass(frozen=True)
class FitTask:
    """One (image, seed) fit, self-contained so it can run in a worker process."""

    image_path: str
    image_id: str
    seed: int
    palette: ClassPalette
    weights: ClassWeights
    population_size: int
    children_per_generation: int
    generations: int
    m: int
    u: int
    stagnation_window: int | None
    range_overrides: tuple[tuple[str, tuple[float, float]], ...]


def _task_from_settings(image_path: str, image_id: str, seed: int,
                        palette: ClassPalette, weights: ClassWeights,
                        settings: _GASettings) -> FitTask:
    return FitTask(
        image_path=image_path,
        image_id=image_id,
        seed=seed,
        palette=palette,
        weights=weights,
        population_size=settings.population_size,
        children_per_generation=settings.children_per_generation,
        generations=settings.generations,
        m=settings.m,
        u=settings.u,
        stagnation_window=settings.stagnation_window,
        range_overrides=tuple(sorted(settings.range_overrides.items())),
    )


def _execute_task(task: FitTask) -> tuple[RunRecord, FitResult]:
    image = imaging.load_labeled(task.image_path, task.palette)
    settings = _GASettings(
        population_size=task.population_size,
        children_per_generation=task.children_per_generation,
        generations=task.generations,
        m=task.m,
        u=task.u,
        stagnation_window=task.stagnation_window,
        range_overrides=dict(task.range_overrides),
    )
    config = settings.config_for(image.width, image.height, task.seed)
    result = run_ga(image, task.weights, config)
    return reporting.RunRecord.from_fit(task.image_id, task.seed, result), result


def run_batch(tasks, jobs: int = 1):
    """Run fit tasks, preserving task order in the outputs.

    Returns (successes, failures): successes is a list of
    (task, RunRecord, FitResult) and failures a list of (task, message).
    """
    tasks = list(tasks)
    outcomes: list = [None] * len(tasks)
    if jobs <= 1:
        for i, task in enumerate(tasks):
            try:
                outcomes[i] = _execute_task(task)
            except (PerifitError, ValueError, OSError) as exc:
                outcomes[i] = str(exc)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute_task, task) for task in tasks]
            for i, future in enumerate(futures):
                try:
                    outcomes[i] = future.result()
                except (PerifitError, ValueError, OSError) as exc:
                    outcomes[i] = str(exc)
    successes = []
    failures = []
    for task, outcome in zip(tasks, outcomes):
        if isinstance(outcome, str):
            failures.append((task, outcome))
        else:
            record, result = outcome
            successes.append((task, record, result))
    return successes, failures


def _read_manifest(path) -> list[str]:
    manifest = Path(path)
    try:
        text = manifest.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    entries = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        entry = Path(line)
        if not entry.is_absolute():
            entry = manifest.parent / entry
        entries.append(str(entry))
    if not entries:
        raise ConfigError(f"manifest {path} lists no images")
    return entries


# --- sidecar parameter files -------------------------------------------------


def _write_sidecar(path, params: EllipseParams) -> None:
    lines = [
        f"theta={params.theta!r}",
        f"xc={params.x_c!r}",
        f"yc={params.y_c!r}",
        f"a={params.a!r}",
        f"b={params.b!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_sidecar(path) -> EllipseParams:
    values: dict[str, float] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = float(value)
    missing = [k for k in ("theta", "xc", "yc", "a", "b") if k not in values]
    if missing:
        raise ConfigError(f"{path}: missing parameter keys {missing}")
    return EllipseParams(values["theta"], values["xc"], values["yc"],
                         values["a"], values["b"])


# --- commands ----------------------------------------------------------------


def _print_summary(record: RunRecord) -> None:
    print(f"image: {record.image}")
    print(
        f"seed: {record.seed}  generations: {record.generations}  "
        f"evaluations: {record.evaluations}  time: {record.time_s:.2f} s"
    )
    print(
        f"best: theta={record.theta:.2f}  center=({record.xc:.2f}, {record.yc:.2f})  "
        f"a={record.a:.2f}  b={record.b:.2f}  fitness={record.fitness:.1f}"
    )
    gf = "inf" if record.gf == float("inf") else f"{record.gf:.2f}"
    print(
        f"metrics: PR={record.pr:.2f}  PG={record.pg:.2f}  PC={record.pc:.2f}  "
        f"PB={record.pb:.2f}  GF={gf}"
    )


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    palette = _resolve_palette(args, cfg)
    weights = _resolve_weights(args, cfg)
    settings = _resolve_ga_settings(args, cfg)
    seed = _pick(args.seed, cfg, "seed", 0, int)

    raster = None
    if imaging.is_class_map(args.image):
        image = imaging.load_class_map(args.image)
    else:
        raster = imaging.load_raster(args.image)
        image = imaging.decode_label_image(raster, palette)
    if image.scored_total() == 0:
        print(
            "warning: objective is flat, the image holds no red/green/grey/black pixels",
            file=sys.stderr,
        )

    config = settings.config_for(image.width, image.height, seed)
    result = run_ga(image, weights, config)
    record = RunRecord.from_fit(args.image, seed, result)

    _print_summary(record)
    if args.csv:
        reporting.write_csv(args.csv, [record])
    else:
        print(reporting.csv_text([record]), end="")
    if args.overlay:
        if raster is None:
            raster = imaging.encode_label_image(image, palette)
        style = _resolve_style(args, cfg)
        imaging.save_png(args.overlay, imaging.render_overlay(raster, result.best.params, style))
    return 0


def cmd_batch(args) -> int:
    cfg = _load_config(args)
    palette = _resolve_palette(args, cfg)
    weights = _resolve_weights(args, cfg)
    settings = _resolve_ga_settings(args, cfg)
    entries = _read_manifest(args.manifest)

    tasks = [
        _task_from_settings(path, path, seed, palette, weights, settings)
        for path in entries
        for seed in args.seeds
    ]
    successes, failures = run_batch(tasks, jobs=args.jobs)
    records = [record for _, record, _ in successes]
    reporting.write_csv(args.csv, records)
    report_text = reporting.format_report(reporting.aggregate(records))
    print(report_text)
    if args.report:
        Path(args.report).write_text(report_text + "\n", encoding="utf-8")
    for task, message in failures:
        print(f"skipped {task.image_id} (seed {task.seed}): {message}", file=sys.stderr)
    print(f"{len(records)} records written to {args.csv}, {len(failures)} skipped")
    return 0 if records else 1


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    spec = PhantomSpec(
        width=args.width,
        height=args.height,
        planted=EllipseParams(args.theta, args.xc, args.yc, args.a, args.b),
        ring_thickness=args.ring_thickness,
        red_fill_fraction=args.red_fill,
        grey_blob_count=args.grey_blobs,
        noise_flip_fraction=args.noise,
        seed=args.seed,
    )
    image, planted = generate_phantom(spec)
    out = Path(args.out)
    if out.suffix.lower() == ".pgm":
        imaging.save_class_map(out, image)
    else:
        palette = _resolve_palette(args, cfg)
        imaging.save_png(out, imaging.encode_label_image(image, palette))
    sidecar = args.sidecar if args.sidecar else str(out) + ".params.txt"
    _write_sidecar(sidecar, planted)
    print(f"phantom written to {out}, planted parameters to {sidecar}")
    return 0


def cmd_oracle(args) -> int:
    cfg = _load_config(args)
    palette = _resolve_palette(args, cfg)
    weights = _resolve_weights(args, cfg)
    image = imaging.load_labeled(args.image, palette)
    ranges = _build_ranges(_resolve_range_overrides(args, cfg), image.width, image.height)
    grid = GridSpec(
        ranges=ranges,
        theta_step=args.theta_step,
        x_step=args.xc_step,
        y_step=args.yc_step,
        a_step=args.a_step,
        b_step=args.b_step,
    )
    print(f"grid points: {grid.cardinality()}")
    params, best = grid_search(image, weights, grid)
    print(
        f"best: theta={params.theta!r} xc={params.x_c!r} yc={params.y_c!r} "
        f"a={params.a!r} b={params.b!r}"
    )
    print(f"fitness: {best!r}")
    return 0


def cmd_overlay(args) -> int:
    cfg = _load_config(args)
    raster = imaging.load_raster(args.image)
    if args.params:
        params = _read_sidecar(args.params)
    else:
        missing = [name for name in ("theta", "xc", "yc", "a", "b")
                   if getattr(args, name) is None]
        if missing:
            raise ConfigError(
                f"either --params or all of --theta/--xc/--yc/--a/--b are required "
                f"(missing {', '.join(missing)})"
            )
        params = EllipseParams(args.theta, args.xc, args.yc, args.a, args.b)
    style = _resolve_style(args, cfg)
    imaging.save_png(args.out, imaging.render_overlay(raster, params, style))
    print(f"overlay written to {args.out}")
    return 0


def cmd_report(args) -> int:
    try:
        records = reporting.read_csv(args.csv)
    except OSError as exc:
        raise ConfigError(f"cannot read CSV {args.csv}: {exc}") from exc
    print(reporting.format_report(reporting.aggregate(records)))
    return 0


# --- parser ------------------------------------------------------------------


def _add_config_flag(parser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="key=value config file (flags take precedence)")


def _add_palette_flags(parser) -> None:
    parser.add_argument("--palette-red", type=_parse_color, metavar="R,G,B")
    parser.add_argument("--palette-green", type=_parse_color, metavar="R,G,B")
    parser.add_argument("--palette-grey", type=_parse_color, metavar="R,G,B")
    parser.add_argument("--palette-black", type=_parse_color, metavar="R,G,B")
    parser.add_argument("--palette-tolerance", type=int, metavar="N")


def _add_weight_flags(parser) -> None:
    parser.add_argument("--q-red", type=float, metavar="W")
    parser.add_argument("--q-green", type=float, metavar="W")
    parser.add_argument("--q-grey", type=float, metavar="W")
    parser.add_argument("--q-black", type=float, metavar="W")


def _add_range_flags(parser) -> None:
    for key in _RANGE_KEYS:
        parser.add_argument(f"--{key}-range", nargs=2, type=float,
                            metavar=("LO", "HI"))


def _add_ga_flags(parser) -> None:
    parser.add_argument("--population-size", type=int, metavar="N")
    parser.add_argument("--children", type=int, metavar="N",
                        help="children per generation")
    parser.add_argument("--generations", type=int, metavar="N",
                        help="generation budget n")
    parser.add_argument("--m", type=int, metavar="N",
                        help="mutation/crossover rate control")
    parser.add_argument("--u", type=int, metavar="N",
                        help="mutation magnitude control")
    parser.add_argument("--stagnation-window", type=int, metavar="N")
    _add_range_flags(parser)
    _add_weight_flags(parser)


def _add_style_flags(parser) -> None:
    parser.add_argument("--epsilon", type=float, metavar="E",
                        help="outline band half-width")
    parser.add_argument("--outline-color", type=_parse_color, metavar="R,G,B")


def build_parser() -> _Parser:
    parser = _Parser(prog="perifit",
                     description="Ellipse fitting on class-labeled images")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one image with the GA")
    p_fit.add_argument("image", help="PNG/PPM label raster or PGM class map")
    p_fit.add_argument("--seed", type=int)
    p_fit.add_argument("--csv", metavar="FILE",
                       help="write the run record CSV here instead of stdout")
    p_fit.add_argument("--overlay", metavar="FILE.png",
                       help="write a blue-outline overlay PNG")
    _add_config_flag(p_fit)
    _add_ga_flags(p_fit)
    _add_palette_flags(p_fit)
    _add_style_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_batch = sub.add_parser("batch", help="fit every (image, seed) pair in a manifest")
    p_batch.add_argument("manifest", help="text file listing one image path per line")
    p_batch.add_argument("--seeds", type=int, nargs="+", required=True,
                         help="explicit RNG seeds (one run per image per seed)")
    p_batch.add_argument("--csv", required=True, metavar="FILE")
    p_batch.add_argument("--report", metavar="FILE",
                         help="also write the aggregate table to a file")
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="number of parallel worker processes")
    _add_config_flag(p_batch)
    _add_ga_flags(p_batch)
    _add_palette_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    defaults = PhantomSpec()
    p_synth = sub.add_parser("synth", help="generate a phantom with a planted ellipse")
    p_synth.add_argument("--out", required=True, metavar="FILE",
                         help=".png for a palette raster, .pgm for a class map")
    p_synth.add_argument("--width", type=int, default=defaults.width)
    p_synth.add_argument("--height", type=int, default=defaults.height)
    p_synth.add_argument("--theta", type=float, default=defaults.planted.theta)
    p_synth.add_argument("--xc", type=float, default=defaults.planted.x_c)
    p_synth.add_argument("--yc", type=float, default=defaults.planted.y_c)
    p_synth.add_argument("--a", type=float, default=defaults.planted.a)
    p_synth.add_argument("--b", type=float, default=defaults.planted.b)
    p_synth.add_argument("--ring-thickness", type=float, default=defaults.ring_thickness)
    p_synth.add_argument("--red-fill", type=float, default=defaults.red_fill_fraction)
    p_synth.add_argument("--grey-blobs", type=int, default=defaults.grey_blob_count)
    p_synth.add_argument("--noise", type=float, default=defaults.noise_flip_fraction)
    p_synth.add_argument("--seed", type=int, default=defaults.seed)
    p_synth.add_argument("--sidecar", metavar="FILE",
                         help="planted-parameter file (default: OUT.params.txt)")
    _add_config_flag(p_synth)
    _add_palette_flags(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_oracle = sub.add_parser("oracle", help="brute-force grid search")
    p_oracle.add_argument("image")
    p_oracle.add_argument("--theta-step", type=float, default=30.0)
    p_oracle.add_argument("--xc-step", type=float, default=4.0)
    p_oracle.add_argument("--yc-step", type=float, default=4.0)
    p_oracle.add_argument("--a-step", type=float, default=4.0)
    p_oracle.add_argument("--b-step", type=float, default=4.0)
    _add_config_flag(p_oracle)
    _add_range_flags(p_oracle)
    _add_weight_flags(p_oracle)
    _add_palette_flags(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_overlay = sub.add_parser("overlay", help="draw an ellipse outline on a raster")
    p_overlay.add_argument("image", help="PNG or PPM raster")
    p_overlay.add_argument("--out", required=True, metavar="FILE.png")
    p_overlay.add_argument("--params", metavar="FILE",
                           help="key=value parameter file (e.g. a synth sidecar)")
    p_overlay.add_argument("--theta", type=float)
    p_overlay.add_argument("--xc", type=float)
    p_overlay.add_argument("--yc", type=float)
    p_overlay.add_argument("--a", type=float)
    p_overlay.add_argument("--b", type=float)
    _add_config_flag(p_overlay)
    _add_style_flags(p_overlay)
    p_overlay.set_defaults(func=cmd_overlay)

    p_report = sub.add_parser("report", help="aggregate a run-record CSV")
    p_report.add_argument("csv")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (PerifitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # internal invariant violation
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
