"""Steady-state genetic algorithm over the five ellipse parameters.

Population of 20 by default; every generation 40 children are bred from
uniformly chosen distinct parents.  A child starts as a clone of the first
parent, copies random(m) randomly indexed parameters from the second, then
applies random(2m) additive mutations drawn from :func:`var`.  A child is
inserted the moment its fitness strictly exceeds the current population
minimum, evicting the worst (oldest first on ties).  The run stops after
the generation budget or after ceil(n/10) consecutive insertion-free
generations.

Determinism: a single ``random.Random(seed)`` stream drives the whole run.
The draw order is fixed: initialization draws theta, x_c, y_c, a, b per
individual; each child draws the first parent index, the second index
redrawn until distinct, a crossover count random(m) with one index draw per
copy, then a mutation count random(2m) with an index draw plus the four
var() draws (i-integer, i-float, j-integer, j-float) per mutation.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from . import scoring
from .errors import ConfigError
from .geometry import EllipseParams
from .scoring import ClassWeights, LabeledImage, Metrics

__all__ = [
    "ParameterRanges",
    "GAConfig",
    "Individual",
    "FitResult",
    "var",
    "random_individual",
    "make_child",
    "run_ga",
]

_REFERENCE_DIM = 512  # image size the default parameter ranges were tuned for


@dataclass(frozen=True)
class ParameterRanges:
    """Closed search intervals for theta, x_c, y_c, a and b.

    Defaults match the reference ranges for 512x512 inputs:
    0 <= theta <= 360, 100 <= x_c, y_c <= 412, 80 <= a, b <= 300.
    """

    theta: tuple[float, float] = (0.0, 360.0)
    x_c: tuple[float, float] = (100.0, 412.0)
    y_c: tuple[float, float] = (100.0, 412.0)
    a: tuple[float, float] = (80.0, 300.0)
    b: tuple[float, float] = (80.0, 300.0)

    def __post_init__(self):
        for name in ("theta", "x_c", "y_c", "a", "b"):
            lo, hi = getattr(self, name)
            lo, hi = float(lo), float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ConfigError(f"invalid {name} range [{lo}, {hi}]")
            object.__setattr__(self, name, (lo, hi))
        if self.a[0] <= 0.0 or self.b[0] <= 0.0:
            raise ConfigError("semi-axis ranges must have positive lower bounds")

    @classmethod
    def for_image(cls, width: int, height: int) -> "ParameterRanges":
        """Default ranges scaled proportionally to the image size.

        Center bounds scale with the matching dimension, axis bounds with
        min(width, height); lower axis bounds are kept at >= 1 pixel.
        """
        fx = width / _REFERENCE_DIM
        fy = height / _REFERENCE_DIM
        fs = min(fx, fy)
        return cls(
            theta=(0.0, 360.0),
            x_c=(round(100 * fx), round(412 * fx)),
            y_c=(round(100 * fy), round(412 * fy)),
            a=(max(1, round(80 * fs)), max(1, round(300 * fs))),
            b=(max(1, round(80 * fs)), max(1, round(300 * fs))),
        )

    def as_tuples(self) -> tuple[tuple[float, float], ...]:
        return (self.theta, self.x_c, self.y_c, self.a, self.b)

    def snap(self, phi) -> EllipseParams:
        """Build EllipseParams from a raw 5-vector: wrap theta, clamp the rest."""
        theta = phi[0] % 360.0
        lo, hi = self.theta
        theta = min(max(theta, lo), hi)
        clamped = [theta]
        for value, (low, high) in zip(phi[1:], self.as_tuples()[1:]):
            clamped.append(min(max(value, low), high))
        return EllipseParams(*clamped)

    def admits(self, params: EllipseParams) -> bool:
        return all(
            lo <= value <= hi
            for value, (lo, hi) in zip(params.as_tuple(), self.as_tuples())
        )


@dataclass(frozen=True)
class GAConfig:
    """Run settings: population shape, operator constants, ranges and seed."""

    population_size: int = 20
    children_per_generation: int = 40
    n: int = 100
    m: int = 5
    u: int = 20
    ranges: ParameterRanges = field(default_factory=ParameterRanges)
    seed: int = 0
    stagnation_window: int | None = None  # None -> ceil(n / 10), at least 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.children_per_generation < 1:
            raise ConfigError("children_per_generation must be >= 1")
        if self.n < 1:
            raise ConfigError("generation budget n must be >= 1")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.u < 0:
            raise ConfigError("u must be >= 0")
        if self.stagnation_window is not None and self.stagnation_window < 1:
            raise ConfigError("stagnation_window must be >= 1")

    def effective_stagnation_window(self) -> int:
        if self.stagnation_window is not None:
            return self.stagnation_window
        return max(1, math.ceil(self.n / 10))


@dataclass(frozen=True)
class Individual:
    """A chromosome together with its cached objective value."""

    params: EllipseParams
    fitness: float


@dataclass(frozen=True)
class FitResult:
    """Outcome of one GA run.

    ``best_history`` holds the best-so-far fitness after initialization and
    after every completed generation; it is non-decreasing by construction.
    """

    best: Individual
    metrics: Metrics
    generations_run: int
    evaluations: int
    elapsed: float
    best_history: tuple[float, ...]


def var(rng: random.Random, u: int) -> float:
    """Mutation delta: (random(u+1) * randomf())^2 - (random(u+1) * randomf())^2.

    Symmetric about zero with magnitude at most u^2; values near zero are
    much more frequent than values near the extremes.  Consumes exactly four
    draws in the order i-integer, i-float, j-integer, j-float.
    """
    if u < 0:
        raise ValueError("u must be >= 0")
    ri = rng.randrange(u + 1)
    fi = rng.random()
    rj = rng.randrange(u + 1)
    fj = rng.random()
    ti = ri * fi
    tj = rj * fj
    return ti * ti - tj * tj


def random_individual(
    rng: random.Random,
    ranges: ParameterRanges,
    image: LabeledImage,
    weights: ClassWeights,
) -> Individual:
    """Individual with all five parameters drawn uniformly within their ranges."""
    phi = [rng.uniform(lo, hi) for lo, hi in ranges.as_tuples()]
    params = ranges.snap(phi)
    return Individual(params=params, fitness=scoring.fitness(image, weights, params))


def make_child(
    rng: random.Random,
    i1: Individual,
    i2: Individual,
    config: GAConfig,
    image: LabeledImage,
    weights: ClassWeights,
) -> Individual:
    """Breed one child: clone i1, crossover from i2, mutate, clamp, evaluate."""
    phi = list(i1.params.as_tuple())
    phi_other = i2.params.as_tuple()
    for _ in range(rng.randrange(config.m)):
        r = rng.randrange(5)
        phi[r] = phi_other[r]
    for _ in range(rng.randrange(2 * config.m)):
        r = rng.randrange(5)
        phi[r] += var(rng, config.u)
    params = config.ranges.snap(phi)
    return Individual(params=params, fitness=scoring.fitness(image, weights, params))


def _check_ranges_cover_image(ranges: ParameterRanges, width: int, height: int) -> None:
    x_lo, x_hi = ranges.x_c
    y_lo, y_hi = ranges.y_c
    if x_hi < 0.0 or x_lo > width - 1.0:
        raise ConfigError(
            f"x_c range [{x_lo}, {x_hi}] lies entirely outside the {width}px image width"
        )
    if y_hi < 0.0 or y_lo > height - 1.0:
        raise ConfigError(
            f"y_c range [{y_lo}, {y_hi}] lies entirely outside the {height}px image height"
        )


def run_ga(image: LabeledImage, weights: ClassWeights, config: GAConfig) -> FitResult:
    """Run the steady-state GA and return the best individual with metrics."""
    _check_ranges_cover_image(config.ranges, image.width, image.height)
    rng = random.Random(config.seed)
    start = time.perf_counter()

    population = [
        random_individual(rng, config.ranges, image, weights)
        for _ in range(config.population_size)
    ]
    evaluations = config.population_size
    best_history = [max(ind.fitness for ind in population)]

    window = config.effective_stagnation_window()
    generations_run = 0
    stagnant = 0
    for _ in range(config.n):
        inserted = 0
        for _ in range(config.children_per_generation):
            p1 = rng.randrange(len(population))
            p2 = rng.randrange(len(population))
            while p2 == p1:
                p2 = rng.randrange(len(population))
            child = make_child(rng, population[p1], population[p2], config, image, weights)
            evaluations += 1
            worst = 0
            for k in range(1, len(population)):
                if population[k].fitness < population[worst].fitness:
                    worst = k
            if child.fitness > population[worst].fitness:
                del population[worst]
                population.append(child)
                inserted += 1
        generations_run += 1
        best_history.append(max(ind.fitness for ind in population))
        stagnant = stagnant + 1 if inserted == 0 else 0
        if stagnant >= window:
            break

    best = population[0]
    for ind in population[1:]:
        if ind.fitness > best.fitness:
            best = ind
    metrics = scoring.compute_metrics(image, best.params)
    return FitResult(
        best=best,
        metrics=metrics,
        generations_run=generations_run,
        evaluations=evaluations,
        elapsed=time.perf_counter() - start,
        best_history=tuple(best_history),
    )
