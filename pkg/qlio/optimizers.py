# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Search engines: quaternion-space PSO and the 1-D Black Hole algorithm.

Both engines are pure functions of their objective, configuration and
:py:class:`RandomSource`: running them twice with the same inputs gives
bit-identical results.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from .benchmarks import ObjectiveFunction
from .errors import (
    BoundsError,
    ConfigError,
    InvalidExponentError,
    RunError,
    ShapeError,
)
from .hypernum import (
    D,
    Quaternion,
    clip_coefficients,
    map_vector,
    q_add,
    q_scale,
    q_sub,
)

__all__ = [
    "Agent",
    "BlackHoleResult",
    "PhaseResult",
    "PsoConfig",
    "RandomSource",
    "Swarm",
    "black_hole_run",
    "early_stop_check",
    "init_swarm",
    "qpso_run",
    "qpso_step",
    "solution_fitness",
]

logger = logging.getLogger(__name__)

# Shift applied to fitness values when computing the event horizon.
EVENT_HORIZON_EPSILON = 1e-12

_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class RandomSource:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Streams are PCG64 generators seeded through ``numpy``'s
    ``SeedSequence`` with ``spawn_key=(stream_id, *path)``, which keeps them
    statistically independent and identical across platforms.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < _SEED_LIMIT:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if int(self.stream_id) < 0:
            raise ConfigError("stream id must be non-negative")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            int(self.seed), spawn_key=(int(self.stream_id), *self.path)
        )

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of the stream."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def child(self, k: int) -> "RandomSource":
        """Derive the independent sub-stream ``k``."""
        return replace(self, path=self.path + (int(k),))


def _generator(rng: RandomSource | np.random.Generator) -> np.random.Generator:
    if isinstance(rng, RandomSource):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("expected RandomSource or numpy Generator; got %r" % rng)


@dataclass(frozen=True)
class PsoConfig:
    """Q-PSO hyperparameters.

    ``max_iterations=None`` means ``iteration_scale * n`` iterations for an
    ``n``-variable objective.
    """

    num_agents: int = 100
    max_iterations: int | None = None
    inertia: float = 0.7
    cognitive: float = 1.7
    social: float = 1.7
    early_stop_delta: float = 1e-5
    early_stop_patience: int = 50
    iteration_scale: int = 2000

    def __post_init__(self) -> None:
        if self.num_agents < 1:
            raise ConfigError("num_agents must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be positive")
        if self.iteration_scale < 1:
            raise ConfigError("iteration_scale must be positive")
        if not self.early_stop_delta >= 0.0:
            raise ConfigError("early_stop_delta must be >= 0")
        if self.early_stop_patience < 1:
            raise ConfigError("early_stop_patience must be positive")
        for name in ("inertia", "cognitive", "social"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError("%s must be finite" % name)

    @property
    def w(self) -> float:
        return self.inertia

    @property
    def c1(self) -> float:
        return self.cognitive

    @property
    def c2(self) -> float:
        return self.social

    def iterations_for(self, n: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return self.iteration_scale * n


@dataclass(frozen=True)
class Agent:
    """One particle: ``n`` quaternions of position, velocity and best."""

    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float


@dataclass
class Swarm:
    """Vectorized state of ``m`` agents over ``n`` quaternion variables.

    Position-like arrays have shape ``(m, n, 4)``; the global best position
    has shape ``(n, 4)``.
    """

    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_fitness: float
    evaluations: int = 0

    @property
    def num_agents(self) -> int:
        return self.positions.shape[0]

    def agent(self, i: int) -> Agent:
        return Agent(
            position=self.positions[i],
            velocity=self.velocities[i],
            personal_best_position=self.pbest_positions[i],
            personal_best_fitness=float(self.pbest_fitness[i]),
        )


@dataclass(frozen=True)
class PhaseResult:
    """Outcome of the global Q-PSO phase.

    ``best_position`` is the ``(n, 4)`` coefficient array of ``q*`` and
    ``best_fitness`` its fitness ``mu`` under the ``p = 2`` projection.
    """

    best_position: np.ndarray
    best_fitness: float
    iterations_used: int
    stopped_early: bool
    wall_time: float
    history: tuple[float, ...] = field(default=(), repr=False)
    evaluations: int = 0

    @property
    def best_quaternions(self) -> tuple[Quaternion, ...]:
        return tuple(
            Quaternion.from_coefficients(q) for q in self.best_position
        )


@dataclass(frozen=True)
class BlackHoleResult:
    best_x: float
    best_fitness: float
    evaluations: int
    history: tuple[float, ...] = field(default=(), repr=False)


def solution_fitness(
    f: ObjectiveFunction, q: np.ndarray | Sequence[Quaternion], p: float
) -> float:
    """Fitness of one hypercomplex solution projected with exponent ``p``."""
    try:
        return f.evaluate(map_vector(q, f.bounds, p))
    except (ShapeError, BoundsError, InvalidExponentError):
        raise
    except Exception as e:
        raise RunError("evaluating %s failed: %s" % (f.name, e)) from e


def _swarm_fitness(f: ObjectiveFunction, positions: np.ndarray) -> np.ndarray:
    try:
        return f.evaluate_batch(map_vector(positions, f.bounds, 2.0))
    except Exception as e:
        raise RunError("evaluating %s failed: %s" % (f.name, e)) from e


def init_swarm(
    f: ObjectiveFunction, cfg: PsoConfig, generator: np.random.Generator
) -> Swarm:
    """Uniform ``[0, 1]`` coefficients and zero velocities."""
    positions = generator.random((cfg.num_agents, f.n, D))
    fitness = _swarm_fitness(f, positions)
    best = int(np.argmin(fitness))

    return Swarm(
        positions=positions,
        velocities=np.zeros_like(positions),
        pbest_positions=positions.copy(),
        pbest_fitness=fitness,
        gbest_position=positions[best].copy(),
        gbest_fitness=float(fitness[best]),
        evaluations=cfg.num_agents,
    )


def qpso_step(
    swarm: Swarm,
    f: ObjectiveFunction,
    cfg: PsoConfig,
    generator: np.random.Generator,
) -> Swarm:
    """Advance every agent by one inertia-weight PSO iteration.

    One pair of random scalars ``r1, r2`` is drawn per agent and decision
    variable. New positions are clipped to ``[0, 1]`` and bests change only
    on strict improvement. Returns a new :py:class:`Swarm`.
    """
    m, n = swarm.positions.shape[:2]
    r1 = generator.random((m, n))
    r2 = generator.random((m, n))

    x = swarm.positions
    cognitive = q_scale(cfg.cognitive * r1, q_sub(swarm.pbest_positions, x))
    social = q_scale(
        cfg.social * r2, q_sub(swarm.gbest_position[np.newaxis], x)
    )
    velocities = q_add(
        q_add(q_scale(cfg.inertia, swarm.velocities), cognitive), social
    )
    positions = clip_coefficients(q_add(x, velocities))

    fitness = _swarm_fitness(f, positions)
    improved = fitness < swarm.pbest_fitness
    pbest_positions = np.where(
        improved[:, np.newaxis, np.newaxis], positions, swarm.pbest_positions
    )
    pbest_fitness = np.where(improved, fitness, swarm.pbest_fitness)

    gbest_position = swarm.gbest_position
    gbest_fitness = swarm.gbest_fitness
    best = int(np.argmin(pbest_fitness))
    if pbest_fitness[best] < gbest_fitness:
        gbest_position = pbest_positions[best].copy()
        gbest_fitness = float(pbest_fitness[best])

    return Swarm(
        positions=positions,
        velocities=velocities,
        pbest_positions=pbest_positions,
        pbest_fitness=pbest_fitness,
        gbest_position=gbest_position,
        gbest_fitness=gbest_fitness,
        evaluations=swarm.evaluations + m,
    )


def early_stop_check(
    history: Sequence[float], delta: float, patience: int
) -> bool:
    """True when the last ``patience`` consecutive changes are below delta."""
    if len(history) < patience + 1:
        return False

    window = np.asarray(history[-(patience + 1) :], dtype=np.float64)
    return bool(np.all(np.abs(np.diff(window)) < delta))


def qpso_run(
    f: ObjectiveFunction,
    cfg: PsoConfig,
    rng: RandomSource | np.random.Generator,
) -> PhaseResult:
    """Minimize ``f`` with quaternion-space PSO and the ``p = 2`` mapping."""
    generator = _generator(rng)
    max_iterations = cfg.iterations_for(f.n)

    start = time.perf_counter()
    swarm = init_swarm(f, cfg, generator)
    history: list[float] = []
    stopped_early = False

    for _ in range(max_iterations):
        swarm = qpso_step(swarm, f, cfg, generator)
        history.append(swarm.gbest_fitness)
        if early_stop_check(
            history, cfg.early_stop_delta, cfg.early_stop_patience
        ):
            stopped_early = True
            break

    best_position = swarm.gbest_position.copy()
    best_position.flags.writeable = False
    # Re-scored through the single-solution path shared with LIO.
    best_fitness = solution_fitness(f, best_position, 2.0)
    wall_time = time.perf_counter() - start

    logger.debug(
        "q-pso %s n=%d: mu=%.6e after %d/%d iterations%s (%.3fs)",
        f.name,
        f.n,
        best_fitness,
        len(history),
        max_iterations,
        " (early stop)" if stopped_early else "",
        wall_time,
    )

    return PhaseResult(
        best_position=best_position,
        best_fitness=best_fitness,
        iterations_used=len(history),
        stopped_early=stopped_early,
        wall_time=wall_time,
        history=tuple(history),
        evaluations=swarm.evaluations,
    )


def black_hole_run(
    g: Callable[[Any], Any],
    lo: float,
    hi: float,
    num_agents: int,
    iterations: int,
    rng: RandomSource | np.random.Generator,
    seeds: Sequence[float] | None = None,
    vectorized: bool = False,
) -> BlackHoleResult:
    """Minimize a 1-D objective on ``[lo, hi]`` with the Black Hole algorithm.

    Stars start uniformly in the interval, except that ``seeds`` overwrite
    the first stars. Every iteration moves each star towards the best point
    found so far (the black hole) by ``x += r * (x_bh - x)`` and re-spawns
    stars inside the event horizon ``R = f_bh / sum(f_i)``. Re-spawned stars
    are scored on the next iteration, so exactly
    ``num_agents * (iterations + 1)`` points are evaluated.

    With ``vectorized`` set, ``g`` receives the array of all star positions
    and returns their fitness in one call per iteration.
    """
    lo = float(lo)
    hi = float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise BoundsError("invalid search interval [%r, %r]" % (lo, hi))
    if num_agents < 2:
        raise ConfigError("the Black Hole algorithm needs at least 2 agents")
    if iterations < 0:
        raise ConfigError("iterations must be non-negative")

    seeds = [float(s) for s in (seeds or ())]
    if len(seeds) > num_agents:
        raise ShapeError(
            "%d seeds exceed %d agents" % (len(seeds), num_agents)
        )
    for s in seeds:
        if not lo <= s <= hi:
            raise BoundsError("seed %r lies outside [%r, %r]" % (s, lo, hi))

    generator = _generator(rng)

    def score(stars: np.ndarray) -> np.ndarray:
        try:
            if vectorized:
                values = np.asarray(g(stars), dtype=np.float64)
            else:
                values = np.array(
                    [g(float(x)) for x in stars], dtype=np.float64
                )
        except Exception as e:
            raise RunError("black hole objective failed: %s" % e) from e
        if values.shape != stars.shape:
            raise ShapeError(
                "objective returned shape %r for %d stars"
                % (values.shape, stars.size)
            )
        return values

    stars = generator.uniform(lo, hi, num_agents)
    stars[: len(seeds)] = seeds
    fitness = score(stars)
    evaluations = num_agents

    best = int(np.argmin(fitness))
    bh_x = float(stars[best])
    bh_f = float(fitness[best])
    history: list[float] = []

    for _ in range(iterations):
        r = generator.random(num_agents)
        stars = np.minimum(np.maximum(stars + r * (bh_x - stars), lo), hi)
        fitness = score(stars)
        evaluations += num_agents

        best = int(np.argmin(fitness))
        if fitness[best] < bh_f:
            bh_x = float(stars[best])
            bh_f = float(fitness[best])

        total = float(np.sum(fitness + EVENT_HORIZON_EPSILON))
        radius = (bh_f + EVENT_HORIZON_EPSILON) / total if total > 0 else 0.0
        inside = np.abs(stars - bh_x) < radius
        inside[best] = False
        count = np.count_nonzero(inside)
        if count:
            stars[inside] = generator.uniform(lo, hi, count)

        history.append(bh_f)

    return BlackHoleResult(
        best_x=bh_x,
        best_fitness=bh_f,
        evaluations=evaluations,
        history=tuple(history),
    )
