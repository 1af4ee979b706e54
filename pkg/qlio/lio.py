# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Last Iteration Optimization (LIO).

A two-phase pipeline: Q-PSO first finds the best hypercomplex solution
``q*`` using the Euclidean (``p = 2``) projection, giving fitness ``mu``.
``q*`` is then frozen and the projection exponent ``p`` alone is tuned on
``[1, p_max]`` with the Black Hole algorithm, giving ``mu*``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .benchmarks import ObjectiveFunction
from .errors import ConfigError, ShapeError
from .hypernum import D, ExponentProjection, validate_exponent
from .optimizers import (
    PhaseResult,
    PsoConfig,
    RandomSource,
    black_hole_run,
    qpso_run,
    solution_fitness,
)

__all__ = [
    "LioConfig",
    "RunResult",
    "optimize",
    "projection_objective",
    "projection_objective_batch",
    "refine",
]

logger = logging.getLogger(__name__)

#: Exponent of the Euclidean projection used during the global phase.
BASELINE_P = 2.0


@dataclass(frozen=True)
class LioConfig:
    """Settings of the exponent-refinement phase.

    With ``seed_p2`` one Black Hole star starts at ``p = 2``, so the refined
    fitness can never be worse than the baseline.
    """

    p_max: float = 5.0
    bh_agents: int = 20
    bh_iterations: int = 50
    seed_p2: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p_max) and self.p_max > 1.0):
            raise ConfigError("p_max must be a finite value > 1")
        if self.bh_agents < 2:
            raise ConfigError("bh_agents must be at least 2")
        if self.bh_iterations < 1:
            raise ConfigError("bh_iterations must be positive")

    @property
    def max_evaluations(self) -> int:
        return self.bh_agents * (self.bh_iterations + 1)


@dataclass(frozen=True)
class RunResult:
    """Complete outcome of one LIO pipeline run."""

    function: str
    n: int
    phase1: PhaseResult
    refined_fitness: float
    p_star: float
    lio_wall_time: float
    lio_evaluations: int
    lio: LioConfig
    pso: PsoConfig | None = None

    @property
    def q_star(self) -> np.ndarray:
        return self.phase1.best_position

    @property
    def baseline_fitness(self) -> float:
        return self.phase1.best_fitness

    @property
    def relative_improvement(self) -> float:
        """``(mu - mu*) / mu``; 0 when ``mu`` is 0."""
        mu = self.baseline_fitness
        if mu == 0.0:
            return 0.0
        return (mu - self.refined_fitness) / mu

    @property
    def time_ratio(self) -> float:
        """LIO wall time as a fraction of the Q-PSO wall time."""
        if self.phase1.wall_time <= 0.0:
            return math.inf
        return self.lio_wall_time / self.phase1.wall_time


def _frozen_solution(f: ObjectiveFunction, q_star: np.ndarray) -> np.ndarray:
    frozen = np.array(q_star, dtype=np.float64)
    if frozen.shape != (f.n, D):
        raise ShapeError(
            "q* of shape %r does not match %s with %d variables"
            % (frozen.shape, f.name, f.n)
        )
    frozen.flags.writeable = False
    return frozen


def projection_objective(
    f: ObjectiveFunction, q_star: np.ndarray, p_max: float = 5.0
) -> Callable[[float], float]:
    """Fitness of the frozen solution ``q_star`` as a function of ``p``.

    ``g(2)`` reproduces the baseline fitness exactly because both go through
    :py:func:`qlio.optimizers.solution_fitness`.
    """
    frozen = _frozen_solution(f, q_star)

    def g(p: float) -> float:
        return solution_fitness(f, frozen, validate_exponent(p, p_max))

    return g


def projection_objective_batch(
    f: ObjectiveFunction, q_star: np.ndarray, p_max: float = 5.0
) -> Callable[[np.ndarray], np.ndarray]:
    """:py:func:`projection_objective` for a whole array of exponents.

    Values agree with the scalar objective to within rounding.
    """
    projection = ExponentProjection(
        _frozen_solution(f, q_star), f.bounds, p_max
    )

    def g(ps: np.ndarray) -> np.ndarray:
        return f.evaluate_batch(projection(ps))

    return g


def refine(
    f: ObjectiveFunction,
    phase1: PhaseResult,
    cfg: LioConfig,
    rng: RandomSource | np.random.Generator,
    pso: PsoConfig | None = None,
) -> RunResult:
    """Tune the projection exponent of a finished Q-PSO solution.

    The Black Hole search scores all stars of an iteration in one batch;
    the winning exponent is then re-scored through the single-solution path,
    so ``mu*`` is exactly ``f(map(q*, p*))``.
    """
    start = time.perf_counter()
    g = projection_objective_batch(f, phase1.best_position, cfg.p_max)

    seeds = None
    if cfg.seed_p2:
        if cfg.p_max >= BASELINE_P:
            seeds = [BASELINE_P]
        else:
            logger.warning(
                "p_max=%r excludes p=2; refinement may regress", cfg.p_max
            )

    bh = black_hole_run(
        g,
        1.0,
        cfg.p_max,
        cfg.bh_agents,
        cfg.bh_iterations,
        rng,
        seeds=seeds,
        vectorized=True,
    )
    p_star = bh.best_x
    refined = solution_fitness(f, phase1.best_position, p_star)
    if seeds and refined > phase1.best_fitness:
        # Batch rounding picked an exponent no better than p = 2.
        p_star, refined = BASELINE_P, phase1.best_fitness
    wall_time = time.perf_counter() - start

    logger.debug(
        "lio %s n=%d: mu=%.6e -> mu*=%.6e at p*=%.4f (%.3fs)",
        f.name,
        f.n,
        phase1.best_fitness,
        refined,
        p_star,
        wall_time,
    )

    return RunResult(
        function=f.name,
        n=f.n,
        phase1=phase1,
        refined_fitness=refined,
        p_star=p_star,
        lio_wall_time=wall_time,
        lio_evaluations=bh.evaluations,
        lio=cfg,
        pso=pso,
    )


def optimize(
    f: ObjectiveFunction,
    pso_cfg: PsoConfig,
    lio_cfg: LioConfig,
    rng: RandomSource,
) -> RunResult:
    """Run Q-PSO and then LIO on ``f``.

    The two phases draw from the independent sub-streams ``rng.child(0)``
    and ``rng.child(1)``.
    """
    phase1 = qpso_run(f, pso_cfg, rng.child(0))
    return refine(f, phase1, lio_cfg, rng.child(1), pso=pso_cfg)
