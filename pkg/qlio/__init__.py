# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

# ruff: noqa: F401

"""Quaternion-space particle swarm optimization with Minkowski p-norm
projection and Last Iteration Optimization (LIO)."""

from .benchmarks import (
    FunctionInfo,
    ObjectiveFunction,
    evaluate,
    evaluate_batch,
    function_names,
    list_functions,
    make_function,
)
from .errors import (
    AggregationError,
    BoundsError,
    ConfigError,
    DegenerateSampleError,
    DimensionError,
    DomainError,
    InvalidExponentError,
    NumericOverflowError,
    PersistenceError,
    QlioError,
    RunError,
    ShapeError,
    UnknownFunctionError,
)
from .harness import (
    ExperimentConfig,
    RunRecord,
    derive_seed,
    read_records,
    run_experiment,
    write_records,
)
from .hypernum import (
    Bounds,
    ExponentProjection,
    Quaternion,
    clip_coefficients,
    map_exponents,
    map_to_real,
    map_vector,
    pnorm,
    q_add,
    q_scale,
    q_sub,
)
from .lio import (
    LioConfig,
    RunResult,
    optimize,
    projection_objective,
    projection_objective_batch,
    refine,
)
from .optimizers import (
    PhaseResult,
    PsoConfig,
    RandomSource,
    Swarm,
    black_hole_run,
    early_stop_check,
    qpso_run,
    qpso_step,
)
from .stats import (
    CellStats,
    Winner,
    aggregate,
    render_table,
    wilcoxon_signed_rank,
)

# setup.py and docs/conf.py parse this line.
__version__ = "0.1.0"
