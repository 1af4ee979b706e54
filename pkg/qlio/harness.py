# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Experiment matrix execution and run persistence.

An experiment runs the full LIO pipeline for every (function, dimension)
cell and every run index. Each finished run is appended immediately to a
line-delimited JSON file, so an interrupted matrix keeps its results and
can be resumed.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import datetime
import hashlib
import json
import logging
import os
import pathlib
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import yaml

from .benchmarks import function_names, list_functions, make_function
from .errors import ConfigError, PersistenceError, QlioError
from .hypernum import D
from .lio import LioConfig, RunResult, optimize, refine
from .optimizers import PhaseResult, PsoConfig, RandomSource, solution_fitness
from .stats import CellStats

__all__ = [
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "ExperimentResults",
    "RunFailure",
    "RunRecord",
    "ResultWriter",
    "derive_seed",
    "errors_path",
    "export_cells_csv",
    "export_csv",
    "plan_runs",
    "read_records",
    "refine_records",
    "run_experiment",
    "write_records",
]

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_PSO_KEYS = {
    "num_agents": int,
    "max_iterations": int,
    "inertia": float,
    "cognitive": float,
    "social": float,
    "early_stop_delta": float,
    "early_stop_patience": int,
}
_LIO_KEYS = {
    "p_max": float,
    "bh_agents": int,
    "bh_iterations": int,
    "seed_p2": bool,
}
_TOP_KEYS = {
    "functions": tuple,
    "dimensions": tuple,
    "runs_per_cell": int,
    "base_seed": int,
    "iteration_scale": int,
    "output_path": str,
    "workers": int,
}
# Keys that do not influence numeric results.
_UNHASHED_KEYS = ("output_path", "workers")


def _coerce(key: str, kind: type, value: Any) -> Any:
    try:
        if kind is bool:
            if isinstance(value, str):
                lowered = value.strip().lower()
                if lowered in ("1", "true", "yes", "on"):
                    return True
                if lowered in ("0", "false", "no", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        if kind is int:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError(value)
            return int(value)
        if kind is tuple:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            elif isinstance(value, (int, float)):
                value = [value]
            items = [v.strip() if isinstance(v, str) else v for v in value]
            if key == "dimensions":
                return tuple(_coerce(key, int, v) for v in items)
            return tuple(str(v).lower() for v in items)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError("invalid value for %s: %r" % (key, value)) from None


@dataclass(frozen=True)
class ExperimentConfig:
    """The experiment matrix and the settings of every run in it.

    The number of Q-PSO iterations of an ``n``-variable cell is
    ``iteration_scale * n`` unless ``pso.max_iterations`` is set.
    """

    functions: tuple[str, ...] = tuple(function_names())
    dimensions: tuple[int, ...] = (10, 25, 50, 100)
    runs_per_cell: int = 15
    base_seed: int = 0
    pso: PsoConfig = field(default_factory=PsoConfig)
    lio: LioConfig = field(default_factory=LioConfig)
    iteration_scale: int = 2000
    output_path: str = "results.ndjson"
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "functions",
            tuple(str(name).strip().lower() for name in self.functions),
        )
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        object.__setattr__(self, "output_path", str(self.output_path))

        if not self.functions:
            raise ConfigError("at least one function is required")
        if not self.dimensions:
            raise ConfigError("at least one dimension is required")
        if self.runs_per_cell < 1:
            raise ConfigError("runs_per_cell must be at least 1")
        if not 0 <= self.base_seed < 1 << 64:
            raise ConfigError("base_seed must be a 64-bit unsigned integer")
        if self.iteration_scale < 1:
            raise ConfigError("iteration_scale must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

        # Validate every cell up front rather than failing mid-matrix.
        for name in self.functions:
            for n in self.dimensions:
                try:
                    make_function(name, n)
                except QlioError as e:
                    raise ConfigError(str(e)) from e

        if self.pso.iteration_scale != self.iteration_scale:
            object.__setattr__(
                self,
                "pso",
                dataclasses.replace(
                    self.pso, iteration_scale=self.iteration_scale
                ),
            )

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ExperimentConfig":
        """Build a config from the flat key set used by config files."""
        unknown = set(mapping) - set(_PSO_KEYS) - set(_LIO_KEYS) - set(
            _TOP_KEYS
        )
        if unknown:
            raise ConfigError(
                "unknown configuration keys: %s" % ", ".join(sorted(unknown))
            )

        top = {}
        pso = {}
        lio = {}
        for key, value in mapping.items():
            if value is None:
                continue
            if key in _TOP_KEYS:
                top[key] = _coerce(key, _TOP_KEYS[key], value)
            elif key in _PSO_KEYS:
                pso[key] = _coerce(key, _PSO_KEYS[key], value)
            else:
                lio[key] = _coerce(key, _LIO_KEYS[key], value)

        return cls(pso=PsoConfig(**pso), lio=LioConfig(**lio), **top)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ExperimentConfig":
        """Load a flat YAML (or JSON) document of configuration keys."""
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except OSError as e:
            raise ConfigError("cannot read config %s: %s" % (path, e)) from e
        except yaml.YAMLError as e:
            raise ConfigError("malformed config %s: %s" % (path, e)) from e

        if data is None:
            data = {}
        if not isinstance(data, Mapping):
            raise ConfigError("config %s must be a key-value document" % path)
        return cls.from_mapping(data)

    def to_mapping(self) -> dict[str, Any]:
        mapping: dict[str, Any] = {
            "functions": list(self.functions),
            "dimensions": list(self.dimensions),
            "runs_per_cell": self.runs_per_cell,
            "base_seed": self.base_seed,
            "iteration_scale": self.iteration_scale,
            "output_path": self.output_path,
            "workers": self.workers,
        }
        for key in _PSO_KEYS:
            mapping[key] = getattr(self.pso, key)
        for key in _LIO_KEYS:
            mapping[key] = getattr(self.lio, key)
        return mapping

    def config_hash(self) -> str:
        """Stable digest of every setting that influences results."""
        mapping = self.to_mapping()
        for key in _UNHASHED_KEYS:
            del mapping[key]
        return _hash_mapping(mapping)

    def cells(self) -> list[tuple[str, int]]:
        return [(f, n) for f in self.functions for n in self.dimensions]

    @property
    def total_runs(self) -> int:
        return len(self.cells()) * self.runs_per_cell


def _hash_mapping(mapping: Mapping[str, Any]) -> str:
    canonical = json.dumps(mapping, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def derive_seed(base_seed: int, function: str, n: int, run_index: int) -> int:
    """64-bit seed of one run, a pure function of its cell coordinates."""
    key = "%d:%s:%d:%d" % (base_seed, function, n, run_index)
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


@dataclass(frozen=True)
class RunRecord:
    """Persisted outcome of one pipeline run."""

    function: str
    n: int
    run_index: int
    seed: int
    mu: float
    mu_star: float
    p_star: float
    qpso_time: float
    lio_time: float
    iterations_used: int
    stopped_early: bool
    lio_evaluations: int
    p_max: float
    seed_p2: bool
    timestamp: str
    config_hash: str
    q_star: tuple[tuple[float, ...], ...] = field(repr=False)

    @classmethod
    def from_result(
        cls, result: RunResult, run_index: int, seed: int, config_hash: str
    ) -> "RunRecord":
        return cls(
            function=result.function,
            n=result.n,
            run_index=run_index,
            seed=seed,
            mu=result.baseline_fitness,
            mu_star=result.refined_fitness,
            p_star=result.p_star,
            qpso_time=result.phase1.wall_time,
            lio_time=result.lio_wall_time,
            iterations_used=result.phase1.iterations_used,
            stopped_early=result.phase1.stopped_early,
            lio_evaluations=result.lio_evaluations,
            p_max=result.lio.p_max,
            seed_p2=result.lio.seed_p2,
            timestamp=_timestamp(),
            config_hash=config_hash,
            q_star=tuple(tuple(row) for row in result.q_star.tolist()),
        )

    @property
    def q_star_array(self) -> np.ndarray:
        return np.array(self.q_star, dtype=np.float64).reshape(self.n, D)

    @property
    def time_ratio(self) -> float:
        if self.qpso_time <= 0.0:
            return float("inf")
        return self.lio_time / self.qpso_time

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
        obj.update(dataclasses.asdict(self))
        obj["q_star"] = [list(row) for row in self.q_star]
        return obj

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "RunRecord":
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise PersistenceError(
                "unsupported record schema version %r" % (version,)
            )

        values = {}
        for f in dataclasses.fields(cls):
            if f.name not in obj:
                raise PersistenceError("record lacks field %r" % f.name)
            values[f.name] = obj[f.name]
        values["q_star"] = tuple(
            tuple(float(c) for c in row) for row in values["q_star"]
        )
        return cls(**values)


class RunFailure(NamedTuple):
    """A quarantined run that raised instead of producing a record."""

    function: str
    n: int
    run_index: int
    seed: int
    error_type: str
    message: str

    def to_json(self) -> dict[str, Any]:
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update(self._asdict())
        obj["timestamp"] = _timestamp()
        return obj


class ExperimentResults(list):
    """Records of a matrix in (function, dimension, run) order.

    ``failures`` lists the runs that were quarantined instead.
    """

    def __init__(
        self,
        records: Iterable[RunRecord] = (),
        failures: Iterable[RunFailure] = (),
    ) -> None:
        super().__init__(records)
        self.failures = list(failures)


def errors_path(path: str | os.PathLike) -> pathlib.Path:
    """Path of the quarantine file accompanying a result file."""
    p = pathlib.Path(path)
    return p.with_name(p.stem + ".errors.ndjson")


def _dumps(obj: Mapping[str, Any]) -> str:
    try:
        return json.dumps(obj, allow_nan=False, separators=(",", ":"))
    except ValueError as e:
        raise PersistenceError("record is not serializable: %s" % e) from e


class ResultWriter:
    """Single writer appending records and failures as they complete.

    Every line is flushed and synced before :py:meth:`append` returns.
    """

    def __init__(self, path: str | os.PathLike, append: bool = False) -> None:
        self.path = pathlib.Path(path)
        self.errors_path = errors_path(self.path)
        self._append = append
        self._fh = None
        self._errors_fh = None

    def __enter__(self) -> "ResultWriter":
        mode = "a" if self._append else "w"
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self.path, mode, encoding="utf-8")
            if not self._append:
                # Failures of an earlier matrix no longer apply.
                self.errors_path.unlink(missing_ok=True)
        except OSError as e:
            raise PersistenceError(
                "cannot open %s: %s" % (self.path, e)
            ) from e
        return self

    def __exit__(self, exc_type, exc_value, exc_tb) -> None:
        self.close()

    def close(self) -> None:
        for fh in (self._fh, self._errors_fh):
            if fh is not None:
                fh.close()
        self._fh = None
        self._errors_fh = None

    def append(self, record: RunRecord) -> None:
        if self._fh is None:
            raise PersistenceError("writer for %s is not open" % self.path)
        self._write(self._fh, _dumps(record.to_json()))

    def append_failure(self, failure: RunFailure) -> None:
        if self._errors_fh is None:
            mode = "a" if self._append else "w"
            try:
                self._errors_fh = open(self.errors_path, mode, encoding="utf-8")
            except OSError as e:
                raise PersistenceError(
                    "cannot open %s: %s" % (self.errors_path, e)
                ) from e
        self._write(self._errors_fh, _dumps(failure.to_json()))

    def _write(self, fh, line: str) -> None:
        try:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        except OSError as e:
            raise PersistenceError("cannot write %s: %s" % (fh.name, e)) from e


def write_records(
    records: Iterable[RunRecord], path: str | os.PathLike
) -> None:
    """Write ``records`` to a fresh result file."""
    with ResultWriter(path) as writer:
        for record in records:
            writer.append(record)


def read_records(path: str | os.PathLike) -> list[RunRecord]:
    """Parse a result file written by :py:class:`ResultWriter`.

    A truncated final line, as left by an interrupted run, is skipped.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise PersistenceError("cannot read %s: %s" % (path, e)) from e

    records = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            if lineno == len(lines):
                logger.warning("%s: skipping truncated last line", path)
                break
            raise PersistenceError(
                "%s:%d: malformed record: %s" % (path, lineno, e)
            ) from e
        try:
            records.append(RunRecord.from_json(obj))
        except (TypeError, ValueError) as e:
            raise PersistenceError(
                "%s:%d: invalid record: %s" % (path, lineno, e)
            ) from e

    return records


_CSV_FIELDS = [
    f.name for f in dataclasses.fields(RunRecord) if f.name != "q_star"
]


def export_csv(records: Iterable[RunRecord], path: str | os.PathLike) -> None:
    """Write one CSV row per run, without the q* coefficients."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, _CSV_FIELDS)
            writer.writeheader()
            for record in records:
                row = dataclasses.asdict(record)
                del row["q_star"]
                writer.writerow(row)
    except OSError as e:
        raise PersistenceError("cannot write %s: %s" % (path, e)) from e


def export_cells_csv(
    stats: Mapping[tuple[str, int], CellStats], path: str | os.PathLike
) -> None:
    """Write one CSV row per experiment cell."""
    fields = [f.name for f in dataclasses.fields(CellStats)]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fields)
            writer.writeheader()
            for cell in stats.values():
                row = dataclasses.asdict(cell)
                row["winner"] = cell.winner.value
                writer.writerow(row)
    except OSError as e:
        raise PersistenceError("cannot write %s: %s" % (path, e)) from e


class RunTask(NamedTuple):
    function: str
    n: int
    run_index: int
    seed: int
    pso: PsoConfig
    lio: LioConfig
    config_hash: str


def plan_runs(cfg: ExperimentConfig) -> list[RunTask]:
    """Every run of the matrix, in (function, dimension, run) order."""
    config_hash = cfg.config_hash()
    return [
        RunTask(
            function=name,
            n=n,
            run_index=i,
            seed=derive_seed(cfg.base_seed, name, n, i),
            pso=cfg.pso,
            lio=cfg.lio,
            config_hash=config_hash,
        )
        for name, n in cfg.cells()
        for i in range(cfg.runs_per_cell)
    ]


def _execute(task: RunTask) -> RunRecord | RunFailure:
    # Module-level so it can be shipped to worker processes.
    try:
        f = make_function(task.function, task.n)
        result = optimize(f, task.pso, task.lio, RandomSource(task.seed))
        return RunRecord.from_result(
            result, task.run_index, task.seed, task.config_hash
        )
    except Exception as e:
        return RunFailure(
            function=task.function,
            n=task.n,
            run_index=task.run_index,
            seed=task.seed,
            error_type=type(e).__name__,
            message=str(e),
        )


def run_experiment(
    cfg: ExperimentConfig, resume: bool = False
) -> ExperimentResults:
    """Execute the experiment matrix, persisting every run as it finishes.

    :param resume:
       Keep the existing result file and skip runs it already holds for the
       same configuration hash.
    """
    tasks = plan_runs(cfg)
    done: dict[tuple[str, int, int], RunRecord] = {}

    if resume and os.path.exists(cfg.output_path):
        config_hash = cfg.config_hash()
        for record in read_records(cfg.output_path):
            if record.config_hash == config_hash:
                done[(record.function, record.n, record.run_index)] = record

    pending = [t for t in tasks if (t.function, t.n, t.run_index) not in done]
    logger.info(
        "running %d of %d runs (%d cells, %d workers) into %s",
        len(pending),
        len(tasks),
        len(cfg.cells()),
        cfg.workers,
        cfg.output_path,
    )

    failures: list[RunFailure] = []

    def handle(task: RunTask, outcome: RunRecord | RunFailure) -> None:
        if isinstance(outcome, RunFailure):
            logger.warning(
                "run %s n=%d #%d failed: %s: %s",
                task.function,
                task.n,
                task.run_index,
                outcome.error_type,
                outcome.message,
            )
            writer.append_failure(outcome)
            failures.append(outcome)
            return

        writer.append(outcome)
        done[(task.function, task.n, task.run_index)] = outcome
        logger.info(
            "run %s n=%d #%d: mu=%.4e mu*=%.4e p*=%.3f (%.2fs + %.2fs)",
            task.function,
            task.n,
            task.run_index,
            outcome.mu,
            outcome.mu_star,
            outcome.p_star,
            outcome.qpso_time,
            outcome.lio_time,
        )

    with ResultWriter(cfg.output_path, append=resume) as writer:
        if cfg.workers == 1 or len(pending) <= 1:
            for task in pending:
                handle(task, _execute(task))
        else:
            with concurrent.futures.ProcessPoolExecutor(
                max_workers=cfg.workers
            ) as pool:
                futures = {pool.submit(_execute, t): t for t in pending}
                for future in concurrent.futures.as_completed(futures):
                    handle(futures[future], future.result())

    records = [
        done[key]
        for key in ((t.function, t.n, t.run_index) for t in tasks)
        if key in done
    ]
    return ExperimentResults(records, failures)


def refine_records(
    records: Sequence[RunRecord], lio_cfg: LioConfig
) -> list[RunRecord]:
    """Re-run only the LIO phase on the stored ``q*`` of every record.

    Each record is refined with the same sub-stream its original run used,
    so a refinement with the original settings reproduces ``mu*``.
    """
    refined = []
    for record in records:
        f = make_function(record.function, record.n)
        q_star = record.q_star_array
        q_star.flags.writeable = False
        mu = solution_fitness(f, q_star, 2.0)
        if mu != record.mu:
            logger.warning(
                "%s n=%d seed=%d: stored mu %r differs from recomputed %r",
                record.function,
                record.n,
                record.seed,
                record.mu,
                mu,
            )

        phase1 = PhaseResult(
            best_position=q_star,
            best_fitness=mu,
            iterations_used=record.iterations_used,
            stopped_early=record.stopped_early,
            wall_time=record.qpso_time,
        )
        result = refine(f, phase1, lio_cfg, RandomSource(record.seed).child(1))
        config_hash = _hash_mapping(
            {
                "base": record.config_hash,
                "p_max": lio_cfg.p_max,
                "bh_agents": lio_cfg.bh_agents,
                "bh_iterations": lio_cfg.bh_iterations,
                "seed_p2": lio_cfg.seed_p2,
            }
        )
        refined.append(
            RunRecord.from_result(
                result, record.run_index, record.seed, config_hash
            )
        )

    return refined


def function_table() -> str:
    """Plain-text listing of the registered benchmark functions."""
    rows = [("Name", "Function", "Bounds", "f(x*)", "Min n", "Formula")]
    for info in list_functions():
        rows.append(
            (
                info.name,
                info.title,
                "[%g, %g]" % (info.lower, info.upper),
                "%g" % info.optimum_fitness,
                str(info.min_n),
                info.formula,
            )
        )

    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [
        "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
        for row in rows
    ]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
