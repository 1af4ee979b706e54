# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Real-valued benchmark functions with their bounds and known optima.

All evaluators are vectorized: they reduce the trailing axis of an array of
shape ``(..., n)`` so a whole swarm can be scored in one call.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import (
    DimensionError,
    DomainError,
    ShapeError,
    UnknownFunctionError,
)
from .hypernum import Bounds

__all__ = [
    "FunctionInfo",
    "ObjectiveFunction",
    "evaluate",
    "evaluate_batch",
    "function_names",
    "list_functions",
    "make_function",
]

Evaluator = Callable[[np.ndarray], np.ndarray]

_TWO_PI = 2.0 * math.pi
_E = np.exp(1.0)
_SQRT_PI = math.sqrt(math.pi)
_CSENDES_CUTOFF = 1e-50


def _sphere(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1)


def _csendes(x: np.ndarray) -> np.ndarray:
    # x^6 (2 + sin(1/x)) tends to 0 as x -> 0; that limit is the value at 0.
    # Below the cutoff the term is under 3e-300 and 1/x may overflow to inf;
    # it is taken as 0.
    nonzero = np.abs(x) > _CSENDES_CUTOFF
    safe = np.where(nonzero, x, 1.0)
    terms = np.where(nonzero, safe**6 * (2.0 + np.sin(1.0 / safe)), 0.0)
    return np.sum(terms, axis=-1)


def _salomon(x: np.ndarray) -> np.ndarray:
    r = np.sqrt(np.sum(x * x, axis=-1))
    return 1.0 - np.cos(_TWO_PI * r) + 0.1 * r


def _ackley1(x: np.ndarray) -> np.ndarray:
    # Grouped as (20 - 20 e^a) + (e - e^b) so the origin yields exactly 0.
    rms = np.sqrt(np.mean(x * x, axis=-1))
    mean_cos = np.mean(np.cos(_TWO_PI * x), axis=-1)
    return (20.0 - 20.0 * np.exp(-0.02 * rms)) + (_E - np.exp(mean_cos))


def _alpine1(x: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(x * np.sin(x) + 0.1 * x), axis=-1)


def _rastrigin(x: np.ndarray) -> np.ndarray:
    # 10n + sum(x^2 - 10 cos(2 pi x)), one non-negative term per variable.
    return np.sum(x * x + 10.0 * (1.0 - np.cos(_TWO_PI * x)), axis=-1)


def _schwefel(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1) ** _SQRT_PI


def _brown_power(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    # base^exponent as exp(exponent * ln(base)), with 0^exponent = 0.
    positive = base > 0.0
    safe = np.where(positive, base, 1.0)
    return np.where(positive, np.exp(exponent * np.log(safe)), 0.0)


def _brown(x: np.ndarray) -> np.ndarray:
    sq = x * x
    head = sq[..., :-1]
    tail = sq[..., 1:]
    terms = _brown_power(head, tail + 1.0) + _brown_power(tail, head + 1.0)
    return np.sum(terms, axis=-1)


class FunctionInfo(NamedTuple):
    """Registry entry describing one benchmark function."""

    name: str
    title: str
    formula: str
    lower: float
    upper: float
    optimum_fitness: float
    min_n: int
    evaluator: Evaluator


_REGISTRY = {
    info.name: info
    for info in (
        FunctionInfo(
            "sphere", "Sphere", "sum(x_i^2)", -10.0, 10.0, 0.0, 1, _sphere
        ),
        FunctionInfo(
            "csendes",
            "Csendes",
            "sum(x_i^6 (2 + sin(1/x_i)))",
            -1.0,
            1.0,
            0.0,
            1,
            _csendes,
        ),
        FunctionInfo(
            "salomon",
            "Salomon",
            "1 - cos(2 pi sqrt(sum(x_i^2))) + 0.1 sqrt(sum(x_i^2))",
            -100.0,
            100.0,
            0.0,
            1,
            _salomon,
        ),
        FunctionInfo(
            "ackley1",
            "Ackley #1",
            "-20 exp(-0.02 sqrt(mean(x_i^2))) - exp(mean(cos(2 pi x_i)))"
            " + 20 + e",
            -35.0,
            35.0,
            0.0,
            1,
            _ackley1,
        ),
        FunctionInfo(
            "alpine1",
            "Alpine #1",
            "sum(|x_i sin(x_i) + 0.1 x_i|)",
            -10.0,
            10.0,
            0.0,
            1,
            _alpine1,
        ),
        FunctionInfo(
            "rastrigin",
            "Rastrigin",
            "10n + sum(x_i^2 - 10 cos(2 pi x_i))",
            -5.12,
            5.12,
            0.0,
            1,
            _rastrigin,
        ),
        # Not the classical sine-based Schwefel function.
        FunctionInfo(
            "schwefel",
            "Schwefel",
            "(sum(x_i^2))^sqrt(pi)",
            -100.0,
            100.0,
            0.0,
            1,
            _schwefel,
        ),
        FunctionInfo(
            "brown",
            "Brown",
            "sum((x_i^2)^(x_{i+1}^2 + 1) + (x_{i+1}^2)^(x_i^2 + 1))",
            -1.0,
            4.0,
            0.0,
            2,
            _brown,
        ),
    )
}


@dataclass(frozen=True)
class ObjectiveFunction:
    """A named benchmark over ``n`` bounded real decision variables."""

    name: str
    n: int
    bounds: tuple[Bounds, ...]
    evaluator: Evaluator = field(compare=False, repr=False)
    optimum_fitness: float = 0.0

    @functools.cached_property
    def lower(self) -> np.ndarray:
        arr = np.array([b.lower for b in self.bounds], dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @functools.cached_property
    def upper(self) -> np.ndarray:
        arr = np.array([b.upper for b in self.bounds], dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @property
    def info(self) -> FunctionInfo:
        return _REGISTRY[self.name]

    def evaluate(self, x: npt.ArrayLike) -> float:
        """Fitness of a single real vector of length ``n``."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape != (self.n,):
            raise ShapeError(
                "%s expects a vector of length %d; got shape %r"
                % (self.name, self.n, arr.shape)
            )
        return float(self.evaluate_batch(arr))

    def evaluate_batch(self, xs: npt.ArrayLike) -> np.ndarray:
        """Fitness of every row of an array of shape ``(..., n)``."""
        arr = np.asarray(xs, dtype=np.float64)
        if arr.ndim == 0 or arr.shape[-1] != self.n:
            raise ShapeError(
                "%s expects vectors of length %d; got shape %r"
                % (self.name, self.n, arr.shape)
            )
        self._check_domain(arr)
        return self.evaluator(arr)

    __call__ = evaluate

    def _check_domain(self, arr: np.ndarray) -> None:
        inside = (arr >= self.lower) & (arr <= self.upper)
        if inside.all():
            return

        index = np.unravel_index(np.argmin(inside), arr.shape)
        j = index[-1]
        raise DomainError(
            "%s variable %d = %r lies outside [%r, %r]"
            % (
                self.name,
                j,
                float(arr[index]),
                self.bounds[j].lower,
                self.bounds[j].upper,
            )
        )


def make_function(name: str, n: int) -> ObjectiveFunction:
    """Build the named benchmark function in ``n`` dimensions.

    :param name:
       One of :py:func:`function_names`.
    :param n:
       Number of decision variables. Brown needs at least 2.
    """
    key = str(name).strip().lower()
    try:
        info = _REGISTRY[key]
    except KeyError:
        raise UnknownFunctionError(
            "unknown benchmark function %r; choose from %s"
            % (name, ", ".join(_REGISTRY))
        ) from None

    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DimensionError("dimension must be an integer; got %r" % (n,))
    if n < info.min_n:
        raise DimensionError(
            "%s needs at least %d variables; got %d" % (key, info.min_n, n)
        )

    n = int(n)
    return ObjectiveFunction(
        name=info.name,
        n=n,
        bounds=(Bounds(info.lower, info.upper),) * n,
        evaluator=info.evaluator,
        optimum_fitness=info.optimum_fitness,
    )


def evaluate(f: ObjectiveFunction, x: npt.ArrayLike) -> float:
    """Evaluate ``f`` at ``x``; see :py:meth:`ObjectiveFunction.evaluate`."""
    return f.evaluate(x)


def evaluate_batch(f: ObjectiveFunction, xs: npt.ArrayLike) -> np.ndarray:
    return f.evaluate_batch(xs)


def function_names() -> list[str]:
    return list(_REGISTRY)


def list_functions() -> list[FunctionInfo]:
    """Registry entries in table order."""
    return list(_REGISTRY.values())
