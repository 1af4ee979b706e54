# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Quaternion algebra and the hypercomplex-to-real projection.

Each decision variable of a hypercomplex search lives in a quaternion
``a + bi + cj + dk``. Only the coefficient-wise vector space operations are
needed by the optimizers, so the fundamental units ``i, j, k`` exist purely
as coefficient positions and no Hamilton product is provided.

Every operation accepts either a :py:class:`Quaternion` or a *quaternion
array*: a ``numpy`` array whose trailing axis holds the 4 coefficients. The
result has the same kind as the input, which lets a whole swarm of shape
``(agents, variables, 4)`` be updated in one call.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np
import numpy.typing as npt

from .errors import (
    BoundsError,
    InvalidExponentError,
    NumericOverflowError,
    ShapeError,
)

__all__ = [
    "D",
    "Bounds",
    "ExponentProjection",
    "PExponent",
    "Quaternion",
    "QuaternionLike",
    "clip_coefficients",
    "map_exponents",
    "map_to_real",
    "map_vector",
    "pnorm",
    "q_add",
    "q_scale",
    "q_sub",
    "validate_exponent",
]

#: Number of hypercomplex dimensions of a quaternion.
D = 4

#: Minkowski exponents are plain floats validated by
#: :py:func:`validate_exponent`.
PExponent = float

# Integer exponents computed by repeated multiplication.
_INTEGER_EXPONENTS = (1, 2, 3, 4, 5)


class Quaternion:
    """Immutable quaternion ``a + bi + cj + dk`` with finite coefficients."""

    __slots__ = ("_c",)

    def __init__(
        self, a: float = 0.0, b: float = 0.0, c: float = 0.0, d: float = 0.0
    ) -> None:
        coeffs = np.array([a, b, c, d], dtype=np.float64)
        self._c = _frozen(_checked(coeffs, "Quaternion"))

    @classmethod
    def from_coefficients(cls, values: npt.ArrayLike) -> "Quaternion":
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (D,):
            raise ShapeError(
                "a quaternion has exactly %d coefficients; got shape %r"
                % (D, arr.shape)
            )

        q = cls.__new__(cls)
        q._c = _frozen(_checked(arr.copy(), "Quaternion"))
        return q

    @classmethod
    def zeros(cls) -> "Quaternion":
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def ones(cls) -> "Quaternion":
        return cls(1.0, 1.0, 1.0, 1.0)

    @classmethod
    def random(cls, generator: np.random.Generator) -> "Quaternion":
        """Draw each coefficient uniformly from ``[0, 1)``."""
        return cls.from_coefficients(generator.random(D))

    @property
    def coefficients(self) -> np.ndarray:
        """Read-only ``(4,)`` array ``(a, b, c, d)``."""
        return self._c

    @property
    def a(self) -> float:
        return float(self._c[0])

    @property
    def b(self) -> float:
        return float(self._c[1])

    @property
    def c(self) -> float:
        return float(self._c[2])

    @property
    def d(self) -> float:
        return float(self._c[3])

    def __iter__(self) -> Iterator[float]:
        return iter(self._c.tolist())

    def __len__(self) -> int:
        return D

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self) -> int:
        return hash(tuple(self._c.tolist()))

    def __repr__(self) -> str:
        return "Quaternion(%r, %r, %r, %r)" % tuple(self._c.tolist())

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return q_add(self, other)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return q_sub(self, other)

    def __rmul__(self, k: float) -> "Quaternion":
        return q_scale(k, self)

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.array(self._c, dtype=dtype)


QuaternionLike = Union[Quaternion, np.ndarray]


@dataclass(frozen=True)
class Bounds:
    """Closed feasible interval ``[lower, upper]`` of a decision variable."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        lower = float(self.lower)
        upper = float(self.upper)
        if not (math.isfinite(lower) and math.isfinite(upper)):
            raise BoundsError(
                "bounds must be finite; got [%r, %r]" % (lower, upper)
            )
        if not lower < upper:
            raise BoundsError(
                "lower bound must be below upper bound; got [%r, %r]"
                % (lower, upper)
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def validate_exponent(p: float, p_max: float | None = None) -> float:
    """Return ``p`` as a float, checking ``1 <= p (<= p_max)``."""
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InvalidExponentError("exponent must be a real number: %r" % p)

    if not math.isfinite(value) or value < 1.0:
        raise InvalidExponentError(
            "Minkowski exponent must be >= 1; got %r" % value
        )
    if p_max is not None and value > p_max:
        raise InvalidExponentError(
            "Minkowski exponent must be <= %r; got %r" % (p_max, value)
        )

    return value


def q_add(q1: QuaternionLike, q2: QuaternionLike) -> QuaternionLike:
    """Coefficient-wise sum ``(a+α, b+β, c+γ, d+δ)``."""
    result = _checked(_coefficients(q1) + _coefficients(q2), "q_add")
    return _wrap(result, q1, q2)


def q_sub(q1: QuaternionLike, q2: QuaternionLike) -> QuaternionLike:
    """Coefficient-wise difference ``(a-α, b-β, c-γ, d-δ)``."""
    result = _checked(_coefficients(q1) - _coefficients(q2), "q_sub")
    return _wrap(result, q1, q2)


def q_scale(k: float | npt.ArrayLike, q: QuaternionLike) -> QuaternionLike:
    """Multiply every coefficient of ``q`` by ``k``.

    For quaternion arrays ``k`` may also be an array of shape
    ``q.shape[:-1]`` holding one factor per quaternion.
    """
    factor = np.asarray(k, dtype=np.float64)
    coeffs = _coefficients(q)
    if factor.ndim and factor.shape != coeffs.shape[:-1]:
        raise ShapeError(
            "scale factors of shape %r do not match quaternions of shape %r"
            % (factor.shape, coeffs.shape)
        )

    result = _checked(factor[..., np.newaxis] * coeffs, "q_scale")
    return _wrap(result, q)


def pnorm(q: QuaternionLike, p: float) -> float | np.ndarray:
    """Minkowski p-norm ``(sum |z_d|^p)^(1/p)`` over the 4 coefficients.

    ``p = 1`` is the Taxicab norm and ``p = 2`` the Euclidean norm. Returns a
    float for a single quaternion and an array of norms otherwise.
    """
    p = validate_exponent(p)
    z = np.abs(_coefficients(q))

    if p == 1.0:
        norm = z.sum(axis=-1)
    elif p == 2.0:
        norm = np.sqrt((z * z).sum(axis=-1))
    else:
        if p in _INTEGER_EXPONENTS:
            powered = z
            for _ in range(int(p) - 1):
                powered = powered * z
        else:
            powered = np.power(z, p)
        norm = powered.sum(axis=-1) ** (1.0 / p)

    return _scalar_or_array(norm)


def clip_coefficients(q: QuaternionLike) -> QuaternionLike:
    """Clip every coefficient to the unit interval ``[0, 1]``."""
    return _wrap(np.clip(_coefficients(q), 0.0, 1.0), q)


def map_to_real(q: QuaternionLike, b: Bounds, p: float) -> float | np.ndarray:
    """Project a quaternion onto the feasible interval of its variable.

    Computes ``l + (u - l) * ||q||_p / D^(1/p)`` after clipping the
    coefficients to ``[0, 1]``, so the result always lies in ``[l, u]``.
    """
    if not isinstance(b, Bounds):
        raise BoundsError("expected Bounds; got %r" % (b,))

    projected = _project(
        _coefficients(q),
        np.float64(b.lower),
        np.float64(b.upper),
        validate_exponent(p),
    )
    return _scalar_or_array(projected)


def map_vector(
    qs: Sequence[Quaternion] | np.ndarray,
    bs: Sequence[Bounds],
    p: float,
) -> np.ndarray:
    """Element-wise :py:func:`map_to_real` of ``n`` quaternions.

    ``qs`` is either a sequence of ``n`` quaternions or a quaternion array
    of shape ``(..., n, 4)``; the result has shape ``(..., n)``.
    """
    if isinstance(qs, np.ndarray):
        coeffs = np.asarray(qs, dtype=np.float64)
    else:
        coeffs = np.array([_coefficients(q) for q in qs], dtype=np.float64)

    bounds = tuple(bs)
    if coeffs.ndim < 2 or coeffs.shape[-1] != D:
        raise ShapeError(
            "expected quaternions of shape (..., n, %d); got %r"
            % (D, coeffs.shape)
        )
    if not bounds or coeffs.shape[-2] != len(bounds):
        raise ShapeError(
            "%d quaternions do not match %d bounds"
            % (coeffs.shape[-2], len(bounds))
        )

    lower, upper = _bounds_arrays(bounds)
    return _project(coeffs, lower, upper, validate_exponent(p))


class ExponentProjection:
    """Projection of one frozen solution of ``n`` quaternions for many ``p``.

    Clipping and coefficient logarithms are computed once. Calling the
    projection with ``k`` exponents returns a ``(k, n)`` array whose row
    ``j`` agrees with ``map_vector(qs, bs, ps[j])`` to within rounding.
    """

    def __init__(
        self,
        qs: Sequence[Quaternion] | np.ndarray,
        bs: Sequence[Bounds],
        p_max: float | None = None,
    ) -> None:
        if isinstance(qs, np.ndarray):
            coeffs = np.asarray(qs, dtype=np.float64)
        else:
            coeffs = np.array([_coefficients(q) for q in qs], dtype=np.float64)
        bounds = tuple(bs)
        if coeffs.ndim != 2 or coeffs.shape[-1] != D:
            raise ShapeError(
                "expected quaternions of shape (n, %d); got %r"
                % (D, coeffs.shape)
            )
        if coeffs.shape[0] != len(bounds):
            raise ShapeError(
                "%d quaternions do not match %d bounds"
                % (coeffs.shape[0], len(bounds))
            )

        self.n = coeffs.shape[0]
        self.p_max = p_max
        self._lower, self._upper = _bounds_arrays(bounds)
        self._width = self._upper - self._lower
        # log(0) = -inf, so zero coefficients contribute exp(-inf) = 0.
        with np.errstate(divide="ignore"):
            self._log_z = _frozen(np.log(np.clip(coeffs, 0.0, 1.0)))

    def __call__(self, ps: npt.ArrayLike) -> np.ndarray:
        exponents = np.asarray(ps, dtype=np.float64)
        if exponents.ndim != 1:
            raise ShapeError(
                "expected a 1-D array of exponents; got %r"
                % (exponents.shape,)
            )
        if exponents.size:
            smallest = float(exponents.min())
            largest = float(exponents.max())
            if not (smallest >= 1.0 and math.isfinite(largest)):
                raise InvalidExponentError(
                    "Minkowski exponents must be finite and >= 1"
                )
            if self.p_max is not None and largest > self.p_max:
                raise InvalidExponentError(
                    "Minkowski exponent must be <= %r; got %r"
                    % (self.p_max, largest)
                )

        p = exponents[:, np.newaxis]
        total = np.exp(p[..., np.newaxis] * self._log_z).sum(axis=-1)
        # ||z||_p / D^(1/p) == (sum z^p / D)^(1/p)
        ratio = np.minimum((total / D) ** (1.0 / p), 1.0)
        projected = self._lower + self._width * ratio
        return np.minimum(np.maximum(projected, self._lower), self._upper)


def map_exponents(
    qs: Sequence[Quaternion] | np.ndarray,
    bs: Sequence[Bounds],
    ps: npt.ArrayLike,
) -> np.ndarray:
    """Project one solution of ``n`` quaternions once per exponent in ``ps``.

    Returns an array of shape ``(len(ps), n)``; see
    :py:class:`ExponentProjection`.
    """
    return ExponentProjection(qs, bs)(ps)


def _project(
    coeffs: np.ndarray, lower: np.ndarray, upper: np.ndarray, p: float
) -> np.ndarray:
    clipped = np.clip(coeffs, 0.0, 1.0)
    ratio = np.minimum(pnorm(clipped, p) / _unit_norm(p), 1.0)
    return np.clip(lower + (upper - lower) * ratio, lower, upper)


@functools.lru_cache(maxsize=256)
def _unit_norm(p: float) -> float:
    # D^(1/p), computed through pnorm so saturated quaternions map exactly
    # onto the upper bound.
    return float(pnorm(np.ones(D), p))


@functools.lru_cache(maxsize=64)
def _bounds_arrays(bounds: tuple[Bounds, ...]) -> tuple[np.ndarray, np.ndarray]:
    for b in bounds:
        if not isinstance(b, Bounds):
            raise BoundsError("expected Bounds; got %r" % (b,))

    lower = _frozen(np.array([b.lower for b in bounds], dtype=np.float64))
    upper = _frozen(np.array([b.upper for b in bounds], dtype=np.float64))
    return lower, upper


def _coefficients(q: QuaternionLike) -> np.ndarray:
    if isinstance(q, Quaternion):
        return q._c

    arr = np.asarray(q, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != D:
        raise ShapeError(
            "quaternion arrays need a trailing axis of %d; got shape %r"
            % (D, arr.shape)
        )
    return arr


def _checked(result: np.ndarray, op: str) -> np.ndarray:
    if not np.isfinite(result).all():
        raise NumericOverflowError("%s produced a non-finite coefficient" % op)
    return result


def _wrap(result: np.ndarray, *operands: QuaternionLike) -> QuaternionLike:
    if all(isinstance(q, Quaternion) for q in operands):
        return Quaternion.from_coefficients(result)
    return result


def _scalar_or_array(values: np.ndarray) -> float | np.ndarray:
    if np.ndim(values) == 0:
        return float(values)
    return values


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr
