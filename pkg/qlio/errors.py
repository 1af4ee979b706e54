# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Exception types raised by qlio.

Every exception derives from :py:class:`QlioError` and from the built-in
exception that best describes it, so callers may catch either.
"""

__all__ = [
    "AggregationError",
    "BoundsError",
    "ConfigError",
    "DegenerateSampleError",
    "DimensionError",
    "DomainError",
    "InvalidExponentError",
    "NumericOverflowError",
    "PersistenceError",
    "QlioError",
    "RunError",
    "ShapeError",
    "UnknownFunctionError",
]


class QlioError(Exception):
    """Base class of all qlio errors."""


class NumericOverflowError(QlioError, ArithmeticError):
    """A quaternion operation produced a non-finite coefficient."""


class InvalidExponentError(QlioError, ValueError):
    """A Minkowski exponent is outside its admissible interval."""


class BoundsError(QlioError, ValueError):
    """A lower/upper bound pair is not finite or not increasing."""


class ShapeError(QlioError, ValueError):
    """Operands have incompatible lengths or shapes."""


class UnknownFunctionError(QlioError, KeyError):
    """No benchmark function is registered under the requested name."""

    def __str__(self):
        # KeyError quotes its argument; keep the plain message.
        return str(self.args[0]) if self.args else ""


class DimensionError(QlioError, ValueError):
    """A benchmark function was requested with an unsupported dimension."""


class DomainError(QlioError, ValueError):
    """An objective was evaluated outside its bounds."""


class ConfigError(QlioError, ValueError):
    """A configuration value is missing or invalid."""


class RunError(QlioError, RuntimeError):
    """An optimizer run failed while evaluating its objective."""


class DegenerateSampleError(QlioError, ValueError):
    """A paired sample has no non-zero differences."""


class AggregationError(QlioError, ValueError):
    """Run records do not form complete experiment cells."""


class PersistenceError(QlioError, OSError):
    """Run records could not be written or read."""
