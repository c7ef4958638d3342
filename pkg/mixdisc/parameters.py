import math
import numbers
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Generic, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .support import ParameterError

T = TypeVar("T")


@dataclass
class Parameter(Generic[T], ABC):
    """
    Base class for validated scalar inputs (accuracies, radii, degrees, seeds,
    complex points).

    Each parameter has a name and a value, and ensures the value stays valid
    through validation rules. Invalid values raise
    :class:`~mixdisc.support.ParameterError`; nothing is silently clamped
    because every parameter feeds a certified bound.

    Parameters
    ----------
    name : str
        The name of the parameter, used in error messages and CLI output
    value : T
        The current value of the parameter

    Notes
    -----
    This is an abstract base class, use one of the concrete types like
    IntervalParameter or IntegerParameter instead.
    """

    name: str
    value: T

    @abstractmethod
    def __init__(self, name: str, value: T):
        raise NotImplementedError("Need to define in subclass for proper IDE support")

    @property
    def value(self) -> T:
        """The current (validated) value."""
        return self._value

    @value.setter
    def value(self, new_value: T) -> None:
        self._value = self._validate(new_value)

    @abstractmethod
    def _validate(self, new_value: Any) -> T:
        raise NotImplementedError

    def _error(self, message: str) -> ParameterError:
        return ParameterError(self.name, type(self).__name__, message)


@dataclass(init=False)
class IntervalParameter(Parameter[float]):
    """
    Parameter for a finite real value inside an interval.

    Parameters
    ----------
    name : str
        The name of the parameter
    value : float
        Initial value
    low, high : float
        Interval bounds (default: the whole real line)
    include_low, include_high : bool
        Whether the bounds themselves are admissible (default False, the
        accuracy and radius parameters all live on open intervals)

    Examples
    --------
    >>> rho = IntervalParameter("rho", 0.9, low=0, high=1)
    >>> rho.value
    0.9
    >>> IntervalParameter("rho", 1.0, low=0, high=1)
    Traceback (most recent call last):
    ...
    mixdisc.support.ParameterError: Invalid IntervalParameter parameter 'rho': ...
    """

    low: float
    high: float
    include_low: bool
    include_high: bool

    def __init__(
        self,
        name: str,
        value: Any,
        low: float = -math.inf,
        high: float = math.inf,
        include_low: bool = False,
        include_high: bool = False,
    ):
        self.name = name
        self.low = float(low)
        self.high = float(high)
        self.include_low = include_low
        self.include_high = include_high
        self._check_bounds()
        self._value = self._validate(value)

    def _validate(self, new_value: Any) -> float:
        try:
            new_value = float(new_value)
        except (TypeError, ValueError):
            raise self._error(f"Value {new_value!r} cannot be converted to float")
        if not math.isfinite(new_value):
            raise self._error(f"Value {new_value} is not finite")
        below = new_value < self.low or (new_value == self.low and not self.include_low)
        above = new_value > self.high or (
            new_value == self.high and not self.include_high
        )
        if below or above:
            raise self._error(f"Value {new_value} outside {self.describe_range()}")
        return new_value

    def _check_bounds(self) -> None:
        if not self.low < self.high:
            raise self._error(f"Lower bound {self.low} must be below {self.high}")

    def describe_range(self) -> str:
        left = "[" if self.include_low else "("
        right = "]" if self.include_high else ")"
        return f"{left}{self.low}, {self.high}{right}"


@dataclass(init=False)
class IntegerParameter(Parameter[int]):
    """
    Parameter for integer values with optional inclusive bounds.

    Accepts ints, integral floats and numeric strings.

    Examples
    --------
    >>> IntegerParameter("m", "2", min=1).value
    2
    """

    min: Optional[int]
    max: Optional[int]

    def __init__(
        self,
        name: str,
        value: Any,
        min: Optional[int] = None,
        max: Optional[int] = None,
    ):
        self.name = name
        self.min = min
        self.max = max
        self._check_bounds()
        self._value = self._validate(value)

    def _validate(self, new_value: Any) -> int:
        if isinstance(new_value, (bool, np.bool_)):
            raise self._error(f"Value {new_value!r} is a boolean, not an integer")
        if isinstance(new_value, numbers.Integral):
            result = int(new_value)
        else:
            try:
                number = float(new_value)
            except (TypeError, ValueError):
                raise self._error(f"Value {new_value!r} cannot be converted to int")
            if not number.is_integer():
                raise self._error(f"Value {new_value!r} is not an integer")
            result = int(number)
        if self.min is not None and result < self.min:
            raise self._error(f"Value {result} below minimum {self.min}")
        if self.max is not None and result > self.max:
            raise self._error(f"Value {result} above maximum {self.max}")
        return result

    def _check_bounds(self) -> None:
        if self.min is not None and self.max is not None and self.min > self.max:
            raise self._error(f"Minimum {self.min} greater than maximum {self.max}")


def parse_complex(value: Any) -> complex:
    """
    Convert a number, a ``"a+bj"`` string or an ``[re, im]`` pair to complex.

    Raises
    ------
    ValueError
        If the value has none of these forms or is not finite
    """
    if isinstance(value, (str, bytes)):
        result = complex(str(value).replace(" ", "").replace("i", "j"))
    elif isinstance(value, numbers.Number):
        result = complex(value)
    elif isinstance(value, Sequence) or isinstance(value, np.ndarray):
        if len(value) != 2:
            raise ValueError(f"expected an [re, im] pair, got {len(value)} entries")
        result = complex(float(value[0]), float(value[1]))
    else:
        raise ValueError(f"{value!r} is not a complex number")
    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise ValueError(f"{value!r} is not finite")
    return result


@dataclass(init=False)
class ComplexListParameter(Parameter[Tuple[complex, ...]]):
    """
    Parameter for a list of complex numbers, optionally of a fixed length.
    """

    length: Optional[int]

    def __init__(self, name: str, value: Any, length: Optional[int] = None):
        self.name = name
        self.length = length
        self._value = self._validate(value)

    def _validate(self, new_value: Any) -> Tuple[complex, ...]:
        if isinstance(new_value, (str, bytes)) or not isinstance(
            new_value, (Sequence, np.ndarray)
        ):
            raise self._error(f"Value {new_value!r} is not a list")
        try:
            result = tuple(parse_complex(item) for item in new_value)
        except (TypeError, ValueError) as e:
            raise self._error(str(e))
        if self.length is not None and len(result) != self.length:
            raise self._error(f"Expected {self.length} values, got {len(result)}")
        return result


def open_unit(name: str, value: Any) -> float:
    """Validate a value in the open interval (0, 1)."""
    return IntervalParameter(name, value, low=0.0, high=1.0).value


def positive(name: str, value: Any) -> float:
    """Validate a finite value in (0, inf)."""
    return IntervalParameter(name, value, low=0.0).value


def positive_integer(name: str, value: Any) -> int:
    return IntegerParameter(name, value, min=1).value
