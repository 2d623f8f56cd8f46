"""
Componentwise Order Algebra

Vectors of R^n under the componentwise partial order x <= y <=> x_i <= y_i,
with Hadamard products, reciprocals and ordered intervals.
Comparisons are exact floating-point comparisons; tolerances belong to the
solver layer.
"""

from dataclasses import dataclass
from typing import Any, Iterator, List, Sequence, Union

import numpy as np

from infrastructure.error_handling import DimensionMismatchError


# ==============================
# VECTOR TYPES
# ==============================

@dataclass(frozen=True, eq=False, repr=False)
class Vector:
    """Immutable element of R^n (n >= 1, finite entries)"""
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"A vector needs n >= 1 entries, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Vector entries must be finite")
        self._check(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def _check(self, arr: np.ndarray) -> None:
        pass

    @property
    def n(self) -> int:
        return self.entries.size

    def __len__(self) -> int:
        return self.entries.size

    def __iter__(self) -> Iterator[float]:
        return iter(self.entries.tolist())

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(tuple(self.entries.tolist()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.entries.tolist()})"

    def to_list(self) -> List[float]:
        return self.entries.tolist()

    def is_positive(self) -> bool:
        return bool(np.all(self.entries > 0))


@dataclass(frozen=True, eq=False, repr=False)
class PositiveVector(Vector):
    """Element of the open positive orthant (R+*)^n"""

    def _check(self, arr: np.ndarray) -> None:
        if not np.all(arr > 0):
            raise ValueError(f"PositiveVector entries must be > 0, got {arr.tolist()}")


VectorLike = Union[Vector, Sequence[float], np.ndarray]


def as_array(v: VectorLike) -> np.ndarray:
    """Read-only float view of a vector-like value"""
    if isinstance(v, Vector):
        return v.entries
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"Expected a 1-d vector, got shape {arr.shape}")
    return arr


def as_vector(v: VectorLike) -> Vector:
    return v if isinstance(v, Vector) else Vector(v)


def as_positive(v: VectorLike) -> PositiveVector:
    if isinstance(v, PositiveVector):
        return v
    return PositiveVector(as_array(v))


def _pair(a: VectorLike, b: VectorLike):
    x, y = as_array(a), as_array(b)
    if x.shape != y.shape:
        raise DimensionMismatchError(x.size, y.size, "vector comparison")
    return x, y


# ==============================
# ORDER RELATIONS
# ==============================

def leq(a: VectorLike, b: VectorLike) -> bool:
    """a <= b componentwise"""
    x, y = _pair(a, b)
    return bool(np.all(x <= y))


def lt_strict(a: VectorLike, b: VectorLike) -> bool:
    """a < b in every component"""
    x, y = _pair(a, b)
    return bool(np.all(x < y))


def lneq(a: VectorLike, b: VectorLike) -> bool:
    """a <= b and a != b"""
    x, y = _pair(a, b)
    return bool(np.all(x <= y) and np.any(x < y))


def relation(a: VectorLike, b: VectorLike) -> str:
    """
    Label of the order relation between a and b:
    "eq", "lt" (strict in every component), "lneq", "gt", "gneq" or "incomparable"
    """
    x, y = _pair(a, b)
    if np.array_equal(x, y):
        return "eq"
    if lt_strict(x, y):
        return "lt"
    if leq(x, y):
        return "lneq"
    if lt_strict(y, x):
        return "gt"
    if leq(y, x):
        return "gneq"
    return "incomparable"


# ==============================
# HADAMARD ALGEBRA
# ==============================

def hadamard(a: VectorLike, b: VectorLike) -> Vector:
    """Entrywise (Schur) product"""
    x, y = _pair(a, b)
    return Vector(x * y)


def reciprocal(y: VectorLike) -> PositiveVector:
    """Componentwise 1/y of a positive vector"""
    return PositiveVector(1.0 / as_positive(y).entries)


# ==============================
# ORDERED INTERVAL
# ==============================

@dataclass(frozen=True)
class OrderedInterval:
    """The box {y : lower <= y <= upper}"""
    lower: Vector
    upper: Vector

    def __post_init__(self):
        object.__setattr__(self, "lower", as_vector(self.lower))
        object.__setattr__(self, "upper", as_vector(self.upper))
        if not leq(self.lower, self.upper):
            raise ValueError(
                f"Interval bounds are not ordered: {self.lower.to_list()} !<= {self.upper.to_list()}"
            )

    def contains(self, y: VectorLike, slack: float = 0.0) -> bool:
        x = as_array(y)
        return bool(
            np.all(self.lower.entries - slack <= x) and np.all(x <= self.upper.entries + slack)
        )

    def widen(self, slack: float) -> "OrderedInterval":
        return OrderedInterval(
            Vector(self.lower.entries - slack), Vector(self.upper.entries + slack)
        )
