"""
Fixed-Point Iteration Engine

Evaluates T(y) = k - M (1/y) on the open positive orthant and runs the
fixed-point iteration sequence y_{r+1} = T(y_r). A sequence is finite when
an iterate leaves the orthant (some component <= 0).
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from core.matrix_analysis import MatrixLike, NonnegMatrix, as_matrix
from core.order import PositiveVector, Vector, VectorLike, as_array, as_positive, leq
from infrastructure.config_manager import get_config
from infrastructure.error_handling import DimensionMismatchError, OrderPreconditionError
from infrastructure.logger import get_logger

logger = get_logger(__name__)

_FLOAT_MAX = np.finfo(float).max


# ==============================
# PROBLEM
# ==============================

@dataclass(frozen=True)
class Problem:
    """The isotone electric system y = k - M (1/y)"""
    k: Vector
    M: NonnegMatrix

    def __post_init__(self):
        k = self.k if isinstance(self.k, Vector) else Vector(self.k)
        M = as_matrix(self.M)
        if k.n != M.n:
            raise DimensionMismatchError(M.n, k.n, "offset vector k")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "M", M)

    @classmethod
    def from_arrays(cls, k: VectorLike, M: MatrixLike) -> "Problem":
        return cls(Vector(as_array(k)), as_matrix(M))

    @property
    def n(self) -> int:
        return self.k.n

    def to_dict(self) -> dict:
        return {"k": self.k.to_list(), "M": self.M.to_list()}


# ==============================
# TRACE TYPES
# ==============================

class TraceStatus(Enum):
    CONVERGED = "Converged"
    DOMAIN_EXIT = "DomainExit"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    # stopped by a caller-supplied ordering guard (existence test only)
    HALTED = "Halted"


class Monotonicity(Enum):
    STRONGLY_ISOTONE = "StronglyIsotone"
    ISOTONE = "Isotone"
    STRONGLY_ANTITONE = "StronglyAntitone"
    ANTITONE = "Antitone"
    NON_MONOTONE = "NonMonotone"


@dataclass(frozen=True)
class IterationTrace:
    """A recorded fixed-point iteration sequence"""
    start: PositiveVector
    iterates: Tuple[Vector, ...]
    steps: Tuple[int, ...]
    step_sizes: Tuple[float, ...]
    status: TraceStatus
    monotonicity: Monotonicity
    isotone: bool
    antitone: bool
    iterations: int
    limit: Optional[Vector] = None
    exit_step: Optional[int] = None

    @property
    def last(self) -> Vector:
        return self.iterates[-1]

    def consecutive_pairs(self) -> List[Tuple[Vector, Vector]]:
        """Stored pairs (y_r, y_{r+1}) whose steps are adjacent"""
        return [
            (self.iterates[i], self.iterates[i + 1])
            for i in range(len(self.iterates) - 1)
            if self.steps[i + 1] == self.steps[i] + 1
        ]


class _MonotonicityTracker:
    """Classifies a sequence from its consecutive pairs with exact comparisons"""

    def __init__(self):
        self.increasing = True
        self.strictly_increasing = True
        self.decreasing = True
        self.strictly_decreasing = True
        self.pairs = 0

    def update(self, prev: np.ndarray, curr: np.ndarray) -> None:
        self.pairs += 1
        self.increasing &= bool(np.all(prev <= curr))
        self.strictly_increasing &= bool(np.all(prev < curr))
        self.decreasing &= bool(np.all(curr <= prev))
        self.strictly_decreasing &= bool(np.all(curr < prev))

    def classify(self) -> Monotonicity:
        if self.pairs and self.strictly_decreasing:
            return Monotonicity.STRONGLY_ANTITONE
        if self.pairs and self.strictly_increasing:
            return Monotonicity.STRONGLY_ISOTONE
        if self.decreasing:
            return Monotonicity.ANTITONE
        if self.increasing:
            return Monotonicity.ISOTONE
        return Monotonicity.NON_MONOTONE


class TraceRecorder:
    """
    Keeps every iterate up to `cap`; beyond it only every `stride`-th iterate
    plus the last two are retained.
    """

    def __init__(self, cap: int, stride: int):
        self.cap = cap
        self.stride = stride
        self._kept: List[Tuple[int, np.ndarray, float]] = []
        self._tail = deque(maxlen=2)

    def record(self, step: int, y: np.ndarray, step_size: float) -> None:
        if step < self.cap or step % self.stride == 0:
            self._kept.append((step, y, step_size))
        else:
            self._tail.append((step, y, step_size))

    def entries(self) -> List[Tuple[int, np.ndarray, float]]:
        kept = list(self._kept)
        last = kept[-1][0] if kept else -1
        kept.extend(item for item in self._tail if item[0] > last)
        return kept


# ==============================
# T AND ITS DERIVATIVES
# ==============================

def _check_dim(p: Problem, y: np.ndarray) -> None:
    if y.size != p.n:
        raise DimensionMismatchError(p.n, y.size, "iterate")


def _t_map(k: np.ndarray, M: np.ndarray, y: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inv = 1.0 / y
        if np.all(np.isfinite(inv)):
            return k - M @ inv
        # zero entries of M must not meet an infinite 1/y_j (0 * inf = nan)
        return k - np.where(M > 0, M * inv[np.newaxis, :], 0.0).sum(axis=1)


def _in_domain(y: np.ndarray) -> bool:
    return bool(np.all(y > 0) and np.all(np.isfinite(y)))


def _saturate(y: np.ndarray) -> np.ndarray:
    """Map non-finite components into the float range (nan counts as nonpositive)"""
    return np.nan_to_num(y, nan=-_FLOAT_MAX, posinf=_FLOAT_MAX, neginf=-_FLOAT_MAX)


def apply_T(p: Problem, y: VectorLike) -> Vector:
    """k - M (1/y); the result may leave the positive orthant"""
    x = as_positive(y).entries
    _check_dim(p, x)
    return Vector(_saturate(_t_map(p.k.entries, p.M.entries, x)))


def residual(p: Problem, y: VectorLike) -> float:
    """Sup-norm fixed-point residual max_i |y_i - T(y)_i|"""
    x = as_positive(y).entries
    _check_dim(p, x)
    return float(np.max(np.abs(x - _t_map(p.k.entries, p.M.entries, x))))


def jacobian_T(p: Problem, y: VectorLike) -> NonnegMatrix:
    """J_T(y) = M diag(1/(y o y))"""
    x = as_positive(y).entries
    _check_dim(p, x)
    return p.M.scale_columns(1.0 / (x * x))


def in_s_plus(p: Problem, y: VectorLike) -> bool:
    """y <= T(y): iteration from y is isotone"""
    return leq(y, apply_T(p, y))


def in_s_minus(p: Problem, y: VectorLike) -> bool:
    """T(y) <= y: iteration from y is antitone"""
    return leq(apply_T(p, y), y)


# ==============================
# ITERATION
# ==============================

def fit_sequence(p: Problem, y0: VectorLike) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Lazily yields (r, y_r) for y_{r+1} = T(y_r). The generator ends right after
    yielding the first iterate outside the positive orthant; otherwise it is
    infinite and callers bound it.
    """
    y = np.array(as_positive(y0).entries)
    _check_dim(p, y)
    k, M = p.k.entries, p.M.entries
    r = 0
    yield r, y
    while True:
        y = _saturate(_t_map(k, M, y))
        r += 1
        yield r, y
        if not _in_domain(y):
            return


def run_fit(
    p: Problem,
    y0: VectorLike,
    tol: float,
    budget: int,
    guard: Optional[Callable[[np.ndarray], bool]] = None,
    trace_cap: Optional[int] = None,
) -> IterationTrace:
    """
    Shared driver of `iterate` and the existence test. `guard`, when given, is
    evaluated on every new in-domain iterate; the first failure halts the run.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if budget < 1:
        raise ValueError("budget must be >= 1")

    config = get_config().iteration
    recorder = TraceRecorder(trace_cap or config.trace_cap, config.thin_stride)
    tracker = _MonotonicityTracker()
    start = as_positive(y0)

    status = TraceStatus.BUDGET_EXHAUSTED
    limit = None
    exit_step = None
    prev = None
    last_step = 0

    for r, y in fit_sequence(p, start):
        if prev is None:
            recorder.record(r, y, float("nan"))
            prev = y
            continue

        step_size = float(np.max(np.abs(y - prev)))
        recorder.record(r, y, step_size)
        tracker.update(prev, y)
        last_step = r

        if not _in_domain(y):
            status = TraceStatus.DOMAIN_EXIT
            exit_step = r
            break
        if guard is not None and not guard(y):
            status = TraceStatus.HALTED
            exit_step = r
            break
        if step_size < tol:
            status = TraceStatus.CONVERGED
            limit = Vector(y)
            break
        if r >= budget:
            break
        prev = y

    entries = recorder.entries()
    trace = IterationTrace(
        start=start,
        iterates=tuple(Vector(y) for _, y, _ in entries),
        steps=tuple(step for step, _, _ in entries),
        step_sizes=tuple(size for _, _, size in entries),
        status=status,
        monotonicity=tracker.classify(),
        isotone=tracker.increasing,
        antitone=tracker.decreasing,
        iterations=last_step,
        limit=limit,
        exit_step=exit_step,
    )

    logger.debug(
        "Fixed-point iteration finished",
        status=status.value,
        iterations=last_step,
        monotonicity=trace.monotonicity.value,
    )
    return trace


def iterate(
    p: Problem,
    y0: VectorLike,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
) -> IterationTrace:
    """Run Fit_{T,y0} until convergence, domain exit or budget exhaustion"""
    config = get_config().iteration
    return run_fit(
        p,
        y0,
        config.tol if tol is None else tol,
        config.budget if budget is None else budget,
    )


def order_preservation_check(
    p: Problem,
    y0: VectorLike,
    z0: VectorLike,
    steps: int,
) -> bool:
    """
    For ordered starts y0 <= z0, checks y_r <= z_r for every r <= steps while
    both sequences stay in the positive orthant.
    """
    if not leq(y0, z0):
        raise OrderPreconditionError("order_preservation_check requires y0 <= z0")

    lower = fit_sequence(p, y0)
    upper = fit_sequence(p, z0)
    for (r, y), (_, z) in zip(lower, upper):
        if not (_in_domain(y) and _in_domain(z)):
            break
        if not np.all(y <= z):
            logger.warning("Order violated along iteration", step=r)
            return False
        if r >= steps:
            break
    return True
