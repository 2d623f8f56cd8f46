"""
Solver Error Taxonomy & Recovery
Domain exceptions, and the mapping from failures to CLI exit statuses
"""

import sys
from typing import Callable, Optional, Sequence, TypeVar, Any

from infrastructure.logger import get_logger

logger = get_logger(__name__)

T = TypeVar('T')


# ==============================
# EXIT STATUSES
# ==============================

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_BUDGET_EXHAUSTED = 3


# ==============================
# EXCEPTIONS
# ==============================

class SolverError(Exception):
    """Base class of every error raised by the solver"""
    pass


class DimensionMismatchError(SolverError):
    """Operands have incompatible lengths or shapes"""

    def __init__(self, expected: Any, got: Any, what: str = "operand"):
        super().__init__(
            f"Incompatible dimensions for {what}: expected {expected}, got {got}"
        )
        self.expected = expected
        self.got = got


class OrderPreconditionError(SolverError):
    """Two starts were required to be ordered (y0 <= z0) but are not"""
    pass


class BudgetExhaustedError(SolverError):
    """An iteration budget ran out before the stopping rule was met"""

    def __init__(self, message: str, bracket: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.bracket = tuple(bracket) if bracket is not None else None


class IndeterminateError(BudgetExhaustedError):
    """A verdict was required but the existence test stayed undecided"""

    def __init__(self, message: str, verdict: Any = None):
        super().__init__(message)
        self.verdict = verdict


class NonexistenceError(SolverError):
    """The problem has no positive fixed point"""

    def __init__(self, message: str, verdict: Any = None, block: Optional[int] = None):
        super().__init__(message)
        self.verdict = verdict
        self.block = block


class RejectedInputError(SolverError):
    """A supplied point is not a fixed point to the requested tolerance"""
    pass


class UnsupportedSizeError(SolverError):
    """The requested analysis is not available for this dimension"""

    def __init__(self, n: int, supported: str):
        super().__init__(f"Unsupported dimension n={n} (supported: {supported})")
        self.n = n


# ==============================
# ERROR HANDLER
# ==============================

class ErrorHandler:
    """
    Centralized mapping of failures to exit statuses
    """

    def __init__(self, stream=None):
        self.stream = stream

    def exit_code(self, error: Exception) -> int:
        if isinstance(error, BudgetExhaustedError):
            return EXIT_BUDGET_EXHAUSTED
        if isinstance(error, (SolverError, ValueError)):
            return EXIT_INPUT_ERROR
        raise error

    def handle_error(self, error: Exception, log_context: Optional[dict] = None) -> int:
        """Log the failure, print a one-line diagnostic, return the exit status"""
        code = self.exit_code(error)

        logger.error(
            f"Error handled: {type(error).__name__}",
            error_type=type(error).__name__,
            error_message=str(error),
            exit_code=code,
            **(log_context or {})
        )

        stream = self.stream or sys.stderr
        print(f"error: {error}", file=stream)
        return code

    def protected_call(self, func: Callable[..., T], **call_kwargs) -> int:
        """
        Execute a command; returns its exit status or the mapped failure status
        """
        try:
            func(**call_kwargs)
            return EXIT_OK
        except SolverError as e:
            return self.handle_error(e)
        except ValueError as e:
            return self.handle_error(e)


def init_error_handler(stream=None) -> ErrorHandler:
    """Error handler writing diagnostics to `stream` (stderr by default)"""
    return ErrorHandler(stream)
