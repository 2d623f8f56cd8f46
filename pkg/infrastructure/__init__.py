"""
Solver Infrastructure Package
Logging, configuration, error handling and input validation

Modules:
  - logger: Structured logging with JSON output
  - config_manager: Environment-based configuration management
  - error_handling: Error taxonomy and exit-status mapping
  - validation: Input validation for problem files
"""

from infrastructure.logger import (
    get_logger,
    init_logger,
    StructuredLogger,
    LogLevel
)

from infrastructure.config_manager import (
    get_config,
    init_config,
    ConfigManager,
)

from infrastructure.error_handling import (
    init_error_handler,
    ErrorHandler,
    SolverError,
    DimensionMismatchError,
    OrderPreconditionError,
    BudgetExhaustedError,
    IndeterminateError,
    NonexistenceError,
    RejectedInputError,
    UnsupportedSizeError,
)

from infrastructure.validation import (
    InputValidator,
    ValidationError,
    NonnegativityError,
)

__all__ = [
    # Logger
    "get_logger",
    "init_logger",
    "StructuredLogger",
    "LogLevel",
    # Config
    "get_config",
    "init_config",
    "ConfigManager",
    # Error Handling
    "init_error_handler",
    "ErrorHandler",
    "SolverError",
    "DimensionMismatchError",
    "OrderPreconditionError",
    "BudgetExhaustedError",
    "IndeterminateError",
    "NonexistenceError",
    "RejectedInputError",
    "UnsupportedSizeError",
    # Validation
    "InputValidator",
    "ValidationError",
    "NonnegativityError",
]
