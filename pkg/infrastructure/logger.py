"""
Structured Logging System
Every record is rendered as one JSON object so solver runs can be aggregated
"""

import logging
import json
from datetime import datetime, timezone
from pathlib import Path
from enum import Enum
from typing import Dict, Optional


class LogLevel(Enum):
    """Log severity levels"""
    DEBUG = logging.DEBUG
    INFO = logging.INFO
    WARNING = logging.WARNING
    ERROR = logging.ERROR
    CRITICAL = logging.CRITICAL


class StructuredLogger:
    """
    Structured logger with:
    - JSON output for log aggregation
    - Console handler on stderr (stdout is reserved for reports and CSV)
    - Optional JSON-lines and error files
    - Contextual information
    """

    def __init__(
        self,
        name: str,
        level: LogLevel = LogLevel.WARNING,
        log_dir: Optional[str] = None,
        console: bool = True,
    ):
        self.logger = logging.getLogger(name)
        self.logger.propagate = False
        self.context: Dict = {}
        self.configure(level, log_dir, console)

    def configure(
        self,
        level: LogLevel,
        log_dir: Optional[str] = None,
        console: bool = True,
    ):
        """(Re)build handlers in place so module-level references stay valid"""
        self.logger.setLevel(level.value)

        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()

        console_formatter = logging.Formatter(
            '[%(levelname)s] %(asctime)s - %(name)s: %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        if console:
            # StreamHandler defaults to stderr
            console_handler = logging.StreamHandler()
            console_handler.setFormatter(console_formatter)
            self.logger.addHandler(console_handler)

        if log_dir:
            directory = Path(log_dir)
            directory.mkdir(parents=True, exist_ok=True)

            json_handler = logging.FileHandler(directory / "solver.json.log")
            json_handler.setFormatter(logging.Formatter('%(message)s'))

            error_handler = logging.FileHandler(directory / "solver.error.log")
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(console_formatter)

            self.logger.addHandler(json_handler)
            self.logger.addHandler(error_handler)

        if not self.logger.handlers:
            self.logger.addHandler(logging.NullHandler())

    def set_context(self, **kwargs):
        """Set contextual information for logs"""
        self.context.update(kwargs)

    def _format_log(self, level: str, message: str, **kwargs) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": level,
            "message": message,
            "context": self.context,
            **kwargs
        }
        return json.dumps(log_data, default=str)

    def debug(self, message: str, **kwargs):
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(self._format_log("DEBUG", message, **kwargs))

    def info(self, message: str, **kwargs):
        if self.logger.isEnabledFor(logging.INFO):
            self.logger.info(self._format_log("INFO", message, **kwargs))

    def warning(self, message: str, **kwargs):
        self.logger.warning(self._format_log("WARNING", message, **kwargs))

    def error(self, message: str, exception: Exception = None, **kwargs):
        if exception:
            kwargs['exception'] = str(exception)
            kwargs['exception_type'] = type(exception).__name__
        self.logger.error(self._format_log("ERROR", message, **kwargs))


# Loggers are cached per name
_loggers: Dict[str, StructuredLogger] = {}
_level: LogLevel = LogLevel.WARNING
_log_dir: Optional[str] = None
_console: bool = True


def get_logger(name: str) -> StructuredLogger:
    """Get or create structured logger"""
    if name not in _loggers:
        _loggers[name] = StructuredLogger(name, _level, _log_dir, _console)
    return _loggers[name]


def init_logger(
    log_level: str = "WARNING",
    log_dir: Optional[str] = None,
    console: bool = True,
) -> Dict[str, StructuredLogger]:
    """Reconfigure every logger created so far and all future ones"""
    global _level, _log_dir, _console
    _level = LogLevel[log_level.upper()]
    _log_dir = log_dir
    _console = console
    for logger in _loggers.values():
        logger.configure(_level, _log_dir, _console)
    return _loggers
