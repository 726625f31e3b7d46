"""
Logging manager with console and rotating-file handlers.

This module provides the LoggingManager class that handles structured
logging for every solver component. Console output goes to stderr so that
CSV/JSON results written to stdout stay machine-readable.
"""

import json
import logging
import sys
import time
import traceback
from contextlib import contextmanager
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from src.config import LoggingConfig

LOGGER_NAME = "saturated_nls"


def _json_default(value: Any) -> Any:
    """Serialize numpy scalars and other simple objects in log metadata."""
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


class JSONFormatter(logging.Formatter):
    """
    Custom formatter that outputs logs in structured JSON format.

    This formatter creates machine-readable logs with consistent structure
    for later analysis of long parameter sweeps.
    """

    def format(self, record: logging.LogRecord) -> str:
        """
        Format log record as JSON.

        Args:
            record: Log record to format

        Returns:
            JSON-formatted log string
        """
        log_data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "component": getattr(record, "component", record.name),
            "operation": getattr(record, "operation", ""),
            "message": record.getMessage(),
        }

        if getattr(record, "run_id", None):
            log_data["run_id"] = record.run_id

        if getattr(record, "metadata", None):
            log_data["metadata"] = record.metadata

        if record.exc_info:
            log_data["stack_trace"] = "".join(traceback.format_exception(*record.exc_info))

        return json.dumps(log_data, default=_json_default)


class LoggingManager:
    """
    Logging manager with structured context.

    Features:
    - Console output on stderr for real-time monitoring
    - Rotating file handler with size limits
    - Structured JSON logging format
    - Configurable log levels
    - Context-aware logging with component, operation and run_id

    Attributes:
        logger: Underlying logger instance
        config: Logging configuration
        run_id: Identifier attached to every record of one CLI invocation
    """

    def __init__(self, config: LoggingConfig, run_id: Optional[str] = None):
        """
        Initialize logging manager with configuration.

        Args:
            config: LoggingConfig with logging settings
            run_id: Optional identifier attached to every record
        """
        self.config = config
        self.run_id = run_id
        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(getattr(logging, config.level))
        self.logger.propagate = False

        self.logger.handlers.clear()

        if config.console_output:
            self._add_console_handler()

        if config.file_output:
            self._add_file_handler()

    def _formatter(self) -> logging.Formatter:
        if self.config.format == "json":
            return JSONFormatter()
        return logging.Formatter(
            "%(asctime)s - %(levelname)s - %(component)s.%(operation)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

    def _add_console_handler(self) -> None:
        """Add console handler for real-time output."""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, self.config.level))
        console_handler.setFormatter(self._formatter())
        self.logger.addHandler(console_handler)

    def _add_file_handler(self) -> None:
        """Add rotating file handler with size limits."""
        log_dir = Path(self.config.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        log_file = log_dir / "saturated_nls.log"
        max_bytes = self.config.max_file_size_mb * 1024 * 1024

        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=self.config.backup_count,
            encoding="utf-8",
        )
        file_handler.setLevel(getattr(logging, self.config.level))
        file_handler.setFormatter(self._formatter())
        self.logger.addHandler(file_handler)

    def log_operation(
        self,
        level: str,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> None:
        """
        Log an operation with structured context.

        Args:
            level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
            component: Component name generating the log
            operation: Operation being performed
            message: Log message
            metadata: Optional additional metadata
            exc_info: Optional exception information
        """
        log_level = getattr(logging, level.upper(), logging.INFO)

        extra = {
            "component": component,
            "operation": operation,
            "run_id": self.run_id,
            "metadata": metadata or {},
        }

        self.logger.log(log_level, message, extra=extra, exc_info=exc_info if exc_info else None)

    def log_error(
        self,
        component: str,
        operation: str,
        error: BaseException,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        """
        Log an error with full stack trace and context.

        Args:
            component: Component name where error occurred
            operation: Operation that failed
            error: Exception instance
            context: Optional additional context
        """
        self.log_operation(
            level="ERROR",
            component=component,
            operation=operation,
            message=f"Error: {error}",
            metadata=context or {},
            exc_info=error,
        )

    @contextmanager
    def log_timing(
        self,
        component: str,
        operation: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> Iterator[Dict[str, Any]]:
        """
        Time a block and log its duration at DEBUG level.

        The yielded dict is merged into the logged metadata, so callers can
        attach results (iteration counts, residuals) before the block ends.
        """
        details: Dict[str, Any] = dict(metadata or {})
        start = time.perf_counter()
        try:
            yield details
        finally:
            details["duration_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
            self.log_operation(
                level="DEBUG",
                component=component,
                operation=operation,
                message=f"{operation} finished in {details['duration_ms']:.1f}ms",
                metadata=details,
            )

    def debug(
        self,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Log debug message."""
        self.log_operation("DEBUG", component, operation, message, metadata=metadata)

    def info(
        self,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Log info message."""
        self.log_operation("INFO", component, operation, message, metadata=metadata)

    def warning(
        self,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Log warning message."""
        self.log_operation("WARNING", component, operation, message, metadata=metadata)

    def error(
        self,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> None:
        """Log error message."""
        self.log_operation(
            "ERROR", component, operation, message, metadata=metadata, exc_info=exc_info
        )

    def critical(
        self,
        component: str,
        operation: str,
        message: str,
        metadata: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> None:
        """Log critical message."""
        self.log_operation(
            "CRITICAL", component, operation, message, metadata=metadata, exc_info=exc_info
        )
