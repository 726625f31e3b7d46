"""
Logging module for the saturated NLS toolkit.

This module provides structured logging with console and rotating-file
handlers.
"""

from src.log_manager.logging_manager import JSONFormatter, LoggingManager

__all__ = ["JSONFormatter", "LoggingManager"]
