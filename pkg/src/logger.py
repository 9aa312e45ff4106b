"""Logging utilities for the library and the command-line tool.

This module provides functions to set up and get loggers with
consistent configuration across the package.
"""
import json
import logging
from contextlib import contextmanager
from logging import LoggerAdapter
from typing import Optional, Union

# Attributes every LogRecord carries; anything else came in through ``extra``.
_RECORD_ATTRIBUTES = set(vars(logging.LogRecord('', 0, '', 0, '', (), None))) | {'message', 'asctime'}


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the specified name.

    Args:
        name: Name for the logger (usually __name__ of calling module)

    Returns:
        Configured Logger instance

    Example:
        logger = get_logger(__name__)
        logger.debug('Assembled complex')
    """
    return logging.getLogger(name)


def setup_logging(level: Union[int, str] = logging.WARNING, log_file: Optional[str] = None,
                  json_format: bool = False) -> None:
    """Set up logging configuration for a run.

    This should be called once, by the command-line entry point.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file. If None, logs to stderr.
        json_format: Emit one JSON object per record

    Example:
        setup_logging(level='DEBUG', log_file='homalg.log')
    """
    if json_format:
        formatter: logging.Formatter = JsonFormatter()
    else:
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(level)

    if log_file:
        handler: logging.Handler = logging.FileHandler(log_file, mode='a')
    else:
        handler = logging.StreamHandler()
    handler.setLevel(level)
    handler.setFormatter(formatter)
    root_logger.addHandler(handler)


class JsonFormatter(logging.Formatter):
    """Format log records as JSON for structured logging.

    Fields passed through ``extra`` (suite names, seeds, basis sizes) are
    copied into the JSON object.
    """

    def format(self, record: logging.LogRecord) -> str:
        """Convert log record to JSON string.

        Args:
            record: The log record to format

        Returns:
            JSON string representation of the log record
        """
        log_data = {
            'timestamp': self.formatTime(record),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno
        }
        for key, value in vars(record).items():
            if key not in _RECORD_ATTRIBUTES and key not in log_data:
                log_data[key] = value

        if record.exc_info:  # pragma: no cover
            log_data['exception'] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


def get_logger_with_context(logger: logging.Logger, **context) -> LoggerAdapter:
    """Get a logger with arbitrary context.

    Args:
        logger: Base logger
        **context: Arbitrary context key-value pairs

    Returns:
        LoggerAdapter with provided context

    Example:
        log = get_logger_with_context(get_logger(__name__), suite='hochschild', seed=0)
        log.info('Suite passed')
    """
    return LoggerAdapter(logger, context)


@contextmanager
def log_context(logger: Union[logging.Logger, LoggerAdapter], **context):
    """Context manager that adds context to logger.

    Args:
        logger: Base logger or adapter
        **context: Context to add

    Yields:
        LoggerAdapter with context

    Example:
        with log_context(logger, suite='cosimplicial') as log:
            log.info('Running')
    """
    if isinstance(logger, LoggerAdapter):
        merged_context = {**logger.extra, **context}
        context_logger = get_logger_with_context(logger.logger, **merged_context)
    else:
        context_logger = get_logger_with_context(logger, **context)

    context_logger.debug('Entering context')

    try:
        yield context_logger
    finally:
        context_logger.debug('Exiting context')
