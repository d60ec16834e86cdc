"""
Logging configuration module for ATOMS Lab.

Records may carry walk-forward context (seed, period, selector) or an HTTP
request id; every formatter renders whichever of these a record has.
"""

import json
import logging
import logging.handlers
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, MutableMapping, Tuple

from .config import LoggingConfig

CONTEXT_FIELDS = ("request_id", "seed", "period", "selector")

# Third-party loggers and the least severe level they may emit at
QUIET_LOGGERS = {
    "uvicorn": logging.INFO,
    "uvicorn.access": logging.INFO,
    "matplotlib": logging.WARNING,
    "PIL": logging.WARNING,
    "httpx": logging.WARNING,
}

_LEVEL_COLORS = {
    "DEBUG": "\033[36m",
    "INFO": "\033[32m",
    "WARNING": "\033[33m",
    "ERROR": "\033[31m",
    "CRITICAL": "\033[35m",
}
_RESET = "\033[0m"


def record_context(record: logging.LogRecord) -> Dict[str, Any]:
    return {name: getattr(record, name) for name in CONTEXT_FIELDS if hasattr(record, name)}


def _timestamp(record: logging.LogRecord) -> str:
    return datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")


class DetailedFormatter(logging.Formatter):
    """Colored single-line records with source location, for interactive runs."""

    def format(self, record: logging.LogRecord) -> str:
        color = _LEVEL_COLORS.get(record.levelname, "")
        context = " ".join(f"{k}={v}" for k, v in record_context(record).items())
        message = (
            f"{_timestamp(record)} | {color}{record.levelname:<8}{_RESET} | "
            f"{record.name}:{record.lineno} | "
            f"{f'[{context}] ' if context else ''}{record.getMessage()}"
        )
        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)
        return message


class SimpleFormatter(logging.Formatter):
    """Plain records for batch runs and log files."""

    def format(self, record: logging.LogRecord) -> str:
        context = record_context(record)
        prefix = "".join(f"{k}={v} " for k, v in context.items())
        message = f"{_timestamp(record)} | {record.levelname:<5} | {prefix}{record.getMessage()}"
        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)
        return message


class JsonFormatter(logging.Formatter):
    """One JSON object per record; context fields become top-level keys."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "function": record.funcName,
            "line": record.lineno,
            "message": record.getMessage(),
            **record_context(record),
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, default=str)


FORMATTERS = {
    "detailed": DetailedFormatter,
    "simple": SimpleFormatter,
    "json": JsonFormatter,
}


def _file_handler(path: str, formatter: logging.Formatter, level: int) -> logging.Handler:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        filename=path,
        maxBytes=10 * 1024 * 1024,  # 10MB
        backupCount=5,
        encoding="utf-8",
    )
    handler.setFormatter(formatter)
    handler.setLevel(level)
    return handler


def setup_logging(config: LoggingConfig) -> None:
    """Replace the root handlers according to the logging settings."""
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    log_level = getattr(logging, config.level.upper(), logging.INFO)
    root_logger.setLevel(log_level)
    formatter = FORMATTERS.get(config.format, DetailedFormatter)()

    if config.console_enabled:
        # stderr keeps stdout free for tables printed by the CLI
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(log_level)
        root_logger.addHandler(console_handler)

    if config.file_enabled and config.file_path:
        root_logger.addHandler(_file_handler(config.file_path, formatter, log_level))

    for name, floor in QUIET_LOGGERS.items():
        logging.getLogger(name).setLevel(max(log_level, floor))


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


class LoggerMixin:
    """Mixin class to add logging capabilities to any class."""

    @property
    def logger(self) -> logging.Logger:
        return logging.getLogger(f"{self.__class__.__module__}.{self.__class__.__name__}")


class ContextAdapter(logging.LoggerAdapter):
    """Stamps records with fixed context and keeps any per-call ``extra``."""

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> Tuple[Any, MutableMapping[str, Any]]:
        kwargs["extra"] = {**self.extra, **kwargs.get("extra", {})}
        return msg, kwargs

    def bind(self, **context) -> "ContextAdapter":
        return ContextAdapter(self.logger, {**self.extra, **context})


def get_logger_with_context(name: str = "src", **context) -> ContextAdapter:
    return ContextAdapter(logging.getLogger(name), context)
