"""Process settings and structured logging setup."""

import logging
import os
import sys
from functools import lru_cache
from typing import TextIO

import structlog
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-driven settings.

    ENVIRONMENT and LOG_LEVEL keep their plain names; ECHO2D_THREADS caps
    the number of workers used for grid evaluation.
    """

    model_config = SettingsConfigDict(populate_by_name=True, extra="ignore")

    environment: str = Field("development", validation_alias="ENVIRONMENT")
    log_level: str = Field("info", validation_alias="LOG_LEVEL")
    threads: int | None = Field(None, ge=1, validation_alias="ECHO2D_THREADS")


@lru_cache
def get_settings() -> Settings:
    """Return the cached process settings."""
    return Settings()


def worker_count(override: int | None = None) -> int:
    """Number of grid workers.

    An explicit override wins, then ECHO2D_THREADS, then the CPU count.
    """
    if override is not None:
        return max(1, override)
    threads = get_settings().threads
    if threads is not None:
        return threads
    return os.cpu_count() or 1


def configure_logging(level: str | None = None, stream: TextIO | None = None) -> None:
    """Configure structlog JSON logging on top of the stdlib logging module."""
    log_level = (level or get_settings().log_level).upper()

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(
        level=getattr(logging, log_level, logging.INFO),
        stream=stream or sys.stderr,
        format="%(message)s",
        force=True,
    )
