#!/usr/bin/env python3
"""
Runtime configuration
Reads BPT_* settings from the environment (a local .env file is honoured)
"""

import os
import logging
from dataclasses import dataclass
from typing import Optional
from dotenv import load_dotenv

from .errors import ConfigurationError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 12
DEFAULT_LOG_LEVEL = 'INFO'
VALID_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


@dataclass(frozen=True)
class Settings:
    precision: int = DEFAULT_PRECISION
    log_level: str = DEFAULT_LOG_LEVEL


def load_settings(precision: Optional[int] = None, log_level: Optional[str] = None) -> Settings:
    """
    Resolve settings with precedence: explicit argument > environment > default

    Args:
        precision (int): decimal digits override, usually from --precision
        log_level (str): logging level override, usually from --log-level

    Returns:
        Settings: the resolved, validated settings
    """
    if precision is None:
        raw = os.getenv('BPT_PRECISION')
        if raw is None or raw.strip() == '':
            precision = DEFAULT_PRECISION
        else:
            try:
                precision = int(raw)
            except ValueError:
                raise ConfigurationError(f"BPT_PRECISION must be an integer, got {raw!r}")
    if precision < 0:
        raise ConfigurationError(f"precision must be >= 0, got {precision}")

    if log_level is None:
        log_level = os.getenv('BPT_LOG_LEVEL', DEFAULT_LOG_LEVEL)
    log_level = log_level.upper()
    if log_level not in VALID_LOG_LEVELS:
        raise ConfigurationError(f"BPT_LOG_LEVEL must be one of {', '.join(VALID_LOG_LEVELS)}, got {log_level!r}")

    logger.debug(f"⚙️ Settings resolved: precision={precision}, log_level={log_level}")
    return Settings(precision=precision, log_level=log_level)
