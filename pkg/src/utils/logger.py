"""
Logging utilities
"""
import logging
import os
from pathlib import Path
from datetime import datetime
from typing import Optional

from rich.logging import RichHandler


def setup_logger(name: str, log_dir: Optional[str] = None) -> logging.Logger:
    """Set up logger with a per-run file handler and a rich console handler"""

    # FLAGMAGIC_LOG_DIR overrides the default directory
    log_path = Path(log_dir or os.getenv("FLAGMAGIC_LOG_DIR") or "logs")
    log_path.mkdir(parents=True, exist_ok=True)

    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    # File handler
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    file_handler = logging.FileHandler(log_path / f"run_{timestamp}.log")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

    # Console handler with Rich
    console_handler = RichHandler(rich_tracebacks=True)
    console_handler.setLevel(logging.INFO)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    return logger
