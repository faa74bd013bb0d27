import sys
from typing import Optional

from loguru import logger


def setup_logging(level: str = "INFO", save_logs: bool = False, log_file: Optional[str] = None) -> None:
    """Replace the default loguru sink with a stderr sink and an optional rotating file."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}",
    )
    if save_logs and log_file:
        logger.add(
            log_file,
            rotation="10 MB",
            retention="10 days",
            level=level.upper(),
        )
        logger.info(f"Logging to {log_file}")
