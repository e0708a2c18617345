"""
Process settings
Read from the environment (a .env file is loaded by main.py before this module is imported)
"""

import logging
import os
from typing import Optional

DATABASE_URL = os.getenv("POLSAR_DATABASE_URL", "sqlite:///./polsar_registry.db")
LOG_LEVEL = os.getenv("POLSAR_LOG_LEVEL", "INFO").upper()
API_HOST = os.getenv("POLSAR_API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("POLSAR_API_PORT", "8000"))

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for the CLI or the API process"""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT
    )
