"""
Shared utilities: logging setup and deterministic output helpers
"""

import json
import logging
from typing import Any, Optional

from pathchains.core.config import settings

logger = logging.getLogger(__name__)


def setup_logging(level: Optional[str] = None):
    """Setup logging configuration"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def dump_json(payload: Any) -> str:
    """
    Serialize a payload to key-sorted JSON

    Args:
        payload: JSON-compatible data (already converted from models)

    Returns:
        str: Byte-stable JSON text with a trailing newline
    """
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
