"""
Logging Setup
One stream handler on the root logger, verbosity chosen by the CLI.
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity: int = 0, stream=None) -> logging.Logger:
    """
    Configure the root logger once; later calls only adjust the level.

    Args:
        verbosity (int): 0 = warnings, 1 = info, 2+ = debug
        stream: Target stream (defaults to stderr)

    Returns:
        logging.Logger: The configured root logger
    """
    root = logging.getLogger()
    level = _LEVELS.get(verbosity, logging.DEBUG)
    if not any(getattr(h, "_isoedge_handler", False) for h in root.handlers):
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._isoedge_handler = True
        root.addHandler(handler)
    root.setLevel(level)
    return root
