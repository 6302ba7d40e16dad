"""Frame Criterion package."""

from frame_criterion.logging import logger as logger

__version__ = "0.1.0"

__all__ = ["__version__", "logger"]
