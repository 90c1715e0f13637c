import logging
import sys

from app.config import settings


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Send all log records to stderr; stdout is reserved for results."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_densops", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._densops = True
    root.addHandler(handler)
    root.setLevel((level or settings.LOG_LEVEL).upper())
