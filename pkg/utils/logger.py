"""
Logging setup - one stream handler on the package root logger,
level taken from SD_SPECTRA_LOG_LEVEL.
"""

import logging

from config.config import config

_ROOT = "sd_spectra"
_configured = False


def _configure():
    global _configured
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    root.setLevel(getattr(logging, config.LOG_LEVEL, logging.WARNING))
    root.propagate = False
    _configured = True


def get_logger(name):
    if not _configured:
        _configure()
    return logging.getLogger(f"{_ROOT}.{name}")
