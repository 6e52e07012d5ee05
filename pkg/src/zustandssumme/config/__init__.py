"""Konfiguration und Logging."""
from .logging import configure_from_settings, get_logger, setup_logging
from .settings import Settings, settings

__all__ = ["Settings", "settings", "setup_logging", "configure_from_settings", "get_logger"]
