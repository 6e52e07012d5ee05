"""
Logging für die Zustandssummen-Schätzung.

Konsolenausgabe über Rich auf stderr; stdout bleibt frei für JSON-Berichte
und UAI-Texte. Die Logdatei enthält zusätzlich Thread bzw. Prozess, damit
Meldungen aus dem Worker-Pool einer Instanz zugeordnet werden können.
"""
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Optional

from rich.console import Console
from rich.logging import RichHandler

from ..exceptions import ConfigurationError

if TYPE_CHECKING:
    from .settings import Settings

PACKAGE_LOGGER = "zustandssumme"

_FILE_FORMAT = "%(asctime)s - %(processName)s/%(threadName)s - %(name)s - %(levelname)s - %(message)s"

_logging_configured = False


def resolve_level(level: str) -> int:
    """Wandelt einen Levelnamen in die numerische Stufe um."""
    value = logging.getLevelName(level.upper())
    if not isinstance(value, int):
        raise ConfigurationError(f"Unbekanntes Log-Level: {level}")
    return value


def _console_handler(log_level: int, use_rich: bool) -> logging.Handler:
    if use_rich:
        return RichHandler(
            console=Console(stderr=True),
            rich_tracebacks=True,
            show_time=False,
            show_path=False,
            level=log_level,
        )
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler.setLevel(log_level)
    return handler


def setup_logging(
    level: str = "INFO",
    log_file: Optional[Path] = None,
    use_rich: bool = True,
) -> logging.Logger:
    """
    Richtet den Paket-Logger ``zustandssumme`` ein.

    Mehrfacher Aufruf ersetzt die Handler, statt sie zu verdoppeln.

    Args:
        level: Logging Level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optionale Logdatei, erhält immer DEBUG
        use_rich: RichHandler statt einfachem StreamHandler

    Returns:
        Konfigurierter Paket-Logger

    Raises:
        ConfigurationError: Bei unbekanntem Level
    """
    global _logging_configured

    log_level = resolve_level(level)

    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.DEBUG if log_file else log_level)
    logger.propagate = False

    logger.addHandler(_console_handler(log_level, use_rich))

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(_FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

    root = logging.getLogger()
    if not root.handlers:
        root.addHandler(logging.NullHandler())

    _logging_configured = True
    return logger


def configure_from_settings(config: "Settings", verbose: bool = False) -> logging.Logger:
    """Logging aus den Settings; ``verbose`` erzwingt DEBUG auf der Konsole."""
    return setup_logging(
        level="DEBUG" if verbose else config.log_level,
        log_file=config.log_file,
    )


def get_logger(name: str) -> logging.Logger:
    """
    Logger ``zustandssumme.<name>`` für ein Modul.

    Ohne vorherigen setup_logging-Aufruf werden nur Warnungen ausgegeben.
    """
    if not _logging_configured:
        setup_logging(level="WARNING")
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}")
