"""Fehlerklassen der Zustandssummen-Schätzung."""
from typing import Optional


class ZustandssummeError(Exception):
    """Basisklasse für alle fachlichen Fehler."""


class UaiFormatError(ZustandssummeError):
    """Fehler beim Einlesen einer UAI-Datei, mit Zeilennummer."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        self.message = message
        prefix = f"Zeile {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ModelError(ZustandssummeError):
    """Ungültiger Faktorgraph, ungültige Belegung oder Dimensionsfehler."""


class CapExceededError(ZustandssummeError):
    """Modell zu groß für Enumeration oder Verfeinerung."""

    def __init__(self, bits: int, cap: int, what: str = "Enumeration") -> None:
        self.bits = bits
        self.cap = cap
        super().__init__(f"{what}: {bits} Bits überschreiten die Obergrenze von {cap} Bits")


class SolverError(ZustandssummeError):
    """Fehler im Branch-and-Bound-Löser."""


class ConfigurationError(ZustandssummeError):
    """Ungültige Parameterkombination."""
