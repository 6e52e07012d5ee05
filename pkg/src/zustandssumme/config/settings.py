"""
Konfigurationsmanagement mit Pydantic Settings.
Unterstützt .env Dateien und Umgebungsvariablen mit Präfix WISH_ (z.B. WISH_SEED).
"""
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Zentrale Konfiguration für die Zustandssummen-Schätzung."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="WISH_",
        case_sensitive=False,
        extra="ignore",
    )

    # WISH Parameter
    seed: Optional[int] = Field(
        default=None,
        description="Master-Seed, Fallback für --seed (Umgebungsvariable WISH_SEED)"
    )
    delta: float = Field(default=0.1, description="Fehlerwahrscheinlichkeit δ")
    alpha: float = Field(default=0.0042, description="Konstante α der Wiederholungsformel")

    # Löser-Budget pro Instanz
    budget_nodes: Optional[int] = Field(
        default=None,
        description="Maximale Knotenzahl pro Instanz (None = unbegrenzt)"
    )
    budget_seconds: Optional[float] = Field(
        default=None,
        description="Maximale Laufzeit pro Instanz in Sekunden (None = unbegrenzt)"
    )
    max_bound_table_bits: int = Field(
        default=12,
        description="Maximale Faktorbreite (Bits) für vorberechnete Schrankentabellen"
    )

    # Obergrenzen
    oracle_cap_bits: int = Field(
        default=24,
        description="Maximale Bitzahl für vollständige Enumeration"
    )
    refine_max_bits: int = Field(
        default=64,
        description="Maximale Bitzahl ℓ·n des Potenzmodells bei der Verfeinerung"
    )

    # Verarbeitungs-Optionen
    max_workers: Optional[int] = Field(
        default=None,
        description="Maximale Anzahl paralleler Worker (None = alle CPUs)"
    )
    executor_backend: Literal["thread", "process"] = Field(
        default="thread",
        description="Worker-Pool: Threads oder Prozesse"
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging Level")
    log_file: Optional[Path] = Field(default=None, description="Logdatei (optional)")

    @field_validator("delta")
    @classmethod
    def _check_delta(cls, value: float) -> float:
        """δ muss im offenen Intervall (0, 1) liegen."""
        if not 0.0 < value < 1.0:
            raise ValueError(f"delta muss in (0, 1) liegen, nicht {value}")
        return value

    @field_validator("alpha")
    @classmethod
    def _check_alpha(cls, value: float) -> float:
        if value <= 0.0:
            raise ValueError(f"alpha muss positiv sein, nicht {value}")
        return value

    @field_validator("oracle_cap_bits", "refine_max_bits", "max_bound_table_bits")
    @classmethod
    def _check_caps(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Obergrenzen müssen positiv sein")
        return value

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        if not isinstance(logging.getLevelName(value.upper()), int):
            raise ValueError(f"Unbekanntes Log-Level: {value}")
        return value.upper()


# Globale Settings-Instanz
settings = Settings()
