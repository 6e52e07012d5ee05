"""Datenmodelle für Löser- und WISH-Ergebnisse."""
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

# bis zu diesem α gilt die 16-Approximation
ALPHA_GUARANTEE_LIMIT = 0.0042


class SolveStatus(str, Enum):
    """Status einer beschränkten MAP-Instanz."""
    OPTIMAL = "optimal"  # Suchbaum vollständig abgearbeitet
    TIMEOUT = "timeout"  # Budget erschöpft, Inkumbente ist untere Schranke
    EMPTY = "empty"  # Bewiesen: keine Belegung mit Gewicht > 0


class Guarantee(str, Enum):
    """Art der Garantie eines WISH-Laufs."""
    EXACT_16X = "exact_16x"  # Alle Instanzen optimal gelöst
    LOWER_BOUND = "lower_bound"  # Nur untere Schranke (Ŵ/16 ≤ W)
    FACTOR_16L = "factor_16l"  # 16·L-Approximation mit bekanntem L


class MapResult(BaseModel):
    """Ergebnis einer Optimierungsinstanz max w(σ) unter A σ = b."""

    model_config = ConfigDict(frozen=True)

    status: SolveStatus = Field(..., description="Status")
    best_log_weight: float = Field(..., description="Log-Gewicht der Inkumbente (-inf wenn leer)")
    best_assignment: Optional[Tuple[int, ...]] = Field(default=None, description="Beste Belegung")
    upper_log_weight: float = Field(
        default=math.inf,
        description="Bewiesene obere Schranke des Optimums (bei OPTIMAL gleich best_log_weight)"
    )
    nodes_expanded: int = Field(default=0, ge=0, description="Expandierte Knoten")
    wall_time: float = Field(default=0.0, ge=0.0, description="Laufzeit in Sekunden")
    incumbent_trace: Tuple[float, ...] = Field(
        default=(), description="Folge der Inkumbenten-Werte"
    )

    @property
    def is_exact(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.EMPTY)

    @property
    def log_gap(self) -> float:
        """log L: Abstand zwischen bewiesener Schranke und Inkumbente."""
        if self.is_exact:
            return 0.0
        if self.upper_log_weight == -math.inf:
            return 0.0
        if self.best_log_weight == -math.inf:
            return math.inf
        return max(0.0, self.upper_log_weight - self.best_log_weight)


class WishConfig(BaseModel):
    """Parameter eines WISH-Laufs."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=0.1, gt=0.0, lt=1.0, description="Fehlerwahrscheinlichkeit δ")
    alpha: float = Field(default=ALPHA_GUARANTEE_LIMIT, gt=0.0, description="Konstante α")
    t_override: Optional[int] = Field(default=None, ge=1, description="Feste Wiederholungszahl T")
    c: int = Field(default=2, ge=2, description="Schlupfparameter (16 = 2^{2c})")
    budget_nodes: Optional[int] = Field(default=None, ge=1, description="Knotenbudget je Instanz")
    budget_seconds: Optional[float] = Field(default=None, gt=0.0, description="Zeitbudget je Instanz")
    master_seed: int = Field(default=0, ge=0, description="Master-Seed")
    derive_gap_factor: bool = Field(
        default=False,
        description="FACTOR_16L aus bewiesenen Löserschranken ableiten"
    )
    early_stop_levels: Optional[int] = Field(
        default=None,
        ge=1,
        description="Abbruch nach so vielen aufeinanderfolgenden leeren Ebenen (macht Zertifikat ungültig)"
    )

    @field_validator("c")
    @classmethod
    def _check_c(cls, value: int) -> int:
        if value != 2:
            raise ValueError("Berichtet wird nur mit c = 2 (Faktor 16)")
        return value

    @property
    def alpha_certified(self) -> bool:
        return self.alpha <= ALPHA_GUARANTEE_LIMIT


class InstanceRecord(BaseModel):
    """Eine Instanz (i, t) des WISH-Laufs."""

    model_config = ConfigDict(frozen=True)

    level: int = Field(..., ge=0, description="Ebene i = Anzahl Paritätszeilen")
    repetition: int = Field(..., ge=1, description="Wiederholung t")
    seed: int = Field(..., ge=0, description="Instanz-Seed")
    result: Optional[MapResult] = Field(default=None, description="Löserergebnis")
    error: Optional[str] = Field(default=None, description="Fehlermeldung bei Absturz")

    @property
    def failed(self) -> bool:
        return self.result is None

    @property
    def log_weight(self) -> float:
        """Wert für den Median; abgestürzte Instanzen zählen als -inf."""
        return self.result.best_log_weight if self.result is not None else -math.inf


class WishResult(BaseModel):
    """Ergebnis eines WISH-Laufs."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Anzahl Bits")
    T: int = Field(..., ge=1, description="Wiederholungen je Ebene")
    medians: Tuple[float, ...] = Field(..., description="M_0..M_n im Log-Raum")
    records: Tuple[InstanceRecord, ...] = Field(default=(), description="Alle Instanzen")
    log_estimate: float = Field(..., description="log Ŵ")
    guarantee: Guarantee = Field(..., description="Garantieart")
    log_gap_factor: Optional[float] = Field(
        default=None, description="log L bei FACTOR_16L"
    )
    failure_probability: float = Field(..., description="δ")
    certificate_valid: bool = Field(
        default=False,
        description="Zertifikat der 16-Approximation gilt (exakt, T aus Formel, α ≤ 0.0042, kein Abbruch)"
    )
    degraded: bool = Field(default=False, description="Mindestens eine Instanz abgestürzt")
    skipped_levels: Tuple[int, ...] = Field(default=(), description="Durch Abbruch übersprungen")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def log10_estimate(self) -> float:
        """Bequemlichkeitsfeld: log10 Ŵ."""
        return self.log_estimate / math.log(10.0)

    @property
    def approximation_factor(self) -> float:
        """Garantierter Faktor (16 bzw. 16·L), inf bei reiner unterer Schranke."""
        if self.guarantee == Guarantee.EXACT_16X:
            return 16.0
        if self.guarantee == Guarantee.FACTOR_16L and self.log_gap_factor is not None:
            return 16.0 * math.exp(self.log_gap_factor)
        return math.inf


class RefineResult(BaseModel):
    """Ergebnis der Verfeinerung über das Potenzmodell."""

    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=1, description="Potenz ℓ")
    epsilon: float = Field(..., gt=0.0, description="Gewünschte Genauigkeit ε")
    wish: WishResult = Field(..., description="WISH-Lauf auf dem Potenzmodell")
    log_estimate: float = Field(..., description="log Ŵ^{1/ℓ}")
    guarantee_factor: float = Field(..., description="16^{1/ℓ} ≤ 1 + ε")


class TailEstimate(BaseModel):
    """Schätzung der Tail-Verteilung G(u)."""

    model_config = ConfigDict(frozen=True)

    u: float = Field(..., gt=0.0, description="Schwelle u im Gewichtsraum")
    q: Optional[int] = Field(default=None, description="q(u) oder None wenn M_0 < log u")

    @property
    def estimate(self) -> int:
        """2^{q(u)} bzw. 0."""
        return 0 if self.q is None else 1 << self.q


class QuantileProfile(BaseModel):
    """Absteigend sortierte Log-Gewichte aller 2^n Konfigurationen."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=0, description="Anzahl Bits")
    sorted_log_weights: np.ndarray = Field(..., description="Absteigend sortiert, Länge 2^n")

    @property
    def quantiles(self) -> List[float]:
        """b_0..b_n mit b_i = Log-Gewicht der 2^i-ten Konfiguration."""
        return [float(self.sorted_log_weights[(1 << i) - 1]) for i in range(self.n + 1)]

    def rank_value(self, rank: int) -> float:
        """Log-Gewicht der rank-ten schwersten Konfiguration (1-basiert)."""
        return float(self.sorted_log_weights[rank - 1])


class Lemma2Check(BaseModel):
    """Schranken L', U' (und L, U) aus dem Quantilprofil."""

    model_config = ConfigDict(frozen=True)

    c: int
    log_l_prime: float
    log_u_prime: float
    log_l: float
    log_u: float
    log_z: float
    passed: bool = Field(..., description="U' ≤ 2^{2c} L' (mit Toleranz 1e-9)")
    sandwich_holds: bool = Field(..., description="L' ≤ Z ≤ U'")
    tight_sandwich_holds: bool = Field(..., description="L ≤ Z ≤ U ≤ 2L")


class LevelStatistics(BaseModel):
    """Lösungsprofil einer Ebene i."""

    model_config = ConfigDict(frozen=True)

    level: int
    median: float
    mean_nodes: float
    optimal: int
    timeouts: int
    empty: int
    failed: int


class RunTotals(BaseModel):
    """Summen über alle Instanzen."""

    model_config = ConfigDict(frozen=True)

    instances: int
    optimal: int
    empty: int
    timeouts: int
    failed: int
    wall_time: Optional[float] = None


class InstanceRow(BaseModel):
    """Zeile der Instanztabelle im Laufbericht."""

    model_config = ConfigDict(frozen=True)

    level: int
    repetition: int
    seed: int
    status: str = Field(..., description="optimal, timeout, empty oder failed")
    log_weight: float
    upper_log_weight: Optional[float] = None
    nodes: int = 0
    wall_time: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def from_record(cls, record: InstanceRecord) -> "InstanceRow":
        result = record.result
        if result is None:
            return cls(
                level=record.level,
                repetition=record.repetition,
                seed=record.seed,
                status="failed",
                log_weight=-math.inf,
                error=record.error,
            )
        return cls(
            level=record.level,
            repetition=record.repetition,
            seed=record.seed,
            status=result.status.value,
            log_weight=result.best_log_weight,
            upper_log_weight=result.upper_log_weight,
            nodes=result.nodes_expanded,
            wall_time=result.wall_time,
        )


class TailReport(BaseModel):
    """Tail-Schätzung mit optionalem Orakelvergleich."""

    model_config = ConfigDict(frozen=True)

    u: float
    q: Optional[int]
    estimate: int = Field(..., description="2^q bzw. 0")
    oracle_count: Optional[int] = Field(default=None, description="Exaktes G(u), falls aufzählbar")


class RunReport(BaseModel):
    """Maschinenlesbarer Bericht eines WISH-Laufs."""

    model_config = ConfigDict(frozen=True)

    schema_version: int = Field(
        default=1, description="Version des JSON-Schemas; Logwerte -inf (Gewicht 0) stehen als null"
    )
    tool_version: str
    model_digest: str = Field(..., description="SHA-256 der kanonischen UAI-Darstellung")
    num_variables: int
    config: WishConfig
    result: WishResult
    refinement: Optional[RefineResult] = None
    tail: Optional[TailReport] = None
    levels: List[LevelStatistics] = Field(default_factory=list)
    instances: List[InstanceRow] = Field(default_factory=list)
    totals: RunTotals
