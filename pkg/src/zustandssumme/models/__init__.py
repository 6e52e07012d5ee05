"""Datenmodelle für die Zustandssummen-Schätzung."""
from .factor_graph import BinaryModel, Factor, FactorGraph, VariableEncoding
from .parity import ParitySystem, PropagationResult, ReducedParitySystem
from .results import (
    ALPHA_GUARANTEE_LIMIT,
    Guarantee,
    InstanceRecord,
    InstanceRow,
    Lemma2Check,
    LevelStatistics,
    MapResult,
    QuantileProfile,
    RefineResult,
    RunReport,
    RunTotals,
    SolveStatus,
    TailEstimate,
    TailReport,
    WishConfig,
    WishResult,
)

__all__ = [
    "Factor",
    "FactorGraph",
    "BinaryModel",
    "VariableEncoding",
    "ParitySystem",
    "ReducedParitySystem",
    "PropagationResult",
    "ALPHA_GUARANTEE_LIMIT",
    "SolveStatus",
    "Guarantee",
    "MapResult",
    "WishConfig",
    "InstanceRecord",
    "WishResult",
    "RefineResult",
    "TailEstimate",
    "QuantileProfile",
    "Lemma2Check",
    "LevelStatistics",
    "RunTotals",
    "InstanceRow",
    "TailReport",
    "RunReport",
]
