"""Datenmodelle für Faktorgraphen und binarisierte Modelle."""
import math
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Factor(BaseModel):
    """
    Ein Faktor ψ_α: Scope plus Tabelle im Log-Raum.

    Die Tabelle ist zeilenweise (row-major) in Scope-Reihenfolge indiziert,
    die erste Scope-Variable ist die höchstwertige Stelle. -inf steht für
    den Potentialwert 0.
    """

    model_config = ConfigDict(frozen=True)

    scope: Tuple[int, ...] = Field(..., description="Variablenindizes in Tabellenreihenfolge")
    log_table: Tuple[float, ...] = Field(..., description="Log-Potentiale, row-major")

    @field_validator("scope")
    @classmethod
    def _check_scope(cls, scope: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(set(scope)) != len(scope):
            raise ValueError(f"Doppelte Variable im Scope {scope}")
        if any(v < 0 for v in scope):
            raise ValueError(f"Negativer Variablenindex im Scope {scope}")
        return scope

    @field_validator("log_table")
    @classmethod
    def _check_entries(cls, table: Tuple[float, ...]) -> Tuple[float, ...]:
        for value in table:
            if math.isnan(value) or value == math.inf:
                raise ValueError(f"Ungültiger Log-Tabellenwert {value}")
        return table

    @property
    def arity(self) -> int:
        return len(self.scope)

    @cached_property
    def table(self) -> np.ndarray:
        """Tabelle als float64-Array (nur lesend verwenden)."""
        array = np.asarray(self.log_table, dtype=np.float64)
        array.setflags(write=False)
        return array


class FactorGraph(BaseModel):
    """Diskreter Faktorgraph mit Kardinalitäten |X_i| und Faktoren."""

    model_config = ConfigDict(frozen=True)

    cardinalities: Tuple[int, ...] = Field(..., description="Kardinalität |X_i| je Variable")
    factors: Tuple[Factor, ...] = Field(default=(), description="Faktoren ψ_α")

    @field_validator("cardinalities")
    @classmethod
    def _check_cardinalities(cls, cards: Tuple[int, ...]) -> Tuple[int, ...]:
        for index, card in enumerate(cards):
            if card < 1:
                raise ValueError(f"Variable {index}: Kardinalität {card} < 1")
        return cards

    @model_validator(mode="after")
    def _check_factors(self) -> "FactorGraph":
        """Prüft Scopes und Tabellenlängen aller Faktoren."""
        num_vars = len(self.cardinalities)
        for position, factor in enumerate(self.factors):
            for var in factor.scope:
                if var >= num_vars:
                    raise ValueError(
                        f"Faktor {position}: Variable {var} existiert nicht ({num_vars} Variablen)"
                    )
            expected = math.prod(self.cardinalities[v] for v in factor.scope)
            if len(factor.log_table) != expected:
                raise ValueError(
                    f"Faktor {position}: Tabelle hat {len(factor.log_table)} Einträge, "
                    f"erwartet {expected}"
                )
        return self

    @property
    def num_variables(self) -> int:
        return len(self.cardinalities)


class VariableEncoding(BaseModel):
    """Bitbereich einer Originalvariablen im binarisierten Modell."""

    model_config = ConfigDict(frozen=True)

    variable: int = Field(..., description="Index der Originalvariablen")
    cardinality: int = Field(..., ge=1, description="Kardinalität |X_i|")
    first_bit: int = Field(..., ge=0, description="Erstes Bit (niederwertigstes Bit des Codes)")
    num_bits: int = Field(..., ge=0, description="⌈log2 |X_i|⌉")

    @property
    def bits(self) -> range:
        return range(self.first_bit, self.first_bit + self.num_bits)

    def decode_code(self, code: int) -> Optional[int]:
        """Code → Originalwert; None für tote Codes."""
        return code if code < self.cardinality else None


class BinaryModel(BaseModel):
    """
    Faktorgraph über {0,1}^n, Ergebnis der Binarisierung.

    Das Bit ``first_bit + j`` einer Variablen trägt die Stelle 2^j ihres Codes.
    """

    model_config = ConfigDict(frozen=True)

    graph: FactorGraph = Field(..., description="Binärer Faktorgraph (alle Kardinalitäten 2)")
    encoding: Tuple[VariableEncoding, ...] = Field(
        default=(), description="Kodierung der Originalvariablen"
    )

    @model_validator(mode="after")
    def _check_binary(self) -> "BinaryModel":
        if any(card != 2 for card in self.graph.cardinalities):
            raise ValueError("BinaryModel erfordert ausschließlich binäre Variablen")
        covered = sum(enc.num_bits for enc in self.encoding)
        if self.encoding and covered != self.graph.num_variables:
            raise ValueError(
                f"Kodierung deckt {covered} Bits ab, Modell hat {self.graph.num_variables}"
            )
        return self

    @property
    def n(self) -> int:
        """Anzahl Bits."""
        return self.graph.num_variables

    @property
    def factors(self) -> Tuple[Factor, ...]:
        return self.graph.factors

    @cached_property
    def compiled(self) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """
        Je Faktor (Scope-Array, Stellenwerte, Tabelle) für vektorisierte Auswertung.

        Der Tabellenindex einer Bitmatrix ``bits`` ist ``bits[:, scope] @ places``.
        """
        compiled = []
        for factor in self.graph.factors:
            scope = np.asarray(factor.scope, dtype=np.intp)
            places = (1 << np.arange(factor.arity - 1, -1, -1, dtype=np.int64)).astype(np.int64)
            compiled.append((scope, places, factor.table))
        return compiled
