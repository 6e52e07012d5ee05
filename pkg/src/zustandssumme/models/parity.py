"""Datenmodelle für Paritätssysteme A x = b (mod 2)."""
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ParitySystem(BaseModel):
    """
    Hashfunktion h_{A,b}: die Zeilen von A als Bitmasken.

    Bit j einer Zeilenmaske ist der Koeffizient von x_j.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="Anzahl Variablen")
    rows: Tuple[int, ...] = Field(default=(), description="Zeilen von A als Bitmasken")
    rhs: Tuple[int, ...] = Field(default=(), description="Vektor b")

    @model_validator(mode="after")
    def _check_dimensions(self) -> "ParitySystem":
        if len(self.rows) != len(self.rhs):
            raise ValueError(f"{len(self.rows)} Zeilen, aber {len(self.rhs)} rechte Seiten")
        limit = 1 << self.n
        for index, (row, bit) in enumerate(zip(self.rows, self.rhs)):
            if row < 0 or row >= limit:
                raise ValueError(f"Zeile {index}: Maske {row:#x} passt nicht zu n={self.n}")
            if bit not in (0, 1):
                raise ValueError(f"Zeile {index}: rechte Seite {bit} ist kein Bit")
        return self

    @property
    def m(self) -> int:
        """Anzahl Zeilen."""
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        """A als (m, n) uint8-Matrix."""
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (row >> j) & 1
        return out

    def vector(self) -> np.ndarray:
        """b als uint8-Vektor."""
        return np.asarray(self.rhs, dtype=np.uint8)

    @classmethod
    def from_arrays(cls, matrix: np.ndarray, vector: np.ndarray) -> "ParitySystem":
        """Erzeugt ein System aus einer 0/1-Matrix und einem 0/1-Vektor."""
        matrix = np.asarray(matrix, dtype=np.uint8)
        if matrix.ndim != 2:
            raise ValueError(f"Matrix muss zweidimensional sein, nicht {matrix.shape}")
        rows = tuple(sum(int(bit) << j for j, bit in enumerate(line)) for line in matrix)
        return cls(
            n=matrix.shape[1],
            rows=rows,
            rhs=tuple(int(b) for b in np.asarray(vector).ravel()),
        )


class ReducedParitySystem(BaseModel):
    """Reduzierte Zeilenstufenform A'|b' über GF(2)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="Anzahl Variablen")
    rows: Tuple[int, ...] = Field(default=(), description="Pivotzeilen als Bitmasken")
    rhs: Tuple[int, ...] = Field(default=(), description="Rechte Seiten der Pivotzeilen")
    pivots: Tuple[int, ...] = Field(default=(), description="Pivotspalte je Zeile")
    feasible: bool = Field(default=True, description="Keine Zeile 0 = 1")

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def solution_count(self) -> int:
        """Anzahl Lösungen: 2^(n-r) oder 0."""
        return (1 << (self.n - self.rank)) if self.feasible else 0


class PropagationResult(BaseModel):
    """Ergebnis der Propagation einer Teilbelegung."""

    model_config = ConfigDict(frozen=True)

    conflict: bool = Field(default=False, description="Eine Zeile wurde zu 0 = 1")
    forced: Dict[int, int] = Field(default_factory=dict, description="Implizierte Bits")
