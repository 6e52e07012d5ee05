"""Generatoren für Ising-Modelle (vollständiger Graph mit Kette, Gitter)."""
import math
from enum import Enum
from typing import List, Optional

import numpy as np

from ..config import get_logger
from ..exceptions import ModelError
from ..models import Factor, FactorGraph

logger = get_logger("generators")


class GridMode(str, Enum):
    """Vorzeichen der Gitterkopplungen."""
    ATTRACTIVE = "attractive"  # w_ij aus [0, w]
    MIXED = "mixed"  # w_ij aus [-w, w]


def generate_clique_ising(
    n: int,
    w: float,
    chain_strength: Optional[float] = None,
    seed: int = 0,
) -> FactorGraph:
    """
    Ising-Modell auf dem vollständigen Graphen mit überlagerter geschlossener Kette.

    ψ_ij(x_i, x_j) = exp(-w_ij) für x_i ≠ x_j, sonst 1, mit w_ij gleichverteilt
    aus [0, w·sqrt(|i-j|)]. Die Kette 0-1-…-(n-1)-0 erhält zusätzliche
    Kopplungen aus [-chain_strength, 0] (Standard 10·w) in derselben
    Faktorform; auf gemeinsamen Kanten werden die Faktoren multipliziert.

    Zufallsziehungen: erst alle Paare i<j lexikographisch, dann die Kette
    in Kantenreihenfolge (i, i+1 mod n).

    Args:
        n: Anzahl Variablen (≥ 2)
        w: Kopplungsstärke
        chain_strength: Obergrenze |c| der Kettenkopplung (None = 10·w)
        seed: Seed des Zufallsgenerators

    Returns:
        FactorGraph mit einem Paarfaktor je i<j
    """
    if n < 2:
        raise ModelError(f"Clique-Ising braucht n ≥ 2, nicht {n}")
    if chain_strength is None:
        chain_strength = 10.0 * w

    rng = np.random.default_rng(seed)
    penalty = {}
    for i in range(n):
        for j in range(i + 1, n):
            penalty[(i, j)] = float(rng.uniform(0.0, w * math.sqrt(j - i)))
    for i in range(n):
        j = (i + 1) % n
        edge = (min(i, j), max(i, j))
        penalty[edge] += float(rng.uniform(-chain_strength, 0.0))

    factors = [
        Factor(scope=edge, log_table=(0.0, -value, -value, 0.0))
        for edge, value in penalty.items()
    ]
    logger.debug(f"Generated clique Ising model n={n}, w={w}, seed={seed}")
    return FactorGraph(cardinalities=(2,) * n, factors=tuple(factors))


def generate_grid_ising(
    rows: int,
    cols: int,
    w: float,
    f: float,
    mode: GridMode = GridMode.MIXED,
    seed: int = 0,
) -> FactorGraph:
    """
    Ising-Gitter mit ψ_ij = exp(w_ij x_i x_j) und Feldern ψ_i = exp(f_i x_i).

    Die Spins x ∈ {-1, +1} werden binär abgelegt (0 → -1, 1 → +1).
    Zufallsziehungen je Gitterpunkt zeilenweise: Feld, rechte Kante, untere Kante.

    Args:
        rows: Zeilen
        cols: Spalten
        w: Kopplungsstärke
        f: Feldstärke, f_i gleichverteilt aus [-f, f]
        mode: attraktiv ([0, w]) oder gemischt ([-w, w])
        seed: Seed des Zufallsgenerators
    """
    if rows < 1 or cols < 1:
        raise ModelError(f"Ungültige Gittergröße {rows}×{cols}")

    mode = GridMode(mode)
    low = 0.0 if mode == GridMode.ATTRACTIVE else -w
    rng = np.random.default_rng(seed)

    factors: List[Factor] = []
    for r in range(rows):
        for c in range(cols):
            site = r * cols + c
            field = float(rng.uniform(-f, f))
            factors.append(Factor(scope=(site,), log_table=(-field, field)))
            if c + 1 < cols:
                factors.append(_coupling(site, site + 1, float(rng.uniform(low, w))))
            if r + 1 < rows:
                factors.append(_coupling(site, site + cols, float(rng.uniform(low, w))))

    logger.debug(f"Generated {mode.value} grid Ising model {rows}x{cols}, w={w}, f={f}")
    return FactorGraph(cardinalities=(2,) * (rows * cols), factors=tuple(factors))


def _coupling(i: int, j: int, strength: float) -> Factor:
    # Tabelle für (x_i, x_j) = 00, 01, 10, 11 ↔ Spinprodukt +1, -1, -1, +1
    return Factor(scope=(i, j), log_table=(strength, -strength, -strength, strength))
