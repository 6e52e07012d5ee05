"""Gemeinsame Fixtures für die Tests."""
import math
from typing import Callable, Sequence

import numpy as np
import pytest

from zustandssumme.models import BinaryModel, Factor, FactorGraph
from zustandssumme.services import (
    binarize,
    generate_clique_ising,
    generate_grid_ising,
    parse_uai,
)

PAIRWISE_UAI = """MARKOV
2
2 2
1
2 0 1

4
1 2 3 4
"""


def graph_from_weights(weights: Sequence[float]) -> FactorGraph:
    """Ein Faktor über alle Bits mit den gegebenen Gewichten (Index = x_0 höchstwertig)."""
    n = int(math.log2(len(weights)))
    table = tuple(math.log(w) if w > 0 else -math.inf for w in weights)
    return FactorGraph(
        cardinalities=(2,) * n, factors=(Factor(scope=tuple(range(n)), log_table=table),)
    )


@pytest.fixture
def pairwise_text() -> str:
    """UAI-Text mit einem Paarfaktor 1 2 3 4 (Z = 10)."""
    return PAIRWISE_UAI


@pytest.fixture
def pairwise_model() -> BinaryModel:
    return binarize(parse_uai(PAIRWISE_UAI))


@pytest.fixture(scope="session")
def uniform_model() -> Callable[[int], BinaryModel]:
    """Fabrik für Modelle mit Gewicht 1 für alle 2^n Belegungen."""

    def build(n: int) -> BinaryModel:
        factors = tuple(Factor(scope=(i,), log_table=(0.0, 0.0)) for i in range(n))
        return binarize(FactorGraph(cardinalities=(2,) * n, factors=factors))

    return build


@pytest.fixture
def weights_model() -> Callable[[Sequence[float]], BinaryModel]:
    """Fabrik für Modelle aus einer expliziten Gewichtsliste."""

    def build(weights: Sequence[float]) -> BinaryModel:
        return binarize(graph_from_weights(weights))

    return build


@pytest.fixture(scope="session")
def random_ising() -> Callable[[int, int], BinaryModel]:
    """Zufällige Ising-Modelle mit n Bits, abwechselnd Clique und Gitter."""

    def build(n: int, seed: int) -> BinaryModel:
        rng = np.random.default_rng(seed)
        if seed % 2 == 0 and n >= 2:
            graph = generate_clique_ising(n, float(rng.uniform(0.1, 1.0)), seed=seed)
        else:
            graph = generate_grid_ising(
                1, n, float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.0, 1.0)), seed=seed
            )
        return binarize(graph)

    return build
