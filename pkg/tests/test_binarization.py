"""Tests für Binarisierung, Gewichtsauswertung und Potenzmodelle."""
import itertools
import math

import numpy as np
import pytest

from zustandssumme.exceptions import ModelError
from zustandssumme.models import Factor, FactorGraph
from zustandssumme.services import (
    binarize,
    brute_force_log_z,
    decode,
    log_weight,
    log_weights,
    power_model,
)
from zustandssumme.services.binarization import bits_for


def direct_log_z(graph: FactorGraph) -> float:
    """Zustandssumme durch Aufzählung der Originalbelegungen."""
    total = 0.0
    for values in itertools.product(*(range(card) for card in graph.cardinalities)):
        log_w = 0.0
        for factor in graph.factors:
            index = 0
            for var in factor.scope:
                index = index * graph.cardinalities[var] + values[var]
            log_w += factor.log_table[index]
        total += math.exp(log_w)
    return math.log(total)


def random_graph(rng: np.random.Generator, max_vars: int = 3) -> FactorGraph:
    num_vars = int(rng.integers(1, max_vars + 1))
    cards = tuple(int(c) for c in rng.integers(1, 6, size=num_vars))
    factors = []
    for _ in range(int(rng.integers(1, 4))):
        arity = int(rng.integers(1, min(num_vars, 2) + 1))
        scope = tuple(int(v) for v in rng.choice(num_vars, size=arity, replace=False))
        size = math.prod(cards[v] for v in scope)
        factors.append(Factor(scope=scope, log_table=tuple(rng.uniform(-1.0, 1.0, size=size))))
    return FactorGraph(cardinalities=cards, factors=tuple(factors))


class TestBinarize:
    """Tests für binarize und decode."""

    def test_bits_for(self) -> None:
        """Test: Bitbreite je Kardinalität."""
        assert [bits_for(c) for c in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]

    def test_binary_graph_is_identity(self, pairwise_model) -> None:
        """Test: Binäre Modelle behalten Scope und Tabelle."""
        assert pairwise_model.n == 2
        assert pairwise_model.factors[0].scope == (0, 1)
        assert pairwise_model.factors[0].log_table == pytest.approx(
            tuple(math.log(v) for v in (1, 2, 3, 4))
        )

    def test_bit_count(self) -> None:
        """Test: Kardinalitäten (2, 3, 5) belegen 1 + 2 + 3 Bits."""
        model = binarize(FactorGraph(cardinalities=(2, 3, 5)))

        assert model.n == 6
        assert [enc.first_bit for enc in model.encoding] == [0, 1, 3]

    def test_three_valued_variable(self) -> None:
        """Test: Codes 0..2 gültig, Code 3 tot."""
        graph = FactorGraph(
            cardinalities=(3,),
            factors=(Factor(scope=(0,), log_table=(0.0, math.log(2.0), math.log(3.0))),),
        )
        model = binarize(graph)

        assert log_weight(model, [1, 0]) == pytest.approx(math.log(2.0))
        assert log_weight(model, [0, 1]) == pytest.approx(math.log(3.0))
        assert log_weight(model, [1, 1]) == -math.inf
        assert decode(model, [1, 0]) == (1,)
        assert decode(model, [1, 1]) is None

    def test_uncovered_variable_gets_domain_factor(self) -> None:
        """Test: Dreiwertige Variable ohne Faktor ergibt Z = 3."""
        model = binarize(FactorGraph(cardinalities=(3,)))

        assert brute_force_log_z(model) == pytest.approx(math.log(3.0))

    def test_cardinality_one_has_no_bits(self) -> None:
        """Test: Variable mit einem Wert belegt kein Bit."""
        graph = FactorGraph(
            cardinalities=(1, 2),
            factors=(Factor(scope=(0, 1), log_table=(math.log(2.0), math.log(5.0))),),
        )
        model = binarize(graph)

        assert model.n == 1
        assert brute_force_log_z(model) == pytest.approx(math.log(7.0))
        assert decode(model, [1]) == (0, 1)

    def test_random_multivalued_models(self) -> None:
        """Test: Zustandssumme bleibt bei 50 Zufallsmodellen erhalten."""
        rng = np.random.default_rng(2024)
        for _ in range(50):
            graph = random_graph(rng)
            assert brute_force_log_z(binarize(graph)) == pytest.approx(direct_log_z(graph))

    @pytest.mark.slow
    def test_random_models_up_to_12_bits(self) -> None:
        """Test: 50 Modelle mit bis zu vier Variablen der Kardinalität ≤ 5."""
        rng = np.random.default_rng(5050)
        for _ in range(50):
            graph = random_graph(rng, max_vars=4)
            model = binarize(graph)

            assert model.n <= 12
            assert brute_force_log_z(model) == pytest.approx(direct_log_z(graph), abs=1e-9)


class TestLogWeights:
    """Tests für die Gewichtsauswertung."""

    def test_batch_matches_single(self, pairwise_model) -> None:
        """Test: Vektorisierte und einzelne Auswertung stimmen überein."""
        bits = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=np.uint8)

        batch = log_weights(pairwise_model, bits)

        assert list(batch) == [log_weight(pairwise_model, row) for row in bits.tolist()]
        # x_0 ist die höchstwertige Stelle der Tabelle
        assert batch[1] == pytest.approx(math.log(3.0))

    def test_wrong_length(self, pairwise_model) -> None:
        """Test: Falsche Länge wird abgelehnt."""
        with pytest.raises(ModelError):
            log_weight(pairwise_model, [0, 1, 0])

    def test_non_bit_entries(self, pairwise_model) -> None:
        """Test: Werte außer 0/1 werden abgelehnt."""
        with pytest.raises(ModelError):
            log_weight(pairwise_model, [0, 2])


class TestPowerModel:
    """Tests für power_model."""

    def test_powers(self, pairwise_model) -> None:
        """Test: Z = 10 wird zu 100 bzw. 1000."""
        assert brute_force_log_z(power_model(pairwise_model, 2)) == pytest.approx(math.log(100.0))
        assert brute_force_log_z(power_model(pairwise_model, 3)) == pytest.approx(math.log(1000.0))

    def test_power_one_is_identity(self, pairwise_model) -> None:
        """Test: ℓ = 1 liefert das Modell selbst."""
        assert power_model(pairwise_model, 1) is pairwise_model

    def test_weight_is_product(self, pairwise_model) -> None:
        """Test: Gewicht der Kopplung ist das Produkt der Einzelgewichte."""
        squared = power_model(pairwise_model, 2)

        assert squared.n == 4
        assert log_weight(squared, [1, 0, 1, 1]) == pytest.approx(math.log(3.0 * 4.0))

    @pytest.mark.slow
    @pytest.mark.parametrize("ell", [2, 3])
    def test_power_of_six_bit_models(self, random_ising, ell: int) -> None:
        """Test: log Z des Potenzmodells ist ℓ·log Z."""
        for seed in range(10):
            model = random_ising(6, seed)

            powered = brute_force_log_z(power_model(model, ell))

            assert powered == pytest.approx(ell * brute_force_log_z(model), abs=1e-9)

    def test_invalid_power(self, pairwise_model) -> None:
        """Test: ℓ = 0 ist ungültig."""
        with pytest.raises(ModelError):
            power_model(pairwise_model, 0)
