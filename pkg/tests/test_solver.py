"""Tests für den Branch-and-Bound-Löser."""
import itertools
import math

import numpy as np
import pytest

from zustandssumme.exceptions import CapExceededError, ModelError, SolverError
from zustandssumme.models import Factor, FactorGraph, ParitySystem, SolveStatus
from zustandssumme.services import (
    BranchAndBoundSolver,
    GridMode,
    binarize,
    brute_force_map,
    evaluate,
    generate_clique_ising,
    generate_grid_ising,
    log_weight,
    sample_parity_system,
    solve,
    upper_bound,
)


class TestBranchAndBoundSolver:
    """Tests für BranchAndBoundSolver.solve."""

    def test_unconstrained_map(self, pairwise_model) -> None:
        """Test: Ohne Paritätszeilen wird das globale Maximum gefunden."""
        result = solve(pairwise_model, ParitySystem(n=2))

        assert result.status == SolveStatus.OPTIMAL
        assert result.best_log_weight == pytest.approx(math.log(4.0))
        assert result.best_assignment == (1, 1)
        assert result.upper_log_weight == result.best_log_weight

    def test_xor_constraint(self, pairwise_model) -> None:
        """Test: x0 ⊕ x1 = 1 lässt nur 01 und 10 zu."""
        result = solve(pairwise_model, ParitySystem(n=2, rows=(3,), rhs=(1,)))

        assert result.best_log_weight == pytest.approx(math.log(3.0))
        assert result.best_assignment == (1, 0)

    def test_infeasible_system_is_empty(self, pairwise_model) -> None:
        """Test: Unerfüllbares System liefert EMPTY ohne Suche."""
        result = solve(pairwise_model, ParitySystem(n=2, rows=(3, 3), rhs=(0, 1)))

        assert result.status == SolveStatus.EMPTY
        assert result.best_log_weight == -math.inf
        assert result.upper_log_weight == -math.inf
        assert result.best_assignment is None
        assert result.nodes_expanded == 0

    def test_zero_weight_solutions_are_empty(self, weights_model) -> None:
        """Test: Nur Lösungen mit Gewicht 0 ergeben EMPTY."""
        model = weights_model([1.0, 0.0, 0.0, 1.0])

        result = solve(model, ParitySystem(n=2, rows=(3,), rhs=(1,)))

        assert result.status == SolveStatus.EMPTY
        assert result.best_log_weight == -math.inf
        assert result.is_exact

    def test_matches_brute_force(self, random_ising, weights_model) -> None:
        """Test: 200 Zufallsinstanzen stimmen exakt mit der Aufzählung überein."""
        rng = np.random.default_rng(99)
        for case in range(200):
            n = int(rng.integers(2, 9))
            if case % 4 == 3:
                weights = np.where(rng.random(1 << n) < 0.3, 0.0, rng.uniform(0.5, 3.0, 1 << n))
                model = weights_model(weights.tolist())
            else:
                model = random_ising(n, case)
            system = sample_parity_system(n, int(rng.integers(0, n + 2)), rng)

            result = solve(model, system)
            reference = brute_force_map(model, system)

            assert result.status == reference.status
            assert result.best_log_weight == reference.best_log_weight
            if result.status == SolveStatus.OPTIMAL:
                assert evaluate(system, result.best_assignment)
                assert log_weight(model, result.best_assignment) == result.best_log_weight

    @pytest.mark.slow
    def test_matches_brute_force_up_to_14_bits(self) -> None:
        """Test: 200 Clique- und Gittermodelle mit bis zu 14 Bits, m gleichverteilt in 0..n."""
        rng = np.random.default_rng(1414)
        for case in range(200):
            w = float(rng.uniform(0.1, 1.5))
            if case % 2 == 0:
                graph = generate_clique_ising(int(rng.integers(9, 15)), w, seed=case)
            else:
                rows = int(rng.integers(2, 4))
                cols = int(rng.integers(3, 14 // rows + 1))
                mode = GridMode.ATTRACTIVE if case % 4 == 1 else GridMode.MIXED
                graph = generate_grid_ising(
                    rows, cols, w, float(rng.uniform(0.0, 1.0)), mode=mode, seed=case
                )
            model = binarize(graph)
            system = sample_parity_system(model.n, int(rng.integers(0, model.n + 1)), rng)

            result = solve(model, system)
            reference = brute_force_map(model, system)

            assert model.n <= 14
            assert result.status == reference.status
            assert result.best_log_weight == reference.best_log_weight

    def test_without_pruning_same_value(self, random_ising) -> None:
        """Test: Abschalten des Abschneidens ändert das Optimum nicht."""
        rng = np.random.default_rng(7)
        for seed in range(20):
            model = random_ising(6, seed)
            system = sample_parity_system(6, int(rng.integers(0, 4)), rng)

            pruned = solve(model, system)
            full = solve(model, system, prune=False)

            assert pruned.best_log_weight == full.best_log_weight
            assert pruned.nodes_expanded <= full.nodes_expanded

    def test_incumbent_trace(self, random_ising) -> None:
        """Test: Inkumbenten steigen streng und enden beim Optimum."""
        model = random_ising(8, 4)

        result = solve(model, ParitySystem(n=8))

        trace = result.incumbent_trace
        assert trace
        assert all(a < b for a, b in zip(trace, trace[1:]))
        assert trace[-1] == result.best_log_weight

    def test_node_budget_timeout(self, random_ising) -> None:
        """Test: Erschöpftes Knotenbudget liefert TIMEOUT mit gültiger Schranke."""
        model = random_ising(8, 2)
        system = ParitySystem(n=8)
        optimum = brute_force_map(model, system).best_log_weight

        result = solve(model, system, budget_nodes=2)

        assert result.status == SolveStatus.TIMEOUT
        assert result.nodes_expanded == 2
        assert result.best_log_weight <= optimum
        assert result.upper_log_weight >= optimum
        assert not result.is_exact

    def test_budget_bounds_valid_on_random_instances(self, random_ising) -> None:
        """Test: Auch bei Abbruch gilt beste ≤ Optimum ≤ Schranke."""
        rng = np.random.default_rng(12)
        for seed in range(30):
            model = random_ising(7, seed)
            system = sample_parity_system(7, int(rng.integers(0, 5)), rng)
            optimum = brute_force_map(model, system).best_log_weight

            result = solve(model, system, budget_nodes=int(rng.integers(1, 12)))

            assert result.best_log_weight <= optimum <= result.upper_log_weight

    def test_deterministic(self, random_ising) -> None:
        """Test: Wiederholte Aufrufe liefern dasselbe Ergebnis."""
        model = random_ising(7, 8)
        system = sample_parity_system(7, 3, np.random.default_rng(1))
        solver = BranchAndBoundSolver(model)

        first = solver.solve(system)
        second = solver.solve(system)

        assert first.model_dump(exclude={"wall_time"}) == second.model_dump(exclude={"wall_time"})

    def test_dimension_mismatch(self, pairwise_model) -> None:
        """Test: System mit anderem n wird abgelehnt."""
        with pytest.raises(SolverError):
            solve(pairwise_model, ParitySystem(n=3))

    def test_factor_too_wide(self, pairwise_model) -> None:
        """Test: Faktoren über der Tabellengrenze werden abgelehnt."""
        with pytest.raises(SolverError):
            BranchAndBoundSolver(pairwise_model, max_table_bits=1)

    def test_factor_too_wide_default(self) -> None:
        """Test: 13-Bit-Faktor überschreitet die Standardgrenze."""
        graph = FactorGraph(
            cardinalities=(2,) * 13,
            factors=(Factor(scope=tuple(range(13)), log_table=(0.0,) * (1 << 13)),),
        )

        with pytest.raises(SolverError):
            BranchAndBoundSolver(binarize(graph))


class TestBruteForceMap:
    """Tests für die Referenzlösung."""

    def test_first_optimum_wins(self, uniform_model) -> None:
        """Test: Bei Gleichstand gewinnt der kleinste Code."""
        result = brute_force_map(uniform_model(3), ParitySystem(n=3, rows=(1,), rhs=(1,)))

        assert result.best_assignment == (1, 0, 0)
        assert result.nodes_expanded == 8

    def test_dimension_mismatch(self, pairwise_model) -> None:
        """Test: System mit anderem n wird abgelehnt."""
        with pytest.raises(SolverError):
            brute_force_map(pairwise_model, ParitySystem(n=1))

    def test_cap(self, pairwise_model) -> None:
        """Test: Obergrenze für die Aufzählung."""
        with pytest.raises(CapExceededError):
            brute_force_map(pairwise_model, ParitySystem(n=2), cap=1)


class TestUpperBound:
    """Tests für die zulässige Schranke."""

    def test_properties(self, random_ising, weights_model) -> None:
        """Test: Schranke ≥ beste Vervollständigung, exakt bei voller Belegung, monoton."""
        rng = np.random.default_rng(5)
        for case in range(500):
            n = int(rng.integers(2, 6))
            if case % 5 == 0:
                weights = np.where(rng.random(1 << n) < 0.4, 0.0, rng.uniform(0.1, 5.0, 1 << n))
                model = weights_model(weights.tolist())
            else:
                model = random_ising(n, case)
            size = int(rng.integers(0, n + 1))
            variables = [int(v) for v in rng.choice(n, size=size, replace=False)]
            partial = {v: int(rng.integers(0, 2)) for v in variables}

            bound = upper_bound(model, partial)
            free = [v for v in range(n) if v not in partial]
            best = -math.inf
            for values in itertools.product((0, 1), repeat=len(free)):
                x = [0] * n
                for var, value in {**partial, **dict(zip(free, values))}.items():
                    x[var] = value
                best = max(best, log_weight(model, x))

            assert bound >= best
            if not free:
                assert bound == best
            if variables:
                smaller = dict(list(partial.items())[:-1])
                assert upper_bound(model, smaller) >= bound

    def test_invalid_partial(self, pairwise_model) -> None:
        """Test: Ungültige Teilbelegung."""
        with pytest.raises(ModelError):
            upper_bound(pairwise_model, {0: 3})
