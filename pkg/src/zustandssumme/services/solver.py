"""
Optimierungsorakel: max w(σ) unter A σ = b (mod 2).

Tiefensuche mit Branch-and-Bound, Paritätspropagation und Budget (Knoten und
Wanduhrzeit) sowie eine Brute-Force-Referenz für kleine Modelle.
"""
import math
import time
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import get_logger, settings
from ..exceptions import ModelError, SolverError
from ..models import BinaryModel, MapResult, ParitySystem, SolveStatus
from .binarization import log_weight, log_weights
from .oracle import iter_log_weight_chunks
from .parity_service import IncrementalPropagator, evaluate_batch, row_reduce

logger = get_logger("solver")

UNASSIGNED = 2


def _max_table(table: np.ndarray, arity: int) -> np.ndarray:
    """
    Erweitert eine 2^k-Tabelle zu 3^k Einträgen; Ziffer 2 heißt "frei".

    Eintrag zu einer Ziffernfolge ist das Maximum über alle Belegungen der
    freien Stellen. Reihenfolge wie die Originaltabelle (erste Stelle höchstwertig).
    """
    if arity == 0:
        return np.array(table, dtype=np.float64)
    grid = np.asarray(table, dtype=np.float64).reshape((2,) * arity)
    for axis in range(arity):
        grid = np.concatenate([grid, grid.max(axis=axis, keepdims=True)], axis=axis)
    return grid.ravel()


class BoundTables:
    """
    Vorberechnete Maximumtabellen aller Faktoren für die zulässige Schranke.

    Die Schranke einer Teilbelegung ist Σ_α max ψ_α über die mit ihr
    verträglichen Einträge. Summiert wird sequentiell in Faktorreihenfolge wie
    in ``log_weights``; bei voller Belegung stimmen beide bitgenau überein.
    """

    def __init__(self, model: BinaryModel, max_bits: Optional[int] = None) -> None:
        limit = settings.max_bound_table_bits if max_bits is None else max_bits
        factors = model.factors
        widest = max((f.arity for f in factors), default=0)
        if widest > limit:
            raise SolverError(
                f"Faktor mit {widest} Bits überschreitet die Schrankentabellen-Grenze von {limit} Bits"
            )

        self.n = model.n
        columns = max(widest, 1)
        # Auffüllspalten zeigen auf einen Platzhalter-Slot mit Ziffer 0
        self._scopes = np.full((len(factors), columns), model.n, dtype=np.intp)
        self._powers = np.zeros((len(factors), columns), dtype=np.int64)
        tables = []
        offsets = []
        offset = 0
        for row, factor in enumerate(factors):
            k = factor.arity
            self._scopes[row, :k] = factor.scope
            self._powers[row, :k] = 3 ** np.arange(k - 1, -1, -1, dtype=np.int64)
            table = _max_table(factor.table, k)
            tables.append(table)
            offsets.append(offset)
            offset += table.size
        self._flat = np.concatenate(tables) if tables else np.zeros(0)
        self._offsets = np.asarray(offsets, dtype=np.int64)

    def new_state(self) -> np.ndarray:
        """Zustandsvektor (Länge n+1) mit allen Bits frei."""
        state = np.full(self.n + 1, UNASSIGNED, dtype=np.int64)
        state[self.n] = 0
        return state

    def evaluate(self, state: np.ndarray) -> float:
        if self._offsets.size == 0:
            return 0.0
        index = (state[self._scopes] * self._powers).sum(axis=1) + self._offsets
        return float(np.add.accumulate(self._flat[index])[-1])


def _factor_influence(model: BinaryModel) -> np.ndarray:
    """Σ (max - min) der berührenden Faktortabellen je Bit; Nullen zählen als unendlich."""
    influence = np.zeros(model.n, dtype=np.float64)
    for factor in model.factors:
        table = factor.table
        finite = table[np.isfinite(table)]
        if finite.size == 0:
            spread = 0.0
        elif finite.size < table.size:
            spread = math.inf
        else:
            spread = float(finite.max() - finite.min())
        for bit in factor.scope:
            influence[bit] += spread
    return influence


class _BudgetExhausted(Exception):
    def __init__(self, upper: float) -> None:
        super().__init__("budget exhausted")
        self.upper = upper


class _Search:
    """Zustand eines einzelnen solve-Aufrufs (gehört genau einem Thread)."""

    def __init__(
        self,
        model: BinaryModel,
        tables: BoundTables,
        propagator: IncrementalPropagator,
        budget_nodes: Optional[int],
        deadline: Optional[float],
        prune: bool,
    ) -> None:
        self.model = model
        self.tables = tables
        self.propagator = propagator
        self.budget_nodes = budget_nodes
        self.deadline = deadline
        self.prune = prune

        self.state = tables.new_state()
        self.order: List[int] = []
        self.best = -math.inf
        self.best_assignment: Optional[Tuple[int, ...]] = None
        self.trace: List[float] = []
        self.nodes = 0
        self.pending: List[float] = []

    def set_bits(self, var: int, value: int, forced: Sequence[Tuple[int, int]]) -> None:
        self.state[var] = value
        for bit, bit_value in forced:
            self.state[bit] = bit_value

    def clear_bits(self, var: int, forced: Sequence[Tuple[int, int]]) -> None:
        self.state[var] = UNASSIGNED
        for bit, _ in forced:
            self.state[bit] = UNASSIGNED

    def _tick(self, bound: float) -> None:
        exhausted = (self.budget_nodes is not None and self.nodes >= self.budget_nodes) or (
            self.deadline is not None and time.monotonic() >= self.deadline
        )
        if exhausted:
            raise _BudgetExhausted(max([self.best, bound, *self.pending]))
        self.nodes += 1

    def _leaf(self) -> None:
        x = self.state[: self.model.n]
        value = float(log_weights(self.model, x.reshape(1, -1))[0])
        if value > self.best:
            self.best = value
            self.best_assignment = tuple(int(bit) for bit in x)
            self.trace.append(value)

    def expand(self, position: int, bound: float) -> None:
        self._tick(bound)
        order = self.order
        while position < len(order) and self.state[order[position]] != UNASSIGNED:
            position += 1
        if position == len(order):
            self._leaf()
            return

        var = order[position]
        children = []
        for value in (0, 1):
            self.propagator.push()
            forced = self.propagator.assign(var, value)
            snapshot = self.propagator.snapshot()
            self.propagator.pop()
            if forced is None:
                continue
            self.set_bits(var, value, forced)
            child_bound = self.tables.evaluate(self.state)
            self.clear_bits(var, forced)
            children.append((child_bound, value, forced, snapshot))

        # größere Schranke zuerst, bei Gleichstand 0 vor 1
        children.sort(key=lambda child: -child[0])
        for k, (child_bound, value, forced, snapshot) in enumerate(children):
            if self.prune and child_bound <= self.best:
                continue
            siblings = [other[0] for other in children[k + 1:]]
            self.pending.append(max(siblings) if siblings else -math.inf)
            self.propagator.push()
            self.propagator.restore(snapshot)
            self.set_bits(var, value, forced)
            try:
                self.expand(position + 1, child_bound)
            finally:
                self.clear_bits(var, forced)
                self.propagator.pop()
                self.pending.pop()


class BranchAndBoundSolver:
    """
    Branch-and-Bound-Löser für ein festes Modell.

    Die Schrankentabellen werden einmal je Modell aufgebaut und sind danach
    unveränderlich; ein Solver-Objekt kann von mehreren Threads gleichzeitig
    benutzt werden.
    """

    def __init__(self, model: BinaryModel, max_table_bits: Optional[int] = None) -> None:
        self.model = model
        self.tables = BoundTables(model, max_table_bits)
        self._influence = _factor_influence(model)

    def _variable_order(self, propagator: IncrementalPropagator) -> List[int]:
        """Bits in den meisten Paritätszeilen zuerst, dann nach Einfluss."""
        counts: Dict[int, int] = {var: 0 for var in range(self.model.n)}
        for _, mask, _ in propagator.rows:
            for var in range(self.model.n):
                if mask >> var & 1:
                    counts[var] += 1
        return sorted(
            range(self.model.n),
            key=lambda var: (-counts[var], -self._influence[var], var),
        )

    def solve(
        self,
        system: ParitySystem,
        budget_nodes: Optional[int] = None,
        budget_seconds: Optional[float] = None,
        prune: bool = True,
    ) -> MapResult:
        """
        Maximiert das Log-Gewicht unter dem Paritätssystem.

        Args:
            system: Paritätssystem mit system.n == model.n
            budget_nodes: Maximale Anzahl expandierter Knoten (None = unbegrenzt)
            budget_seconds: Maximale Laufzeit in Sekunden (None = unbegrenzt)
            prune: Schrankenbasiertes Abschneiden (nur zum Testen abschaltbar)

        Returns:
            MapResult (OPTIMAL, EMPTY oder TIMEOUT mit Inkumbente)

        Raises:
            SolverError: Dimensionen passen nicht zusammen
        """
        if system.n != self.model.n:
            raise SolverError(f"Paritätssystem hat n={system.n}, Modell hat n={self.model.n}")

        start = time.monotonic()
        reduced = row_reduce(system)
        if not reduced.feasible:
            return MapResult(
                status=SolveStatus.EMPTY,
                best_log_weight=-math.inf,
                upper_log_weight=-math.inf,
                wall_time=time.monotonic() - start,
            )

        propagator = IncrementalPropagator(reduced)
        deadline = start + budget_seconds if budget_seconds is not None else None
        search = _Search(self.model, self.tables, propagator, budget_nodes, deadline, prune)
        for var, value in propagator.initial_forced():
            forced = propagator.assign(var, value)
            search.set_bits(var, value, forced or [])
        search.order = self._variable_order(propagator)

        root_bound = self.tables.evaluate(search.state)
        try:
            if not prune or root_bound > search.best:
                search.expand(0, root_bound)
            status = SolveStatus.OPTIMAL if search.best > -math.inf else SolveStatus.EMPTY
            upper = search.best
        except _BudgetExhausted as exhausted:
            status = SolveStatus.TIMEOUT
            upper = exhausted.upper

        result = MapResult(
            status=status,
            best_log_weight=search.best,
            best_assignment=search.best_assignment,
            upper_log_weight=upper,
            nodes_expanded=search.nodes,
            wall_time=time.monotonic() - start,
            incumbent_trace=tuple(search.trace),
        )
        logger.debug(
            f"Solved m={system.m} (rank {reduced.rank}): {status.value}, "
            f"best={search.best:.6g}, nodes={search.nodes}"
        )
        return result


def solve(
    model: BinaryModel,
    system: ParitySystem,
    budget_nodes: Optional[int] = None,
    budget_seconds: Optional[float] = None,
    prune: bool = True,
) -> MapResult:
    """Kurzform für einen einzelnen Aufruf von BranchAndBoundSolver.solve()."""
    return BranchAndBoundSolver(model).solve(system, budget_nodes, budget_seconds, prune)


def upper_bound(model: BinaryModel, partial: Mapping[int, int]) -> float:
    """
    Zulässige Schranke: Σ_α max log ψ_α über die mit ``partial`` verträglichen Einträge.

    Bei voller Belegung gleich log_weight.
    """
    tables = BoundTables(model)
    state = tables.new_state()
    for var, value in partial.items():
        if not 0 <= var < model.n or value not in (0, 1):
            raise ModelError(f"Ungültige Teilbelegung {var} → {value}")
        state[var] = value
    if len(partial) == model.n:
        return log_weight(model, [int(v) for v in state[: model.n]])
    return tables.evaluate(state)


def brute_force_map(
    model: BinaryModel, system: ParitySystem, cap: Optional[int] = None
) -> MapResult:
    """
    Referenzlösung durch Enumeration aller 2^n Belegungen.

    Bei mehreren Optima gewinnt der kleinste Code.

    Raises:
        CapExceededError: n über der Obergrenze
        SolverError: Dimensionen passen nicht zusammen
    """
    if system.n != model.n:
        raise SolverError(f"Paritätssystem hat n={system.n}, Modell hat n={model.n}")
    start = time.monotonic()
    best = -math.inf
    best_assignment: Optional[Tuple[int, ...]] = None
    visited = 0
    for bits, weights in iter_log_weight_chunks(model, cap):
        visited += bits.shape[0]
        masked = np.where(evaluate_batch(system, bits), weights, -np.inf)
        index = int(np.argmax(masked))
        if masked[index] > best:
            best = float(masked[index])
            best_assignment = tuple(int(b) for b in bits[index])

    status = SolveStatus.OPTIMAL if best > -math.inf else SolveStatus.EMPTY
    return MapResult(
        status=status,
        best_log_weight=best,
        best_assignment=best_assignment,
        upper_log_weight=best,
        nodes_expanded=visited,
        wall_time=time.monotonic() - start,
    )
