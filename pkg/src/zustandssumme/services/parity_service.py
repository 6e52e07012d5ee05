"""
Paritätsbedingungen A x = b (mod 2): Ziehen, Auswerten, Gauß-Elimination, Propagation.

Zeilen sind Bitmasken (Python-int), Zeilenoperationen sind XOR.
"""
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import get_logger
from ..exceptions import ModelError
from ..models import ParitySystem, PropagationResult, ReducedParitySystem

logger = get_logger("parity")

# (pivot, maske, rechte Seite)
Row = Tuple[int, int, int]


def sample_parity_system(n: int, m: int, rng: np.random.Generator) -> ParitySystem:
    """
    Zieht A ∈ {0,1}^{m×n} und b ∈ {0,1}^m gleichverteilt.

    Jedes der m(n+1) Bits ist ein unabhängiger fairer Münzwurf aus ``rng``;
    m = 0 liefert das leere, immer erfüllte System.
    """
    if m < 0:
        raise ModelError(f"Zeilenzahl m muss ≥ 0 sein, nicht {m}")
    coins = rng.integers(0, 2, size=(m, n + 1), dtype=np.uint8)
    return ParitySystem.from_arrays(coins[:, :n], coins[:, n])


def _pack(x: Sequence[int], n: int) -> int:
    if len(x) != n:
        raise ModelError(f"Belegung hat Länge {len(x)}, erwartet {n}")
    packed = 0
    for j, bit in enumerate(x):
        if bit not in (0, 1):
            raise ModelError(f"Belegung enthält Nicht-Bit {bit}")
        packed |= int(bit) << j
    return packed


def evaluate(system: ParitySystem, x: Sequence[int]) -> bool:
    """True gdw. A x ≡ b (mod 2) zeilenweise."""
    packed = _pack(x, system.n)
    return all(
        (row & packed).bit_count() & 1 == rhs for row, rhs in zip(system.rows, system.rhs)
    )


def evaluate_batch(system: ParitySystem, bits: np.ndarray) -> np.ndarray:
    """Vektorisierte Auswertung für eine (k, n) Bitmatrix."""
    bits = np.asarray(bits)
    if bits.ndim != 2 or bits.shape[1] != system.n:
        raise ModelError(f"Belegungsmatrix {bits.shape} passt nicht zu n={system.n}")
    if system.m == 0:
        return np.ones(bits.shape[0], dtype=bool)
    products = bits.astype(np.int64) @ system.matrix().T.astype(np.int64)
    return np.all((products & 1) == system.vector().astype(np.int64), axis=1)


def row_reduce(system: ParitySystem) -> ReducedParitySystem:
    """
    Reduzierte Zeilenstufenform über GF(2).

    Pivot einer neuen Zeile ist ihr niedrigstes gesetztes Bit; jede
    Pivotspalte kommt nur in ihrer eigenen Zeile vor.
    """
    rows, feasible = _eliminate(zip(system.rows, system.rhs))
    rows.sort()
    return ReducedParitySystem(
        n=system.n,
        rows=tuple(mask for _, mask, _ in rows),
        rhs=tuple(rhs for _, _, rhs in rows),
        pivots=tuple(pivot for pivot, _, _ in rows),
        feasible=feasible,
    )


def _eliminate(equations) -> Tuple[List[Row], bool]:  # type: ignore[no-untyped-def]
    reduced: List[Row] = []
    feasible = True
    for mask, rhs in equations:
        for pivot, p_mask, p_rhs in reduced:
            if mask >> pivot & 1:
                mask ^= p_mask
                rhs ^= p_rhs
        if mask == 0:
            if rhs:
                feasible = False
            continue
        pivot = (mask & -mask).bit_length() - 1
        reduced = [
            (p, m ^ mask, r ^ rhs) if m >> pivot & 1 else (p, m, r)
            for p, m, r in reduced
        ]
        reduced.append((pivot, mask, rhs))
    return reduced, feasible


def propagate(reduced: ReducedParitySystem, partial: Mapping[int, int]) -> PropagationResult:
    """
    Setzt feste Bits ein, eliminiert neu und liefert alle implizierten Bits.

    Vollständige Neuberechnung; dient als Referenz für IncrementalPropagator.

    Args:
        reduced: Reduziertes, erfüllbares System
        partial: Teilbelegung Bitindex → Bit

    Returns:
        PropagationResult mit conflict=True oder den erzwungenen Bits
    """
    if not reduced.feasible:
        return PropagationResult(conflict=True)
    assigned = 0
    ones = 0
    for var, value in partial.items():
        if not 0 <= var < reduced.n or value not in (0, 1):
            raise ModelError(f"Ungültige Teilbelegung {var} → {value}")
        assigned |= 1 << var
        ones |= int(value) << var

    substituted = [
        (mask & ~assigned, rhs ^ ((mask & ones).bit_count() & 1))
        for mask, rhs in zip(reduced.rows, reduced.rhs)
    ]
    rows, feasible = _eliminate(substituted)
    if not feasible:
        return PropagationResult(conflict=True)
    forced = {pivot: rhs for pivot, mask, rhs in rows if mask & (mask - 1) == 0}
    return PropagationResult(conflict=False, forced=forced)


class IncrementalPropagator:
    """
    Inkrementelle Elimination für die Tiefensuche.

    ``push()`` sichert den Zustand der aktuellen Suchtiefe, ``pop()`` stellt
    ihn wieder her. ``assign()`` baut eine neue Zeilenliste auf, gesicherte
    Zustände werden nie verändert.
    """

    def __init__(self, reduced: ReducedParitySystem) -> None:
        self.n = reduced.n
        self.feasible = reduced.feasible
        self._rows: List[Row] = list(zip(reduced.pivots, reduced.rows, reduced.rhs))
        self._stack: List[List[Row]] = []

    @property
    def depth(self) -> int:
        return len(self._stack)

    @property
    def rows(self) -> List[Row]:
        return list(self._rows)

    def push(self) -> None:
        self._stack.append(self._rows)

    def pop(self) -> None:
        self._rows = self._stack.pop()

    def snapshot(self) -> List[Row]:
        """Aktueller Zustand; Zeilenlisten werden nie in-place geändert."""
        return self._rows

    def restore(self, snapshot: List[Row]) -> None:
        self._rows = snapshot

    def initial_forced(self) -> List[Tuple[int, int]]:
        """Bits, die schon ohne Belegung feststehen (Einheitszeilen)."""
        return [(pivot, rhs) for pivot, mask, rhs in self._rows if mask & (mask - 1) == 0]

    def row_count(self, var: int) -> int:
        """Anzahl der aktuellen Zeilen, die var enthalten."""
        return sum(1 for _, mask, _ in self._rows if mask >> var & 1)

    def assign(self, var: int, value: int) -> Optional[List[Tuple[int, int]]]:
        """
        Setzt var = value und propagiert.

        Returns:
            Liste der dadurch erzwungenen (bit, wert)-Paare oder None bei Konflikt
        """
        rows = self._rows
        forced: List[Tuple[int, int]] = []
        queue = [(var, value)]
        while queue:
            current, current_value = queue.pop()
            bit = 1 << current
            updated: List[Row] = []
            orphan: Optional[Tuple[int, int]] = None
            for pivot, mask, rhs in rows:
                if not mask & bit:
                    updated.append((pivot, mask, rhs))
                    continue
                mask ^= bit
                rhs ^= current_value
                if mask == 0:
                    if rhs:
                        return None
                    continue
                if pivot == current:
                    orphan = (mask, rhs)
                else:
                    updated.append((pivot, mask, rhs))

            if orphan is not None:
                # Zeile hat ihren Pivot verloren: neuen Pivot wählen und eliminieren
                o_mask, o_rhs = orphan
                new_pivot = (o_mask & -o_mask).bit_length() - 1
                updated = [
                    (p, m ^ o_mask, r ^ o_rhs) if m >> new_pivot & 1 else (p, m, r)
                    for p, m, r in updated
                ]
                updated.append((new_pivot, o_mask, o_rhs))

            rows = []
            for pivot, mask, rhs in updated:
                if mask & (mask - 1) == 0 and not any(f == pivot for f, _ in queue):
                    forced.append((pivot, rhs))
                    queue.append((pivot, rhs))
                rows.append((pivot, mask, rhs))

        self._rows = rows
        return forced


def dump_system(system: ParitySystem) -> str:
    """Textform: eine Zeile je Gleichung, Bits x_0..x_{n-1}, dann '| b'."""
    lines = []
    for row, rhs in zip(system.rows, system.rhs):
        bits = "".join(str(row >> j & 1) for j in range(system.n))
        lines.append(f"{bits} | {rhs}")
    return "\n".join(lines)


def parse_system_dump(text: str, n: Optional[int] = None) -> ParitySystem:
    """Liest die Textform von dump_system; n ist nur für leere Systeme nötig."""
    rows = []
    rhs = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            bits, b = (part.strip() for part in line.split("|"))
        except ValueError:
            raise ModelError(f"Zeile {line_no}: erwartet 'bits | b', gefunden '{line}'") from None
        if n is None:
            n = len(bits)
        if len(bits) != n or set(bits) - {"0", "1"} or b not in ("0", "1"):
            raise ModelError(f"Zeile {line_no}: ungültige Gleichung '{line}'")
        rows.append(sum(1 << j for j, ch in enumerate(bits) if ch == "1"))
        rhs.append(int(b))
    if n is None:
        raise ModelError("Leeres System ohne Angabe von n")
    return ParitySystem(n=n, rows=tuple(rows), rhs=tuple(rhs))
