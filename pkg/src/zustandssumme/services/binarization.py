"""Binarisierung, Gewichtsauswertung und Potenzmodelle."""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_logger
from ..exceptions import ModelError
from ..models import BinaryModel, Factor, FactorGraph, VariableEncoding

logger = get_logger("binarization")


def bits_for(cardinality: int) -> int:
    """⌈log2 |X_i|⌉ (0 für Kardinalität 1)."""
    return (cardinality - 1).bit_length()


def bit_matrix(codes: np.ndarray, n: int) -> np.ndarray:
    """Bitmatrix mit bits[k, j] = (codes[k] >> j) & 1."""
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def binarize(graph: FactorGraph) -> BinaryModel:
    """
    Überführt einen Faktorgraphen mit mehrwertigen Variablen in ein Modell über {0,1}^n.

    Variable i belegt ⌈log2 |X_i|⌉ aufeinanderfolgende Bits; die Codes
    0..|X_i|-1 entsprechen den Werten in Reihenfolge, höhere Codes sind tot
    und erhalten Gewicht 0 (-inf). Jeder Faktor wird zu einem Faktor über
    die Vereinigung der Bitbereiche seiner Variablen.

    Args:
        graph: Gültiger Faktorgraph

    Returns:
        BinaryModel mit identischer Zustandssumme
    """
    encoding: List[VariableEncoding] = []
    next_bit = 0
    for variable, card in enumerate(graph.cardinalities):
        width = bits_for(card)
        encoding.append(
            VariableEncoding(variable=variable, cardinality=card, first_bit=next_bit, num_bits=width)
        )
        next_bit += width

    factors = [_binarize_factor(graph, factor, encoding) for factor in graph.factors]

    # Tote Codes nicht abgedeckter Variablen brauchen einen eigenen Domänenfaktor
    covered = {v for factor in graph.factors for v in factor.scope}
    for enc in encoding:
        if enc.variable in covered or _is_power_of_two(enc.cardinality):
            continue
        domain = Factor(scope=(enc.variable,), log_table=(0.0,) * enc.cardinality)
        factors.append(_binarize_factor(graph, domain, encoding))

    binary_graph = FactorGraph(cardinalities=(2,) * next_bit, factors=tuple(factors))
    logger.debug(
        f"Binarized {graph.num_variables} variables into {next_bit} bits, "
        f"{len(factors)} factors"
    )
    return BinaryModel(graph=binary_graph, encoding=tuple(encoding))


def _is_power_of_two(value: int) -> bool:
    return value & (value - 1) == 0


def _binarize_factor(
    graph: FactorGraph, factor: Factor, encoding: Sequence[VariableEncoding]
) -> Factor:
    """Faktor über Originalvariablen → Faktor über deren Bits (höchstes Codebit zuerst)."""
    encs = [encoding[v] for v in factor.scope]
    bit_scope = tuple(bit for enc in encs for bit in reversed(enc.bits))
    if all(_is_power_of_two(enc.cardinality) for enc in encs):
        # Codes und Werte fallen zusammen, Tabelle bleibt unverändert
        return Factor(scope=bit_scope, log_table=factor.log_table)

    patterns = np.arange(1 << len(bit_scope), dtype=np.int64)
    valid = np.ones(patterns.shape, dtype=bool)
    original_index = np.zeros(patterns.shape, dtype=np.int64)
    shift = len(bit_scope)
    stride = math.prod(enc.cardinality for enc in encs)
    for enc in encs:
        shift -= enc.num_bits
        stride //= enc.cardinality
        code = (patterns >> shift) & ((1 << enc.num_bits) - 1)
        valid &= code < enc.cardinality
        original_index += np.minimum(code, enc.cardinality - 1) * stride

    table = np.where(valid, factor.table[original_index], -np.inf)
    return Factor(scope=bit_scope, log_table=tuple(float(v) for v in table))


def log_weights(model: BinaryModel, bits: np.ndarray) -> np.ndarray:
    """
    Log-Gewichte für viele Belegungen auf einmal.

    Args:
        model: Binäres Modell
        bits: (k, n) 0/1-Matrix

    Returns:
        Vektor der Länge k mit Σ_α log ψ_α (-inf bei Gewicht 0)
    """
    bits = np.asarray(bits)
    if bits.ndim != 2 or bits.shape[1] != model.n:
        raise ModelError(f"Belegungsmatrix {bits.shape} passt nicht zu n={model.n}")
    total = np.zeros(bits.shape[0], dtype=np.float64)
    for scope, places, table in model.compiled:
        if scope.size == 0:
            total = total + table[0]
            continue
        index = bits[:, scope].astype(np.int64) @ places
        total = total + table[index]
    return total


def log_weight(model: BinaryModel, x: Sequence[int]) -> float:
    """
    Log-Gewicht einer einzelnen Belegung x ∈ {0,1}^n.

    Raises:
        ModelError: Falsche Länge oder Nicht-Bit-Einträge
    """
    if len(x) != model.n:
        raise ModelError(f"Belegung hat Länge {len(x)}, erwartet {model.n}")
    if any(bit not in (0, 1) for bit in x):
        raise ModelError(f"Belegung enthält Nicht-Bits: {tuple(x)}")
    row = np.asarray(x, dtype=np.uint8).reshape(1, model.n)
    return float(log_weights(model, row)[0])


def decode(model: BinaryModel, x: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Bitbelegung → Originalbelegung, None bei totem Code."""
    if len(x) != model.n:
        raise ModelError(f"Belegung hat Länge {len(x)}, erwartet {model.n}")
    values = []
    for enc in model.encoding:
        code = sum(int(x[bit]) << j for j, bit in enumerate(enc.bits))
        value = enc.decode_code(code)
        if value is None:
            return None
        values.append(value)
    return tuple(values)


def power_model(model: BinaryModel, ell: int) -> BinaryModel:
    """
    Disjunkte Vereinigung von ℓ umnummerierten Kopien: w'(σ_1..σ_ℓ) = Π w(σ_k).

    Die Zustandssumme des Ergebnisses ist genau W^ℓ.

    Raises:
        ModelError: ℓ < 1
    """
    if ell < 1:
        raise ModelError(f"Potenz ℓ muss positiv sein, nicht {ell}")
    if ell == 1:
        return model

    n = model.n
    num_original = len(model.encoding)
    factors = []
    encoding = []
    for copy in range(ell):
        offset = copy * n
        factors.extend(
            Factor(scope=tuple(v + offset for v in f.scope), log_table=f.log_table)
            for f in model.factors
        )
        encoding.extend(
            VariableEncoding(
                variable=enc.variable + copy * num_original,
                cardinality=enc.cardinality,
                first_bit=enc.first_bit + offset,
                num_bits=enc.num_bits,
            )
            for enc in model.encoding
        )
    graph = FactorGraph(cardinalities=(2,) * (n * ell), factors=tuple(factors))
    logger.debug(f"Built power model ℓ={ell}: {n * ell} bits, {len(factors)} factors")
    return BinaryModel(graph=graph, encoding=tuple(encoding))
