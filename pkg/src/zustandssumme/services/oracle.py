"""
Brute-Force-Referenz: exakte Zustandssumme, Quantile, Tail-Zählung und Schrankenprüfung.

Alle Funktionen zählen die 2^n Belegungen in Blöcken auf; die Reduktion über
Blöcke erfolgt in fester Reihenfolge und ist damit deterministisch.
"""
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from ..config import get_logger, settings
from ..exceptions import CapExceededError, ModelError
from ..models import BinaryModel, Lemma2Check, QuantileProfile
from .binarization import bit_matrix, log_weights

logger = get_logger("oracle")

CHUNK_BITS = 16
LOG_TOLERANCE = 1e-9
LN2 = math.log(2.0)


def check_cap(model: BinaryModel, cap: Optional[int] = None) -> None:
    """Wirft CapExceededError, wenn das Modell für Enumeration zu groß ist."""
    limit = settings.oracle_cap_bits if cap is None else cap
    if model.n > limit:
        raise CapExceededError(model.n, limit)


def iter_log_weight_chunks(
    model: BinaryModel, cap: Optional[int] = None
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Liefert (Bitmatrix, Log-Gewichte) blockweise für alle Codes 0..2^n-1.

    Zeile k eines Blocks ist die Belegung mit x_j = (code >> j) & 1.
    """
    check_cap(model, cap)
    total = 1 << model.n
    step = 1 << CHUNK_BITS
    for start in range(0, total, step):
        codes = np.arange(start, min(start + step, total), dtype=np.int64)
        bits = bit_matrix(codes, model.n)
        yield bits, log_weights(model, bits)


def enumerate_log_weights(model: BinaryModel, cap: Optional[int] = None) -> np.ndarray:
    """Log-Gewichte aller 2^n Belegungen, Index = Code."""
    return np.concatenate([weights for _, weights in iter_log_weight_chunks(model, cap)])


def log_sum_exp(values: Sequence[float]) -> float:
    """logsumexp, das für leere oder nur aus -inf bestehende Eingaben -inf liefert."""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0 or np.all(array == -np.inf):
        return -math.inf
    return float(logsumexp(array))


def brute_force_log_z(model: BinaryModel, cap: Optional[int] = None) -> float:
    """log W = log Σ_σ w(σ) durch vollständige Enumeration."""
    partials = [log_sum_exp(weights) for _, weights in iter_log_weight_chunks(model, cap)]
    log_z = log_sum_exp(partials)
    logger.debug(f"Brute force log Z over {model.n} bits: {log_z:.6f}")
    return log_z


def brute_force_quantiles(model: BinaryModel, cap: Optional[int] = None) -> QuantileProfile:
    """Absteigend sortiertes Profil aller Log-Gewichte."""
    weights = enumerate_log_weights(model, cap)
    ordered = np.sort(weights)[::-1].copy()
    return QuantileProfile(n=model.n, sorted_log_weights=ordered)


def brute_force_tail(model: BinaryModel, u: float, cap: Optional[int] = None) -> int:
    """
    G(u) = |{σ : w(σ) ≥ u}|.

    Raises:
        ModelError: u ≤ 0
        CapExceededError: Modell zu groß
    """
    if not u > 0.0:
        raise ModelError(f"Schwelle u muss positiv sein, nicht {u}")
    log_u = math.log(u)
    return sum(int(np.count_nonzero(w >= log_u)) for _, w in iter_log_weight_chunks(model, cap))


def _bound_sum(quantiles: Sequence[float], index_for_level) -> float:  # type: ignore[no-untyped-def]
    n = len(quantiles) - 1
    terms = [quantiles[0]] + [quantiles[index_for_level(i)] + i * LN2 for i in range(n)]
    return log_sum_exp(terms)


def lemma2_check(profile: QuantileProfile, c: int = 2) -> Lemma2Check:
    """
    Berechnet L', U' (verschobene Quantilsummen) und die exakten Summen L, U.

    L' = b_0 + Σ b_{min(i+c+1,n)} 2^i, U' = b_0 + Σ b_{max(i+1-c,0)} 2^i,
    L = b_0 + Σ b_{i+1} 2^i, U = b_0 + Σ b_i 2^i, alles im Log-Raum.

    Args:
        profile: Vollständiges Quantilprofil
        c: Verschiebung (≥ 2)

    Returns:
        Lemma2Check mit passed ⇔ log U' ≤ log L' + 2c·ln 2 (+1e-9)
    """
    if c < 2:
        raise ModelError(f"c muss ≥ 2 sein, nicht {c}")
    n = profile.n
    b = profile.quantiles

    log_l_prime = _bound_sum(b, lambda i: min(i + c + 1, n))
    log_u_prime = _bound_sum(b, lambda i: max(i + 1 - c, 0))
    log_l = _bound_sum(b, lambda i: i + 1)
    log_u = _bound_sum(b, lambda i: i)
    log_z = log_sum_exp(profile.sorted_log_weights)

    def leq(left: float, right: float) -> bool:
        return left <= right + LOG_TOLERANCE

    return Lemma2Check(
        c=c,
        log_l_prime=log_l_prime,
        log_u_prime=log_u_prime,
        log_l=log_l,
        log_u=log_u,
        log_z=log_z,
        passed=leq(log_u_prime, log_l_prime + 2 * c * LN2),
        sandwich_holds=leq(log_l_prime, log_z) and leq(log_z, log_u_prime),
        tight_sandwich_holds=(
            leq(log_l, log_z) and leq(log_z, log_u) and leq(log_u, log_l + LN2)
        ),
    )


def level_brackets(profile: QuantileProfile, medians: Sequence[float], c: int = 2) -> List[bool]:
    """Je Ebene i: M_i ∈ [b_{min(i+c,n)}, b_{max(i-c,0)}]."""
    n = profile.n
    if len(medians) != n + 1:
        raise ModelError(f"{len(medians)} Mediane für n={n}, erwartet {n + 1}")
    b = profile.quantiles
    return [
        b[min(i + c, n)] - LOG_TOLERANCE <= m <= b[max(i - c, 0)] + LOG_TOLERANCE
        for i, m in enumerate(medians)
    ]


def level_bracket_frequency(
    profile: QuantileProfile, runs: Sequence[Sequence[float]], c: int = 2
) -> List[float]:
    """Empirische Trefferquote je Ebene über mehrere Läufe."""
    if not runs:
        raise ModelError("Keine Läufe übergeben")
    hits = np.array([level_brackets(profile, medians, c) for medians in runs], dtype=float)
    return [float(v) for v in hits.mean(axis=0)]
