"""
WISH: Schätzung der Zustandssumme über (n+1)·T paritätsbeschränkte MAP-Instanzen.

Ebene i erhält i zufällige Paritätszeilen; M_i ist der Median der T
Optimalwerte, die Schätzung ist M_0 + Σ_i M_{i+1} 2^i (im Log-Raum).
"""
import math
from collections import defaultdict
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_logger, settings
from ..exceptions import CapExceededError, ConfigurationError, ModelError
from ..models import (
    BinaryModel,
    Guarantee,
    InstanceRecord,
    LevelStatistics,
    RefineResult,
    SolveStatus,
    TailEstimate,
    WishConfig,
    WishResult,
)
from .binarization import power_model
from .oracle import log_sum_exp
from .solver import BranchAndBoundSolver

if TYPE_CHECKING:
    from ..processing.pipeline import InstanceExecutor, InstanceTask

logger = get_logger("wish")

LN2 = math.log(2.0)
# Faktor der Grundgarantie: 2^{2c} mit c = 2
BASE_FACTOR = 16.0


def compute_T(delta: float, alpha: float, n: int) -> int:
    """
    Wiederholungen je Ebene: T = ⌈(ln(1/δ) / α) · ln n⌉, mindestens 1.

    Raises:
        ConfigurationError: δ ∉ (0,1), α ≤ 0 oder n < 2
    """
    if not 0.0 < delta < 1.0:
        raise ConfigurationError(f"delta muss in (0, 1) liegen, nicht {delta}")
    if not alpha > 0.0:
        raise ConfigurationError(f"alpha muss positiv sein, nicht {alpha}")
    if n < 2:
        raise ConfigurationError(f"compute_T braucht n ≥ 2, nicht {n}")
    return max(1, math.ceil(math.log(1.0 / delta) / alpha * math.log(n)))


def repetitions(config: WishConfig, n: int) -> int:
    """T aus der Konfiguration; ein einzelnes Bit wird wie n = 2 behandelt."""
    if config.t_override is not None:
        return config.t_override
    return compute_T(config.delta, config.alpha, max(n, 2))


def instance_seed(master_seed: int, level: int, repetition: int) -> int:
    """Fester Mischschritt (master_seed, i, t) → 64-Bit-Seed."""
    sequence = np.random.SeedSequence([master_seed, level, repetition])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def median_lower(values: Sequence[float]) -> float:
    """Median; bei gerader Anzahl der kleinere der beiden mittleren Werte."""
    if not values:
        raise ModelError("Median einer leeren Folge")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def aggregate(records: Sequence[InstanceRecord], n: int, T: int) -> Tuple[float, ...]:
    """
    Mediane M_0..M_n aus den Instanzergebnissen.

    Leere und abgestürzte Instanzen zählen als -inf; Ebenen ohne Instanzen
    (übersprungen) erhalten -inf.
    """
    by_level: Dict[int, List[float]] = defaultdict(list)
    for record in records:
        by_level[record.level].append(record.log_weight)
    medians = []
    for level in range(n + 1):
        values = by_level.get(level)
        if not values:
            medians.append(-math.inf)
            continue
        if len(values) != T:
            raise ModelError(f"Ebene {level}: {len(values)} Instanzen, erwartet {T}")
        medians.append(median_lower(values))
    return tuple(medians)


def estimate_log_w(medians: Sequence[float]) -> float:
    """log(M_0 + Σ_{i=0}^{n-1} M_{i+1} 2^i) mit M im Log-Raum; -inf-Terme entfallen."""
    if not medians:
        raise ModelError("Mindestens M_0 wird benötigt")
    terms = [medians[0]] + [m + i * LN2 for i, m in enumerate(medians[1:])]
    return log_sum_exp([t for t in terms if t != -math.inf])


def classify_guarantee(
    records: Sequence[InstanceRecord], config: WishConfig, skipped: Sequence[int]
) -> Tuple[Guarantee, Optional[float], bool]:
    """Garantieart, log L (bei FACTOR_16L) und degraded-Flag."""
    degraded = any(record.failed for record in records)
    if degraded or skipped:
        return Guarantee.LOWER_BOUND, None, degraded
    if all(record.result is not None and record.result.is_exact for record in records):
        return Guarantee.EXACT_16X, None, False
    if config.derive_gap_factor:
        gaps = [record.result.log_gap for record in records if record.result is not None]
        worst = max(gaps, default=0.0)
        if math.isfinite(worst):
            return Guarantee.FACTOR_16L, worst, False
    return Guarantee.LOWER_BOUND, None, False


class WishService:
    """Führt WISH-Läufe für ein binäres Modell aus."""

    def __init__(self, executor: Optional["InstanceExecutor"] = None) -> None:
        if executor is None:
            from ..processing.pipeline import InstanceExecutor

            executor = InstanceExecutor()
        self.executor = executor

    def _tasks(self, config: WishConfig, level: int, T: int) -> List["InstanceTask"]:
        from ..processing.pipeline import InstanceTask

        return [
            InstanceTask(
                level=level,
                repetition=t,
                seed=instance_seed(config.master_seed, level, t),
                budget_nodes=config.budget_nodes,
                budget_seconds=config.budget_seconds,
            )
            for t in range(1, T + 1)
        ]

    def run(self, model: BinaryModel, config: WishConfig) -> WishResult:
        """
        Algorithmus WISH für ein Modell.

        Args:
            model: Binäres Modell mit n ≥ 1
            config: Parameter des Laufs

        Returns:
            WishResult mit allen Instanzen, Medianen und Garantie

        Raises:
            ModelError: n < 1
            SolverError: Modell für den Löser ungeeignet
        """
        n = model.n
        if n < 1:
            raise ModelError("WISH braucht mindestens ein Bit")
        T = repetitions(config, n)
        solver = BranchAndBoundSolver(model)
        logger.info(f"WISH: n={n}, T={T}, {(n + 1) * T} Instanzen, Seed {config.master_seed}")

        skipped: List[int] = []
        if config.early_stop_levels is None:
            tasks = [task for level in range(n + 1) for task in self._tasks(config, level, T)]
            records = self.executor.run(solver, tasks)
        else:
            records = []
            empty_streak = 0
            for level in range(n + 1):
                if empty_streak >= config.early_stop_levels:
                    skipped.append(level)
                    continue
                level_records = self.executor.run(solver, self._tasks(config, level, T))
                records.extend(level_records)
                median = median_lower([r.log_weight for r in level_records])
                empty_streak = empty_streak + 1 if median == -math.inf else 0
            if skipped:
                logger.info(f"Vorzeitiger Abbruch: Ebenen {skipped[0]}..{skipped[-1]} übersprungen")

        medians = aggregate(records, n, T)
        for level, median in enumerate(medians):
            logger.debug(f"Ebene {level}: M = {median:.6g}")

        guarantee, log_gap, degraded = classify_guarantee(records, config, skipped)
        certificate = (
            guarantee == Guarantee.EXACT_16X
            and config.t_override is None
            and config.alpha_certified
        )
        if degraded:
            logger.warning("Mindestens eine Instanz ist abgestürzt, nur untere Schranke")

        result = WishResult(
            n=n,
            T=T,
            medians=medians,
            records=tuple(records),
            log_estimate=estimate_log_w(medians),
            guarantee=guarantee,
            log_gap_factor=log_gap,
            failure_probability=config.delta,
            certificate_valid=certificate,
            degraded=degraded,
            skipped_levels=tuple(skipped),
        )
        logger.info(f"WISH fertig: log Ŵ = {result.log_estimate:.6f} ({guarantee.value})")
        return result

    def refine(
        self,
        model: BinaryModel,
        epsilon: float,
        config: WishConfig,
        max_bits: Optional[int] = None,
    ) -> RefineResult:
        """
        Verfeinerung über das Potenzmodell: ℓ = ⌈log_{1+ε} 16⌉, Ergebnis Ŵ^{1/ℓ}.

        Raises:
            ConfigurationError: ε ≤ 0
            CapExceededError: ℓ·n über der Obergrenze
        """
        ell = power_for(epsilon)
        limit = settings.refine_max_bits if max_bits is None else max_bits
        if ell * model.n > limit:
            raise CapExceededError(ell * model.n, limit, what="Verfeinerung")
        logger.info(f"Verfeinerung mit ε={epsilon}: ℓ={ell}, {ell * model.n} Bits")

        wish = self.run(power_model(model, ell), config)
        return RefineResult(
            ell=ell,
            epsilon=epsilon,
            wish=wish,
            log_estimate=wish.log_estimate / ell,
            guarantee_factor=BASE_FACTOR ** (1.0 / ell),
        )


def power_for(epsilon: float) -> int:
    """ℓ = ⌈log_{1+ε} 16⌉ (numerisch exakte Potenzen wie ε = 1 → 4 bleiben erhalten)."""
    if not epsilon > 0.0:
        raise ConfigurationError(f"epsilon muss positiv sein, nicht {epsilon}")
    raw = math.log(BASE_FACTOR) / math.log1p(epsilon)
    ell = max(1, math.ceil(raw - 1e-9))
    # ℓ muss 16^{1/ℓ} ≤ 1+ε erfüllen
    while BASE_FACTOR ** (1.0 / ell) > 1.0 + epsilon + 1e-12:
        ell += 1
    return ell


def run_wish(
    model: BinaryModel, config: WishConfig, executor: Optional["InstanceExecutor"] = None
) -> WishResult:
    """Kurzform für WishService(executor).run()."""
    return WishService(executor).run(model, config)


def refine(
    model: BinaryModel,
    epsilon: float,
    config: WishConfig,
    executor: Optional["InstanceExecutor"] = None,
    max_bits: Optional[int] = None,
) -> RefineResult:
    """Kurzform für WishService(executor).refine()."""
    return WishService(executor).refine(model, epsilon, config, max_bits)


def estimate_tail(result: WishResult, u: float) -> TailEstimate:
    """
    Tail-Schätzung: q(u) = größtes i mit M_j ≥ log u für alle j ≤ i.

    Returns:
        TailEstimate mit q=None (Schätzung 0), wenn schon M_0 < log u
    """
    if not u > 0.0:
        raise ModelError(f"Schwelle u muss positiv sein, nicht {u}")
    return TailEstimate(u=u, q=tail_level(result.medians, u))


def tail_level(medians: Sequence[float], u: float) -> Optional[int]:
    log_u = math.log(u)
    q = None
    for level, median in enumerate(medians):
        if median < log_u:
            break
        q = level
    return q


def level_statistics(result: WishResult) -> List[LevelStatistics]:
    """Lösungsprofil je Ebene (Knoten, Timeouts, leere Instanzen)."""
    stats = []
    for level in range(result.n + 1):
        records = [r for r in result.records if r.level == level]
        results = [r.result for r in records if r.result is not None]
        stats.append(
            LevelStatistics(
                level=level,
                median=result.medians[level],
                mean_nodes=float(np.mean([r.nodes_expanded for r in results])) if results else 0.0,
                optimal=sum(r.status == SolveStatus.OPTIMAL for r in results),
                timeouts=sum(r.status == SolveStatus.TIMEOUT for r in results),
                empty=sum(r.status == SolveStatus.EMPTY for r in results),
                failed=sum(r.failed for r in records),
            )
        )
    return stats
