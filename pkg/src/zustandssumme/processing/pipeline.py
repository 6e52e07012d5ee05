"""Ausführung der WISH-Instanzen über einen Worker-Pool."""
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import get_logger, settings
from ..models import InstanceRecord, MapResult
from ..services.parity_service import sample_parity_system
from ..services.solver import BranchAndBoundSolver

logger = get_logger("pipeline")


class InstanceTask(BaseModel):
    """Arbeitspaket (i, t): Ebene, Wiederholung und abgeleiteter Seed."""

    model_config = ConfigDict(frozen=True)

    level: int = Field(..., ge=0, description="Anzahl Paritätszeilen i")
    repetition: int = Field(..., ge=1, description="Wiederholung t")
    seed: int = Field(..., ge=0, description="Instanz-Seed")
    budget_nodes: Optional[int] = Field(default=None, description="Knotenbudget")
    budget_seconds: Optional[float] = Field(default=None, description="Zeitbudget in Sekunden")

    @property
    def key(self) -> Tuple[int, int]:
        return (self.level, self.repetition)


def solve_instance(solver: BranchAndBoundSolver, task: InstanceTask) -> MapResult:
    """Zieht das Paritätssystem der Instanz aus ihrem Seed und löst es."""
    rng = np.random.default_rng(task.seed)
    system = sample_parity_system(solver.model.n, task.level, rng)
    return solver.solve(system, task.budget_nodes, task.budget_seconds)


# Solver des Worker-Prozesses, einmal je Prozess über den Initializer gesetzt
_worker_solver: Optional[BranchAndBoundSolver] = None


def _init_worker(solver: BranchAndBoundSolver) -> None:
    global _worker_solver
    _worker_solver = solver


def _solve_in_worker(task: InstanceTask) -> MapResult:
    if _worker_solver is None:
        raise RuntimeError("Worker-Prozess ohne Solver initialisiert")
    return solve_instance(_worker_solver, task)


class InstanceExecutor:
    """
    Worker-Pool für die (n+1)·T Optimierungsinstanzen.

    Ergebnisse werden nach (i, t) gesammelt und erst nach dem Join sortiert
    zurückgegeben; die Reihenfolge der Abarbeitung hat keinen Einfluss.
    Abstürze einzelner Instanzen werden protokolliert und als fehlgeschlagen
    markiert, der Lauf wird fortgesetzt.
    """

    def __init__(self, max_workers: Optional[int] = None, backend: Optional[str] = None) -> None:
        self.max_workers = max_workers or settings.max_workers or os.cpu_count() or 1
        self.backend = backend or settings.executor_backend
        if self.backend not in ("thread", "process"):
            raise ValueError(f"Unbekanntes Backend '{self.backend}'")

    def run(self, solver: BranchAndBoundSolver, tasks: Sequence[InstanceTask]) -> List[InstanceRecord]:
        """
        Führt alle Instanzen aus.

        Args:
            solver: Solver für das gemeinsame, unveränderliche Modell
            tasks: Arbeitspakete

        Returns:
            InstanceRecords sortiert nach (Ebene, Wiederholung)
        """
        if self.max_workers == 1 or len(tasks) <= 1:
            collected = self._run_sequential(solver, tasks)
        else:
            collected = self._run_parallel(solver, tasks)
        return [collected[key] for key in sorted(collected)]

    def _run_sequential(
        self, solver: BranchAndBoundSolver, tasks: Sequence[InstanceTask]
    ) -> Dict[Tuple[int, int], InstanceRecord]:
        logger.debug(f"Löse {len(tasks)} Instanzen sequenziell")
        collected = {}
        for task in tasks:
            try:
                collected[task.key] = self._record(task, solve_instance(solver, task))
            except Exception as e:
                collected[task.key] = self._failed(task, e)
        return collected

    def _create_pool(self, solver: BranchAndBoundSolver) -> Executor:
        if self.backend == "process":
            return ProcessPoolExecutor(
                max_workers=self.max_workers, initializer=_init_worker, initargs=(solver,)
            )
        return ThreadPoolExecutor(max_workers=self.max_workers)

    def _run_parallel(
        self, solver: BranchAndBoundSolver, tasks: Sequence[InstanceTask]
    ) -> Dict[Tuple[int, int], InstanceRecord]:
        logger.debug(
            f"Löse {len(tasks)} Instanzen parallel "
            f"(max {self.max_workers} Worker, Backend {self.backend})"
        )
        collected = {}
        with self._create_pool(solver) as pool:
            if self.backend == "process":
                futures = {pool.submit(_solve_in_worker, task): task for task in tasks}
            else:
                futures = {pool.submit(solve_instance, solver, task): task for task in tasks}
            for future in as_completed(futures):
                task = futures[future]
                try:
                    collected[task.key] = self._record(task, future.result())
                except Exception as e:
                    collected[task.key] = self._failed(task, e)
        return collected

    @staticmethod
    def _record(task: InstanceTask, result: MapResult) -> InstanceRecord:
        return InstanceRecord(
            level=task.level, repetition=task.repetition, seed=task.seed, result=result
        )

    @staticmethod
    def _failed(task: InstanceTask, error: Exception) -> InstanceRecord:
        logger.error(f"Fehler bei Instanz (i={task.level}, t={task.repetition}): {error}")
        return InstanceRecord(
            level=task.level, repetition=task.repetition, seed=task.seed, error=str(error)
        )
