"""CLI-Befehle für die Zustandssummen-Schätzung."""
import json
import math
import time
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from .. import __version__
from ..config import configure_from_settings, get_logger, settings
from ..exceptions import (
    CapExceededError,
    ConfigurationError,
    ModelError,
    SolverError,
    UaiFormatError,
)
from ..models import (
    BinaryModel,
    FactorGraph,
    Guarantee,
    InstanceRow,
    RunReport,
    RunTotals,
    SolveStatus,
    TailReport,
    WishConfig,
    WishResult,
)
from ..processing.pipeline import InstanceExecutor
from ..services import (
    GridMode,
    WishService,
    binarize,
    brute_force_log_z,
    brute_force_quantiles,
    brute_force_tail,
    estimate_tail,
    generate_clique_ising,
    generate_grid_ising,
    level_statistics,
    model_digest,
    parse_uai,
    write_uai,
)

app = typer.Typer(
    name="zustandssumme",
    help="Zustandssummen-Schätzung mit zufälligen Paritätsbedingungen (WISH)",
    add_completion=False,
)
generate_app = typer.Typer(help="Erzeugt Ising-Modelle im UAI-Format", add_completion=False)
app.add_typer(generate_app, name="generate")

# stdout gehört den JSON- und UAI-Ausgaben
console = Console(stderr=True)
logger = get_logger("cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_DEGRADED = 3


def _fail(message: str, code: int) -> NoReturn:
    console.print(f"[red]Fehler:[/red] {escape(message)}")
    raise typer.Exit(code)


def _load_model(path: Path) -> FactorGraph:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        _fail(f"Modell nicht lesbar: {path} ({e})", EXIT_INPUT)
    try:
        return parse_uai(text)
    except UaiFormatError as e:
        _fail(f"{path}: {e}", EXIT_INPUT)


def _json_safe(value: Any) -> Any:
    """Nicht-endliche Logwerte (Gewicht 0) werden zu null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def _dump(document: Dict[str, Any]) -> str:
    return json.dumps(_json_safe(document), indent=2, ensure_ascii=False, allow_nan=False)


def _emit(document: Dict[str, Any], output: Optional[Path]) -> None:
    text = _dump(document)
    if output is not None:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text + "\n", encoding="utf-8")
    typer.echo(text)


def _build_config(
    delta: Optional[float],
    alpha: Optional[float],
    t_override: Optional[int],
    seed: Optional[int],
    budget_nodes: Optional[int],
    budget_seconds: Optional[float],
    report_gaps: bool,
    early_stop: Optional[int],
) -> WishConfig:
    master_seed = seed if seed is not None else settings.seed if settings.seed is not None else 0
    try:
        return WishConfig(
            delta=settings.delta if delta is None else delta,
            alpha=settings.alpha if alpha is None else alpha,
            t_override=t_override,
            budget_nodes=settings.budget_nodes if budget_nodes is None else budget_nodes,
            budget_seconds=settings.budget_seconds if budget_seconds is None else budget_seconds,
            master_seed=master_seed,
            derive_gap_factor=report_gaps,
            early_stop_levels=early_stop,
        )
    except ValidationError as e:
        _fail(f"Ungültige Parameter: {e}", EXIT_USAGE)


def _totals(result: WishResult, wall_time: Optional[float]) -> RunTotals:
    statuses = [r.result.status for r in result.records if r.result is not None]
    return RunTotals(
        instances=len(result.records),
        optimal=statuses.count(SolveStatus.OPTIMAL),
        empty=statuses.count(SolveStatus.EMPTY),
        timeouts=statuses.count(SolveStatus.TIMEOUT),
        failed=sum(r.failed for r in result.records),
        wall_time=wall_time,
    )


def _tail_report(model: BinaryModel, result: WishResult, u: float, cap: int) -> TailReport:
    estimate = estimate_tail(result, u)
    oracle_count = None
    if model.n <= cap:
        oracle_count = brute_force_tail(model, u, cap)
    return TailReport(u=u, q=estimate.q, estimate=estimate.estimate, oracle_count=oracle_count)


def _report_document(report: RunReport, timings: bool) -> Dict[str, Any]:
    exclude: Dict[str, Any] = {"result": {"records"}, "refinement": {"wish"}}
    if not timings:
        exclude["instances"] = {"__all__": {"wall_time"}}
        exclude["totals"] = {"wall_time"}
    return report.model_dump(mode="python", exclude=exclude)


def _exit_code(result: WishResult) -> int:
    return EXIT_OK if result.guarantee == Guarantee.EXACT_16X else EXIT_DEGRADED


def _execute(
    model_path: Path,
    config: WishConfig,
    jobs: Optional[int],
    backend: Optional[str],
    epsilon: Optional[float],
    tail: Optional[float],
    oracle_cap: Optional[int],
) -> RunReport:
    """Gemeinsamer Ablauf von run und tail: Laden, Binarisieren, WISH."""
    graph = _load_model(model_path)
    model = binarize(graph)
    if model.n < 1:
        _fail("Modell hat keine freien Bits", EXIT_INPUT)
    cap = settings.oracle_cap_bits if oracle_cap is None else oracle_cap

    try:
        executor = InstanceExecutor(max_workers=jobs, backend=backend)
    except ValueError as e:
        _fail(str(e), EXIT_USAGE)
    service = WishService(executor)

    started = time.monotonic()
    refinement = None
    try:
        if epsilon is not None:
            refinement = service.refine(model, epsilon, config)
            result = refinement.wish
        else:
            result = service.run(model, config)
    except (CapExceededError, ConfigurationError) as e:
        _fail(str(e), EXIT_USAGE)
    except (SolverError, ModelError) as e:
        _fail(str(e), EXIT_INPUT)
    wall_time = time.monotonic() - started

    tail_report = _tail_report(model, result, tail, cap) if tail is not None else None
    report = RunReport(
        tool_version=__version__,
        model_digest=model_digest(graph),
        num_variables=graph.num_variables,
        config=config,
        result=result,
        refinement=refinement,
        tail=tail_report,
        levels=level_statistics(result),
        instances=[InstanceRow.from_record(record) for record in result.records],
        totals=_totals(result, wall_time),
    )
    return report


def _positive(value: Optional[float], name: str) -> None:
    if value is not None and not value > 0:
        _fail(f"{name} muss positiv sein, nicht {value}", EXIT_USAGE)


@app.command()
def run(
    model_path: Path = typer.Argument(..., help="Modell im UAI-MARKOV-Format"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Fehlerwahrscheinlichkeit δ"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Konstante α (≤ 0.0042 für die Garantie)"),
    t_override: Optional[int] = typer.Option(
        None, "--t-override", help="Feste Wiederholungszahl T (macht das Zertifikat ungültig)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", envvar="WISH_SEED", help="Master-Seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Anzahl Worker"),
    budget_nodes: Optional[int] = typer.Option(None, "--budget-nodes", help="Knotenbudget je Instanz"),
    budget_seconds: Optional[float] = typer.Option(
        None, "--budget-seconds", help="Zeitbudget je Instanz in Sekunden"
    ),
    epsilon: Optional[float] = typer.Option(
        None, "--epsilon", help="Verfeinerung auf Faktor 1+ε über das Potenzmodell"
    ),
    tail: Optional[float] = typer.Option(None, "--tail", help="Zusätzlich G(u) für diese Schwelle schätzen"),
    oracle_cap: Optional[int] = typer.Option(
        None, "--oracle-cap", min=1, help="Bitgrenze für Orakelvergleiche"
    ),
    timings: bool = typer.Option(False, "--timings", help="Laufzeiten in die Ausgabe aufnehmen"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON zusätzlich in Datei schreiben"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Ausführliche Ausgabe"),
    report_gaps: bool = typer.Option(
        False, "--report-gaps", help="FACTOR_16L aus bewiesenen Löserschranken ableiten"
    ),
    backend: Optional[str] = typer.Option(None, "--backend", help="Worker-Pool: thread oder process"),
    early_stop: Optional[int] = typer.Option(
        None, "--early-stop", min=1, help="Abbruch nach K leeren Ebenen (macht das Zertifikat ungültig)"
    ),
) -> None:
    """
    Schätzt die Zustandssumme eines Modells mit WISH.

    Gibt einen JSON-Bericht auf stdout aus. Exit-Code 0 bei zertifizierter
    16-Approximation, 3 bei reiner unterer Schranke.
    """
    configure_from_settings(settings, verbose)
    _positive(epsilon, "--epsilon")
    _positive(tail, "--tail")
    if epsilon is not None and tail is not None:
        _fail("--tail ist mit --epsilon nicht kombinierbar", EXIT_USAGE)
    config = _build_config(
        delta, alpha, t_override, seed, budget_nodes, budget_seconds, report_gaps, early_stop
    )
    logger.info(f"Starte WISH für {model_path}")

    report = _execute(model_path, config, jobs, backend, epsilon, tail, oracle_cap)
    _emit(_report_document(report, timings), output)

    result = report.result
    log_estimate = report.refinement.log_estimate if report.refinement else result.log_estimate
    console.print(f"[bold blue]log Z ≈ {log_estimate:.6f}[/bold blue] ({result.guarantee.value})")
    raise typer.Exit(_exit_code(result))


@app.command("tail")
def tail_command(
    model_path: Path = typer.Argument(..., help="Modell im UAI-MARKOV-Format"),
    u: float = typer.Argument(..., help="Schwelle u > 0 im Gewichtsraum"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Fehlerwahrscheinlichkeit δ"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Konstante α"),
    t_override: Optional[int] = typer.Option(None, "--t-override", help="Feste Wiederholungszahl T"),
    seed: Optional[int] = typer.Option(None, "--seed", envvar="WISH_SEED", help="Master-Seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Anzahl Worker"),
    budget_nodes: Optional[int] = typer.Option(None, "--budget-nodes", help="Knotenbudget je Instanz"),
    budget_seconds: Optional[float] = typer.Option(None, "--budget-seconds", help="Zeitbudget je Instanz"),
    oracle_cap: Optional[int] = typer.Option(None, "--oracle-cap", min=1, help="Bitgrenze für den Orakelvergleich"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON zusätzlich in Datei schreiben"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Ausführliche Ausgabe"),
    backend: Optional[str] = typer.Option(None, "--backend", help="Worker-Pool: thread oder process"),
) -> None:
    """Schätzt die Anzahl der Konfigurationen mit Gewicht ≥ u (2^q)."""
    configure_from_settings(settings, verbose)
    _positive(u, "u")
    config = _build_config(delta, alpha, t_override, seed, budget_nodes, budget_seconds, False, None)

    report = _execute(model_path, config, jobs, backend, None, u, oracle_cap)
    tail_report = report.tail
    if tail_report is None:
        _fail("Keine Tail-Schätzung erzeugt", EXIT_INPUT)
    document = {
        "schema_version": report.schema_version,
        "tool_version": report.tool_version,
        "model_digest": report.model_digest,
        **tail_report.model_dump(),
        "medians": list(report.result.medians),
        "log_estimate": report.result.log_estimate,
        "guarantee": report.result.guarantee.value,
    }
    _emit(document, output)
    raise typer.Exit(_exit_code(report.result))


@app.command()
def oracle(
    model_path: Path = typer.Argument(..., help="Modell im UAI-MARKOV-Format"),
    tail: Optional[float] = typer.Option(None, "--tail", help="Exaktes G(u) für diese Schwelle"),
    oracle_cap: Optional[int] = typer.Option(None, "--oracle-cap", min=1, help="Bitgrenze der Enumeration"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON zusätzlich in Datei schreiben"),
) -> None:
    """Exakte Zustandssumme, Quantile b_0..b_n und optional G(u) durch Enumeration."""
    configure_from_settings(settings)
    _positive(tail, "--tail")
    graph = _load_model(model_path)
    model = binarize(graph)
    try:
        log_z = brute_force_log_z(model, oracle_cap)
        profile = brute_force_quantiles(model, oracle_cap)
        count = brute_force_tail(model, tail, oracle_cap) if tail is not None else None
    except CapExceededError as e:
        _fail(f"{e}; --oracle-cap erhöhen oder kleineres Modell verwenden", EXIT_USAGE)

    document: Dict[str, Any] = {
        "schema_version": 1,
        "tool_version": __version__,
        "model_digest": model_digest(graph),
        "bits": model.n,
        "log_z": log_z,
        "log10_z": log_z / math.log(10.0),
        "quantiles": profile.quantiles,
    }
    if tail is not None:
        document["tail"] = {"u": tail, "count": count}
    _emit(document, output)


def _write_generated(graph: FactorGraph, output: Optional[Path]) -> None:
    text = write_uai(graph)
    if output is not None:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
    typer.echo(text, nl=False)


@generate_app.command("clique")
def generate_clique(
    n: int = typer.Argument(..., help="Anzahl Variablen (≥ 2)"),
    w: float = typer.Option(..., "--w", help="Kopplungsstärke w"),
    chain_strength: Optional[float] = typer.Option(
        None, "--chain-strength", help="Stärke der Kette (Standard 10·w)"
    ),
    seed: int = typer.Option(0, "--seed", help="Seed"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="UAI zusätzlich in Datei schreiben"),
) -> None:
    """Ising-Modell auf dem vollständigen Graphen mit überlagerter Kette."""
    try:
        graph = generate_clique_ising(n, w, chain_strength, seed)
    except ModelError as e:
        _fail(str(e), EXIT_USAGE)
    _write_generated(graph, output)


@generate_app.command("grid")
def generate_grid(
    rows: int = typer.Argument(..., help="Zeilen"),
    cols: int = typer.Argument(..., help="Spalten"),
    w: float = typer.Option(..., "--w", help="Kopplungsstärke w"),
    f: float = typer.Option(..., "--f", help="Feldstärke f"),
    mode: GridMode = typer.Option(GridMode.MIXED, "--mode", help="attractive oder mixed"),
    seed: int = typer.Option(0, "--seed", help="Seed"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="UAI zusätzlich in Datei schreiben"),
) -> None:
    """Ising-Gitter mit zufälligen Kopplungen und Feldern."""
    try:
        graph = generate_grid_ising(rows, cols, w, f, mode, seed)
    except ModelError as e:
        _fail(str(e), EXIT_USAGE)
    _write_generated(graph, output)


@app.command()
def version() -> None:
    """Zeigt die Version an."""
    console.print(f"zustandssumme [bold]{__version__}[/bold]")
