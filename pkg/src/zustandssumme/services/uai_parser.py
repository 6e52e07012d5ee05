"""Service zum Lesen und Schreiben von Faktorgraphen im UAI-MARKOV-Format."""
import hashlib
import math
import re
from typing import List, Tuple

from pydantic import ValidationError

from ..config import get_logger
from ..exceptions import ModelError, UaiFormatError
from ..models import Factor, FactorGraph

logger = get_logger("uai_parser")


class _TokenStream:
    """Whitespace-getrennte Tokens mit Zeilennummern."""

    INT_PATTERN = re.compile(r"^[+-]?\d+$")

    def __init__(self, text: str) -> None:
        self._tokens: List[Tuple[str, int]] = [
            (token, line_no)
            for line_no, line in enumerate(text.splitlines(), start=1)
            for token in line.split()
        ]
        self._position = 0
        self._last_line = len(text.splitlines()) or 1

    @property
    def exhausted(self) -> bool:
        return self._position >= len(self._tokens)

    def next(self, what: str) -> Tuple[str, int]:
        if self.exhausted:
            raise UaiFormatError(f"Unerwartetes Dateiende, erwartet: {what}", self._last_line)
        token = self._tokens[self._position]
        self._position += 1
        return token

    def next_int(self, what: str) -> Tuple[int, int]:
        token, line = self.next(what)
        if not self.INT_PATTERN.match(token):
            raise UaiFormatError(f"Ganzzahl erwartet ({what}), gefunden '{token}'", line)
        return int(token), line

    def next_float(self, what: str) -> Tuple[float, int]:
        token, line = self.next(what)
        try:
            value = float(token)
        except ValueError:
            raise UaiFormatError(f"Zahl erwartet ({what}), gefunden '{token}'", line) from None
        if not math.isfinite(value):
            raise UaiFormatError(f"Nicht-endlicher Tabellenwert '{token}'", line)
        return value, line


class UaiParser:
    """Liest und schreibt das UAI-MARKOV-Format (ohne Kommentare und Evidenzdateien)."""

    HEADER = "MARKOV"

    def parse(self, text: str) -> FactorGraph:
        """
        Parst einen Faktorgraphen aus UAI-Text.

        Tabellenwerte werden beim Laden in den Log-Raum überführt (0 → -inf).

        Args:
            text: Inhalt der UAI-Datei

        Returns:
            FactorGraph

        Raises:
            UaiFormatError: Bei Formatfehlern, mit Zeilennummer
        """
        tokens = _TokenStream(text)

        header, line = tokens.next("Kopfzeile MARKOV")
        if header.upper() != self.HEADER:
            raise UaiFormatError(f"Kopfzeile '{header}' statt MARKOV", line)

        num_vars, line = tokens.next_int("Variablenanzahl")
        if num_vars < 0:
            raise UaiFormatError(f"Negative Variablenanzahl {num_vars}", line)

        cardinalities: List[int] = []
        for index in range(num_vars):
            card, line = tokens.next_int(f"Kardinalität von Variable {index}")
            if card <= 0:
                raise UaiFormatError(f"Kardinalität {card} von Variable {index} ist nicht positiv", line)
            cardinalities.append(card)

        num_factors, line = tokens.next_int("Faktoranzahl")
        if num_factors < 0:
            raise UaiFormatError(f"Negative Faktoranzahl {num_factors}", line)

        scopes: List[Tuple[int, ...]] = []
        for index in range(num_factors):
            arity, line = tokens.next_int(f"Stelligkeit von Faktor {index}")
            if arity < 0:
                raise UaiFormatError(f"Negative Stelligkeit {arity}", line)
            scope = []
            for _ in range(arity):
                var, var_line = tokens.next_int(f"Variable im Scope von Faktor {index}")
                if not 0 <= var < num_vars:
                    raise UaiFormatError(f"Variable {var} außerhalb 0..{num_vars - 1}", var_line)
                if var in scope:
                    raise UaiFormatError(f"Variable {var} doppelt im Scope", var_line)
                scope.append(var)
            scopes.append(tuple(scope))

        factors: List[Factor] = []
        for index, scope in enumerate(scopes):
            count, line = tokens.next_int(f"Tabellengröße von Faktor {index}")
            expected = math.prod(cardinalities[v] for v in scope)
            if count != expected:
                raise UaiFormatError(
                    f"Faktor {index}: Tabellengröße {count}, erwartet {expected}", line
                )
            log_table = []
            for _ in range(count):
                value, value_line = tokens.next_float(f"Tabellenwert von Faktor {index}")
                if value < 0.0:
                    raise UaiFormatError(f"negative potential {value} in Faktor {index}", value_line)
                log_table.append(math.log(value) if value > 0.0 else -math.inf)
            factors.append(Factor(scope=scope, log_table=tuple(log_table)))

        if not tokens.exhausted:
            token, line = tokens.next("Dateiende")
            raise UaiFormatError(f"Überzählige Angabe '{token}' nach der letzten Tabelle", line)

        try:
            graph = FactorGraph(cardinalities=tuple(cardinalities), factors=tuple(factors))
        except ValidationError as e:
            raise UaiFormatError(str(e)) from e

        logger.debug(f"Parsed UAI model: {num_vars} variables, {num_factors} factors")
        return graph

    def write(self, graph: FactorGraph) -> str:
        """
        Schreibt einen Faktorgraphen als UAI-Text.

        Werte werden als exp(log) mit voller repr-Genauigkeit ausgegeben, -inf als 0.
        """
        lines = [
            self.HEADER,
            str(graph.num_variables),
            " ".join(str(card) for card in graph.cardinalities),
            str(len(graph.factors)),
        ]
        for factor in graph.factors:
            lines.append(" ".join(str(v) for v in (factor.arity, *factor.scope)))
        for factor in graph.factors:
            lines.append("")
            lines.append(str(len(factor.log_table)))
            lines.append(" ".join(_format_weight(v) for v in factor.log_table))
        return "\n".join(lines) + "\n"


def _format_weight(log_value: float) -> str:
    if log_value == -math.inf:
        return "0"
    try:
        return repr(math.exp(log_value))
    except OverflowError as e:
        raise ModelError(f"Gewicht exp({log_value}) ist als Dezimalzahl nicht darstellbar") from e


def parse_uai(text: str) -> FactorGraph:
    """Kurzform für UaiParser().parse()."""
    return UaiParser().parse(text)


def write_uai(graph: FactorGraph) -> str:
    """Kurzform für UaiParser().write()."""
    return UaiParser().write(graph)


def model_digest(graph: FactorGraph) -> str:
    """SHA-256 über die kanonische UAI-Darstellung."""
    return hashlib.sha256(write_uai(graph).encode("utf-8")).hexdigest()
