"""Tests für die CLI."""
import json
import math
from pathlib import Path

import pytest
from typer.testing import CliRunner

from zustandssumme.cli.commands import app
from zustandssumme.services import generate_clique_ising, parse_uai, write_uai

runner = CliRunner()

# zwei Bits, alle Gewichte 0
ZERO_UAI = "MARKOV\n2\n2 2\n1\n2 0 1\n4\n0 0 0 0\n"


def _reject_constant(name: str) -> None:
    raise ValueError(f"kein gültiges JSON: {name}")


def read_json(path: Path) -> dict:
    # strikt: NaN, Infinity und -Infinity sind kein JSON
    return json.loads(path.read_text(encoding="utf-8"), parse_constant=_reject_constant)


class TestRunCommand:
    """Tests für den Befehl run."""

    @pytest.fixture(autouse=True)
    def _models(self, tmp_path: Path, pairwise_text: str) -> None:
        self.tmp = tmp_path
        self.pairwise = tmp_path / "pairwise.uai"
        self.pairwise.write_text(pairwise_text, encoding="utf-8")
        self.clique = tmp_path / "clique.uai"
        self.clique.write_text(write_uai(generate_clique_ising(8, 1.0, seed=1)), encoding="utf-8")

    def invoke(self, *args: str, **kwargs):  # type: ignore[no-untyped-def]
        return runner.invoke(app, ["run", *args], **kwargs)

    def test_report_structure(self) -> None:
        """Test: JSON-Bericht mit Instanztabelle und Exit-Code 0."""
        out = self.tmp / "report.json"

        result = self.invoke(str(self.pairwise), "--t-override", "3", "--seed", "1", "-o", str(out))

        assert result.exit_code == 0
        report = read_json(out)
        assert report["schema_version"] == 1
        assert report["num_variables"] == 2
        assert report["result"]["guarantee"] == "exact_16x"
        assert not report["result"]["certificate_valid"]
        assert len(report["instances"]) == 3 * 3
        assert len(report["levels"]) == 3
        assert report["totals"]["instances"] == 9
        assert "records" not in report["result"]
        assert all("wall_time" not in row for row in report["instances"])
        assert "wall_time" not in report["totals"]

    def test_timings(self) -> None:
        """Test: --timings nimmt Laufzeiten auf."""
        out = self.tmp / "report.json"

        self.invoke(str(self.pairwise), "--t-override", "2", "--timings", "-o", str(out))

        report = read_json(out)
        assert all(row["wall_time"] >= 0.0 for row in report["instances"])
        assert report["totals"]["wall_time"] >= 0.0

    def test_identical_across_job_counts(self) -> None:
        """Test: Bytegleiche Ausgabe für --jobs 1 und --jobs 4."""
        first = self.tmp / "one.json"
        second = self.tmp / "four.json"

        self.invoke(str(self.clique), "--t-override", "3", "--seed", "9", "-j", "1", "-o", str(first))
        self.invoke(str(self.clique), "--t-override", "3", "--seed", "9", "-j", "4", "-o", str(second))

        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_identical_with_eight_jobs(self, seed: int) -> None:
        """Test: Bytegleiche Ausgabe für --jobs 1 und --jobs 8, zehn Seeds."""
        first = self.tmp / "one.json"
        second = self.tmp / "eight.json"
        args = [str(self.clique), "--delta", "0.1", "--t-override", "7", "--seed", str(seed)]

        self.invoke(*args, "-j", "1", "-o", str(first))
        self.invoke(*args, "-j", "8", "-o", str(second))

        assert first.read_bytes() == second.read_bytes()

    def test_seed_from_environment(self) -> None:
        """Test: WISH_SEED entspricht --seed."""
        by_option = self.tmp / "option.json"
        by_env = self.tmp / "env.json"

        self.invoke(str(self.clique), "--t-override", "2", "--seed", "7", "-o", str(by_option))
        self.invoke(str(self.clique), "--t-override", "2", "-o", str(by_env), env={"WISH_SEED": "7"})

        assert by_option.read_bytes() == by_env.read_bytes()
        assert read_json(by_env)["config"]["master_seed"] == 7

    def test_budget_gives_lower_bound(self) -> None:
        """Test: Knotenbudget 2 ergibt Exit-Code 3 und lower_bound."""
        out = self.tmp / "report.json"

        result = self.invoke(
            str(self.clique), "--t-override", "2", "--budget-nodes", "2", "-o", str(out)
        )

        assert result.exit_code == 3
        report = read_json(out)
        assert report["result"]["guarantee"] == "lower_bound"
        assert report["totals"]["timeouts"] > 0

    def test_bad_model(self) -> None:
        """Test: Formatfehler ergibt Exit-Code 1."""
        bad = self.tmp / "bad.uai"
        bad.write_text("MARKOV\n1\n2\n1\n1 0\n2\n1.0 -1.0\n", encoding="utf-8")

        assert self.invoke(str(bad)).exit_code == 1

    def test_missing_file(self) -> None:
        """Test: Fehlende Datei ergibt Exit-Code 1."""
        assert self.invoke(str(self.tmp / "fehlt.uai")).exit_code == 1

    def test_invalid_delta(self) -> None:
        """Test: δ außerhalb (0, 1) ergibt Exit-Code 2."""
        assert self.invoke(str(self.pairwise), "--delta", "1.5").exit_code == 2

    def test_invalid_jobs(self) -> None:
        """Test: --jobs 0 ergibt Exit-Code 2."""
        assert self.invoke(str(self.pairwise), "--jobs", "0").exit_code == 2

    def test_tail_and_epsilon_exclusive(self) -> None:
        """Test: --tail und --epsilon zusammen ergeben Exit-Code 2."""
        result = self.invoke(str(self.pairwise), "--tail", "2", "--epsilon", "1")

        assert result.exit_code == 2

    def test_refinement(self) -> None:
        """Test: --epsilon 15 ergibt ℓ = 1."""
        out = self.tmp / "report.json"

        result = self.invoke(str(self.pairwise), "--t-override", "2", "--epsilon", "15", "-o", str(out))

        assert result.exit_code == 0
        refinement = read_json(out)["refinement"]
        assert refinement["ell"] == 1
        assert refinement["guarantee_factor"] == 16.0
        assert "wish" not in refinement

    def test_tail_option(self) -> None:
        """Test: --tail ergänzt Schätzung und exakte Zählung."""
        out = self.tmp / "report.json"

        self.invoke(str(self.pairwise), "--t-override", "3", "--tail", "3.5", "-o", str(out))

        tail = read_json(out)["tail"]
        assert tail["u"] == 3.5
        assert tail["oracle_count"] == 1
        assert tail["estimate"] >= 1

    def test_zero_weight_model_is_strict_json(self) -> None:
        """Test: Gewicht 0 erscheint als null, nicht als -Infinity."""
        zero = self.tmp / "zero.uai"
        zero.write_text(ZERO_UAI, encoding="utf-8")
        out = self.tmp / "report.json"

        result = self.invoke(str(zero), "--t-override", "2", "--seed", "3", "-o", str(out))

        assert "Infinity" not in result.stdout
        report = read_json(out)
        assert report["result"]["medians"] == [None, None, None]
        assert report["result"]["log_estimate"] is None
        assert all(row["status"] == "empty" for row in report["instances"])
        assert all(row["log_weight"] is None for row in report["instances"])

    def test_empty_instances_are_strict_json(self) -> None:
        """Test: Bericht mit unerfüllbaren Ebenen ist gültiges JSON."""
        out = self.tmp / "report.json"

        self.invoke(str(self.pairwise), "--t-override", "5", "--seed", "1", "-j", "1", "-o", str(out))

        report = read_json(out)
        for row in report["instances"]:
            if row["status"] == "empty":
                assert row["log_weight"] is None
            else:
                assert isinstance(row["log_weight"], float)


class TestOtherCommands:
    """Tests für tail, oracle, generate und version."""

    @pytest.fixture(autouse=True)
    def _models(self, tmp_path: Path, pairwise_text: str) -> None:
        self.tmp = tmp_path
        self.pairwise = tmp_path / "pairwise.uai"
        self.pairwise.write_text(pairwise_text, encoding="utf-8")

    def test_tail_command(self) -> None:
        """Test: tail liefert q, Schätzung und Orakelwert."""
        out = self.tmp / "tail.json"

        result = runner.invoke(
            app, ["tail", str(self.pairwise), "3.5", "--t-override", "3", "-o", str(out)]
        )

        assert result.exit_code == 0
        document = read_json(out)
        assert document["u"] == 3.5
        assert document["oracle_count"] == 1
        assert document["estimate"] == (0 if document["q"] is None else 2 ** document["q"])
        assert len(document["medians"]) == 3

    def test_oracle(self) -> None:
        """Test: Exakte Zustandssumme log 10."""
        out = self.tmp / "oracle.json"

        result = runner.invoke(app, ["oracle", str(self.pairwise), "-o", str(out)])

        assert result.exit_code == 0
        document = read_json(out)
        assert document["bits"] == 2
        assert document["log_z"] == pytest.approx(math.log(10.0))
        assert document["log10_z"] == pytest.approx(1.0)
        assert document["quantiles"] == pytest.approx([math.log(4.0), math.log(3.0), 0.0])

    def test_oracle_tail(self) -> None:
        """Test: G(u) über dem Maximalgewicht ist 0."""
        out = self.tmp / "oracle.json"

        runner.invoke(app, ["oracle", str(self.pairwise), "--tail", "100", "-o", str(out)])

        assert read_json(out)["tail"] == {"u": 100.0, "count": 0}

    def test_oracle_zero_weight_model(self) -> None:
        """Test: log Z = -inf wird als null ausgegeben."""
        zero = self.tmp / "zero.uai"
        zero.write_text(ZERO_UAI, encoding="utf-8")
        out = self.tmp / "oracle.json"

        result = runner.invoke(app, ["oracle", str(zero), "-o", str(out)])

        assert result.exit_code == 0
        document = read_json(out)
        assert document["log_z"] is None
        assert document["log10_z"] is None
        assert document["quantiles"] == [None, None, None]

    def test_oracle_cap(self) -> None:
        """Test: Zu großes Modell ergibt Exit-Code 2."""
        result = runner.invoke(app, ["oracle", str(self.pairwise), "--oracle-cap", "1"])

        assert result.exit_code == 2

    def test_generate_clique_reproducible(self) -> None:
        """Test: Gleicher Seed, gleiche Datei, gültiges UAI."""
        first = self.tmp / "a.uai"
        second = self.tmp / "b.uai"

        for path in (first, second):
            result = runner.invoke(
                app, ["generate", "clique", "5", "--w", "1.0", "--seed", "3", "-o", str(path)]
            )
            assert result.exit_code == 0

        assert first.read_text() == second.read_text()
        assert first.read_text() == write_uai(generate_clique_ising(5, 1.0, seed=3))
        assert parse_uai(first.read_text()).num_variables == 5

    def test_generate_grid(self) -> None:
        """Test: 1×1-Gitter."""
        out = self.tmp / "grid.uai"

        result = runner.invoke(
            app, ["generate", "grid", "1", "1", "--w", "1", "--f", "0.5", "-o", str(out)]
        )

        assert result.exit_code == 0
        graph = parse_uai(out.read_text())
        assert graph.cardinalities == (2,)

    def test_generate_invalid(self) -> None:
        """Test: Clique mit n = 1 ergibt Exit-Code 2."""
        result = runner.invoke(app, ["generate", "clique", "1", "--w", "1.0"])

        assert result.exit_code == 2

    def test_version(self) -> None:
        """Test: Versionsbefehl."""
        assert runner.invoke(app, ["version"]).exit_code == 0
