#!/usr/bin/env python3
"""
Tests for lib/cli.py

Subcommands run in-process through main(argv), with documents in tmp_path.
"""

import json

import pytest

from lib.cli import build_parser, document_kind, main, settings_for
from lib.settings import Settings

PENCIL = {"name": "pencil_A1", "lines": [["1", "0", "0"], ["0", "1", "0"], ["1", "-1", "0"], ["1", "1", "0"]]}
CROSSING = {"name": "two_crossing", "lines": [["1", "0", "0"], ["0", "1", "0"]]}


@pytest.fixture
def write_doc(tmp_path):
    def write(data, name="doc.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return write


class TestDocumentKind:
    """Test input documents are recognised by their keys."""

    @pytest.mark.parametrize(
        "data,kind",
        [
            ({"lines": []}, "arrangement"),
            ({"domain": "disk", "curves": []}, "divide"),
            ({"loops": []}, "link"),
            ({"crossings": [], "components": []}, "diagram"),
        ],
    )
    def test_kinds(self, data, kind):
        """Test each document kind."""
        assert document_kind(data) == kind

    def test_unknown(self):
        """Test an unrecognised document."""
        with pytest.raises(ValueError):
            document_kind({"name": "x"})


class TestParser:
    """Test argument parsing and settings overrides."""

    def test_settings_override(self):
        """Test --resolution and --bracket-cap reach the settings."""
        args = build_parser().parse_args(["lift", "in.json", "--resolution", "32", "--bracket-cap", "12"])
        base = Settings(otel_enabled=False)
        updated = settings_for(args, base)

        assert updated.lift_resolution == 32
        assert updated.bracket_cap == 12
        assert base.lift_resolution == 64

    def test_no_override_keeps_base(self):
        """Test settings are untouched without overrides."""
        args = build_parser().parse_args(["chambers", "in.json"])
        base = Settings()
        assert settings_for(args, base) is base

    def test_full_and_reduced_exclusive(self):
        """Test --full and --reduced cannot be combined."""
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["kirby", "in.json", "--full", "--reduced"])
        assert exc_info.value.code == 2

    def test_command_required(self):
        """Test a subcommand is required."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestCommands:
    """Test subcommands end to end."""

    def test_chambers_text(self, write_doc, capsys):
        """Test the chamber summary line for four concurrent lines."""
        assert main(["chambers", write_doc(PENCIL)]) == 0
        assert capsys.readouterr().out == "chambers=8, ch_F=3\n"

    def test_chambers_json(self, write_doc, capsys):
        """Test the JSON chamber listing."""
        assert main(["chambers", write_doc(PENCIL), "--json"]) == 0
        data = json.loads(capsys.readouterr().out)

        assert len(data["chambers"]) == 8
        assert len(data["fibers"]) == 3
        assert data["chi"] == 0

    def test_normalize_to_file(self, write_doc, tmp_path):
        """Test -o writes the normalized arrangement."""
        out = tmp_path / "normalized.json"
        assert main(["normalize", write_doc(CROSSING), "-o", str(out)]) == 0

        data = json.loads(out.read_text())
        assert data["name"] == "two_crossing"
        assert len(data["lines"]) == 2

    def test_kirby_then_diagram(self, write_doc, tmp_path, capsys):
        """Test a divide document feeds the diagram command."""
        divide_path = tmp_path / "divide.json"
        assert main(["kirby", write_doc(CROSSING), "-o", str(divide_path)]) == 0
        labels = [c["label"] for c in json.loads(divide_path.read_text())["curves"]]
        assert labels == ["dotted:1", "dotted:2", "attach:1", "attach:1'"]

        assert main(["diagram", str(divide_path), "--pd"]) == 0
        assert capsys.readouterr().out.startswith("# X[i,j,k,l]")

    def test_kirby_without_companions(self, write_doc, capsys):
        """Test --no-companions drops the pushoffs."""
        assert main(["kirby", write_doc(CROSSING), "--no-companions"]) == 0
        labels = [c["label"] for c in json.loads(capsys.readouterr().out)["curves"]]
        assert labels == ["dotted:1", "dotted:2", "attach:1"]

    def test_invariants_include_homology(self, write_doc, capsys):
        """Test the report of an arrangement carries framings and homology."""
        assert main(["invariants", write_doc(CROSSING)]) == 0
        data = json.loads(capsys.readouterr().out)

        assert data["framings"] == {"attach:1": 0}
        assert data["homology"]["H1"] == {"freeRank": 2, "torsion": []}

    def test_render_to_file(self, write_doc, tmp_path):
        """Test the SVG of a Kirby divide."""
        out = tmp_path / "kirby.svg"
        assert main(["render", write_doc(CROSSING), "-o", str(out), "--size", "400"]) == 0
        assert out.read_text().startswith("<svg")

    def test_selftest_quick(self, capsys):
        """Test one quick corpus row."""
        assert main(["selftest", "one_line", "--quick"]) == 0
        assert capsys.readouterr().out.startswith("one_line: n=1 PASS")


class TestExitStatus:
    """Test failures map onto exit statuses."""

    def test_degenerate_line(self, write_doc, capsys):
        """Test bad input exits 2 and prints the error payload with --json."""
        status = main(["chambers", write_doc({"lines": [["0", "0", "1"]]}), "--json"])
        payload = json.loads(capsys.readouterr().out)

        assert status == 2
        assert payload["type"] == "input_error"
        assert payload["error_code"] == "DegenerateLine"

    def test_not_json(self, write_doc):
        """Test a document that is not JSON."""
        assert main(["normalize", write_doc("lines: none")]) == 2

    def test_missing_file(self, tmp_path):
        """Test an unreadable path."""
        assert main(["normalize", str(tmp_path / "absent.json")]) == 2

    def test_wrong_document_kind(self, write_doc):
        """Test an arrangement command given a link document."""
        assert main(["chambers", write_doc({"loops": [], "provenance": "x"})]) == 2
