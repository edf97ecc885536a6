"""Tests for the ``alia`` command line."""

import json

import pytest

from alia.cli import (
    CACHE_ENV,
    EXIT_CONFIG,
    EXIT_PRECONDITION,
    RunConfig,
    config_hash,
    main,
    run_command,
)
from alia.errors import ConfigError
from alia.presets import preset_document


def run_json(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


class TestCommands:
    """Each command on a shipped preset."""

    def test_decompose_at_fixed_point(self, capsys):
        """h, f and e sit in exponents 0, 2 and 3 at the rotation centre."""
        doc = run_json(capsys, "--config", "preset:sl2-z5", "--command", "decompose", "--point", "0")
        assert doc["nu0"] == 5
        assert [b["exponent"] for b in doc["blocks"]] == [0, 2, 3]
        assert [b["dim"] for b in doc["blocks"]] == [1, 1, 1]

    def test_quotient(self, capsys):
        """A / I_{0,3} is two-dimensional and certified."""
        doc = run_json(capsys, "--config", "preset:sl2-z5", "--command", "quotient", "--m", "3")
        assert doc["config"] == "sl2-z5"
        assert doc["point"] == "0"
        assert doc["quotient"]["dim"] == 2
        assert doc["verified"] is True

    @pytest.mark.parametrize("preset,m,dim", [("sl3-d6-b", 1, 4), ("sl3-d6-c", 2, 8)])
    def test_quotient_at_involution_points(self, capsys, preset, m, dim):
        """Low truncations that are not yet bracket-closed are grown, not rejected."""
        doc = run_json(capsys, "--config", f"preset:{preset}", "--command", "quotient", "--m", str(m))
        assert doc["quotient"]["dim"] == dim
        assert doc["verified"] is True

    def test_idealchain(self, capsys):
        """The chain at 0 matches the invariant degrees."""
        doc = run_json(capsys, "--config", "preset:sl2-z5", "--command", "idealchain")
        assert [s["codim"] for s in doc["steps"]] == [1, 1, 2, 3]
        assert doc["degree"] == 13

    def test_kac_table(self, capsys):
        """The table form names the normalizing word."""
        code = main(["--config", "preset:sl3-d6-a", "--command", "kac", "--format", "table"])
        assert code == 0
        assert "σ1σ0" in capsys.readouterr().out

    def test_kac_dot(self, capsys):
        """Graphviz output for the carry graph."""
        assert main(["--config", "preset:sl3-d6-c", "--command", "kac", "--format", "dot"]) == 0
        assert capsys.readouterr().out.startswith("graph")

    def test_wildness(self, capsys):
        """The first wild quotient of sl2-z5 at 0 is n = 3."""
        doc = run_json(capsys, "--config", "preset:sl2-z5", "--command", "wildness", "--nmax", "4")
        assert doc["first_wild"] == 3
        assert doc["monotone"] is True

    def test_interpolate(self, capsys):
        """Values 0 and 1 at the points 0 and 1."""
        doc = run_json(capsys, "--config", "preset:sl2-trivial", "--command", "interpolate")
        assert doc["m"] == 0
        assert [j["jet"] for j in doc["jets"]] == [["0"], ["1"]]

    def test_out_file(self, tmp_path, capsys):
        """--out writes the output instead of printing it."""
        target = tmp_path / "chain.json"
        code = main([
            "--config", "preset:sl2-z5", "--command", "idealchain", "--m", "2", "--out", str(target),
        ])
        assert code == 0
        assert capsys.readouterr().out == ""
        assert len(json.loads(target.read_text("utf-8"))["steps"]) == 2


class TestExitCodes:
    """Errors map to documented exit codes."""

    def test_unknown_preset(self, capsys):
        """Unknown presets are configuration errors."""
        assert main(["--config", "preset:nope", "--command", "kac"]) == EXIT_CONFIG
        assert "alia: error:" in capsys.readouterr().err

    def test_quotient_needs_m(self):
        """The quotient command requires a jet order."""
        assert main(["--config", "preset:sl2-z5", "--command", "quotient"]) == EXIT_CONFIG

    def test_format_not_offered(self):
        """Only kac renders to Graphviz."""
        assert main(["--config", "preset:sl2-z5", "--command", "decompose", "--format", "dot"]) == EXIT_CONFIG

    def test_bad_point(self):
        """Unparseable points are reported against --point."""
        code = main(["--config", "preset:sl2-z5", "--command", "idealchain", "--point", "zeta5^"])
        assert code == EXIT_CONFIG

    def test_point_in_pole_set(self, capsys):
        """Jets at a pole violate a precondition."""
        code = main(["--config", "preset:sl2-z5", "--command", "quotient", "--m", "2", "--point", "inf"])
        assert code == EXIT_PRECONDITION
        assert "alia: error:" in capsys.readouterr().err

    def test_missing_required_flag(self):
        """argparse rejects calls without --config."""
        with pytest.raises(SystemExit):
            main(["--command", "kac"])

    def test_validation_before_loading(self):
        """Parameter ranges are checked before the config is read."""
        run = RunConfig(command="wildness", config="missing.json", nmax=0)
        with pytest.raises(ConfigError) as info:
            run_command(run)
        assert info.value.location == "--nmax"


class TestCache:
    """Invariant bases are cached under ALIA_CACHE_DIR."""

    def test_cache_round_trip(self, tmp_path, monkeypatch, capsys):
        """A second run reads the cached basis and gives the same answer."""
        monkeypatch.setenv(CACHE_ENV, str(tmp_path))
        argv = ["--config", "preset:sl2-z5", "--command", "idealchain", "--degree", "8"]
        first = run_json(capsys, *argv)
        cached = list(tmp_path.glob("*-D8.json"))
        assert len(cached) == 1
        assert cached[0].name.startswith(config_hash(preset_document("sl2-z5")))
        assert run_json(capsys, *argv) == first

    def test_unreadable_cache_is_ignored(self, tmp_path, monkeypatch, capsys):
        """Corrupt cache files fall back to recomputation."""
        monkeypatch.setenv(CACHE_ENV, str(tmp_path))
        name = f"{config_hash(preset_document('sl2-z5'))}-D8.json"
        (tmp_path / name).write_text("{}", "utf-8")
        doc = run_json(capsys, "--config", "preset:sl2-z5", "--command", "idealchain", "--degree", "8")
        assert [s["codim"] for s in doc["steps"]] == [1, 1, 2, 3]
