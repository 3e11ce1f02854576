import io
import json

import pytest

from src.cli.main import build_parser, run


def _run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestBisimCommands:
    """Test the bisimulation commands."""

    def test_weakbisim_two_presentations_of_unit(self, model_files):
        code, out, _ = _run("weakbisim", model_files["unit"], model_files["unit_two"])
        assert code == 0
        assert out.strip() == "bisimilar"

    def test_bisim_prints_distinguishing_formula(self, model_files):
        code, out, _ = _run("bisim", model_files["m"], model_files["deadlock"], "--states", "s0,d")
        assert code == 1
        assert out.splitlines() == ["not bisimilar", "<D a> true"]

    def test_bisim_json(self, model_files):
        code, out, _ = _run("--json", "bisim", model_files["m"], model_files["deadlock"])
        report = json.loads(out)
        assert code == 1
        assert report["holds"] is False
        assert report["formula"] == "<D a> true"

    def test_bisim_against_generated_surrogate(self, model_files):
        code, _, _ = _run("bisim", model_files["m"], "gen:unit")
        assert code == 0

    def test_states_need_two_ids(self, model_files):
        code, _, err = _run("bisim", model_files["m"], model_files["m"], "--states", "s0")
        assert code == 2
        assert "--states" in err

    def test_strongbisim_rejects_dense(self, model_files):
        code, _, err = _run("strongbisim", model_files["unit"], model_files["unit"])
        assert code == 2
        assert "only for discrete GSTs" in err

    def test_strongbisim_discrete(self, model_files):
        code, out, _ = _run("strongbisim", model_files["point"], model_files["chain"])
        assert code == 1
        assert out.strip() == "not strongly bisimilar"

    def test_distinguish(self, model_files):
        code, out, _ = _run("distinguish", model_files["m"], "s0", model_files["m"], "s1")
        assert code == 0
        assert out.strip() == "<D a> true"

    def test_distinguish_bisimilar_pair(self):
        code, out, _ = _run("distinguish", "gen:unit", "r", "gen:unit", "e1.int")
        assert code == 1
        assert "bisimilar" in out


class TestCheck:
    """Test the check command and its error reporting."""

    def test_formula_false_on_unit(self, model_files):
        code, out, _ = _run("check", model_files["unit"], "<P a> true")
        assert code == 1
        assert out.strip() == "false"

    def test_formula_true_on_unit(self, model_files):
        code, out, _ = _run("check", model_files["unit"], "<D a> <D a> true")
        assert code == 0
        assert out.strip() == "true"

    def test_kripke_state(self, model_files):
        code, _, _ = _run("check", model_files["m"], "<D a> true", "--state", "s1")
        assert code == 1

    def test_formula_syntax_error(self, model_files):
        code, out, err = _run("check", model_files["unit"], "<Q a> true")
        assert code == 2
        assert out == ""
        assert err.startswith("error: position 1:")

    def test_formula_syntax_error_json(self, model_files):
        code, _, err = _run("--json", "check", model_files["unit"], "<Q a> true")
        assert code == 2
        assert json.loads(err)["position"] == 1

    def test_model_syntax_error(self, tmp_path):
        path = tmp_path / "bad.kf"
        path.write_text("kripke k {\n  labels a;\n  state s;\n  trans s -> s [D b];\n}\n")
        code, _, err = _run("check", str(path), "true")
        assert code == 2
        assert "line 4" in err

    def test_missing_file(self, tmp_path):
        code, _, err = _run("check", str(tmp_path / "nope.kf"), "true")
        assert code == 2
        assert err.startswith("error:")


class TestModelCommands:
    """Test commands that print or export models."""

    def test_surrogate_prints_model(self, model_files):
        code, out, _ = _run("surrogate", model_files["unit"])
        assert code == 0
        assert "trans r -> e1.int [D a];" in out
        assert "state r init;" in out

    def test_surrogate_writes_files(self, model_files, tmp_path):
        target, dot = tmp_path / "s.kf", tmp_path / "s.dot"
        code, out, _ = _run("surrogate", model_files["denseattach"], "--out", str(target), "--dot", str(dot))
        assert code == 0
        assert out.startswith("wrote ")
        assert "e1.att0/u" in target.read_text()
        assert dot.read_text().startswith("digraph")

    def test_minimize(self, model_files):
        code, out, _ = _run("minimize", model_files["unit"])
        assert code == 0
        assert out.splitlines()[:2] == ["B0: r, e1.int", "B1: t"]

    def test_minimize_json(self, model_files):
        code, out, _ = _run("--json", "minimize", model_files["m"])
        assert code == 0
        assert json.loads(out)["blocks"] == [["s0"], ["s1"]]

    def test_validate(self, model_files, tmp_path):
        assert _run("validate", model_files["denseattach"])[0] == 0
        path = tmp_path / "bad.gst"
        path.write_text(
            "gst bad {\n  labels a, b;\n  root r;\n  edge e1: r -> t [point a];\n"
            "  attach e1 {\n    edge f1: @ -> u [point b];\n  }\n}\n"
        )
        code, out, _ = _run("validate", str(path))
        assert code == 1
        assert "attach-on-point" in out

    def test_export_dot(self, model_files):
        code, out, _ = _run("export-dot", model_files["m"])
        assert code == 0
        assert out.startswith("digraph")

    def test_schemata(self, model_files):
        assert _run("schemata", model_files["m"])[0] == 0
        code, out, _ = _run("schemata", model_files["no_intermediate"])
        assert code == 1
        assert "weak density: fails" in out


class TestGeneratorCommands:
    """Test commands on the built-in infinite structures."""

    def test_stratified_fig3(self):
        code, out, _ = _run("stratified", "gen:fig3", "u", "v", "--depth", "4")
        assert code == 0
        assert out.strip() == "agree up to depth 4 of 4"

    def test_stratified_gx(self):
        code, out, _ = _run("stratified", "gen:gx", "A2", "A3")
        assert code == 1
        assert "agree up to depth 2" in out

    def test_imagefinite_gx(self):
        code, out, _ = _run("imagefinite", "gen:gx", "--depth", "4")
        assert code == 1
        assert "witness [D a]" in out

    def test_imagefinite_gst(self, model_files):
        code, out, _ = _run("imagefinite", model_files["unit"])
        assert code == 0
        assert out.startswith("image-finite")

    def test_schemata_on_truncation(self):
        code, _, _ = _run("schemata", "gen:gx", "--depth", "4", "--width", "4")
        assert code == 0

    def test_unknown_generator(self):
        code, _, err = _run("stratified", "gen:nope", "a", "b")
        assert code == 2
        assert "unknown generator" in err

    def test_generator_is_not_a_gst(self):
        code, _, _ = _run("validate", "gen:fig3")
        assert code == 2

    def test_negative_stratified_depth(self, model_files):
        code, _, err = _run("stratified", model_files["m"], "s0", "s1", "--depth", "-1")
        assert code == 2
        assert "must be non-negative" in err

    def test_zero_truncation_width(self):
        code, _, err = _run("minimize", "gen:fig3", "--width", "0")
        assert code == 2
        assert "must be positive" in err

    def test_negative_truncation_depth(self):
        code, _, err = _run("schemata", "gen:gx", "--depth", "-2")
        assert code == 2
        assert "must be non-negative" in err


class TestUsage:
    """Test argument handling and exit codes."""

    def test_no_command(self):
        assert _run()[0] == 2

    def test_unknown_command(self):
        code, _, err = _run("frobnicate")
        assert code == 2
        assert "error" in err

    def test_version(self):
        code, out, _ = _run("--version")
        assert code == 0
        assert out.startswith("gstlogic ")

    def test_parser_lists_commands(self):
        help_text = build_parser().format_help()
        for command in ("surrogate", "minimize", "bisim", "weakbisim", "check", "stratified"):
            assert command in help_text

    def test_main_exit_code(self, model_files, monkeypatch):
        from src.cli import main as cli

        monkeypatch.setattr("sys.argv", ["gstlogic", "check", model_files["unit"], "<D a> true"])
        with pytest.raises(SystemExit) as exc:
            cli.main()
        assert exc.value.code == 0
