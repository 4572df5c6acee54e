import io
import json
from pathlib import Path

import pytest

from psicalc.cli import (
    EXIT_CONTEXT,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_UNCERTIFIED,
    CLIInterface,
    parse_floor_option,
)

pytestmark = pytest.mark.integration

CONTEXTS = Path(__file__).resolve().parent.parent / "contexts"


def run(*args):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = CLIInterface(stdout=stdout, stderr=stderr).run(list(args))
    text = stdout.getvalue()
    return code, json.loads(text) if text.strip() else None, stderr.getvalue()


class TestFloorOption:
    def test_forms(self):
        assert parse_floor_option(None) is None
        assert parse_floor_option("exact") == "exact"
        assert parse_floor_option("-6") == (-6, -6)
        assert parse_floor_option("-6,-4") == (-6, -4)

    def test_bad_floor_is_a_usage_error(self):
        code, document, stderr = run("mul", "--ctx", "torus4", "--floor", "bogus", "xi1", "xi2")
        assert code == EXIT_PARSE
        assert document["error"] == "usage"
        assert "floor" in document["message"]
        assert stderr.startswith("usage:")


class TestSymbolCommands:
    def test_exact_product(self):
        code, document, _ = run("mul", "--ctx", "circle", "--floor", "exact", "xi", "e[1]")
        assert code == EXIT_OK
        assert document["exact"] is True
        assert document["terms"] == [
            {"order": 0, "coefficient": {"1": "1"}},
            {"order": 1, "coefficient": {"1": "1"}},
        ]

    def test_truncated_product(self):
        code, document, _ = run("mul", "--ctx", "circle", "--floor", "-3", "xi^-1", "e[1]")
        assert code == EXIT_OK
        assert document["floor"] == -3
        assert [(t["order"], t["coefficient"]) for t in document["terms"]] == [
            (-3, {"1": "1"}),
            (-2, {"1": "-1"}),
            (-1, {"1": "1"}),
        ]

    def test_default_floor_comes_from_config(self):
        code, document, _ = run("mul", "--ctx", "circle", "xi^-1", "e[1]")
        assert code == EXIT_OK
        assert document["floor"] == -8

    def test_commutator(self):
        code, document, _ = run("commutator", "--ctx", "torus4", "--floor", "exact", "xi1", "e[1,0]")
        assert code == EXIT_OK
        assert document["dimension"] == 2
        assert document["terms"] == [
            {"order": [0, 0], "coefficient": {label: {"1,0": "1"} for label in ("11", "12", "21", "22")}},
        ]

    def test_deep_floor_on_the_twisted_context(self):
        code, document, _ = run("mul", "--ctx", "qtorus", "--floor=-1200,-1", "xi1^-1", "U")
        assert code == EXIT_OK
        assert len(document["terms"]) == 1200
        assert min(term["order"][0] for term in document["terms"]) == -1200

    def test_uncertified(self):
        code, document, _ = run("mul", "--ctx", "circle", "--floor", "exact", "xi^-1", "e[1]")
        assert code == EXIT_UNCERTIFIED
        assert document["error"] == "uncertified"

    def test_eval_with_a_context_file(self):
        code, document, _ = run(
            "eval", "--ctx", str(CONTEXTS / "torus4.json"), 'Res([a*xi1^2*xi2^-1, b*xi1^-3], t="11")'
        )
        assert code == EXIT_OK
        assert document == {"value": "0"}


class TestResidues:
    def test_single_trace(self):
        code, document, _ = run("res", "--ctx", "torus4", "--trace", "11", "unit*xi1^-1*xi2^-1")
        assert code == EXIT_OK
        assert document == {"value": "1"}

    def test_every_quadrant(self):
        code, document, _ = run("res", "--ctx", "torus4", "xi1^-1*xi2^-1")
        assert code == EXIT_OK
        assert document == {"values": {"tau_11": "1", "tau_12": "1", "tau_21": "1", "tau_22": "1"}}

    def test_one_dimensional_table(self):
        code, document, _ = run("res", "--ctx", "circle2", "e[0]@(1)*xi^-1")
        assert code == EXIT_OK
        assert document == {"values": {"tau_1": "1", "tau_2": "0"}}

    def test_twisted_residue(self):
        code, document, _ = run("res", "--ctx", str(CONTEXTS / "qtorus1d.json"), "--sigma", "U*V*xi^-1")
        assert code == EXIT_OK
        assert document == {"value": "1"}

    def test_wrong_twist_is_a_context_error(self):
        code, document, _ = run("res", "--ctx", "qtorus", "--trace", "W1", "xi1^-1*xi2^-1")
        assert code == EXIT_CONTEXT
        assert document["error"] == "hypothesis"
        assert document["report"]["success"] is True

    def test_plain_residue_on_a_twisted_context(self):
        code, document, _ = run("res", "--ctx", str(CONTEXTS / "qtorus1d.json"), "U*V*xi^-1")
        assert code == EXIT_CONTEXT
        assert document["error"] == "hypothesis"

    def test_sigma_flag_needs_one_dimension(self):
        code, document, _ = run("res", "--ctx", "torus4", "--sigma", "xi1^-1*xi2^-1")
        assert code == EXIT_CONTEXT
        assert document["error"] == "type"


class TestErrors:
    def test_parse_error(self):
        code, document, _ = run("eval", "--ctx", "circle", "xi^(2")
        assert code == EXIT_PARSE
        assert document["error"] == "parse"
        assert document["offset"] == 5
        assert document["expected"] == [")"]

    def test_type_error(self):
        code, document, _ = run("eval", "--ctx", "circle", "xi2")
        assert code == EXIT_CONTEXT
        assert document["error"] == "type"

    def test_missing_context_file(self, tmp_path):
        code, document, _ = run("eval", "--ctx", str(tmp_path / "nowhere.json"), "xi")
        assert code == EXIT_CONTEXT
        assert document["error"] == "context_file"

    def test_pretty_failure_goes_to_stderr(self):
        code, document, stderr = run("--pretty", "eval", "--ctx", "circle", "xi2")
        assert code == EXIT_CONTEXT
        assert document["error"] == "type"
        assert "type" in stderr

    def test_missing_command(self):
        code, document, _ = run()
        assert code == EXIT_PARSE
        assert document["error"] == "usage"

    def test_unknown_option(self):
        code, document, _ = run("res", "--ctx", "torus4", "--colour", "xi1")
        assert code == EXIT_PARSE
        assert document["error"] == "usage"

    def test_unexpected_failures_still_emit_json(self, monkeypatch):
        def explode(self, parsed_args):
            raise RecursionError("maximum recursion depth exceeded")

        monkeypatch.setattr(CLIInterface, "_handle_principal", explode)
        code, document, _ = run("principal")
        assert code == EXIT_FAILURE
        assert document == {"error": "RecursionError", "message": "maximum recursion depth exceeded"}

    def test_output_is_compact_and_deterministic(self):
        outputs = []
        for _ in range(2):
            stdout = io.StringIO()
            CLIInterface(stdout=stdout, stderr=io.StringIO()).run(
                ["res", "--ctx", "torus4", "--trace", "11", "unit*xi1^-1*xi2^-1"]
            )
            outputs.append(stdout.getvalue())
        assert outputs[0] == outputs[1] == '{"value":"1"}\n'


class TestCheck:
    def test_report(self):
        code, document, _ = run("check", "--ctx", str(CONTEXTS / "qtorus1d.json"))
        assert code == EXIT_OK
        assert document["success"] is True
        commute = [r for r in document["results"] if r["hypothesis"].startswith("delta_sigma_commute")]
        assert commute and not commute[0]["passed"] and not commute[0]["required"]
        assert "witness" in commute[0]

    def test_degree_bound_override(self):
        code, document, _ = run("check", "--ctx", "circle", "--degree-bound", "2")
        assert code == EXIT_OK
        assert document["degree_bound"] == 2

    def test_pretty_rendering(self):
        code, _, stderr = run("--pretty", "check", "--ctx", "circle")
        assert code == EXIT_OK
        assert "ALL HYPOTHESES HOLD" in stderr


class TestApply:
    def test_hilbert_symbol(self):
        code, document, _ = run(
            "apply", "--ctx", "circle2", "e[0]@(1) - e[0]@(2)", "--u", '{"3": "1", "-2": "1/2", "0": "5"}'
        )
        assert code == EXIT_OK
        assert document == {
            "u": {"-2": "1/2", "0": "5", "3": "1"},
            "result": {"-2": "-1/2", "3": "1"},
            "text": "-1/2*e[-2]+e[3]",
        }

    def test_needs_a_fourier_context(self):
        code, document, _ = run("apply", "--ctx", "qtorus", "xi1", "--u", "{}")
        assert code == EXIT_CONTEXT

    def test_bad_u(self):
        code, document, _ = run("apply", "--ctx", "circle", "xi", "--u", "[1, 2]")
        assert code == EXIT_FAILURE
        assert "--u" in document["message"]


class TestPrincipal:
    def test_symmetric_data(self):
        code, document, _ = run("principal", "--b0", "1", "--b12", "1")
        assert code == EXIT_OK
        assert document["components"] == {"11": "2", "12": "0", "21": "0", "22": "2"}
        assert document["coefficients"]["11"] == {"0,0": "2"}
        assert document["coefficients"]["12"] == {}

    def test_x_dependent_data(self):
        code, document, _ = run("principal", "--b1", "e[1,0]")
        assert code == EXIT_OK
        assert document["components"] == {"11": "e[1,0]", "12": "e[1,0]", "21": "-e[1,0]", "22": "-e[1,0]"}


class TestInitConfig:
    def test_writes_and_refuses_to_clobber(self, tmp_path):
        target = tmp_path / "starter.json"
        code, document, _ = run("init-config", str(target))
        assert code == EXIT_OK
        assert document == {"written": str(target)}
        code, document, _ = run("init-config", str(target))
        assert code == EXIT_FAILURE
        assert "--force" in document["message"]
        code, _, _ = run("init-config", str(target), "--force")
        assert code == EXIT_OK

    def test_json_indent_from_config(self, tmp_path):
        config = tmp_path / "indent.json"
        config.write_text(json.dumps({"output": {"json_indent": 2}}), encoding="utf-8")
        stdout = io.StringIO()
        CLIInterface(stdout=stdout, stderr=io.StringIO()).run(["--config", str(config), "principal"])
        assert stdout.getvalue().startswith("{\n  ")
