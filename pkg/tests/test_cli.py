from __future__ import annotations

import io
import json

import jsonschema
import pytest

from hfsign import cli


def _run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), stdout=out)
    return code, out.getvalue()


def _json(*argv):
    code, text = _run("--format", "json", *argv)
    return code, json.loads(text)


def test_counts_text():
    code, text = _run("counts", "--n", "2")
    assert code == 0
    assert text.split() == ["generators", "8", "bigons", "32", "rectangles", "32"]


def test_dimension_n1():
    assert _run("dimension", "--n", "1") == (0, "1\n")


def test_homology_from_file(tmp_path):
    path = tmp_path / "s3_grid2.json"
    path.write_text(json.dumps({"type": "grid", "n": 2, "O": [1, 2]}))
    code, data = _json("homology", "--diagram", str(path))
    assert code == 0
    assert (data["betti"], data["torsion"]) == (2, [])


@pytest.mark.parametrize("argv", [
    ("counts", "--n", "3"),
    ("solve", "--n", "3"),
    ("solve", "--n", "2", "--engine", "global", "--seed", "4"),
    ("dimension", "--n", "2"),
    ("sign-of", "--flow", '{"kind":"bigon","start":{"sigma":[1],"epsilon":[1]},'
                          '"i":1,"o_alpha":1,"o_beta":1}'),
    ("verify", "--n", "2"),
    ("verify", "--n", "3", "--twist", "--swapped"),
    ("verify", "--n", "4", "--sample", "30", "--seed", "9"),
    ("gauge-compare", "--n", "2"),
    ("homology", "--named", "unknot", "--b-stab", "1"),
    ("homology", "--named", "unknot", "--coefficients", "f2"),
    ("homology", "--named", "unknot", "--coefficients", "q"),
    ("stabilize", "--named", "trefoil", "--times", "2"),
    ("invariance", "--named", "unknot", "--trials", "2"),
    ("calibrate", "--powers", "2"),
])
def test_json_outputs_validate_and_repeat(argv):
    code, data = _json(*argv)
    assert code == 0
    jsonschema.validate(data, cli.OUTPUT_SCHEMAS[argv[0]])
    assert _run("--format", "json", *argv) == _run("--format", "json", *argv)


def test_verify_exit_code_tracks_violations():
    code, data = _json("verify", "--n", "2", "--twist")
    assert code == 1 and data["violations"]
    code, data = _json("verify", "--n", "2", "--twist", "--swapped")
    assert code == 0 and not data["violations"]


@pytest.mark.parametrize("argv", [
    ("counts", "--n", "40"),
    ("verify", "--n", "2", "--families", "nope"),
    ("sign-of", "--flow", "{not json"),
    ("sign-of", "--flow", '{"kind":"bigon","start":{"sigma":[1],"epsilon":[1]},'
                          '"i":1,"o_alpha":1,"o_beta":-1}'),
    ("homology",),
    ("homology", "--diagram", "/nonexistent.json"),
    ("invariance", "--named", "unknot", "--trials", "0"),
    ("solve", "--n", "4", "--engine", "global"),
])
def test_input_errors(argv, capsys):
    assert cli.run(list(argv)) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and "hint:" in err


def test_parse_error_exit_code():
    assert cli.run(["frobnicate"]) == 2


def test_output_file(tmp_path):
    path = tmp_path / "r.json"
    code, text = _run("--format", "json", "--output", str(path), "counts", "--n", "1")
    assert code == 0 and text == ""
    assert json.loads(path.read_text())["generators"] == 2
