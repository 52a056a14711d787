import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from quatleft.cli import InputError, main, parse_matrix_text, to_json, write_matrix

from cases import EX41

MATRICES = Path(__file__).resolve().parent.parent / "matrices"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def test_solve_json_report():
    code, text = run("solve", MATRICES / "example41.json", "--starts", 200)
    assert code == 0
    rep = json.loads(text)
    lams = sorted(round(c["lambda"][3]) for c in rep["isolated"])
    assert lams == [-1, 1]
    assert rep["manifold"]["flag"] is False
    assert rep["config"]["n_starts"] == 200


def test_solve_is_byte_identical():
    args = ("solve", MATRICES / "example43.json", "--starts", 300, "--seed", 4)
    assert run(*args) == run(*args)


def test_solve_text_and_timing():
    code, text = run("solve", MATRICES / "example41.json", "--text", "--starts", 100)
    assert code == 0 and "isolated left eigenvalues (2)" in text
    code, text = run("solve", MATRICES / "example41.json", "--starts", 100, "--timing")
    assert "runtime_ms" in json.loads(text)


def test_solve_no_convergence_exit_code(capsys):
    code, _ = run("solve", MATRICES / "example41.json", "--starts", 1, "--max-iter", 1)
    assert code == 2
    assert "no convergence" in capsys.readouterr().err


def test_charpoly_output():
    code, text = run("charpoly", MATRICES / "example41.json")
    assert code == 0
    assert text.splitlines()[0] == "F1: -2*l0*l3 + 2*l3"
    code, text = run("charpoly", MATRICES / "scalar1.json")
    assert text.strip() == "trivial spectrum {1/2 - 3ℏ + 1/4κ}"
    code, text = run("charpoly", MATRICES / "example41.json", "--full")
    assert text.splitlines()[-1].startswith("det: ")


def test_verify_exit_codes():
    code, text = run("verify", MATRICES / "example41.json", "--lambda", "1,0,0,1")
    assert code == 0 and text.splitlines()[-1] == "accept"
    code, text = run("verify", MATRICES / "example41.json", "--lambda", "1,0,0,1/2")
    assert code == 3 and text.splitlines()[-1] == "reject"


def test_forms_listing_and_check():
    code, text = run("forms")
    assert code == 0 and len(text.splitlines()) == 48
    code, text = run("forms", "--check", "--samples", 20)
    assert code == 0
    assert "48/48 pass" in text and "conjugation identities (form 1): pass" in text


@pytest.mark.parametrize("doc,line", [
    ('{"m": 2,\n "entries": [[[1,0,0,0]]]}', 1),
    ('{"m": 1,\n "entries":\n [[[1,0,0]]]}', 3),
    ('{"entries": [[[1, 0, 0, "x"]]]}', 1),
    ('{"entries": [[[1, 0, 0, 0]]],\n\n "m": 3}', 3),
    ('{"entries": [[[1, 0, 0, 0]\n ,]]}', 2),
])
def test_input_errors_name_a_line(doc, line):
    with pytest.raises(InputError, match=f"^line {line}:"):
        parse_matrix_text(doc)


def test_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"entries": [[[1, 0, 0, 0], [0, 0, 0, 0]]]}')
    code, _ = run("solve", bad)
    assert code == 1
    assert "expected square" in capsys.readouterr().err
    assert run("solve", tmp_path / "missing.json")[0] == 1
    assert run("frobnicate")[0] == 1


def test_scalar_forms_and_round_trip():
    A = parse_matrix_text('{"entries": [[["1/3", 0.5, "-2", "1e-1"]]]}')
    assert str(A[0, 0].coeffs[0]) == "1/3" and str(A[0, 0].coeffs[3]) == "1/10"
    with pytest.raises(InputError):
        parse_matrix_text('{"entries": [[[true, 0, 0, 0]]]}')
    assert parse_matrix_text(write_matrix(EX41)) == EX41


def test_to_json_floats():
    assert to_json({"a": [0.1, 0.0, float("nan")]}) == '{\n  "a": [0.10000000000000001, 0.0, null]\n}'


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quatleft", "verify", str(MATRICES / "example41.json"),
                           "--lambda", "1,0,0,-1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().endswith("accept")
