import json
import subprocess
import sys

import pytest

from posgeom.algebra import parse_poly
from posgeom.cli import main
from posgeom.forms import parse_form

from conftest import FIXTURES


def run(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def fx(name):
    return FIXTURES / f"{name}.json"


def test_canonical_pentagon(capsys):
    code, out, _ = run(capsys, "canonical", fx("pentagon"), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["numerator"] == "5 - 3*y1 + 3*y2 - y1*y2"
    assert len(data["denominator_factors"]) == 5


def test_amplitude_names(capsys):
    code, out, _ = run(capsys, "amplitude", fx("pentagon"), "--names", "x13,x14,x24,x25,x35")
    assert code == 0
    assert out == "1/(x13*x14) + 1/(x13*x35) + 1/(x14*x24) + 1/(x24*x25) + 1/(x25*x35)"


def test_empty_polytope_exit(capsys):
    code, out, err = run(capsys, "vertices", fx("empty"))
    assert code == 3
    assert "Empty" in err and out == ""
    code, _, err = run(capsys, "vertices", fx("unbounded"))
    assert code == 3 and "Unbounded" in err


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "vertices", bad)[0] == 2
    assert run(capsys, "vertices", tmp_path / "missing.json")[0] == 2
    bad.write_text('{"U": [[1, 0]]}')
    assert run(capsys, "vertices", bad)[0] == 2


def test_triangle_latex(capsys):
    code, out, _ = run(capsys, "canonical", fx("triangle"), "--format", "latex")
    assert code == 0
    assert " ".join(out.split()) == "\\[ \\frac{1}{xy(1-x-y)}\\, dx \\wedge dy \\]"


def test_json_numbers_are_strings(capsys):
    code, out, _ = run(capsys, "dualvol", fx("pentagon"), "--at", "0,0", "--json")
    assert code == 0
    assert json.loads(out) == {"dual_volume": "5"}
    code, out, _ = run(capsys, "vertices", fx("pentagon"), "--json")
    assert all(isinstance(c, str) for v in json.loads(out)["vertices"] for c in v)


def test_universal_adjoint_text(capsys):
    code, out, _ = run(capsys, "adjoint", fx("pentagon"), "--universal")
    assert code == 0
    assert len(parse_poly(out)) == 5


def test_adjoint_variants(capsys):
    _, warren, _ = run(capsys, "adjoint", fx("pentagon"))
    _, interp, _ = run(capsys, "adjoint", fx("pentagon"), "--interpolate")
    assert warren == "5*y0^2 - 3*y0*y1 + 3*y0*y2 - y1*y2"
    assert parse_poly(interp).factor_key() == parse_poly(warren).factor_key()


def test_residue_and_verify(capsys):
    code, out, _ = run(capsys, "residue", fx("pentagon"), "--facet", "1")
    assert code == 0 and parse_form(out) == parse_form("1/((1+y1)*(-y1)) dy1")
    assert run(capsys, "residue", fx("pentagon"), "--facet", "9")[0] == 3
    code, out, _ = run(capsys, "verify", fx("associahedron3d"))
    assert code == 0 and out.endswith("verification: pass")


def test_canonical_verify_and_triangulate(capsys):
    code, out, _ = run(capsys, "canonical", fx("pyramid"), "--triangulate", "--verify")
    assert code == 0
    assert out.splitlines()[-1] == "verification: pass"


def test_polypol_commands(capsys):
    code, out, _ = run(capsys, "polypol-adjoint", fx("pizza"))
    assert code == 0 and out.splitlines()[-1] == "x + y + z"
    code, out, _ = run(capsys, "polypol-canonical", fx("pizza"), "--verify", "--json")
    data = json.loads(out)
    assert data["alpha"] == "1" and data["verification"]["passed"]
    assert parse_form(data["form"]) == parse_form("(1+x+y)/(x*y*(1-x^2-y^2)) dx^dy")
    assert run(capsys, "polypol-adjoint", fx("elliptic"))[0] == 3
    assert run(capsys, "polypol-adjoint", fx("tangent"))[0] == 3


def test_chart_matrix(capsys):
    code, out, _ = run(capsys, "polypol-canonical", fx("pizza"),
                       "--chart-matrix", "1,1,0,0,1,0,1,0,2", "--verify")
    assert code == 0
    assert run(capsys, "polypol-canonical", fx("pizza"), "--chart-matrix", "1,2,3")[0] == 2


def test_deterministic(capsys):
    first = run(capsys, "canonical", fx("associahedron3d"), "--json")
    second = run(capsys, "canonical", fx("associahedron3d"), "--json")
    assert first == second


@pytest.mark.parametrize("name", ["triangle", "pentagon", "quadrilateral", "associahedron3d"])
def test_text_roundtrip(capsys, name):
    code, out, _ = run(capsys, "canonical", fx(name))
    f = parse_form(out)
    assert parse_form(f.to_text()) == f
    assert f.to_text() == out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "posgeom.cli", "vertices", str(fx("triangle"))],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.split("\n")[:3] == ["(0, 0)", "(0, 1)", "(1, 0)"]
