import json

import pytest

from conftest import fixture_path
from moridream.cli import run


def cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_show_and_pic(capsys):
    assert cli(capsys, "show", fixture_path("fourfold")) == (0, "MDS(8, 1, 4, [3, [2]])", "")
    code, out, _ = cli(capsys, "pic", fixture_path("fourfold"))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "AG(3, [])" and lines[-1] == "Cl/Pic: AG(0, [2, 12, 12, 24])"


def test_chambers_and_flags(capsys):
    assert cli(capsys, "chambers", fixture_path("fourfold"))[1] == "FAN(3, 0, [0, 0, 37])"
    assert cli(capsys, "chambers", "--mov", fixture_path("quadric"))[1] == "FAN(2, 0, [0, 2])"
    assert cli(capsys, "smooth", fixture_path("e6a2_surface"))[1] == "false"
    assert cli(capsys, "fano", fixture_path("fourfold"))[1] == "true"
    assert cli(capsys, "gorenstein", fixture_path("fourfold"))[1] == "4"
    assert cli(capsys, "cones", fixture_path("fourfold"), "sample")[1].splitlines()[0] == "CONE(3, 3, 0, 8, 8)"


def test_sing_and_localcl(capsys):
    assert cli(capsys, "sing", fixture_path("e6a2_surface"))[1] == "[{1}, {4}]"
    assert cli(capsys, "localcl", fixture_path("quadric"), "2,3")[1] == "AG(0, [3])"
    code, _, err = cli(capsys, "localcl", fixture_path("quadric"), "5")
    assert code == 1 and "not relevant" in err


def test_json_output_reparses(capsys):
    code, out, _ = cli(capsys, "show", "--json", fixture_path("quadric"))
    obj = json.loads(out)
    assert obj["display"] == "MDS(6, 1, 3, [2, []])"
    space = obj["space"]
    space["vars"] = space.pop("r")
    from moridream.mds import mds_from_spacefile

    assert str(mds_from_spacefile(space)) == obj["display"]
    code, out, _ = cli(capsys, "ambientfan", "--json", fixture_path("quadric"))
    assert len(json.loads(out)["max_cones"]) == 8


def test_deterministic_output(capsys):
    a = cli(capsys, "gitfan", fixture_path("fourfold"))
    b = cli(capsys, "gitfan", fixture_path("fourfold"))
    assert a == b and a[1].startswith("FAN(3, 0, [0, 0, 37])")


def test_surface_commands(capsys, tmp_path):
    p = tmp_path / "p2.json"
    p.write_text(json.dumps({"vars": ["x", "y", "z"], "relations": [], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": [1]}))
    assert cli(capsys, "selfint", str(p))[1] == "[1, 1, 1]"
    assert cli(capsys, "intersect", str(p), "1", "[2]")[1] == "2"
    assert cli(capsys, "graph", str(p))[1] == "[{1, 2}, {1, 3}, {2, 3}]"
    assert "T1 -- T2;" in cli(capsys, "graph", str(p), "--format", "dot")[1]
    assert "\\begin{tikzpicture}" in cli(capsys, "graph", str(p), "--format", "tikz")[1]
    code, _, err = cli(capsys, "selfint", fixture_path("quadric"))
    assert code == 1 and "surface" in err


def test_named_variables(capsys, tmp_path):
    p = tmp_path / "q.json"
    p.write_text(json.dumps({"vars": ["a", "b", "c", "d", "e", "f"], "relations": ["a*b + c*d + e^2 + f^2"], "grading": {"free_rank": 2, "torsion": [], "matrix": [[-2, 2, -1, 1, 0, 0], [1, 1, 1, 1, 1, 1]]}, "ample": [-1, 2]}))
    assert cli(capsys, "gorenstein", str(p))[1] == "3"


def test_ringfromap(capsys):
    code, out, _ = cli(capsys, "ringfromap", fixture_path("complexity_one_ap"))
    assert out.splitlines() == ["GR(5, 1, [1, []])", "T1^2 + T2*T3 + T4*T5", "[1, 1, 1, 1, 1]"]


@pytest.mark.parametrize(
    "payload, code, needle",
    [
        ("not json", 2, "invalid JSON"),
        (json.dumps({"vars": 3, "relations": ["T1*T2 + T3"], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": [1]}), 2, "not homogeneous"),
        (json.dumps({"vars": 3, "relations": ["T1*+T3"], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": [1]}), 2, "T1*+T3"),
        (json.dumps({"vars": 3, "relations": []}), 2, "grading"),
        (json.dumps({"vars": 2, "relations": [], "grading": {"free_rank": 2, "torsion": [], "matrix": [[1, 0], [0, 1]]}, "ample": [1, 0]}), 1, "wall"),
        (json.dumps({"vars": 3, "relations": [], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": [-1]}), 1, "not effective"),
    ],
)
def test_exit_codes(capsys, tmp_path, payload, code, needle):
    p = tmp_path / "in.json"
    p.write_text(payload)
    got, _, err = cli(capsys, "show", str(p))
    assert got == code and needle in err


def test_nocheck_accepts_inhomogeneous(capsys, tmp_path):
    p = tmp_path / "in.json"
    p.write_text(json.dumps({"vars": 3, "relations": ["T1*T2 + T3"], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": None}))
    assert cli(capsys, "afaces", "--nocheck", str(p))[0] == 0


def test_missing_file(capsys):
    code, _, err = cli(capsys, "show", "/nonexistent/space.json")
    assert code == 2 and "/nonexistent/space.json" in err


def test_timeout(capsys):
    assert cli(capsys, "gitfan", "--timeout", "0.2", fixture_path("fivefold"))[0] == 3


def test_db_commands(capsys, tmp_path):
    from moridream.coxdb import default_path

    db = tmp_path / "db.jsonl"
    db.write_text(default_path().read_text())
    code, out, _ = cli(capsys, "db", "search", "--db", str(db), "del", "Pezzo", "AND", "E6")
    assert code == 0 and out.startswith("6\t")
    code, out, _ = cli(capsys, "db", "export", "--db", str(db), "97")
    exported = tmp_path / "x.json"
    exported.write_text(out)
    assert cli(capsys, "pic", str(exported))[1].splitlines()[-1] == "Cl/Pic: AG(0, [2, 12, 12, 24])"
    assert cli(capsys, "db", "get", "--db", str(db), "7")[0] == 1
    rec = tmp_path / "rec.json"
    rec.write_text(json.dumps({"id": 500, "name": "P2", "tags": ["toric"], "data": {"vars": 3, "relations": [], "grading": {"free_rank": 1, "torsion": [], "matrix": [[1, 1, 1]]}, "ample": [1]}}))
    assert cli(capsys, "db", "add", "--db", str(db), str(rec)) == (0, "added 500", "")
    assert cli(capsys, "db", "add", "--db", str(db), str(rec))[0] == 1
    assert "\\verb|" in cli(capsys, "db", "export", "--db", str(db), "96", "--format", "latex")[1]
