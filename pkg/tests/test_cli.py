import csv
import io
import json

import numpy as np
import pytest

from symplex.cli import EXIT_AMBIGUOUS, EXIT_INVARIANT, EXIT_OK, EXIT_SCHEMA, main

CIRCLE = {"schemaVersion": 1, "n": 1, "tau": 2 * np.pi, "rep": {"rotationSpeeds": [1]}}
HALF = {"n": 1, "tau": np.pi, "rep": {"rotationTurns": ["1/2"]}}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_index_circle(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    code, out, _ = run(capsys, "index", "--path", path, "--omega", "exact:0/1")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert (rep["iOmega"], rep["nuOmega"], rep["schemaVersion"]) == (1, 2, 1)
    assert rep["crossings"]


def test_index_audit_roundtrip(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    report = tmp_path / "report.json"
    assert main(["iterate", "--path", path, "--m", "3", "-o", str(report)]) == EXIT_OK
    code, out, _ = run(capsys, "index", "--audit", str(report))
    rep = json.loads(out)
    assert code == EXIT_OK and rep["entries"] == 3 and rep["failures"] == 0


def test_audit_detects_tampering(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    report = tmp_path / "report.json"
    main(["index", "--path", path, "-o", str(report)])
    data = json.loads(report.read_text())
    data["auditable"][0]["iOmega"] += 1
    report.write_text(json.dumps(data))
    code, _, err = run(capsys, "index", "--audit", str(report))
    assert code == EXIT_INVARIANT and "re-verify" in err


def test_index_with_symmetry_matrix(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    P = write(tmp_path, "p.json", {"entries": [[0, -1], [1, 0]]})
    code, out, _ = run(capsys, "index", "--path", path, "--omega", "1/4", "--symmetry-matrix", P)
    assert code == EXIT_OK and json.loads(out)["muGraph"] == 2


def test_iterate_csv_columns(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    code, out, _ = run(capsys, "iterate", "--path", path, "--m", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert list(rows[0]) == ["m", "omega_p", "omega_q", "i", "nu", "method", "crossings"]
    assert [int(r["i"]) for r in rows] == [1, 3, 5, 7]


def test_splitting_and_krein(tmp_path, capsys):
    M = write(tmp_path, "m.json", {"entries": (-np.eye(2)).tolist()})
    code, out, _ = run(capsys, "splitting", "--matrix", M)
    row = json.loads(out)["rows"][0]
    assert code == EXIT_OK and (row["sPlus"], row["sMinus"], row["nullity"]) == (1, 1, 2)
    code, out, _ = run(capsys, "krein", "--matrix", M, "--format", "csv")
    assert code == EXIT_OK and out.splitlines()[1].startswith("1,2,1,1")


def test_splitting_with_path(tmp_path, capsys):
    M = write(tmp_path, "m.json", np.eye(2).tolist())
    path = write(tmp_path, "circle.json", CIRCLE)
    code, out, _ = run(capsys, "splitting", "--matrix", M, "--path", path, "--method", "path-limit")
    assert code == EXIT_OK and json.loads(out)["rows"][0]["sPlus"] == 1


def test_bott_verify_matrix(tmp_path, capsys):
    path = write(tmp_path, "half.json", HALF)
    P = write(tmp_path, "p.json", (-np.eye(2)).tolist())
    code, out, _ = run(capsys, "bott-verify", "--path", path, "--symmetry-matrix", P, "--m", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert rows[0] == {"omega0": "0", "m=1": "0/0/True", "m=2": "2/2/True"}


def test_bott_verify_sweep(capsys):
    code, out, _ = run(capsys, "bott-verify", "--n-max", "1", "--m-max", "3")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["failures"] == 0 and rep["cells"] > 0


def test_cijt(tmp_path, capsys):
    path = write(tmp_path, "circle.json", CIRCLE)
    code, out, _ = run(capsys, "cijt", "--path", path, "--nmax", "8", "--audit-window", "8")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert [(t["N"], *t["ms"]) for t in rep["tuples"]] == [(2, 1), (4, 2), (6, 3), (8, 4)]
    assert rep["missedByWindow"] == []


def test_ellipsoid(tmp_path, capsys):
    out_file = tmp_path / "ell.json"
    code, _, _ = run(capsys, "ellipsoid", "--radii-squared", "1,8/5", "--symmetry", "5,1,0", "-o", str(out_file))
    rep = json.loads(out_file.read_text())
    assert code == EXIT_OK and rep["count"] == 2 and rep["bound"] == 2
    code, out, _ = run(capsys, "index", "--audit", str(out_file))
    assert code == EXIT_OK and json.loads(out)["failures"] == 0


def test_ellipsoid_csv(capsys):
    code, out, _ = run(capsys, "ellipsoid", "--radii-squared", "1,8/5", "--symmetry", "5,1,0",
                       "--format", "csv", "--orbit", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0]["i"] == "4" and rows[0]["nu"] == "2"


@pytest.mark.parametrize("argv", [
    ["index", "--path", "missing.json"],
    ["ellipsoid", "--radii-squared", "1,x", "--symmetry", "3,1,0"],
    ["ellipsoid", "--radii-squared", "1,2", "--symmetry", "3,1"],
    ["ellipsoid", "--radii-squared", "1,2", "--symmetry", "3,2,0"],
    ["index"],
])
def test_schema_errors(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_SCHEMA and err


def test_bad_schema_version(tmp_path, capsys):
    path = write(tmp_path, "circle.json", {**CIRCLE, "schemaVersion": 2})
    assert run(capsys, "index", "--path", path)[0] == EXIT_SCHEMA


def test_non_symplectic_matrix(tmp_path, capsys):
    M = write(tmp_path, "m.json", [[2, 0], [0, 2]])
    assert run(capsys, "splitting", "--matrix", M)[0] == EXIT_SCHEMA


def test_ambiguous_spectrum(tmp_path, capsys):
    a, b = 1.0, 1.0 + 1e-8
    M = np.zeros((4, 4))
    M[np.ix_([0, 2], [0, 2])] = [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]
    M[np.ix_([1, 3], [1, 3])] = [[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]]
    path = write(tmp_path, "m.json", M.tolist())
    assert run(capsys, "krein", "--matrix", path)[0] == EXIT_AMBIGUOUS


def test_selftest_is_deterministic(capsys):
    code, first, _ = run(capsys, "selftest", "--seed", "3")
    _, second, _ = run(capsys, "selftest", "--seed", "3")
    rep = json.loads(first)
    assert code == EXIT_OK and first == second
    assert rep["total"] >= 300 and rep["failures"] == 0
