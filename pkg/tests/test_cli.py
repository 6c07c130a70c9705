import json
import subprocess
import sys

import numpy as np
import pytest

from symkron.cli import main
from symkron.jsonio import (
    ParseError,
    decode_complex,
    decode_matrix,
    encode_matrix,
    params_from_json,
    params_to_json,
    read_points_csv,
    symvec_from_json,
    symvec_to_json,
)
from symkron.errors import ShapeError
from symkron.hagedorn import harmonic_flow
from symkron.kron_oracle import symmetric_kron_dense
from symkron.sampling import make_rng, random_valid_params
from symkron.symspace import SymVec, read_basis_json


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def params_file(tmp_path):
    return write(tmp_path / "p.json", params_to_json(random_valid_params(make_rng(5), 2)))


@pytest.fixture
def points_file(tmp_path):
    path = tmp_path / "x.csv"
    rng = make_rng(6)
    rows = "\n".join(",".join(repr(float(v)) for v in r) for r in rng.standard_normal((20, 2)))
    path.write_text("x1,x2\n# comment\n" + rows + "\n")
    return path


def test_enumerate(capsys):
    assert run(capsys, "enumerate", "--dim", 2, "--order", 3)[:2] == (0, "[[3, 0], [2, 1], [1, 2], [0, 3]]\n")
    code, out, _ = run(capsys, "enumerate", "--dim", 2, "--order", 2, "--redundant")
    assert json.loads(out) == [[2, 0], [1, 1], [1, 1], [0, 2]]
    assert json.loads(run(capsys, "enumerate", "--dim", 1, "--order", 5)[1]) == [[5]]
    code, _, err = run(capsys, "enumerate", "--dim", 3, "--order", 8, "--redundant")
    assert code == 2 and "limit" in err
    assert run(capsys, "enumerate", "--dim", 3, "--order", 8, "--redundant", "--limit", 10000)[0] == 0


def test_basis(capsys, tmp_path):
    code, out, _ = run(capsys, "basis", "--dim", 2, "--order", 2)
    doc = json.loads(out)
    values = sorted(v for _, _, v in doc["triplets"])
    np.testing.assert_allclose(values, [2**-0.5, 2**-0.5, 1, 1], rtol=1e-15)
    out_path = tmp_path / "b.json"
    assert run(capsys, "basis", "--dim", 2, "--order", 3, "--out", out_path)[0] == 0
    B = read_basis_json(out_path.read_text())
    assert len(B.triplets()) == 8
    assert json.loads(run(capsys, "basis", "--dim", 1, "--order", 6)[1])["triplets"] == [[1, 1, 1.0]]


def test_basis_cap(capsys, monkeypatch):
    monkeypatch.setenv("SYMKRON_MAX_FULL", "100")
    assert run(capsys, "basis", "--dim", 3, "--order", 5)[0] == 2


def test_apply(capsys, tmp_path):
    M = np.array([[1 + 1j, 2], [0.5, -1j]])
    m = write(tmp_path / "M.json", encode_matrix(M))
    y = write(tmp_path / "y.json", {"dim": 2, "order": 2, "data": [[1, 0], [0, 0], [0, 0]]})
    code, out, _ = run(capsys, "apply", "--matrix", m, "--order", 2, "--vector", y, "--check")
    doc = json.loads(out)
    assert code == 0 and doc["oracle_residual"] <= 1e-15
    got = np.array([decode_complex(z) for z in doc["data"]])
    np.testing.assert_allclose(got, symmetric_kron_dense(M, 2)[:, 0], atol=1e-15)

    eye = write(tmp_path / "I.json", encode_matrix(np.eye(2)))
    y3 = write(tmp_path / "y3.json", {"dim": 2, "order": 3, "data": [[1, 2], [3, 4], [5, 6], [7, 8]]})
    doc = json.loads(run(capsys, "apply", "--matrix", eye, "--order", 3, "--vector", y3)[1])
    assert doc["data"] == [[1, 2], [3, 4], [5, 6], [7, 8]]

    big = write(tmp_path / "big.json", {"dim": 2, "order": 13, "data": [[1, 0]] * 14})
    doc = json.loads(run(capsys, "apply", "--matrix", eye, "--order", 13, "--vector", big, "--check")[1])
    assert doc["oracle"] == "capped"


def test_apply_errors(capsys, tmp_path):
    m = write(tmp_path / "M.json", encode_matrix(np.eye(2)))
    y = write(tmp_path / "y.json", {"dim": 2, "order": 2, "data": [[1, 0], [0, 0], [0, 0]]})
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "apply", "--matrix", bad, "--order", 2, "--vector", y)[0] == 3
    assert run(capsys, "apply", "--matrix", m, "--order", 3, "--vector", y)[0] == 4
    m3 = write(tmp_path / "M3.json", encode_matrix(np.eye(3)))
    assert run(capsys, "apply", "--matrix", m3, "--order", 2, "--vector", y)[0] == 4
    short = write(tmp_path / "s.json", {"dim": 2, "order": 2, "data": [[1, 0]]})
    assert run(capsys, "apply", "--matrix", m, "--order", 2, "--vector", short)[0] == 4
    weird = write(tmp_path / "w.json", {"dim": 2, "order": 2, "data": [["a", 0]] * 3})
    assert run(capsys, "apply", "--matrix", m, "--order", 2, "--vector", weird)[0] == 3


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--dim", 2, "--order", 3, "--trials", 20, "--seed", 7)
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert all(s["max_residual"] <= 1e-12 for s in report["suites"])
    _, again, _ = run(capsys, "check", "--dim", 2, "--order", 3, "--trials", 20, "--seed", 7)
    assert again == out
    code, out, _ = run(capsys, "check", "--dim", 2, "--order", 3, "--trials", 2, "--seed", 7, "--inject-nonunitary")
    report = json.loads(out)
    assert code == 1 and report["failing_case"]["suite"] == "unitary"
    assert report["failing_case"]["trial"] == 0 and "M" in report["failing_case"]
    assert run(capsys, "check", "--dim", 3, "--order", 10)[0] == 2


def test_wavepacket_eval(capsys, params_file, points_file):
    code, out, _ = run(capsys, "wavepacket", "eval", "--params", params_file, "--points", points_file, "--order", 2)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "k1,k2,x1,x2,re,im"
    assert len(lines) == 1 + 3 * 20
    code, out, _ = run(
        capsys, "wavepacket", "eval", "--params", params_file, "--points", points_file, "--order", 2, "--format", "json"
    )
    doc = json.loads(out)
    assert doc["labels"] == [[2, 0], [1, 1], [0, 2]]
    first = float(lines[1].split(",")[4])
    assert first == doc["values"][0][0][0]


def test_wavepacket_invalid_params(capsys, tmp_path, points_file):
    bad = write(tmp_path / "bad.json", {"dim": 2, "A": encode_matrix(np.eye(2)), "B": encode_matrix(2 * np.eye(2))})
    code, _, err = run(capsys, "wavepacket", "eval", "--params", bad, "--points", points_file, "--order", 1)
    assert code == 5
    detail = json.loads(err.split("invalid parameters: ", 1)[1])
    assert detail["condition"] == "A*B + B*A = 2 Id"
    assert detail["residual"] == pytest.approx(2 * np.sqrt(2))


def test_wavepacket_transform(capsys, tmp_path, params_file, points_file):
    for mode in ("polar", "svd"):
        code, out, _ = run(
            capsys, "wavepacket", "transform", "--params", params_file, "--order", 3,
            "--realign", mode, "--points", points_file,
        )
        doc = json.loads(out)
        assert code == 0 and doc["pointwise_residual"] <= 1e-10 and doc["sign"] in (1, -1)
        assert np.abs(decode_matrix(doc["params"]["A"]).imag).max() <= 1e-10
    U = write(tmp_path / "U.json", encode_matrix(np.eye(2)))
    doc = json.loads(run(capsys, "wavepacket", "transform", "--params", params_file, "--order", 2, "--unitary", U)[1])
    np.testing.assert_allclose(decode_matrix(doc["T"]), np.eye(3), atol=1e-15)
    notU = write(tmp_path / "N.json", encode_matrix(2 * np.eye(2)))
    assert run(capsys, "wavepacket", "transform", "--params", params_file, "--order", 2, "--unitary", notU)[0] == 5
    U3 = write(tmp_path / "U3.json", encode_matrix(np.eye(3)))
    assert run(capsys, "wavepacket", "transform", "--params", params_file, "--order", 2, "--unitary", U3)[0] == 4


def test_wavepacket_realign_and_flow(capsys, tmp_path, params_file):
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    spd = write(tmp_path / "spd.json", {"dim": 2, "hbar": 1.0, "A": encode_matrix(A), "B": encode_matrix(np.linalg.inv(A))})
    doc = json.loads(run(capsys, "wavepacket", "realign", "--params", spd, "--mode", "polar")[1])
    np.testing.assert_allclose(decode_matrix(doc["U"]), np.eye(2), atol=1e-14)
    doc = json.loads(run(capsys, "wavepacket", "realign", "--params", params_file, "--mode", "svd")[1])
    assert doc["max_imag_A_new"] <= 1e-10

    p = params_from_json(json.loads(params_file.read_text()))
    doc = json.loads(run(capsys, "wavepacket", "flow", "--params", params_file, "--t", 0, 1.25)[1])
    assert decode_matrix(doc["states"][0]["A"]).tolist() == p.A.tolist()
    A, B = harmonic_flow(p.A, p.B, 1.25)
    np.testing.assert_array_equal(decode_matrix(doc["states"][1]["B"]), B)


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--dim", 3, "--order-range", "2:4", "--reps", 2)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 1 + 3 * 2
    assert lines[0].split(",")[6] == "oracle_seconds"
    assert all(float(line.split(",")[6]) >= 0 for line in lines[1:])
    code, out, _ = run(capsys, "bench", "--dim", 3, "--order-range", "12:12", "--reps", 1)
    row = out.strip().splitlines()[1].split(",")
    assert row[6] == "capped" and row[3] == "91" and row[4] == str(3**12)


def test_config_file(capsys, tmp_path):
    cfg = write(tmp_path / "cfg.json", {"dim": 2, "order": 2, "redundant": True})
    code, out, _ = run(capsys, "--config", cfg, "enumerate")
    assert code == 0 and json.loads(out) == [[2, 0], [1, 1], [1, 1], [0, 2]]
    # command line wins over the file
    assert json.loads(run(capsys, "--config", cfg, "enumerate", "--order", 1)[1]) == [[1, 0], [0, 1]]
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(capsys, "--config", bad, "enumerate", "--dim", 2, "--order", 1)[0] == 3


def test_console_script_exit_code(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "symkron.cli", "enumerate", "--dim", "3", "--order", "9", "--redundant"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2


def test_json_round_trips():
    rng = make_rng(1)
    y = SymVec(3, 2, rng.standard_normal(6) + 1j * rng.standard_normal(6))
    for labels in (False, True):
        back = symvec_from_json(json.loads(json.dumps(symvec_to_json(y, labels=labels))))
        np.testing.assert_array_equal(back.data, y.data)
    doc = symvec_to_json(y, labels=True)
    doc["labels"] = doc["labels"][::-1]
    doc["data"] = doc["data"][::-1]
    np.testing.assert_array_equal(symvec_from_json(doc).data, y.data)
    doc["labels"][0] = [3, 0, 0]
    with pytest.raises(ShapeError):
        symvec_from_json(doc)
    p = random_valid_params(rng, 3, hbar=0.25)
    q = params_from_json(json.loads(json.dumps(params_to_json(p))))
    np.testing.assert_array_equal(q.A, p.A)
    np.testing.assert_array_equal(q.B, p.B)
    assert q.hbar == 0.25


def test_json_parse_errors():
    for bad in ("1+2j", [1], [1, "a"], [True, 0]):
        with pytest.raises(ParseError):
            decode_complex(bad)
    with pytest.raises(ParseError):
        decode_matrix([[1, 2], [3]])
    with pytest.raises(ParseError):
        decode_matrix([])
    with pytest.raises(ParseError):
        params_from_json({"A": [[1]]})
    with pytest.raises(ShapeError):
        params_from_json({"dim": 3, "A": [[1]], "B": [[1]]})


def test_points_csv():
    pts = read_points_csv("x,y\n1,2\n\n# skip\n3.5,-4\n", 2)
    np.testing.assert_array_equal(pts, [[1, 2], [3.5, -4]])
    with pytest.raises(ShapeError):
        read_points_csv("1,2,3\n", 2)
    with pytest.raises(ParseError):
        read_points_csv("1,2\nfoo,bar\n", 2)
