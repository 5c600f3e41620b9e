import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bgform import _backend
from bgform.cli import BENCH_HEADER, main
from bgform.matrix import Mat, read_matrix, write_matrix
from oracles import FIXTURES, dense_j, dense_similarity, load_fixture, to_np

EXAMPLE = str(FIXTURES / "example_s.txt")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, a):
    path = tmp_path / name
    write_matrix(path, Mat.from_rows(np.asarray(a, float).tolist()))
    return str(path)


def breakdown_file(tmp_path):
    # t21 = 1, r21 = 0: step 1 inner product vanishes
    s = np.eye(4)
    s[3, 0], s[2, 1] = 1.0, -1.0
    return write(tmp_path, "bd.txt", s)


# check ------------------------------------------------------------------------

def test_check_example(capsys):
    code, out, _ = run(["check", EXAMPLE], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["is_skew_hamiltonian"] is True
    assert set(rep) == {
        "hamiltonian_dev", "skew_hamiltonian_dev", "is_hamiltonian", "is_skew_hamiltonian",
        "hessenberg_dev_11", "upper_triangular_dev_21", "diagonal_dev_21",
    }


def test_check_identity(tmp_path, capsys):
    code, out, _ = run(["check", write(tmp_path, "i.txt", np.eye(4))], capsys)
    assert code == 0 and json.loads(out)["is_skew_hamiltonian"] is True


def test_check_malformed(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("2 2\n1 2\n3 oops\n")
    code, _, err = run(["check", str(path)], capsys)
    assert code == 64
    assert "line 3" in err


def test_check_missing_file(tmp_path, capsys):
    code, _, _ = run(["check", str(tmp_path / "nope.txt")], capsys)
    assert code == 64


def test_check_odd_dimension(tmp_path, capsys):
    code, _, _ = run(["check", write(tmp_path, "odd.txt", np.eye(3))], capsys)
    assert code == 65


def test_usage_errors_exit_64(capsys):
    for argv in (["bogus"], ["reduce"], ["reduce", EXAMPLE, "--variant", "qr"], ["gen", "--n", "0"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 64
    capsys.readouterr()


# reduce -----------------------------------------------------------------------

def test_reduce_example_writes_files(tmp_path, capsys):
    out = tmp_path / "out"
    code, stdout, _ = run(["reduce", EXAMPLE, "--out-dir", str(out), "--write-u"], capsys)
    assert code == 0
    rep = json.loads(stdout)
    assert rep == json.loads((out / "report.json").read_text())
    assert rep["breakdown"] is None and rep["steps_completed"] == 5
    s_prime = to_np(read_matrix(out / "s_prime.txt"))
    # S'21 is zero at print precision of the example (6 decimals)
    assert np.abs(s_prime[6:, :6]).max() < 5e-7
    y = to_np(read_matrix(out / "y.txt"))
    assert np.abs(y - to_np(load_fixture("example_y.txt"))).max() <= 1e-3


@pytest.mark.parametrize("variant", ["elementary", "householder"])
def test_reduce_outputs_round_trip(tmp_path, capsys, variant):
    src = tmp_path / "s.txt"
    assert main(["gen", "--n", "5", "--seed", "3", "--out", str(src)]) == 0
    out = tmp_path / "out"
    code, _, _ = run(["reduce", str(src), "--variant", variant, "--out-dir", str(out), "--write-u"], capsys)
    assert code == 0
    s, u = to_np(read_matrix(src)), to_np(read_matrix(out / "u.txt"))
    s_prime = to_np(read_matrix(out / "s_prime.txt"))
    expected = dense_similarity(u, s)
    assert np.linalg.norm(s_prime - expected) <= 1e-10 * np.linalg.norm(s)
    left, y = to_np(read_matrix(out / "left.txt")), to_np(read_matrix(out / "y.txt"))
    assert np.allclose(u[:5, :5], left) and np.allclose(u[5:, :5], y @ left)
    assert np.linalg.norm(u.T @ dense_j(5) @ u - dense_j(5)) <= 1e-10


def test_reduce_already_reduced_identity_files(tmp_path, capsys):
    s = np.triu(np.arange(1.0, 37.0).reshape(6, 6), -1)
    s[3:, :3] = np.triu(s[3:, :3])
    out = tmp_path / "out"
    code, _, _ = run(["reduce", write(tmp_path, "r.txt", s), "--out-dir", str(out)], capsys)
    assert code == 0
    assert to_np(read_matrix(out / "left.txt")).tolist() == np.eye(3).tolist()
    assert not to_np(read_matrix(out / "y.txt")).any()


def test_reduce_breakdown_exit_2(tmp_path, capsys):
    code, out, _ = run(["reduce", breakdown_file(tmp_path)], capsys)
    assert code == 2
    assert json.loads(out)["breakdown"]["step"] == 1


# solve-arme -------------------------------------------------------------------

def test_solve_arme_example(tmp_path, capsys):
    y_path, rep_path = tmp_path / "y.txt", tmp_path / "rep.json"
    code, out, _ = run(["solve-arme", EXAMPLE, "--out", str(y_path), "--report", str(rep_path)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload == json.loads(rep_path.read_text())
    assert payload["status"] == "ok"
    assert set(payload) == {"status", "arme_residual", "s21_norm", "s22_minus_s11t_norm", "report"}
    y = to_np(read_matrix(y_path))
    assert np.abs(y - to_np(load_fixture("example_y.txt"))).max() <= 1e-3


def test_solve_arme_identity_zero_y(tmp_path, capsys):
    y_path = tmp_path / "y.txt"
    code, _, _ = run(["solve-arme", write(tmp_path, "i.txt", np.eye(6)), "--out", str(y_path)], capsys)
    assert code == 0
    assert not to_np(read_matrix(y_path)).any()


def test_solve_arme_hamiltonian_exit_65(tmp_path, capsys):
    path = tmp_path / "h.txt"
    main(["gen", "--kind", "hamiltonian", "--n", "3", "--out", str(path)])
    code, _, err = run(["solve-arme", str(path)], capsys)
    assert code == 65
    assert "skew-Hamiltonian" in err


def test_solve_arme_breakdown_exit_2(tmp_path, capsys):
    code, out, _ = run(["solve-arme", breakdown_file(tmp_path)], capsys)
    assert code == 2
    assert json.loads(out)["status"] == "breakdown"


# gen --------------------------------------------------------------------------

def test_gen_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        assert main(["gen", "--n", "6", "--seed", "11", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(["check", str(a)], capsys)
    assert json.loads(out)["is_skew_hamiltonian"] is True


def test_gen_hamiltonian_square_is_skew(tmp_path, capsys):
    path = tmp_path / "h.txt"
    main(["gen", "--kind", "hamiltonian", "--n", "4", "--seed", "2", "--out", str(path)])
    h = to_np(read_matrix(path))
    sq = write(tmp_path, "sq.txt", h @ h)
    code, out, _ = run(["check", sq], capsys)
    assert code == 0 and json.loads(out)["is_skew_hamiltonian"] is True


def test_gen_stdout(capsys):
    code, out, _ = run(["gen", "--n", "2", "--seed", "0"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "4 4"


# bench ------------------------------------------------------------------------

def test_bench_small(tmp_path, capsys):
    path = tmp_path / "b.csv"
    code, _, err = run(["bench", "--n-min", "2", "--n-max", "4", "--trials", "3", "--out", str(path)], capsys)
    assert code == 0
    text = path.read_text()
    assert text.splitlines()[0] == "n,seed,variant,passes,s21_residual,symplectic_dev,arme_residual,breakdown,wall_time_ms"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 9
    assert [(int(r["n"]), int(r["seed"])) for r in rows] == [(n, s) for n in (2, 3, 4) for s in range(3)]
    for r in rows:
        assert float(r["s21_residual"]) <= 1e-9
        assert float(r["arme_residual"]) <= 1e-9
        assert r["breakdown"] == "0"
    assert "median" in err


def test_bench_jobs_same_rows(tmp_path, capsys):
    outs = []
    for jobs in ("1", "3"):
        path = tmp_path / f"b{jobs}.csv"
        run(["bench", "--n-min", "3", "--n-max", "5", "--trials", "2", "--jobs", jobs, "--out", str(path)], capsys)
        outs.append([line.rsplit(",", 1)[0] for line in path.read_text().splitlines()])
    assert outs[0] == outs[1]


def test_bench_header_snapshot():
    assert BENCH_HEADER == [
        "n", "seed", "variant", "passes", "s21_residual", "symplectic_dev",
        "arme_residual", "breakdown", "wall_time_ms",
    ]


@pytest.mark.parametrize("argv", [["--trials", "0"], ["--n-min", "5", "--n-max", "4"]])
def test_bench_usage_errors(argv, capsys):
    code, _, _ = run(["bench", *argv], capsys)
    assert code == 64


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bgform", "check", EXAMPLE], capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["is_skew_hamiltonian"] is True


def test_backend_flag(capsys):
    prev = _backend.name
    try:
        code, _, _ = run(["--backend", "python", "check", EXAMPLE], capsys)
        assert _backend.name == "python"
    finally:
        _backend.set_backend(prev)
    assert code == 0
