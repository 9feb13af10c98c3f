import io
import subprocess
import sys

import numpy as np
import pytest

from qcpu.applications import harmonic_oscillator
from qcpu.cli import main
from qcpu.formats import emit_matrix, emit_state, parse_matrix
from qcpu.operators import dft_matrix, RegisterSpec, max_abs_diff

from conftest import cmat

X = np.array([[0, 1], [1, 0]], dtype=complex)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def xfile(tmp_path):
    p = tmp_path / "x.mat"
    p.write_text(emit_matrix(X))
    return p


def test_compile_x(xfile, tmp_path):
    code, out, _ = run("compile", xfile)
    assert code == 0
    assert [l.split()[0] for l in out.splitlines()[1:]] == ["TRA", "TRA"]
    target = tmp_path / "x.net"
    assert run("compile", xfile, "-o", target)[0] == 0
    assert target.read_text() == out


def test_verify_random(rng, tmp_path):
    p = tmp_path / "u.mat"
    p.write_text(emit_matrix(cmat(rng, 8)))
    code, out, _ = run("verify", p)
    assert code == 0
    assert out.startswith("max_abs_deviation: ")
    assert out.endswith("PASS\n")


def test_verify_netlist_mismatch_fails(xfile, tmp_path):
    wrong = tmp_path / "wrong.net"
    wrong.write_text("QCPU k=1\nTRA 0 1 1 0\n")
    code, out, _ = run("verify", xfile, "--netlist", wrong)
    assert code == 2
    assert out.endswith("FAIL\n")


def test_qft_paper_k1_verifies_against_dft(tmp_path):
    mat = tmp_path / "f.mat"
    net = tmp_path / "f.net"
    code, out, _ = run("qft", "--k", 1, "--convention", "paper", "-o", mat, "--netlist", net)
    assert code == 0 and "dft_deviation" in out
    code, out, _ = run("verify", mat, "--netlist", net, "--reference", "dft")
    assert code == 0, out
    assert "reference_deviation" in out


def test_qft_paper_k2_does_not_match_dft(tmp_path):
    mat = tmp_path / "f.mat"
    run("qft", "--k", 2, "--convention", "paper", "-o", mat)
    code, out, _ = run("verify", mat, "--reference", "dft")
    assert code == 2


def test_qft_stdout_matrix():
    code, out, _ = run("qft", "--k", 2)
    assert code == 0
    assert max_abs_diff(parse_matrix(out), dft_matrix(RegisterSpec(2))) < 1e-15


def test_analyze(tmp_path):
    p = tmp_path / "d.mat"
    p.write_text(emit_matrix(np.diag([1, 2, 3, 4])))
    code, out, _ = run("analyze", p)
    assert code == 0
    assert "nonzero_count: 4\n" in out and "diagonal: true\n" in out


def test_simulate_postselect(xfile, tmp_path):
    net = tmp_path / "x.net"
    run("compile", xfile, "-o", net)
    code, out, _ = run("simulate", net, "--state", 0, "--postselect", 1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "joint_state dim=4"
    assert lines[1:5] == ["0 0 1,0", "0 1 0,0", "1 0 0,0", "1 1 1,0"]
    assert lines[5] == "postselect outcome=1 probability=0.5"
    assert lines[6:] == ["0 0,0", "1 1,0"]


def test_simulate_state_file_and_impossible(tmp_path):
    net = tmp_path / "z.net"
    net.write_text("QCPU k=1\n")
    st = tmp_path / "psi.state"
    st.write_text(emit_state([0.6, 0.8]))
    code, out, _ = run("simulate", net, "--state", st, "--postselect", 1)
    assert code == 0
    assert "probability=0" in out and out.endswith("impossible outcome\n")


def test_evolve_csv(tmp_path):
    t, v = harmonic_oscillator(4)
    tf, vf = tmp_path / "t.mat", tmp_path / "v.mat"
    tf.write_text(emit_matrix(t))
    vf.write_text(emit_matrix(v))
    csv_path = tmp_path / "traj.csv"
    code, out, _ = run("evolve", "--t-file", tf, "--v-file", vf, "--dt", 0.01, "--steps", 4, "--csv", csv_path)
    assert code == 0
    assert "final_postselect_prob: 1.000000000000" in out
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "step,time,error_maxabs,norm,postselect_prob"
    assert len(rows) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["compile", "/nonexistent/file.mat"],
        ["qft", "--k", "0"],
        ["qft"],
        ["simulate", "x.net"],
        ["evolve", "--t-file", "a", "--v-file", "b", "--dt", "x", "--steps", "1"],
    ],
)
def test_validation_errors_exit_1(argv):
    code, _, err = run(*argv)
    assert code == 1
    assert err.count("error:") == 1


def test_parse_error_message(tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("QCPU k=1\nTRA 0 0 1 0\n")
    code, _, err = run("simulate", bad, "--state", 0)
    assert code == 1
    assert "line 2" in err and "Transitor requires m ≠ n" in err


def test_evolve_rejects_unnormalized(tmp_path):
    z = tmp_path / "z.mat"
    z.write_text(emit_matrix(np.zeros((2, 2))))
    psi = tmp_path / "p.state"
    psi.write_text(emit_state([1, 1]))
    code, _, err = run("evolve", "--t-file", z, "--v-file", z, "--dt", 0.1, "--steps", 2, "--psi0", psi)
    assert code == 1 and "normalized" in err


def test_byte_stable_subprocess(tmp_path, rng):
    p = tmp_path / "u.mat"
    p.write_text(emit_matrix(cmat(rng, 4)))
    cmds = [
        ["compile", str(p)],
        ["analyze", str(p)],
        ["verify", str(p)],
        ["qft", "--k", "3", "--convention", "paper"],
    ]
    for cmd in cmds:
        a = subprocess.run([sys.executable, "-m", "qcpu", *cmd], capture_output=True, check=True)
        b = subprocess.run([sys.executable, "-m", "qcpu", *cmd], capture_output=True, check=True)
        assert a.stdout == b.stdout and a.stdout
