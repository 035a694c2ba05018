import io

import numpy as np
import pytest

from flatdisc.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and " " not in line)


def test_check_map_alpha():
    code, text = run("check-map", "--map", "alpha:0.5", "--samples", "50", "--seed", "3")
    assert code == 0
    fields = kv(text)
    assert fields["samples_tested"] == "50" and fields["pass"] == "true"
    assert float(fields["max_identity_defect"]) == 0.0


def test_check_map_lifted():
    code, text = run("check-map", "--map", "lifted", "--samples", "50")
    assert code == 0 and kv(text)["pass"] == "true"


def test_discretize_prints_euler_matrices():
    code, text = run("discretize", "--alpha", "0", "--h", "0.05", "--chains", "3,2")
    assert code == 0
    rows = text.splitlines()
    a_rows = rows[rows.index("A_h =") + 1 : rows.index("B_h =")]
    np.testing.assert_allclose(
        np.array([[float(t) for t in r.split()] for r in a_rows]),
        np.eye(5) + 0.05 * np.diag([1, 1, 0, 1], 1),
    )


def test_order_study():
    code, text = run("order-study", "--scheme", "lifted", "--h", "0.05,0.025,0.0125,0.00625", "--point", "0.5,0.2,0.1,0.2,0")
    assert code == 0
    slope = float(text.strip().splitlines()[-1].split("=")[1])
    assert slope >= 0.9


def test_order_study_generic():
    code, text = run("order-study", "--scheme", "generic", "--h", "0.05,0.025,0.0125")
    assert code == 0 and "slope=" in text


def test_track_writes_trace(tmp_path):
    out = tmp_path / "trace.csv"
    code, text = run("track", "--system", "paper-quad", "--h", "0.05", "--horizon", "1", "--out", str(out))
    assert code == 0
    assert "spectral_radius=0.976451" in text
    assert len(out.read_text().splitlines()) == 22


def test_track_custom_gain():
    code, text = run("track", "--horizon", "0.5", "--k", "-10,-10,-10,0,0;0,0,0,-10,-10")
    assert code == 0 and "eigenvalues=" in text


def test_simulate_runs():
    code, _ = run("simulate", "--horizon", "0.5", "--reset-cycles", "5")
    assert code == 0


def test_argument_errors():
    assert run("discretize", "--alpha", "1.5")[0] == 3
    assert run("track", "--k", "1,2")[0] == 3
    assert run("nonsense")[0] == 3
    assert run("track", "--system", "moon")[0] == 3


def test_domain_error_exit_code():
    code, _ = run("order-study", "--point", "0,0,-1,0,0")
    assert code == 1


def test_convergence_error_exit_code(monkeypatch):
    from flatdisc import cli
    from flatdisc.errors import ConvergenceError

    def fail(*args, **kwargs):
        raise ConvergenceError("no root", residual=1.0, iterations=50)

    monkeypatch.setattr(cli, "measure_order", fail)
    assert run("order-study", "--scheme", "generic")[0] == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("horizon = 0.5\nreset-cycles = 2\n")
    out = tmp_path / "trace.csv"
    code, _ = run("--config", str(cfg), "track", "--out", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 12
    code, _ = run("--config", str(cfg), "track", "--horizon", "1", "--out", str(out))
    assert len(out.read_text().splitlines()) == 22


def test_config_file_missing(tmp_path):
    assert run("--config", str(tmp_path / "nope.cfg"), "discretize")[0] == 3
