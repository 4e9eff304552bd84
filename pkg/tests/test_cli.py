import json
import subprocess
import sys

import numpy as np
import pytest

from qfirob.cli import main
from qfirob.config import read_matrix, read_vector, write_matrix
from qfirob.expansion import robustness_report
from qfirob.reporting import emit_report, emit_sweep, load_report
from qfirob.single_qubit import SingleQubitParams, single_qubit_spec


def write_config(path, text):
    path.write_text(text)
    return str(path)


SQ_REPORT = """
[run]
experiment = report
seed = 7

[probe]
type = single-qubit
h0z = 4.0
time = 1.0
beta = 0.0
sigma_x = 1.0
sigma_y = 1.0
sigma_z = 0.0

[output]
dir = {out}
"""


def test_report_single_qubit(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", SQ_REPORT.format(out=tmp_path / "out"))
    rc = main(["report", "--config", cfg])
    assert rc == 0
    line = capsys.readouterr().out.strip()
    assert "classification=DSP" in line
    data = load_report(tmp_path / "out" / "report.json")
    assert data["classification"] == "DSP"
    assert data["sigma_max"] == pytest.approx(2.426, rel=5e-3)
    assert data["seed"] == 7
    assert (tmp_path / "out" / "report.png").exists()


def test_report_json_round_trip(tmp_path):
    cfg = write_config(tmp_path / "run.ini", SQ_REPORT.format(out=tmp_path / "out"))
    assert main(["report", "--config", cfg]) == 0
    p = tmp_path / "out" / "report.json"
    raw = p.read_text()
    data = json.loads(raw)
    again = json.dumps(data, indent=2, sort_keys=False) + "\n"
    assert again == raw


def test_report_dip_has_null_sigma_max(tmp_path):
    text = SQ_REPORT.format(out=tmp_path / "out").replace("sigma_x = 1.0", "sigma_x = 0.0")
    text = text.replace("sigma_y = 1.0", "sigma_y = 0.0").replace("sigma_z = 0.0", "sigma_z = 0.5")
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["report", "--config", cfg]) == 0
    data = load_report(tmp_path / "out" / "report.json")
    assert data["classification"] == "DIP"
    assert data["sigma_max"] is None


def test_descending_sigma_grid_exits_2(tmp_path, capsys):
    text = SQ_REPORT.format(out=tmp_path / "out") + "\n[mc]\nn_realizations = 500\nsigma_grid = 0.3,0.2,0.1\n"
    text = text.replace("experiment = report", "experiment = sweep-sigma")
    cfg = write_config(tmp_path / "run.ini", text)
    rc = main(["sweep-sigma", "--config", cfg])
    assert rc == 2
    assert "sigma_grid" in capsys.readouterr().err


def test_missing_probe_section_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", "[run]\nexperiment = report\n")
    assert main(["report", "--config", cfg]) == 2
    assert "probe" in capsys.readouterr().err


def test_experiment_mismatch_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", SQ_REPORT.format(out=tmp_path / "out"))
    assert main(["crossover", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert "experiment" in err


def test_zero_clean_qfi_exits_3(tmp_path, capsys):
    # a generic probe whose initial state file is the generator eigenstate
    d = 2
    write_matrix(tmp_path / "h.mat", np.diag([1.0, -1.0]).astype(complex))
    write_matrix(tmp_path / "dh.mat", np.diag([1.0, -1.0]).astype(complex))
    write_matrix(tmp_path / "x.mat", np.array([[0, 1], [1, 0]], dtype=complex))
    (tmp_path / "state.vec").write_text("2\n1,0\n0,0\n")
    text = f"""
[probe]
type = generic
h_theta = h.mat
dtheta_h = dh.mat
time = 1.0
initial_state = state.vec
term1_operator = x.mat
term1_kind = gaussian
term1_sigma = 0.1

[output]
dir = {tmp_path / "out"}
"""
    cfg = write_config(tmp_path / "run.ini", text)
    rc = main(["report", "--config", cfg])
    assert rc == 3
    assert "ZeroCleanQfi" in capsys.readouterr().err


def test_generic_probe_matches_single_qubit(tmp_path):
    """The same probe through matrix files reproduces the built-in numbers."""
    z = np.diag([1.0, -1.0]).astype(complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    write_matrix(tmp_path / "h_theta.mat", 4.0 * z)
    write_matrix(tmp_path / "dh.mat", z)
    write_matrix(tmp_path / "x.mat", x)
    write_matrix(tmp_path / "y.mat", y)
    text = f"""
[probe]
type = generic
h_theta = h_theta.mat
dtheta_h = dh.mat
time = 1.0
beta = 0.0
term1_operator = x.mat
term1_sigma = 1.0
term2_operator = y.mat
term2_sigma = 1.0

[output]
dir = {tmp_path / "out"}
"""
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["report", "--config", cfg]) == 0
    data = load_report(tmp_path / "out" / "report.json")
    assert data["sigma_max"] == pytest.approx(2.4268, rel=1e-3)


def test_matrix_file_round_trip(tmp_path, rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    write_matrix(tmp_path / "m.mat", m)
    back = read_matrix(tmp_path / "m.mat")
    assert np.abs(back - m).max() < 1e-15


def test_bad_matrix_file_exits_2(tmp_path, capsys):
    (tmp_path / "h.mat").write_text("2\n1,0 0,0\n")  # one row missing
    text = f"""
[probe]
type = generic
h_theta = h.mat
dtheta_h = h.mat
time = 1.0
term1_operator = h.mat
term1_sigma = 0.1

[output]
dir = {tmp_path / "out"}
"""
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["report", "--config", cfg]) == 2
    assert "expected 2 rows" in capsys.readouterr().err


def test_sweep_csv_format(tmp_path):
    text = SQ_REPORT.format(out=tmp_path / "out").replace("experiment = report", "experiment = sweep-sigma")
    text += "\n[mc]\nn_realizations = 2000\nsigma_grid = 0.05,0.1,0.2,0.4\n"
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["sweep-sigma", "--config", cfg]) == 0
    raw = (tmp_path / "out" / "sweep.csv").read_bytes()
    assert b"\r" not in raw and b'"' not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "sigma,g_mean,g_stderr,f_mean,n_realizations"
    assert lines[-1].startswith("# fit: slope=")
    body = lines[1:-1]
    assert len(body) == 4
    assert all(len(row.split(",")) == 5 for row in body)
    assert (tmp_path / "out" / "sweep.png").exists()


def test_same_seed_byte_identical_output(tmp_path):
    text = SQ_REPORT.format(out=tmp_path / "out1").replace("experiment = report", "experiment = sweep-sigma")
    text += "\n[mc]\nn_realizations = 1000\nsigma_grid = 0.05,0.1,0.2\n"
    cfg = write_config(tmp_path / "run1.ini", text)
    assert main(["sweep-sigma", "--config", cfg, "--seed", "123"]) == 0
    first = (tmp_path / "out1" / "sweep.csv").read_bytes()
    assert main(["sweep-sigma", "--config", cfg, "--seed", "123", "--out", str(tmp_path / "out2")]) == 0
    second = (tmp_path / "out2" / "sweep.csv").read_bytes()
    assert first == second


def test_kitaev_plane_cli(tmp_path):
    text = f"""
[probe]
type = kitaev
sites = 5
mu = 2.0
tau0 = 1.0
eta0 = 1.0
time = 1.0

[plane]
tau_min = 1.0
tau_max = 6.0
eta_min = 1.0
eta_max = 6.0
points = 6

[output]
dir = {tmp_path / "out"}
"""
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["kitaev-plane", "--config", cfg]) == 0
    lines = (tmp_path / "out" / "plane.csv").read_text().splitlines()
    assert lines[0] == "tau0,eta0,c2"
    assert len(lines) == 1 + 36
    values = np.array([float(row.split(",")[2]) for row in lines[1:]])
    assert (values > 0).any() and (values < 0).any()
    assert (tmp_path / "out" / "plane.png").exists()


def test_crossover_cli(tmp_path, capsys):
    text = f"""
[probe]
type = single-qubit
h0z = 0.1
time = 1.0

[crossover]
t_min = 0.5
t_max = 1.5
points = 41
sigma = 0.05

[output]
dir = {tmp_path / "out"}
"""
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["crossover", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "tau=" in out
    tau = float(out.strip().split("tau=")[1])
    assert tau == pytest.approx(1.0 - 5.0 / 12.0 * 0.01, rel=0.01)
    assert (tmp_path / "out" / "crossover.csv").exists()
    assert (tmp_path / "out" / "crossover.png").exists()


def test_mc_validate_cli(tmp_path, capsys):
    text = SQ_REPORT.format(out=tmp_path / "out").replace("experiment = report", "experiment = mc-validate")
    text += "\n[mc]\nn_realizations = 5000\nsigma_grid = 0.02,0.05\n"
    cfg = write_config(tmp_path / "run.ini", text)
    assert main(["mc-validate", "--config", cfg]) == 0
    lines = (tmp_path / "out" / "validate.csv").read_text().splitlines()
    assert lines[0] == "sigma,g_mc,g_stderr,g_pred,z"
    zs = [abs(float(r.split(",")[4])) for r in lines[1:]]
    assert max(zs) < 4.0


def test_single_qubit_experiment_cli(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", SQ_REPORT.format(out=tmp_path / "out")
                       .replace("experiment = report", "experiment = single-qubit")
                       .replace("h0z = 4.0", "h0z = 1.0"))
    assert main(["single-qubit", "--config", cfg]) == 0
    assert "beta_x_m=" in capsys.readouterr().out
    lines = (tmp_path / "out" / "single_qubit.csv").read_text().splitlines()
    assert lines[0] == "beta,c2_x,c2_y"
    assert (tmp_path / "out" / "single_qubit.png").exists()


def test_console_entry_point(tmp_path):
    cfg = write_config(tmp_path / "run.ini", SQ_REPORT.format(out=tmp_path / "out"))
    proc = subprocess.run([sys.executable, "-m", "qfirob.cli", "report", "--config", cfg],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "classification=DSP" in proc.stdout


def test_emit_report_direct(tmp_path):
    spec = single_qubit_spec(SingleQubitParams(h0z=4.0, t=1.0), 1.0, 1.0, 0.0)
    rep = robustness_report(spec)
    emit_report(rep, tmp_path / "r.json", probe_echo={"type": "single-qubit"}, seed=1)
    data = load_report(tmp_path / "r.json")
    assert data["sigma_max"] == pytest.approx(1 / np.sqrt(abs(data["c2_total"])), rel=1e-12)
    assert data["tool_version"]
