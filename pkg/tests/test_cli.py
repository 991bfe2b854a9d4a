import os

import pytest

from synthpanel.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, main


@pytest.fixture
def simulated(tmp_path):
    data = tmp_path / "counts.csv"
    assert main(["simulate", "--units", "8", "--tau", "-150", "--seed", "3", "--out", str(data)]) == EXIT_OK
    return data


def _config(tmp_path, data, **extra):
    lines = [f"input = {data}", "treated_unit = treated", "t0_year = 2016",
             "bootstrap_replications = 30", "seed = 5"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path = tmp_path / "run.cfg"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_simulate_to_stdout(capsys):
    assert main(["simulate", "--units", "3", "--years", "3", "--t0", "2014", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "unit,year,month,value" and len(out) == 1 + 3 * 3 * 7


def test_estimate_writes_reports(tmp_path, simulated, capsys):
    cfg = _config(tmp_path, simulated)
    assert main(["estimate", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_OK
    assert "scm: average effect" in capsys.readouterr().out
    assert os.path.exists(tmp_path / "o" / "effects_sdid.csv")


def test_bootstrap_dump_identical_across_workers(tmp_path, simulated):
    cfg = _config(tmp_path, simulated, estimator="sdid")
    assert main(["bootstrap", "--config", cfg, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["bootstrap", "--config", cfg, "--workers", "2", "--out", str(tmp_path / "b")]) == EXIT_OK
    a = (tmp_path / "a" / "bootstrap_sdid.csv").read_bytes()
    b = (tmp_path / "b" / "bootstrap_sdid.csv").read_bytes()
    assert a == b and a.count(b"\n") == 31


def test_diagnose_prints_reports(tmp_path, simulated, capsys):
    assert main(["diagnose", "--config", _config(tmp_path, simulated)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "year,min,max,treated,inside" in out and "unit,slope,divergence,flagged" in out


def test_oracle_from_file(tmp_path, capsys):
    inst = tmp_path / "inst.csv"
    inst.write_text("treated,a,b\n1.0,0.0,2.0\n3.0,2.0,4.0\n")
    assert main(["oracle", "--step", "0.01", "--input", str(inst)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "donor,grid_weight,solver_weight"
    assert out[1].startswith("a,0.5,")


def test_validation_failure_exit_code(tmp_path, simulated, capsys):
    cfg = _config(tmp_path, simulated, treated_unit_extra="x")
    assert main(["estimate", "--config", cfg]) == EXIT_INVALID
    assert "unknown key" in capsys.readouterr().err
    bad = tmp_path / "bad.cfg"
    bad.write_text(f"input = {simulated}\ntreated_unit = nowhere\nt0_year = 2016\n")
    assert main(["estimate", "--config", str(bad)]) == EXIT_INVALID
    inst = tmp_path / "inst.csv"
    inst.write_text("x,a\n1,2\n")
    assert main(["oracle", "--input", str(inst)]) == EXIT_INVALID


def test_io_failure_exit_code(tmp_path, capsys):
    assert main(["estimate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_IO
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"input = {tmp_path / 'nope.csv'}\ntreated_unit = t\nt0_year = 2016\n")
    assert main(["diagnose", "--config", str(cfg)]) == EXIT_IO
    assert "error:" in capsys.readouterr().err
