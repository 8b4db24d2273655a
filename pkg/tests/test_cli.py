import csv
import io
import json
import shutil
import subprocess

import pytest

from squeezecool.cli import ConfigError, main, parse_args, parse_grid


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_unknown_key_names_key(capsys):
    code, _, err = run_cli(capsys, "cool", "--bogus-key", "1")
    assert code == 2 and "bogus-key" in err


def test_unknown_command_and_missing_value(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 2
    code, _, err = run_cli(capsys, "cool", "--kappa")
    assert code == 2 and "kappa" in err
    assert run_cli(capsys)[0] == 2


def test_invalid_value_names_key(capsys):
    code, _, err = run_cli(capsys, "cool", "--kappa", "abc")
    assert code == 2 and "kappa" in err
    code, _, err = run_cli(capsys, "cool", "--q-m", "-3")
    assert code == 2 and "q_m" in err


def test_unstable_point(capsys):
    code, out, _ = run_cli(capsys, "cool", "--kappa", "4", "--delta", "-1", "--g", "2")
    assert code == 0 and rows(out)[0]["status"] == "unstable"
    code, _, err = run_cli(capsys, "squeeze", "--kappa", "4", "--delta", "-1", "--g", "2")
    assert code == 3 and "numerical" in err


def test_key_aliases():
    a = parse_args(["cool", "--n-th", "5", "--Q_m", "10"])
    b = parse_args(["cool", "--nth", "5", "--qm", "10"])
    assert a.params == b.params == {"n_th": "5", "q_m": "10"}


def test_grid_parsing():
    ax = parse_grid("g,0.1,1,4,log")
    assert ax.name == "g" and ax.count == 4 and ax.scale == "log"
    with pytest.raises(ConfigError):
        parse_grid("g,0,1,4,log")
    with pytest.raises(ConfigError):
        parse_grid("omega,0,1,4")
    with pytest.raises(ConfigError):
        parse_args(["cool", "--grid", "g,0.1,1,3"])


def test_cool_summary(capsys):
    code, out, _ = run_cli(capsys, "cool", "--kappa", "400", "--delta", "-200", "--g", "5.345",
                           "--nth", "1000", "--qm", "1e5")
    assert code == 0
    (row,) = rows(out)
    assert row["status"] == "ok"
    assert float(row["n_ss"]) == pytest.approx(0.12, rel=0.1)
    assert "# param.scheme = IS" in out


def test_sweep_keeps_unstable_rows_and_is_deterministic(capsys, tmp_path):
    args = ["sweep", "--kappa", "4", "--delta", "-1", "--grid", "g,0.1,1.0,4",
            "--grid", "n_th,10,100,2,log"]
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    r = rows(out1)
    assert len(r) == 8
    status = {row["status"] for row in r}
    assert "ok" in status and "unstable" in status
    _, out3, _ = run_cli(capsys, *args, "--jobs", "3")
    assert out1 == out3
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# base point\nkappa = 4\ndelta=-1\ngrid = g,0.1,1.0,4\n"
                   "grid = n_th,10,100,2,log\n")
    _, outc, _ = run_cli(capsys, "sweep", "--config", str(cfg))
    assert outc == out1


def test_flags_override_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kappa = 40\nn_th = 5\n")
    _, out, _ = run_cli(capsys, "cool", "--config", str(cfg), "--kappa", "8")
    assert "# param.kappa = 8" in out and "# param.n_th = 5" in out


def test_spectrum_is_null_at_heating_sideband(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--kappa", "4", "--delta", "-1", "--points", "41")
    assert code == 0
    r = {float(x["omega"]): x for x in rows(out)}
    assert float(r[-1.0]["is"]) == 0.0
    assert float(r[1.0]["sb"]) > 0


def test_limits_table(capsys):
    code, out, _ = run_cli(capsys, "limits", "--scheme", "all", "--nth", "1000", "--qm", "1e5",
                           "--kappa-grid", "4..4000:4")
    assert code == 0
    r = rows(out)
    assert len(r) == 4
    assert all(float(x["is"]) == pytest.approx(0.12) for x in r)
    assert float(r[0]["sb"]) == pytest.approx(1.210997512, rel=1e-9)
    assert float(r[-1]["sd"]) == pytest.approx(40.24845673, rel=1e-9)


def test_regions_sd_boundary(capsys):
    code, out, _ = run_cli(capsys, "regions", "--qm", "1e5", "--nth-grid", "1000..1000:1")
    assert code == 0
    (row,) = rows(out)
    assert float(row["sd_k4"]) == pytest.approx(20.0)
    assert row["is_k4"] == "inf"


def test_reduce3(capsys):
    code, out, _ = run_cli(capsys, "reduce3", "--delta-1", "-2", "--delta-2", "400",
                           "--nu", "0.01", "--g-1", "1e-4", "--g-2", "1e-3", "--kappa-1", "4",
                           "--kappa-2", "4", "--eps-1", "500", "--eps-2", "1", "--gamma",
                           "1e-3", "--n-th", "10")
    assert code == 0
    r = rows(out)
    assert r and float(r[0]["residual"]) < 1e-10 and r[0]["valid"] == "1"


def test_squeeze_json(capsys):
    code, out, _ = run_cli(capsys, "squeeze", "--kappa", "8", "--delta", "-3", "--g", "0.5",
                           "--nth", "2", "--qm", "1e3", "--points", "11", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["omega", "s_xx", "theta_opt", "r_mag"]
    assert len(doc["data"]["omega"]) == 11


def test_output_directory_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SQUEEZECOOL_OUTDIR", str(tmp_path))
    code, out, _ = run_cli(capsys, "limits", "--kappa-grid", "4..40:2")
    assert code == 0 and out == ""
    assert rows((tmp_path / "limits.csv").read_text())


def test_figure_writes_data_and_manifest(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "figure", "fig2b", "--out", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "fig2b_manifest.json").read_text())
    data = rows((tmp_path / "fig2b.csv").read_text())
    assert set(man["files"]["fig2b"]) == set(data[0])
    assert all(v["description"] for v in man["files"]["fig2b"].values())
    assert run_cli(capsys, "figure", "fig9")[0] == 2
    assert run_cli(capsys, "figure", "fig2b", "--nonsense", "1")[0] == 2


@pytest.mark.skipif(shutil.which("squeezecool") is None, reason="entry point not installed")
def test_console_script():
    proc = subprocess.run(["squeezecool", "limits", "--kappa-grid", "4..4:1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "0.12" in proc.stdout
    proc = subprocess.run(["squeezecool", "cool", "--nope", "1"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 2
