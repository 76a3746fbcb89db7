import csv
import json

import pytest

from qchaos.borders import RegimeReport
from qchaos.cli import main
from qchaos.config import ConfigError, RunConfig, config_from_dict, load_config
from qchaos.spectrum import Spectrum
from qchaos.tunnelling import TunnellingReport

HARMONIC = {
    "system": {"m": 1.0, "hbar": 1.0, "eps_p": 1.0},
    "potential": {"kind": "harmonic", "x_min": -10.0, "x_max": 10.0, "grid_n": 2048},
    "n_levels": 3,
}


def write_cfg(tmp_path, extra=None, name="run.json"):
    cfg = dict(HARMONIC, **(extra or {}))
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_spectrum_command(tmp_path):
    out = tmp_path / "o"
    assert main(["spectrum", "--config", write_cfg(tmp_path), "--out", str(out)]) == 0
    rows = read_csv(out / "levels.csv")
    assert rows[0] == ["n", "level", "eps_star"] and len(rows) == 4
    assert [float(r[1]) for r in rows[1:]] == pytest.approx([0.5, 1.5, 2.5], rel=1e-6)
    spec = Spectrum.from_dict(json.loads((out / "spectrum.json").read_text()))
    assert len(spec.levels) == 3
    assert (out / "config.echo.json").exists()


def test_missing_potential_file(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"potential": {"kind": "table", "path": "nope.csv"}})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "nope.csv" in capsys.readouterr().err


def test_zero_levels_rejected(tmp_path, capsys):
    rc = main(["spectrum", "--config", write_cfg(tmp_path), "--n-levels", "0",
               "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "n_levels" in capsys.readouterr().err


def test_unknown_field_rejected(tmp_path):
    assert main(["spectrum", "--config", write_cfg(tmp_path, {"bogus": 1})]) == 2


def test_too_many_levels_is_compute_error(tmp_path):
    cfg = write_cfg(tmp_path, {"potential": {"kind": "harmonic", "x_min": -2.0,
                                             "x_max": 2.0, "grid_n": 256}})
    rc = main(["spectrum", "--config", cfg, "--n-levels", "6", "--out", str(tmp_path / "o")])
    assert rc == 3


def test_borders_running_example(tmp_path):
    out = tmp_path / "o"
    assert main(["--config", write_cfg(tmp_path), "borders", "--E", "0.6",
                 "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["E_c"] == pytest.approx(0.75, rel=1e-6)
    assert rep["E_q"] == pytest.approx(0.5, rel=1e-6)
    assert rep["delta_E"] == pytest.approx(0.25, rel=1e-5)
    assert rep["regime"] == "global_chaos"
    assert RegimeReport.from_dict(rep).to_dict() == rep


def test_borders_sweep(tmp_path):
    out = tmp_path / "o"
    rc = main(["borders", "--config", write_cfg(tmp_path), "--sweep", "E", "--sweep-min",
               "0.1", "--sweep-max", "5", "--sweep-n", "100", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out / "sweep.csv")
    assert rows[0] == ["E", "K", "E_c", "E_q", "K_c", "K_q", "regime"]
    assert len(rows) == 101
    E = [float(r[0]) for r in rows[1:]]
    assert E == sorted(E)


def test_borders_time_dependent(tmp_path):
    out = tmp_path / "o"
    rc = main(["borders", "--config", write_cfg(tmp_path), "--E", "0.6",
               "--mode", "time_dependent", "--out", str(out)])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert "omega_0c" in rep and "K" in rep
    assert "E_q" not in rep


def _ensemble_files(tmp_path, name):
    out = tmp_path / name
    rc = main(["ensemble", "--config", write_cfg(tmp_path), "--E", "2.0", "--n-p", "2",
               "--t-max", "200", "--sigma", "1.0", "--rate0", "0.5", "--seed", "7",
               "--out", str(out)])
    assert rc == 0
    return {f: (out / f).read_bytes()
            for f in ("trace.csv", "pdd.csv", "ensemble.json", "realisations.json")}


def test_ensemble_is_reproducible(tmp_path):
    a = _ensemble_files(tmp_path, "a")
    b = _ensemble_files(tmp_path, "b")
    assert a == b
    summary = json.loads(a["ensemble.json"])
    assert summary["seed"] == 7 and len(summary["alphas"]) == 3


def test_tunnel_command(tmp_path):
    rs = {"alphas": [0.25] * 4, "realisations": [
        {"index": i, "shift": 0.0, "barrier_heights": [h]}
        for i, h in enumerate((1.2, 0.8, 2.0, 0.4))]}
    (tmp_path / "rs.json").write_text(json.dumps(rs))
    cfg = write_cfg(tmp_path, {"tunnel": {"realisations": "rs.json", "eps_s": 1.0,
                                          "unperturbed_height": 1.2, "delta_eps_s": 0.3}})
    out = tmp_path / "o"
    assert main(["tunnel", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "tunnel.json").read_text())
    assert rep["p_beta"] == 0.5 and rep["P_beta"] == 0.5
    assert TunnellingReport.from_dict(rep).to_dict() == rep


def test_tunnel_beta_out_of_range(tmp_path):
    rs = {"alphas": [1.0], "realisations": [{"index": 0, "shift": 0.0,
                                             "barrier_heights": [1.0]}]}
    (tmp_path / "rs.json").write_text(json.dumps(rs))
    rc = main(["tunnel", "--realisations", str(tmp_path / "rs.json"), "--beta", "3",
               "--eps-s", "1", "--unperturbed-height", "1", "--delta-eps-s", "0.1",
               "--out", str(tmp_path / "o")])
    assert rc == 3


def test_classical_command(tmp_path):
    out = tmp_path / "o"
    assert main(["classical", "--K", "5", "--n-orbits", "300", "--n-steps", "3000",
                 "--out", str(out)]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["motion"] == "diffusive"
    assert verdict["K_c"] == pytest.approx(1.0)
    assert len(read_csv(out / "variance.csv")) == 3001


def test_config_round_trip(tmp_path):
    cfg = load_config(write_cfg(tmp_path))
    again = config_from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert RunConfig().n_levels >= 1


def test_config_bad_section():
    with pytest.raises(ConfigError, match="noise"):
        config_from_dict({"noise": {"sigma": 1.0, "colour": "pink"}})
