import json

import pytest

from perturbed_fourier.cli import ConfigError, main, parse_pairs, parse_value, resolve_params
from perturbed_fourier.experiments import EXPERIMENTS, fit_log_slope
from perturbed_fourier.io import load_grid, load_rule, read_csv


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_bounds_table(tmp_path):
    assert run(tmp_path, "bounds-table") == 0
    rows = read_csv(tmp_path / "bounds-table.csv")
    assert [float(r["alpha"]) for r in rows] == [0.0, 0.1, 0.2, 0.24]
    assert float(rows[2]["weight_bound"]) == pytest.approx(28.40, abs=5e-3)
    assert rows[0]["neg_lower_N"] == ""
    man = json.loads((tmp_path / "bounds-table.manifest.json").read_text())
    assert man["config"]["alpha"] == [0.0, 0.1, 0.2, 0.24]
    assert man["version"] == "0.1.0" and man["exit_status"] == 0


def test_neg_weight_search(tmp_path):
    assert run(tmp_path, "neg-weight-search", "alpha=0.2", "Nmax=100") == 0
    man = json.loads((tmp_path / "neg-weight-search.manifest.json").read_text())
    hit = man["summary"]["first_negative_N[0.2]"]
    assert hit is not None and hit <= 84 and hit % 2 == 0


def test_identical_configs_give_identical_csv(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# small sweep\nalpha = {0.1, 0.3}\nN = 8,16\ntrials = 3\n")
    assert main(["weights-sweep", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["weights-sweep", "--config", str(cfg), "--out", str(b), "--threads", "2"]) == 0
    assert (a / "weights-sweep.csv").read_bytes() == (b / "weights-sweep.csv").read_bytes()
    rows = read_csv(a / "weights-sweep.csv")
    assert len(rows) == 12
    assert list(rows[0])[:5] == ["alpha", "N", "min_weight", "abs_sum", "exactness_residual"]


def test_unknown_key_is_an_error(tmp_path, capsys):
    assert run(tmp_path, "kadec-sweep", "trails=3") == 2
    assert "unknown key" in capsys.readouterr().err


def test_unknown_command(tmp_path):
    with pytest.raises(SystemExit):
        run(tmp_path, "fft-sweep")


def test_failed_assertion_sets_exit_status(tmp_path):
    status = run(tmp_path, "oversample-sweep", "N=32,128", "factor=1.0001")
    assert status == 1
    rows = read_csv(tmp_path / "oversample-sweep.csv")  # partial output kept
    assert len(rows) == 2 and "false" in {r["passed"] for r in rows}


def test_env_var_sets_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("PERTURBED_FOURIER_OUT", str(tmp_path / "env"))
    assert main(["lemma-a-check", "N_max=10"]) == 0
    assert (tmp_path / "env" / "lemma-a-check.csv").exists()


def test_seed_flag(tmp_path):
    assert run(tmp_path, "conditioning-sweep", "N=8", "trials=2", "--seed", "40") == 0
    man = json.loads((tmp_path / "conditioning-sweep.manifest.json").read_text())
    assert man["seeds"] == [40, 41]


def test_make_grid(tmp_path):
    assert run(tmp_path, "make-grid", "N=6", "alpha=0.25", "kind=alternating",
               "weights=true") == 0
    g = load_grid(tmp_path / "grid.json")
    assert g.N == 6 and g.kind == "alternating"
    assert load_rule(tmp_path / "rule.json").weights.sum() == pytest.approx(6.283185307179586)


@pytest.mark.parametrize("cmd,args", [
    ("kadec-sweep", ["N=16,32", "trials=3"]),
    ("conditioning-sweep", ["alpha=0.05,0.24", "N=16", "trials=2"]),
    ("interp-convergence", ["N=8,16,24"]),
    ("quad-convergence", ["N=16,32"]),
    ("quad-convergence", ["function=runge_trig", "N=4,8,12"]),
    ("mz-decay", ["alpha=0.1", "N=16", "random=2"]),
    ("oversample-sweep", ["mode=nonneg", "alpha=0.4", "N=32"]),
    ("lemma-a-check", ["alpha=0.45", "N_max=20"]),
])
def test_experiments_run_clean(tmp_path, cmd, args):
    assert run(tmp_path, cmd, *args) == 0
    rows = read_csv(tmp_path / f"{cmd}.csv")
    assert rows and list(rows[0]) == list(EXPERIMENTS[cmd].columns)


@pytest.mark.slow
def test_kadec_sweep_full(tmp_path):
    assert run(tmp_path, "kadec-sweep", "alpha=0.1", "N={32,128,512}", "trials=100") == 0
    assert len(read_csv(tmp_path / "kadec-sweep.csv")) == 300


def test_parse_value():
    assert parse_value("{1, 2,3}", [0]) == [1, 2, 3]
    assert parse_value("0.5", [0.1]) == [0.5]
    assert parse_value("1e3", 5) == 1000
    assert parse_value("no", True) is False
    with pytest.raises(ConfigError):
        parse_value("1,2", 0.1)
    with pytest.raises(ConfigError):
        parse_value("2.5", 3)
    with pytest.raises(ConfigError):
        parse_value("maybe", True)


def test_parse_pairs_errors():
    with pytest.raises(ConfigError, match="expected key=value"):
        parse_pairs(["alpha 0.1"], {"alpha": 0.1}, "cfg")
    with pytest.raises(ConfigError):
        resolve_params({"alpha": 0.1}, seed=3)


def test_fit_log_slope():
    assert fit_log_slope([1, 2, 3], [0.5, 0.25, 0.125]) == pytest.approx(-0.6931471805599453)
    assert fit_log_slope([1, 2], [1e-13, 1e-14]) is None
