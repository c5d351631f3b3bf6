import json

import numpy as np
import pytest

from dde_steps.cli import CustomRhs, ExperimentConfig, main
from dde_steps.core import ConfigurationError, read_trajectory_csv


def run(tmp_path, cfg, command=None, name="cfg.json", out="out", jobs=None):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    argv = [command or next(c for c in ("solve", "ladder", "bounds", "probe") if c in cfg), "--config", str(path)]
    argv += ["--out", str(tmp_path / out)]
    if jobs is not None:
        argv += ["--jobs", str(jobs)]
    return main(argv), tmp_path / out


ZERO7 = {"model": "custom", "params": {"d": 1, "rhs": ["0.0"]}, "tau": 1.0, "n": 2, "eta": [7.0]}


def test_solve_custom_zero(tmp_path):
    code, out = run(tmp_path, {**ZERO7, "solve": {"N": 4}})
    assert code == 0
    t, x = read_trajectory_csv(out / "trajectory.csv")
    assert len(t) == 3 * 4 + 1 and np.all(x == 7.0)
    assert json.loads((out / "config.json").read_text())["solve"] == {"N": 4}


def test_solve_mackey_glass_rows(tmp_path):
    code, out = run(tmp_path, {"model": "mackey_glass", "solve": {"N": 64}})
    assert code == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x0"
    assert len(lines) - 1 == 501 * 64 + 1


def test_solve_sir_aligned_lags(tmp_path):
    code, out = run(tmp_path, {"model": "sir8", "solve": {"N": 18}})
    assert code == 0
    t, x = read_trajectory_csv(out / "trajectory.csv")
    assert x.shape == (481 * 18 + 1, 8)
    assert np.all(np.isfinite(x))
    assert t[-1] == 240.5


def test_solve_divergence_exit_3(tmp_path, capsys):
    cfg = {"model": "custom", "params": {"rhs": ["y[0] * y[0]"]}, "tau": 1.0, "n": 20, "eta": [1.0], "solve": {"N": 1}}
    with np.errstate(over="ignore"):
        code, out = run(tmp_path, cfg)
    assert code == 3
    text = (out / "trajectory.csv").read_text()
    assert text.endswith("# diverged_at=11\n")
    assert len(text.splitlines()) == 1 + 11 + 1


def test_ladder_metal1(tmp_path):
    code, out = run(tmp_path, {"model": "metal1", "ladder": {"N_values": [20, 40, 80], "refinement": 4}})
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["slope"] > 0.8
    assert summary["theoretical_rate"] == pytest.approx(0.5 * 0.714**4)
    assert (out / "ladder.csv").read_text().startswith("N,h,sup_error\n20,")
    assert len((out / "plot.dat").read_text().splitlines()) == 4


def test_ladder_zero_field_exit_4(tmp_path, capsys):
    code, out = run(tmp_path, {**ZERO7, "ladder": {"N_values": [2, 4], "refinement": 2}})
    assert code == 4
    assert "all-zero errors" in capsys.readouterr().out
    assert "all-zero errors" in json.loads((out / "summary.json").read_text())["warnings"]


def test_bounds_unit_profile(tmp_path):
    prof = {"K": 1.0, "alpha": 1.0, "betas": [1.0, 1.0], "gammas": [1.0]}
    code, out = run(tmp_path, {**ZERO7, "n": 5, "eta": [0.0], "bounds": {"profile": prof}})
    assert code == 0
    rep = json.loads((out / "bounds.json").read_text())
    assert rep["rate_per_segment"] == [1.0, 0.5, 0.5, 0.5, 0.5, 0.5]
    assert rep["K"][0] == pytest.approx(np.e, rel=1e-15)


def test_bounds_metal1(tmp_path):
    code, out = run(tmp_path, {"model": "metal1", "bounds": {}})
    assert code == 0
    rep = json.loads((out / "bounds.json").read_text())
    assert len(rep["Ktilde"]) == 6 and np.isfinite(rep["Ktilde"][0])


def test_bounds_custom_without_profile_exit_2(tmp_path):
    assert run(tmp_path, {**ZERO7, "bounds": {}})[0] == 2


def test_probe_metal1(tmp_path):
    box = {"t": [0, 10], "y": [-50, 50], "z": [-50, 50]}
    code, out = run(tmp_path, {"model": "metal1", "probe": {"box": box, "samples": 500, "seed": 1}})
    assert code == 0
    assert json.loads((out / "probe.json").read_text())["n_violations"] == 0


def test_probe_decay_declared(tmp_path):
    prof = {"K": 1.0, "H": -1.0, "L": 1.0, "alpha": 1.0, "betas": [1.0, 1.0], "gammas": [1.0]}
    cfg = {**ZERO7, "params": {"rhs": ["-y[0]"]}, "probe": {"samples": 200, "profile": prof}}
    code, out = run(tmp_path, cfg, jobs=2)
    rep = json.loads((out / "probe.json").read_text())
    assert code == 0 and rep["n_violations"] == 0 and rep["H_est"] == -1.0


def test_probe_mackey_glass_understated_growth(tmp_path):
    prof = {"K": 0.05, "H": 0.0, "L": 1.0, "alpha": 1.0, "betas": [1.0, 1.0], "gammas": [1.0]}
    box = {"y": [-1e6, 1e6], "z": [-1, 1]}
    code, out = run(tmp_path, {"model": "mackey_glass", "probe": {"box": box, "samples": 500, "profile": prof}})
    assert code == 0
    assert json.loads((out / "probe.json").read_text())["n_violations"] > 0


@pytest.mark.parametrize(
    "cfg",
    [
        {"model": "nope", "solve": {"N": 4}},
        {"model": "metal1"},
        {"model": "metal1", "solve": {"N": 4}, "bounds": {}},
        {"model": "metal1", "solve": {"N": 4}, "colour": "red"},
        {"model": "metal1", "solve": {}},
        {"model": "metal1", "params": {"A": -1}, "solve": {"N": 4}},
        {"model": "custom", "params": {"rhs": ["0"]}, "solve": {"N": 4}},
        {"model": "sir8", "params": {"tau1": 5.3}, "solve": {"N": 2}},
        {"model": "metal1", "ladder": {"N_values": [40, 20]}},
    ],
)
def test_config_errors_exit_2(tmp_path, cfg):
    command = next((c for c in ("solve", "ladder", "bounds", "probe") if c in cfg), "solve")
    assert run(tmp_path, cfg, command=command)[0] == 2


def test_command_mismatch_and_bad_json(tmp_path):
    assert run(tmp_path, {"model": "metal1", "solve": {"N": 4}}, command="ladder")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_config_round_trip():
    raw = {"model": "sir8", "params": {"beta": 0.5}, "n": 10, "ladder": {"N_values": [2, 4], "refinement": 5}}
    once = ExperimentConfig.from_dict(raw).dumps()
    twice = ExperimentConfig.from_dict(json.loads(once)).dumps()
    assert once == twice


def test_byte_identical_outputs(tmp_path):
    cfg = {"model": "metal2", "ladder": {"N_values": [20, 40], "refinement": 4}}
    run(tmp_path, cfg, out="a")
    run(tmp_path, cfg, out="b", jobs=2)
    for name in ("config.json", "ladder.csv", "summary.json", "plot.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_jobs_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("DDE_STEPS_JOBS", "2")
    code, out = run(tmp_path, {"model": "metal1", "ladder": {"N_values": [20, 40], "refinement": 2}})
    assert code == 0


def test_custom_rhs_validation():
    with pytest.raises(ConfigurationError):
        CustomRhs(("y[0]", "z[0]"), d=1)
    with pytest.raises(ConfigurationError):
        CustomRhs(("y[0] +",), d=1)
    rhs = CustomRhs(("-y[0] + zs[0][0] + t",), d=1)
    assert rhs(1.0, np.array([2.0]), [np.array([3.0])]).tolist() == [2.0]
