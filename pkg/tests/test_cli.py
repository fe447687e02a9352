"""Config parsing, command dispatch, CSV output, and exit codes."""

import dataclasses

import pytest

from harqopt import cli, harq_analysis
from harqopt.errors import ConfigError


def write_config(tmp_path, keys, name="run.cfg"):
    lines = [f"{k} = {v}" for k, v in keys.items()]
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


SMALL = {
    "snr_d_db": 3.0,
    "snr_u_db": -10.0,
    "m_max": 2,
    "units_total": 16,
    "epsilon": 0.05,
    "mc.n_episodes": 10000,
}


def test_load_config_defaults(tmp_path):
    cfg = cli.load_config(write_config(tmp_path, {}))
    assert cfg.snr_d_db == 3.0 and cfg.snr_u_db == -10.0
    assert cfg.m_max == 4 and cfg.units_total == 64
    assert cfg.n_b == 1024 and cfg.n_m == 4096
    assert cfg.epsilon == 0.01 and cfg.route == "gaussian"
    assert cfg.unit_rho == pytest.approx(1.0 / 16.0)


def test_load_config_comments_and_optimizer_keys(tmp_path):
    path = write_config(tmp_path, {
        "m_max": 3,
        "alphas": "0.3, 0.7  # trailing comment",
        "optimizer.alpha_hi": 2.0,
        "optimizer.init_alpha": 0.25,
    })
    cfg = cli.load_config(path)
    assert cfg.alphas == (0.3, 0.7)
    assert cfg.optimizer.alpha_box == (0.0, 2.0)
    assert cfg.optimizer.init_alpha == 0.25
    assert cfg.optimizer.init_alphas == (0.3, 0.7)


def test_load_config_epsilon_bound_names_field(tmp_path):
    path = write_config(tmp_path, {"epsilon": 1.5})
    with pytest.raises(ConfigError, match=r"epsilon must lie in \(0, 1\)"):
        cli.load_config(path)


def test_load_config_unknown_key_lists_accepted(tmp_path):
    path = write_config(tmp_path, {"command": "sweep"})
    with pytest.raises(ConfigError, match=r"unknown key 'command'.*accepted keys.*snr_u_db"):
        cli.load_config(path)


def test_load_config_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("snr_d_db = 3\nnot a key value pair\n", encoding="utf-8")
    with pytest.raises(ConfigError, match=r":2: expected 'key = value'"):
        cli.load_config(str(path))
    path.write_text("m_max = four\n", encoding="utf-8")
    with pytest.raises(ConfigError, match=r":1: bad value for m_max"):
        cli.load_config(str(path))


def test_load_config_snr_window(tmp_path):
    path = write_config(tmp_path, {"snr_d_db": 15.0})
    with pytest.raises(ConfigError, match=r"snr_d_db.*-20 <= snr_d_db <= 10"):
        cli.load_config(path)


def test_load_config_rhos_units_budget(tmp_path):
    path = write_config(tmp_path, {"m_max": 2, "units_total": 16,
                                   "rhos_units": "12, 12"})
    with pytest.raises(ConfigError, match=r"rhos_units.*sum <= units_total"):
        cli.load_config(path)


def test_missing_config_file_exits_2(tmp_path, capsys):
    rc = cli.main(["analyze", "--config", str(tmp_path / "nope.cfg")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_bad_command_is_argparse_exit():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate", "--config", "x.cfg"])


def test_negative_seed_exits_2(tmp_path, capsys):
    path = write_config(tmp_path, SMALL)
    assert cli.main(["analyze", "--config", path, "--seed", "-3"]) == 2


def test_analyze_writes_deterministic_csv(tmp_path):
    path = write_config(tmp_path, SMALL)
    out1, out2 = str(tmp_path / "a1.csv"), str(tmp_path / "a2.csv")
    assert cli.main(["analyze", "--config", path, "--out", out1]) == 0
    assert cli.main(["analyze", "--config", path, "--out", out2]) == 0
    data = open(out1, "rb").read()
    assert data == open(out2, "rb").read()
    assert b"\r" not in data
    header = data.decode().splitlines()[0].split(",")
    for col in ("p_fail_1", "p_occur_2", "p_out_stage_2", "p_out_unreliable",
                "p_out_reliable", "expected_symbols", "throughput"):
        assert col in header


def test_analyze_default_output_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = write_config(tmp_path, SMALL)
    assert cli.main(["analyze", "--config", path]) == 0
    assert (tmp_path / "harqopt_analyze.csv").exists()


def test_simulate_deterministic_and_seed_override(tmp_path):
    path = write_config(tmp_path, SMALL)
    out1, out2, out3 = (str(tmp_path / f"s{i}.csv") for i in (1, 2, 3))
    assert cli.main(["simulate", "--config", path, "--out", out1]) == 0
    assert cli.main(["simulate", "--config", path, "--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()
    assert cli.main(["simulate", "--config", path, "--out", out3,
                     "--seed", "9"]) == 0
    assert open(out1, "rb").read() != open(out3, "rb").read()


def test_optimize_writes_solution_and_trace(tmp_path):
    path = write_config(tmp_path, SMALL)
    out = str(tmp_path / "opt.csv")
    assert cli.main(["optimize", "--config", path, "--out", out]) == 0
    lines = open(out, encoding="utf-8").read().splitlines()
    header, row = lines[0].split(","), lines[1].split(",")
    fields = dict(zip(header, row))
    assert fields["feasible"] == "1" and fields["converged"] == "1"
    assert float(fields["p_out_unreliable"]) <= 0.05 * (1 + 1e-9)
    assert float(fields["throughput"]) > 0.0
    trace = open(tmp_path / "opt_trace.csv", encoding="utf-8").read().splitlines()
    assert trace[0] == "iteration,objective"
    assert len(trace) >= 2


def test_optimize_infeasible_exits_3(tmp_path, capsys):
    path = write_config(tmp_path, {**SMALL, "epsilon": 1e-4})
    rc = cli.main(["optimize", "--config", path,
                   "--out", str(tmp_path / "x.csv")])
    assert rc == 3
    assert "infeasible" in capsys.readouterr().err


def test_validate_agreement_exit_0(tmp_path, capsys):
    path = write_config(tmp_path, SMALL)
    out = str(tmp_path / "v.csv")
    assert cli.main(["validate", "--config", path, "--out", out]) == 0
    assert "worst |z|" in capsys.readouterr().out
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0] == "quantity,analytic,simulated,stderr,z_score"
    names = [ln.split(",")[0] for ln in lines[1:]]
    assert "throughput" in names and "p_out" in names
    # gaussian-vs-convolution gap rows ride along for approximation audits
    assert "p_fail_gaussian_1" in names and "p_fail_gaussian_2" in names


def test_validate_detects_biased_model(tmp_path, monkeypatch, capsys):
    path = write_config(tmp_path, SMALL)
    real = harq_analysis.unreliable_throughput

    def biased(*args, **kwargs):
        bd = real(*args, **kwargs)
        return dataclasses.replace(bd, p_out_unreliable=bd.p_out_unreliable + 0.05)

    monkeypatch.setattr(harq_analysis, "unreliable_throughput", biased)
    rc = cli.main(["validate", "--config", path, "--out", str(tmp_path / "v.csv")])
    assert rc == 1
    assert "FAIL" in capsys.readouterr().err


def test_validate_duplicated_ack_mode(tmp_path):
    path = write_config(tmp_path, {**SMALL, "mc.feedback_mode": "duplicated-ack"})
    assert cli.main(["validate", "--config", path,
                     "--out", str(tmp_path / "vd.csv")]) == 0


def test_sweep_requires_axis(tmp_path, capsys):
    path = write_config(tmp_path, SMALL)
    assert cli.main(["sweep", "--config", path,
                     "--out", str(tmp_path / "x.csv")]) == 2
    assert "sweep.axis" in capsys.readouterr().err


def test_sweep_analyze_over_alpha(tmp_path):
    path = write_config(tmp_path, {
        **SMALL, "sweep.axis": "alpha", "sweep.values": "0.2, 0.5, 0.8",
        "sweep.mode": "analyze",
    })
    out = str(tmp_path / "sw.csv")
    assert cli.main(["sweep", "--config", path, "--out", out,
                     "--workers", "1"]) == 0
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0].startswith("alpha,")
    assert len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0.2", "0.5", "0.8"]


def test_sweep_min_outage_mode(tmp_path):
    path = write_config(tmp_path, {
        **SMALL, "sweep.axis": "snr_u_db", "sweep.values": "-12, -8",
        "sweep.mode": "min_outage", "sweep.alphas": "0.0, 0.5",
    })
    out = str(tmp_path / "mo.csv")
    assert cli.main(["sweep", "--config", path, "--out", out,
                     "--workers", "1"]) == 0
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0] == "snr_u_db,min_outage_alpha_0,min_outage_alpha_0.5"
    assert len(lines) == 3


def test_sweep_parallel_matches_serial(tmp_path):
    path = write_config(tmp_path, {
        **SMALL, "sweep.axis": "alpha", "sweep.values": "0.3, 0.9",
        "sweep.mode": "analyze",
    })
    serial, parallel = str(tmp_path / "s.csv"), str(tmp_path / "p.csv")
    assert cli.main(["sweep", "--config", path, "--out", serial,
                     "--workers", "1"]) == 0
    assert cli.main(["sweep", "--config", path, "--out", parallel,
                     "--workers", "2"]) == 0
    assert open(serial, "rb").read() == open(parallel, "rb").read()


def test_sweep_fixed_vs_variable_smoke(tmp_path):
    path = write_config(tmp_path, {
        **SMALL, "sweep.axis": "snr_u_db", "sweep.values": "-10",
        "sweep.mode": "fixed_vs_variable", "sweep.alphas": "0.5, 1.0, 1.5",
    })
    out = str(tmp_path / "fv.csv")
    assert cli.main(["sweep", "--config", path, "--out", out,
                     "--workers", "1"]) == 0
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0] == "snr_u_db,throughput_fixed,best_fixed_alpha,throughput_variable"
    _, fixed, _, variable = lines[1].split(",")
    assert float(variable) >= float(fixed) - 1e-6 > 0.0


def test_sweep_vs_duplicated_smoke(tmp_path):
    path = write_config(tmp_path, {
        **SMALL, "sweep.axis": "snr_u_db", "sweep.values": "-10, -5",
        "sweep.mode": "vs_duplicated",
    })
    out = str(tmp_path / "vd.csv")
    assert cli.main(["sweep", "--config", path, "--out", out,
                     "--workers", "1"]) == 0
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0] == ("snr_u_db,throughput_asymmetric,feasible_asymmetric,"
                        "throughput_duplicated,feasible_duplicated")
    assert len(lines) == 3
