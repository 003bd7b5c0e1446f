import json
import math

import numpy as np
import pytest

from dickestark import cli
from dickestark.config import ConfigError, RunConfig, parse_number, parse_run_config, parse_values, sweep_config_from
from dickestark.output import OUTPUT_DIR_ENV, fmt, read_trace_csv, sidecar_path
from dickestark.presets import PRESETS


def main(*argv):
    return cli.main([str(a) for a in argv])


def exit_code(*argv):
    """Exit status whether it is returned or raised by argument parsing."""
    try:
        return main(*argv)
    except SystemExit as exc:
        return exc.code


def rows(path):
    return path.read_text().strip().split("\n")


class TestConfig:
    def test_round_trip(self):
        config = RunConfig(n_atoms=12, chi=0.1 + 1e-17, eta_plus=math.pi / 8, eta_minus=-0.3, q=1.5,
                           field_intensity=1.44, initial="w_state", t_end=123.25, output_points=17)
        assert parse_run_config(config.to_text()) == config
        assert parse_run_config(json.dumps(config.to_dict())) == config

    def test_expressions(self):
        assert parse_number("pi/8") == math.pi / 8
        assert parse_number("2*pi + 1e-3") == 2 * math.pi + 1e-3
        with pytest.raises(ValueError):
            parse_number("__import__('os')")

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_run_config("n_atoms = 4\ncolour = red\n")

    def test_initial_forms(self):
        base = RunConfig(n_atoms=4)
        assert base.replace(initial="m=0").initial_state().populations[2] == 1
        assert base.replace(initial="-1").initial_state().populations[1] == 1
        p = base.replace(initial="p=0.2,0.2,0.2,0.2,0.2").initial_state().populations
        np.testing.assert_allclose(p, 0.2)
        with pytest.raises(ConfigError):
            base.replace(initial="semi_excited", n_atoms=3).validate()

    def test_field_intensity_scales_chi_squared(self):
        c = RunConfig(chi=0.1, field_intensity=0.64).couplings()
        assert c.chi**2 == pytest.approx(0.0064, rel=1e-14)

    def test_values_and_ranges(self):
        assert parse_values("n_atoms", "8:32:8") == [8, 16, 24, 32]
        assert parse_values("chi", "0.1,0.2") == [0.1, 0.2]
        with pytest.raises(ConfigError):
            parse_values("chi", "")

    def test_sweep_validation(self):
        with pytest.raises(ConfigError):
            sweep_config_from({}, {}, ["n_atoms=4,8"], "")
        with pytest.raises(ConfigError):
            sweep_config_from({}, {}, ["n_atoms=4", "chi=0.1", "q=1"], "peak_intensity")
        with pytest.raises(ConfigError):
            sweep_config_from({}, {}, ["n_atoms=4"], "median")
        sweep = sweep_config_from({}, {}, ["n_atoms=4,8", "chi=0.1,0.2"], "peak_time")
        assert [tuple(c.values()) for c in sweep.combinations()] == [(4, 0.1), (4, 0.2), (8, 0.1), (8, 0.2)]


class TestSimulate:
    def test_suppressed(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main("simulate", "--n-atoms", 8, "--eta-plus", "pi/2", "--t-end", 10, "--out", out) == 0
        header, data = read_trace_csv(out)
        assert header[:2] == ["tau", "intensity"] and header[2] == "p[-4]" and header[-1] == "p[4]"
        pops = data[:, 2:]
        assert np.max(np.abs(pops - pops[0])) <= 1e-10

    def test_single_atom_closed_form(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main("simulate", "--n-atoms", 1, "--chi", 0.1, "--t-end", 200, "--out", out) == 0
        header, data = read_trace_csv(out)
        assert header == ["tau", "intensity", "p[-1/2]", "p[1/2]"]
        assert len(data) == 201
        assert np.max(np.abs(data[:, 3] - np.exp(-0.01 * data[:, 0]))) <= 1e-8

    def test_rows_are_valid_ladder_states(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main("simulate", "--n-atoms", 10, "--eta-plus", 0.3, "--eta-minus", 0.1, "--out", out) == 0
        _, data = read_trace_csv(out)
        pops = data[:, 2:]
        assert np.all(pops >= 0) and np.max(np.abs(pops.sum(axis=1) - 1)) <= 1e-9

    def test_sidecar_and_json(self, tmp_path):
        out = tmp_path / "t.json"
        assert main("simulate", "--n-atoms", 3, "--format", "json", "--points", 11, "--out", out) == 0
        doc = json.loads(out.read_text())
        assert doc["columns"][2:] == ["p[-3/2]", "p[-1/2]", "p[1/2]", "p[3/2]"]
        assert len(doc["tau"]) == 11 and len(doc["populations"]["p[3/2]"]) == 11
        meta = json.loads(sidecar_path(out).read_text())
        assert meta["config"]["n_atoms"] == 3 and meta["outside_validity"] is False

    def test_config_file_and_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# two atoms\nn_atoms = 2  # inline comment\nchi = 0.2\n")
        out = tmp_path / "t.csv"
        assert main("simulate", "--config", cfg, "--chi", 0.1, "--out", out) == 0
        meta = json.loads(sidecar_path(out).read_text())
        assert meta["config"]["n_atoms"] == 2 and meta["config"]["chi"] == 0.1

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        assert main("simulate", "--n-atoms", 2, "--points", 3) == 0
        assert (tmp_path / "trace.csv").exists()

    def test_full_solver_agrees(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--n-atoms", 4, "--eta-plus", 0.2, "--t-end", 50, "--points", 26]
        assert main(*args, "--out", a) == 0
        assert main(*args, "--solver", "full", "--out", b) == 0
        assert np.max(np.abs(read_trace_csv(a)[1] - read_trace_csv(b)[1])) <= 1e-8

    @pytest.mark.parametrize(
        "argv",
        [
            ["--n-atoms", 0],
            ["--chi", -1],
            ["--points", 1],
            ["--t-end", 0],
            ["--initial", "semi_excited", "--n-atoms", 3],
            ["--eta-plus", "pi/"],
            ["--format", "xml"],
        ],
    )
    def test_config_errors_exit_2(self, tmp_path, argv):
        assert exit_code("simulate", *argv, "--out", tmp_path / "x.csv") == 2
        assert not (tmp_path / "x.csv").exists()

    def test_integration_error_exit_3(self, tmp_path, monkeypatch):
        from dickestark import dynamics
        from dickestark.errors import IntegrationError

        def boom(*a, **kw):
            raise IntegrationError("forced")

        monkeypatch.setattr(dynamics._integrate, "integrate", boom)
        assert main("simulate", "--n-atoms", 2, "--out", tmp_path / "x.csv") == 3


class TestFigure:
    def test_preset_3a(self, tmp_path, capsys):
        assert main("figure", "3a", "--out", tmp_path, "--t-end", 50, "--points", 51) == 0
        files = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert files == ["fig3a_s0.64.csv", "fig3a_s1.44.csv", "fig3a_s1.csv"]
        meta = json.loads(sidecar_path(tmp_path / "fig3a_s1.csv").read_text())
        assert meta["config"]["eta_plus"] == pytest.approx(math.pi / 2 - 0.4)
        assert meta["config"]["eta_minus"] == 0 and meta["config"]["initial"] == "fully_excited"
        table = capsys.readouterr().out.strip().split("\n")
        assert table[0] == "field_intensity,file,peak_intensity,peak_time,has_delay"
        assert len(table) == 4

    def _table(self, capsys):
        lines = capsys.readouterr().out.strip().split("\n")[1:]
        return [line.split(",") for line in lines]

    def test_preset_2_ordering(self, tmp_path, capsys):
        assert main("figure", "2", "--out", tmp_path, "--points", 2001) == 0
        t = self._table(capsys)
        peaks = [float(r[2]) for r in t]
        times = [float(r[3]) for r in t]
        assert peaks[0] < peaks[1] < peaks[2] and times[0] > times[1] > times[2]

    def test_preset_4b_no_delay(self, tmp_path, capsys):
        assert main("figure", "4b", "--out", tmp_path) == 0
        assert [r[4] for r in self._table(capsys)] == ["false"] * 3

    def test_all_presets_defined(self):
        assert sorted(PRESETS) == ["2", "3a", "3b", "4a", "4b", "5a", "5b", "6a", "6b"]

    def test_unknown_preset(self, tmp_path):
        assert main("figure", "9", "--out", tmp_path) == 2


class TestAnalyze:
    def test_critical(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main("analyze", "critical", "--eta-plus", "pi/8", "--k-max", 3, "--out", out) == 0
        lines = rows(out)
        assert lines[0] == "k,n_star,nearest_integer,f_at_nearest"
        assert [float(line.split(",")[1]) for line in lines[1:]] == pytest.approx([32, 64, 96], rel=1e-15)

    def test_critical_without_suppression(self, capsys):
        assert main("analyze", "critical", "--eta-plus", 0.2, "--eta-minus", 0.2) == 4

    def test_stabilized(self, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["analyze", "stabilized", "--n-atoms", 16, "--eta-plus", "pi/4", "--eta-minus", "pi/4", "--out", out]
        assert main(*argv) == 0
        assert [line.split(",")[:2] for line in rows(out)[1:]] == [["0", "1"], ["8", "2"]]

    def test_wstate_critical(self, tmp_path):
        out = tmp_path / "w.csv"
        assert main("analyze", "wstate", "--n-atoms", 32, "--eta-plus", "pi/8", "--t-end", 1000, "--out", out) == 0
        survival = np.array([float(line.split(",")[1]) for line in rows(out)[1:]])
        assert np.all(survival >= 1 - 1e-12)

    def test_delay(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main("analyze", "delay", "--n-atoms", 2, "--gamma-w", 1, "--out", out) == 0
        assert rows(out)[1:] == ["0,0", "1,0.5", "2,1"]
        assert main("analyze", "delay", "--n-atoms", 4, "--initial", "semi_excited", "--out", out) == 0
        assert rows(out)[1] == "0,0"


class TestVerifyIto:
    def test_passes(self, tmp_path):
        assert main("verify-ito", "--n-max", 4, "--trials", 50, "--seed", 7, "--out", tmp_path / "r.txt") == 0
        lines = rows(tmp_path / "r.txt")
        assert lines[1] == "n_atoms,trials,max_dev_coefficients,max_dev_generator"
        assert len(lines) == 6

    def test_zero_trials(self, tmp_path):
        assert main("verify-ito", "--trials", 0, "--out", tmp_path / "r.txt") == 0
        assert len(rows(tmp_path / "r.txt")) == 2

    def test_same_seed_identical(self, tmp_path):
        for name in ("a", "b"):
            assert main("verify-ito", "--n-max", 3, "--trials", 10, "--seed", 42, "--out", tmp_path / name) == 0
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    def test_failure_exit_5(self, tmp_path, monkeypatch, capsys):
        from dickestark import verify

        monkeypatch.setattr(verify, "THRESHOLD", 0.0)
        assert main("verify-ito", "--n-max", 2, "--trials", 3, "--out", tmp_path / "r.txt") == 5
        assert "verification failed" in capsys.readouterr().err

    def test_bad_range(self, tmp_path):
        assert main("verify-ito", "--n-max", 9, "--out", tmp_path / "r.txt") == 2


class TestSweep:
    def test_critical_suppression(self, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--param", "n_atoms=8,16,24,32", "--eta-plus", "pi/8", "--aggregate", "peak_intensity",
                "--out", out]
        assert main(*argv) == 0
        table = [line.split(",") for line in rows(out)]
        assert table[0] == ["n_atoms", "status", "peak_intensity", "error"]
        assert [r[0] for r in table[1:]] == ["8", "16", "24", "32"]
        assert float(table[-1][2]) <= 1e-10
        assert float(table[1][2]) > 1e-3

    def test_empty_aggregate(self, tmp_path):
        assert main("sweep", "--param", "n_atoms=4", "--aggregate", "", "--out", tmp_path / "s.csv") == 2

    def test_field_intensity(self, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--param", "field_intensity=0.64,1.0,1.44", "--aggregate", "peak_intensity,peak_time",
                "--points", 2001, "--out", out]
        assert main(*argv) == 0
        peaks = [float(line.split(",")[2]) for line in rows(out)[1:]]
        assert peaks[0] < peaks[1] < peaks[2]

    def test_two_parameters_parallel_matches_serial(self, tmp_path):
        base = ["sweep", "--param", "n_atoms=2,4", "--param", "eta_plus=0,0.3", "--aggregate",
                "peak_intensity,has_delay,emitted_fraction", "--t-end", 50]
        assert main(*base, "--out", tmp_path / "a.csv") == 0
        assert main(*base, "--jobs", 2, "--out", tmp_path / "b.csv") == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert len(rows(tmp_path / "a.csv")) == 5

    def test_partial_failure(self, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--param", "n_atoms=3,4", "--initial", "semi_excited", "--aggregate", "peak_time",
                "--out", out]
        assert main(*argv) == 6
        table = [line.split(",") for line in rows(out)]
        assert table[1][1] == "failed" and table[2][1] == "ok"

    def test_json_config(self, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"chi": 0.1, "sweep": {"q": [1, 2]}, "aggregate": "peak_intensity"}))
        out = tmp_path / "s.csv"
        assert main("sweep", "--config", cfg, "--n-atoms", 4, "--out", out) == 0
        peaks = [float(line.split(",")[2]) for line in rows(out)[1:]]
        assert peaks[1] == pytest.approx(2 * peaks[0], rel=1e-14)


def test_number_format():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3" and fmt(True) == "true"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main("--version")
    assert info.value.code == 0
