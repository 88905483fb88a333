"""CLI harness tests: run/sweep/certify/audit, CSV schema, exit codes,
config precedence, and byte-level reproducibility."""

import math
import subprocess
import sys

import numpy as np
import pytest

from sqgd import (
    Grid,
    ModulusParams,
    ScalarField,
    audit_breakthrough,
    minimal_b,
    read_snapshot,
    write_snapshot,
)
from sqgd.cli import CSV_HEADER, main
from sqgd.config import RunConfig, build_config, parse_config_file
from sqgd.diagnostics import DiagnosticsRecord


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def run_args(out_dir, **kwargs):
    args = ["run", "--output-dir", str(out_dir)]
    for key, value in kwargs.items():
        args += [f"--{key.replace('_', '-')}", str(value)]
    return args


class TestCmdRun:
    def test_zero_duration_single_row(self, tmp_path):
        code = main(run_args(tmp_path / "o", n=16, t_end=0.0, init="single_mode"))
        assert code == 0
        header, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        assert ",".join(header) == CSV_HEADER
        assert len(rows) == 1
        assert float(rows[0][0]) == 0.0

    def test_single_mode_linear_decay(self, tmp_path):
        code = main(run_args(tmp_path / "o", n=32, t_end=1.0, A=0.0,
                             init="single_mode", step_mode="fixed",
                             dt_fixed=0.05, dt_max=1.0, sample_every=0.25))
        assert code == 0
        _, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        final_l2 = float(rows[-1][1])
        assert final_l2 == pytest.approx(math.exp(-1.0) * math.sqrt(2 * math.pi**2),
                                         abs=1e-8)

    def test_reproducible_bytes(self, tmp_path):
        kwargs = dict(n=24, t_end=0.3, A=1.0, init="random_smooth", init_seed=5,
                      init_kmax=6, init_linf=0.5, sample_every=0.1,
                      step_mode="cfl", cfl_number=0.5, dt_max=0.02)
        assert main(run_args(tmp_path / "a", **kwargs)) == 0
        assert main(run_args(tmp_path / "b", **kwargs)) == 0
        csv_a = (tmp_path / "a" / "diagnostics.csv").read_bytes()
        csv_b = (tmp_path / "b" / "diagnostics.csv").read_bytes()
        assert csv_a == csv_b
        snaps_a = sorted((tmp_path / "a").glob("snapshot_*.sqgd"))
        snaps_b = sorted((tmp_path / "b").glob("snapshot_*.sqgd"))
        assert [p.name for p in snaps_a] == [p.name for p in snaps_b]
        for pa, pb in zip(snaps_a, snaps_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_snapshot_per_sample(self, tmp_path):
        main(run_args(tmp_path / "o", n=16, t_end=0.2, init="single_mode",
                      sample_every=0.05, dt_max=0.05))
        _, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        snaps = sorted((tmp_path / "o").glob("snapshot_*.sqgd"))
        assert len(snaps) == len(rows) == 5

    def test_bmin_cadence_in_csv(self, tmp_path):
        main(run_args(tmp_path / "o", n=16, t_end=0.2, init="random_smooth",
                      init_seed=2, init_kmax=4, init_linf=0.01,
                      sample_every=0.05, dt_max=0.05, certify_every=2))
        _, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        has_b = [row[8] != "" for row in rows]
        assert has_b == [i % 2 == 0 for i in range(len(rows))]
        assert float(rows[0][8]) > 0

    def test_l2_violation_exits_3(self, tmp_path, monkeypatch):
        def inflating_sample(state, cfg, index):
            return DiagnosticsRecord(t=state.t, l2=float(index), linf=0.0,
                                     max_grad=0.0, mean=0.0, nonlinear_flux=0.0,
                                     dispersive_flux=0.0, dissipation=0.0)

        monkeypatch.setattr("sqgd.cli.sample", inflating_sample)
        code = main(run_args(tmp_path / "o", n=16, t_end=0.2,
                             init="single_mode", sample_every=0.05, dt_max=0.05))
        assert code == 3
        # partial CSV kept for postmortem
        _, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        assert len(rows) == 2

    def test_blowup_exits_1(self, tmp_path, monkeypatch):
        from sqgd.integrator import BlowUpError

        def explode(*args, **kwargs):
            raise BlowUpError("test", 0.1, 3)

        monkeypatch.setattr("sqgd.cli.run", explode)
        code = main(run_args(tmp_path / "o", n=16, t_end=0.2, init="single_mode"))
        assert code == 1

    def test_invalid_config_exits_2(self, tmp_path):
        code = main(run_args(tmp_path / "o", n=16, t_end=0.2, init="nonsense"))
        assert code == 2

    def test_snapshot_init_round_trip(self, tmp_path):
        g = Grid(16)
        rng = np.random.default_rng(0)
        field = ScalarField(g, 0.01 * rng.standard_normal((16, 16)))
        snap = tmp_path / "init.sqgd"
        write_snapshot(snap, field, 0.0, 0.0)
        code = main(run_args(tmp_path / "o", n=16, t_end=0.0, init="snapshot",
                             init_path=str(snap)))
        assert code == 0
        loaded, _, _ = read_snapshot(tmp_path / "o" / "snapshot_000000.sqgd")
        assert np.array_equal(loaded.values, field.values)


class TestConfigFile:
    def test_parse_and_precedence(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# comment line\n"
            "n = 24\n"
            "t_end = 0.5\n"
            "A = 2.0  # trailing comment\n"
            "init = single_mode\n"
        )
        parsed = parse_config_file(cfg_file)
        assert parsed == {"n": 24, "t_end": 0.5, "A": 2.0, "init": "single_mode"}
        cfg = build_config(str(cfg_file), {"n": 32, "t_end": None})
        assert cfg.n == 32          # override wins
        assert cfg.t_end == 0.5     # file wins over default
        assert cfg.A == 2.0

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "bad.cfg"
        cfg_file.write_text("resolution = 32\n")
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config_file(cfg_file)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(advection_sign=2)
        with pytest.raises(ValueError):
            RunConfig(t_end=-1.0)
        with pytest.raises(ValueError):
            RunConfig(init="snapshot")  # missing init_path


class TestCmdSweep:
    def test_empty_list_header_only(self, tmp_path):
        code = main(["sweep", "--A-list", "", "--output-dir", str(tmp_path / "s"),
                     "--n", "16", "--t-end", "0.1", "--init", "single_mode"])
        assert code == 0
        text = (tmp_path / "s" / "summary.csv").read_text()
        assert text == "A,max_linf,max_bmin,final_l2\n"

    def test_single_member_matches_run(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SQGD_THREADS", "1")
        kwargs = dict(n=16, t_end=0.2, init="single_mode", sample_every=0.1,
                      dt_max=0.05)
        main(run_args(tmp_path / "direct", A=0.0, **kwargs))
        code = main(["sweep", "--A-list", "0", "--output-dir", str(tmp_path / "s")]
                    + run_args("ignored", **kwargs)[3:])
        assert code == 0
        direct = (tmp_path / "direct" / "diagnostics.csv").read_bytes()
        member = (tmp_path / "s" / "A_0" / "diagnostics.csv").read_bytes()
        assert direct == member

    def test_rows_sorted_by_amplitude(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SQGD_THREADS", "2")
        code = main(["sweep", "--A-list", "2,0,1",
                     "--output-dir", str(tmp_path / "s"), "--n", "16",
                     "--t-end", "0.1", "--init", "single_mode",
                     "--sample-every", "0.05", "--dt-max", "0.05"])
        assert code == 0
        _, rows = read_csv(tmp_path / "s" / "summary.csv")
        amplitudes = [float(row[0]) for row in rows]
        assert amplitudes == sorted(amplitudes) == [0.0, 1.0, 2.0]
        for row in rows:
            assert row[1] != "" and row[3] != ""


class TestCmdCertify:
    def test_constant_snapshot(self, tmp_path, capsys):
        g = Grid(16)
        snap = tmp_path / "const.sqgd"
        write_snapshot(snap, ScalarField(g, np.full((16, 16), 1.0)), 0.0, 0.0)
        code = main(["certify", str(snap)])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "b_min,y1,y2,z1,z2,xi,slack"
        assert out[1].split(",")[0] == "0"

    def test_matches_in_run_certification(self, tmp_path, capsys):
        main(run_args(tmp_path / "o", n=24, t_end=0.2, init="random_smooth",
                      init_seed=3, init_kmax=6, init_linf=0.01,
                      sample_every=0.1, dt_max=0.05, certify_every=1))
        _, rows = read_csv(tmp_path / "o" / "diagnostics.csv")
        snaps = sorted((tmp_path / "o").glob("snapshot_*.sqgd"))
        code = main(["certify", str(snaps[-1])])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        b_cli = float(out[1].split(",")[0])
        b_run = float(rows[-1][8])
        assert b_cli == pytest.approx(b_run, rel=1e-6)

    def test_corrupted_magic_exits_2(self, tmp_path):
        snap = tmp_path / "bad.sqgd"
        snap.write_bytes(b"JUNKJUNKJUNK" + b"\x00" * 64)
        assert main(["certify", str(snap)]) == 2

    def test_witness_coordinates_scaled(self, tmp_path, capsys):
        g = Grid(16)
        snap = tmp_path / "s.sqgd"
        write_snapshot(snap, ScalarField(g, 1e-3 * np.sin(g.x1)), 0.0, 0.0)
        main(["certify", str(snap)])
        cells = capsys.readouterr().out.splitlines()[1].split(",")
        coords = [float(c) for c in cells[1:5]]
        assert all(0 <= c < 2 * math.pi for c in coords)
        xi = float(cells[5])
        d1 = abs(coords[0] - coords[2])
        d2 = abs(coords[1] - coords[3])
        d1 = min(d1, 2 * math.pi - d1)
        d2 = min(d2, 2 * math.pi - d2)
        assert xi == pytest.approx(math.hypot(d1, d2), rel=1e-12)


class TestCmdAudit:
    def test_zero_field_zero_report(self, tmp_path, capsys):
        g = Grid(16)
        snap = tmp_path / "zero.sqgd"
        write_snapshot(snap, ScalarField(g, np.zeros((16, 16))), 0.0, 2.0)
        code = main(["audit", str(snap), "--B", "0"])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("xi,lhs_breakthrough,derivative_bound")
        values = [float(v) for v in out[1].split(",")]
        assert values[1:] == [0.0] * 6

    def test_matches_library(self, tmp_path, capsys):
        g = Grid(24)
        rng = np.random.default_rng(1)
        field = ScalarField(g, 0.005 * rng.standard_normal((24, 24)))
        snap = tmp_path / "f.sqgd"
        write_snapshot(snap, field, 0.0, 1.5)
        params = ModulusParams()
        b = minimal_b(field, params).b_min * 1.001
        code = main(["audit", str(snap), "--B", f"{b:.17g}"])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        cli_values = [float(v) for v in out[1].split(",")]
        rep = audit_breakthrough(field, float(f"{b:.17g}"), 1.5, params)
        assert cli_values == pytest.approx([
            rep.xi, rep.lhs_breakthrough, rep.derivative_bound, rep.disp_measured,
            rep.disp_bound, rep.disp_ratio, rep.saturation], rel=1e-12)

    def test_negative_scale_exits_2(self, tmp_path):
        g = Grid(16)
        snap = tmp_path / "f.sqgd"
        write_snapshot(snap, ScalarField(g, np.zeros((16, 16))), 0.0, 0.0)
        assert main(["audit", str(snap), "--B", "-1"]) == 2


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "sqgd.cli", "run",
             "--output-dir", str(tmp_path / "o"), "--n", "16",
             "--t-end", "0.0", "--init", "single_mode"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert (tmp_path / "o" / "diagnostics.csv").exists()
