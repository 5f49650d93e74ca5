"""Command-line behavior: exit codes, file outputs, config merging."""

import io
import re
import subprocess
import sys

import numpy as np
import pytest

from pipefft.cli import ExperimentConfig, cmd_verify, main
from pipefft.frames import WIRE_OVERHEAD_BYTES  # noqa: F401  (documented elsewhere)
from pipefft.gridio import read_grid


def run(argv):
    return main(argv)


class TestExitCodes:
    def test_clean_verify_is_zero(self, capsys):
        assert run(["verify", "--suite", "fft", "--n", "64"]) == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_check_failure_is_one(self, capsys):
        # float64 cannot hit 1e-30, so the oracle check must fail honestly
        assert run(["verify", "--suite", "fft", "--n", "64", "--tolerance", "1e-30"]) == 1
        out = capsys.readouterr().out
        assert "[FAIL]" in out

    def test_bad_configuration_is_two(self, capsys):
        assert run(["verify", "--suite", "fft", "--n", "100"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_dist_oracle_cap_is_two(self, capsys):
        assert run(["verify", "--suite", "dist", "--n", "256"]) == 2
        err = capsys.readouterr().err
        assert "n <= 32" in err

    def test_simulate_without_grid_is_two(self, capsys):
        assert run(["simulate"]) == 2

    def test_simulate_unreadable_grid_is_two(self, tmp_path, capsys):
        bogus = tmp_path / "nope.grid"
        bogus.write_bytes(b"not a grid at all")
        assert run(["simulate", "--grid", str(bogus)]) == 2


class TestVerifyOutput:
    def test_line_format_and_summary(self, capsys):
        run(["verify", "--suite", "fft", "--n", "32", "--r", "2"])
        lines = capsys.readouterr().out.strip().splitlines()
        assert all(l.startswith(("[PASS]", "[FAIL]")) for l in lines[:-1])
        assert re.fullmatch(r"\d+ of \d+ checks passed", lines[-1])

    def test_all_suite_passes(self, capsys):
        assert run(["verify", "--suite", "all", "--n", "16"]) == 0
        summary = capsys.readouterr().out.strip().splitlines()[-1]
        passed, total = (int(x) for x in re.findall(r"\d+", summary))
        assert passed == total
        # 2 fft + 60 engine rows + 2 mu x 5 n x 6 p grid cells + 2 dist
        assert total == 2 + 60 + 60 + 2

    def test_tables_suite_green(self, capsys):
        assert run(["verify", "--suite", "tables"]) == 0

    def test_writes_to_supplied_stream(self):
        sink = io.StringIO()
        config = ExperimentConfig(command="verify", n=16, suite="fft")
        assert cmd_verify(config, out=sink) == 0
        assert "checks passed" in sink.getvalue()


class TestMakeGridAndSimulate:
    def _make(self, tmp_path, *extra):
        path = tmp_path / "in.grid"
        assert run(["make-grid", "--n", "8", "--out", str(path), *extra]) == 0
        return path

    def test_delta_transforms_to_all_ones(self, tmp_path, capsys):
        grid = self._make(tmp_path, "--kind", "delta")
        out_dir = tmp_path / "run"
        assert run([
            "simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
            "--out-dir", str(out_dir),
        ]) == 0
        spectrum = read_grid(out_dir / "spectrum.grid")
        np.testing.assert_allclose(spectrum, np.ones((1, 8, 8, 8)), atol=1e-12)

    def test_ledger_schema_and_volume(self, tmp_path):
        grid = self._make(tmp_path, "--kind", "random")
        out_dir = tmp_path / "run"
        run(["simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
             "--out-dir", str(out_dir)])
        lines = (out_dir / "ledger.csv").read_text().strip().splitlines()
        assert lines[0] == "component,phase,src_u,src_v,dst_u,dst_v,bytes"
        xy = [l for l in lines[1:] if l.split(",")[1] == "xy"]
        # each of 4 nodes ships V'(Pu-1)/Pu = 8*(8^3+2*8^2)/4 * (1/2) bytes
        assert len(xy) == 4
        assert all(int(l.split(",")[-1]) == 640 for l in xy)

    def test_inverse_round_trip(self, tmp_path):
        grid = self._make(tmp_path, "--kind", "random", "--seed", "5")
        fwd = tmp_path / "fwd"
        inv = tmp_path / "inv"
        run(["simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
             "--out-dir", str(fwd)])
        assert run([
            "simulate", "--grid", str(fwd / "spectrum.grid"), "--pu", "2",
            "--pv", "2", "--inverse", "--out-dir", str(inv),
        ]) == 0
        original = read_grid(grid)
        back = read_grid(inv / "volume.grid")
        np.testing.assert_allclose(back.real, original, atol=1e-9)

    def test_direction_dtype_guards(self, tmp_path, capsys):
        real_grid = self._make(tmp_path, "--kind", "random")
        assert run(["simulate", "--grid", str(real_grid), "--inverse",
                    "--out-dir", str(tmp_path / "x")]) == 2
        complex_grid = tmp_path / "c.grid"
        run(["make-grid", "--n", "8", "--complex", "--out", str(complex_grid)])
        assert run(["simulate", "--grid", str(complex_grid),
                    "--out-dir", str(tmp_path / "y")]) == 2

    def test_check_oracle_flag(self, tmp_path, capsys):
        grid = self._make(tmp_path, "--kind", "random")
        assert run([
            "simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
            "--check-oracle", "--out-dir", str(tmp_path / "run"),
        ]) == 0
        assert "[PASS] component 0" in capsys.readouterr().out

    def test_wire_run_writes_capture(self, tmp_path, capsys):
        grid = self._make(tmp_path, "--kind", "random")
        out_dir = tmp_path / "run"
        assert run([
            "simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
            "--wire", "--out-dir", str(out_dir),
        ]) == 0
        assert (out_dir / "frames.pcap").exists()
        # every ledger row becomes ceil(bytes / 1472) frames
        lines = (out_dir / "ledger.csv").read_text().strip().splitlines()[1:]
        expect = sum(-(-int(l.split(",")[-1]) // 1472) for l in lines)
        text = capsys.readouterr().out
        count = int(re.search(r"\((\d+) frames\)", text).group(1))
        assert count == expect

    def test_wire_equals_in_memory(self, tmp_path):
        grid = self._make(tmp_path, "--kind", "random", "--seed", "3")
        a, b = tmp_path / "mem", tmp_path / "wire"
        run(["simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
             "--out-dir", str(a)])
        run(["simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
             "--wire", "--out-dir", str(b)])
        assert (a / "spectrum.grid").read_bytes() == (b / "spectrum.grid").read_bytes()

    def test_multi_component_grid(self, tmp_path):
        grid = tmp_path / "mu.grid"
        run(["make-grid", "--n", "8", "--components", "3", "--out", str(grid)])
        out_dir = tmp_path / "run"
        run(["simulate", "--grid", str(grid), "--pu", "2", "--pv", "2",
             "--out-dir", str(out_dir)])
        assert read_grid(out_dir / "spectrum.grid").shape == (3, 8, 8, 8)
        components = {l.split(",")[0] for l in
                      (out_dir / "ledger.csv").read_text().strip().splitlines()[1:]}
        assert components == {"0", "1", "2"}


class TestPredict:
    def test_writes_tables_and_figures(self, tmp_path, capsys):
        assert run(["predict", "--out-dir", str(tmp_path)]) == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert {
            "calc_time_mu1.csv", "calc_time_mu3.csv",
            "comparison_mu1.csv", "comparison_mu3.csv",
            "network_bandwidth.csv",
            "calc_time_mu1.png", "calc_time_mu3.png", "network_bandwidth.png",
        } <= names
        out = capsys.readouterr().out
        assert out.count("wrote ") == len(names)

    def test_no_figures(self, tmp_path):
        run(["predict", "--out-dir", str(tmp_path), "--no-figures"])
        assert not list(tmp_path.glob("*.png"))
        assert (tmp_path / "calc_time_mu1.csv").exists()

    def test_markdown_carries_same_numbers(self, tmp_path):
        run(["predict", "--out-dir", str(tmp_path / "c"), "--no-figures"])
        run(["predict", "--out-dir", str(tmp_path / "m"), "--format", "md",
             "--no-figures"])
        csv_cells = [
            cell
            for line in (tmp_path / "c" / "calc_time_mu1.csv").read_text().splitlines()[1:]
            for cell in line.split(",")[1:]
        ]
        md_cells = [
            cell.strip()
            for line in (tmp_path / "m" / "calc_time_mu1.md").read_text().splitlines()[2:]
            for cell in line.split("|")[2:-1]
        ]
        assert csv_cells == md_cells

    def test_deterministic_outputs(self, tmp_path):
        run(["predict", "--out-dir", str(tmp_path / "a"), "--no-figures"])
        run(["predict", "--out-dir", str(tmp_path / "b"), "--no-figures"])
        for name in ("calc_time_mu1.csv", "comparison_mu1.csv", "network_bandwidth.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_mu_flag_repeats(self, tmp_path):
        run(["predict", "--mu", "2", "--mu", "5", "--out-dir", str(tmp_path),
             "--no-figures"])
        names = {p.name for p in tmp_path.iterdir()}
        assert "calc_time_mu2.csv" in names and "calc_time_mu5.csv" in names
        assert "calc_time_mu1.csv" not in names

    def test_topology_filter(self, tmp_path):
        run(["predict", "--topology", "torus", "--out-dir", str(tmp_path),
             "--no-figures"])
        rows = (tmp_path / "network_bandwidth.csv").read_text().strip().splitlines()[1:]
        assert all(r.split(",")[2] == "" and r.split(",")[3] != "" for r in rows)


class TestConfigFile:
    def test_file_supplies_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = fft\nn = 32\nr = 2\n")
        assert run(["verify", "--config", str(cfg)]) == 0
        assert "n=32 r=2" in capsys.readouterr().out

    def test_flag_beats_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = fft\nn = 32\n")
        run(["verify", "--config", str(cfg), "--n", "64"])
        assert "n=64" in capsys.readouterr().out

    def test_aliases_and_comments(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# engine geometry\nsuite = fft\nn = 16   # small\npu = 2\npv = 2\nf = 250\n"
        )
        assert run(["verify", "--config", str(cfg)]) == 0

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = fft\nwidth = 9\n")
        assert run(["verify", "--config", str(cfg)]) == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_malformed_line_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just some words\n")
        assert run(["verify", "--config", str(cfg)]) == 2

    def test_bad_value_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = fft\nn = sixteen\n")
        assert run(["verify", "--config", str(cfg)]) == 2

    def test_bool_words(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("figures = no\n")
        assert run(["predict", "--config", str(cfg),
                    "--out-dir", str(tmp_path / "out")]) == 0
        assert not list((tmp_path / "out").glob("*.png"))


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pipefft.cli", "verify", "--suite", "fft", "--n", "16"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "checks passed" in proc.stdout
