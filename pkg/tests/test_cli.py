"""Command line behaviour: parsing, exit codes, output formats."""

import json
import os
import subprocess
import sys

import pytest

from trotterkit import cli


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def data_lines(text):
    return [line for line in text.splitlines()
            if line and not line.startswith("#")]


class TestValueParsing:
    def test_int_list_forms(self):
        assert cli._int_list("6") == [6]
        assert cli._int_list("4,6,8") == [4, 6, 8]
        assert cli._int_list("4..7") == [4, 5, 6, 7]
        assert cli._int_list("1,3..5,9") == [1, 3, 4, 5, 9]

    def test_int_list_rejections(self):
        import argparse

        for bad in ("x", "5..3", "", "1..2..3"):
            with pytest.raises(argparse.ArgumentTypeError):
                cli._int_list(bad)

    def test_resolve_t_token_and_grid(self):
        assert cli._resolve_t("n", 9) == [9.0]
        assert cli._resolve_t("1,2.5", 4) == [1.0, 2.5]
        grid = cli._resolve_t("geom:1:100:3", 4)
        assert grid == pytest.approx([1.0, 10.0, 100.0])

    def test_resolve_t_rejections(self):
        from trotterkit.errors import ArgumentError

        for bad in ("geom:1:100", "geom:0:10:3", "geom:1:10:1", "abc"):
            with pytest.raises(ArgumentError):
                cli._resolve_t(bad, 4)


class TestExitCodes:
    def test_missing_required_is_usage(self, capsys):
        code, _, _ = run_cli(["bounds", "--n", "3"], capsys)
        assert code == 2

    def test_unknown_command_is_usage(self, capsys):
        code, _, _ = run_cli(["nonsense"], capsys)
        assert code == 2

    def test_unknown_criterion_is_usage(self, capsys):
        code, _, _ = run_cli(
            ["trotter-search", "--n", "3", "--t", "1", "--eps", "1e-2",
             "--criteria", "bogus"], capsys)
        assert code == 2

    def test_help_is_success(self, capsys):
        code, out, _ = run_cli(["--help"], capsys)
        assert code == 0
        assert "trotter-search" in out

    def test_capability_exit(self, capsys):
        code, _, err = run_cli(
            ["otoc", "--n", "13", "--t", "1"], capsys)
        assert code == 3
        assert "refused" in err

    def test_convergence_exit(self, capsys):
        code, _, err = run_cli(
            ["trotter-search", "--n", "3", "--t", "1", "--eps", "1e-30",
             "--criteria", "triangle"], capsys)
        assert code == 4
        assert "converge" in err

    def test_memory_guard_and_force(self, capsys):
        argv = ["empirical", "--n", "6", "--r", "2", "--samples", "4",
                "--mem-gb", "1e-5"]
        code, _, err = run_cli(argv, capsys)
        assert code == 3
        assert "guard" in err
        code, out, _ = run_cli(argv + ["--force"], capsys)
        assert code == 0
        assert len(data_lines(out)) == 2  # column header plus one row

    def test_bad_thread_env_is_usage(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.THREAD_ENV, "zero")
        code, _, err = run_cli(["--help"], capsys)
        assert code == 2
        assert cli.THREAD_ENV in err

    def test_thread_env_lands_in_blas_pools(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.THREAD_ENV, "3")
        monkeypatch.delenv("OMP_NUM_THREADS", raising=False)
        code, _, _ = run_cli(
            ["hamiltonian", "--model", "heisenberg1d", "--n", "2"], capsys)
        assert code == 0
        assert os.environ["OMP_NUM_THREADS"] == "3"


class TestBoundsCommand:
    def test_zero_time_zeroes_every_bound(self, capsys):
        code, out, _ = run_cli(
            ["bounds", "--model", "heisenberg1d", "--n", "3", "--p", "1",
             "--t", "0", "--r", "1"], capsys)
        assert code == 0
        rows = data_lines(out)[1:]
        assert len(rows) >= 3
        for row in rows:
            cells = row.split(",")
            assert float(cells[6]) == 0.0
            assert cells[7] == "true"

    def test_explicit_inapplicable_bound_is_usage(self, capsys):
        code, _, _ = run_cli(
            ["bounds", "--model", "k_local", "--n", "3", "--p", "1",
             "--t", "1", "--r", "1", "--bounds", "counting"], capsys)
        assert code == 2

    def test_interference_only_for_first_order_chain(self, capsys):
        code, out, _ = run_cli(
            ["bounds", "--model", "heisenberg1d", "--n", "3", "--p", "2",
             "--t", "1", "--r", "10"], capsys)
        assert code == 0
        names = [row.split(",")[5] for row in data_lines(out)[1:]]
        assert "interference" not in names
        assert "counting" in names


class TestOutputContract:
    def test_header_echoes_config_and_version(self, capsys):
        code, out, _ = run_cli(
            ["hamiltonian", "--model", "heisenberg1d", "--n", "3",
             "--seed", "5"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# tool: trotterkit ")
        assert lines[1] == "# command: hamiltonian"
        assert "model=heisenberg1d" in lines[2]
        assert "n=3" in lines[2]
        assert "seed=5" in lines[2]
        assert lines[3].startswith("# generated: ")

    def test_every_row_carries_seed(self, capsys):
        code, out, _ = run_cli(
            ["empirical", "--n", "3", "--r", "5", "--t", "1,2",
             "--samples", "4", "--seed", "11"], capsys)
        assert code == 0
        header, *rows = data_lines(out)
        seed_at = header.split(",").index("seed")
        assert rows
        for row in rows:
            assert row.split(",")[seed_at] == "11"

    def test_byte_reproducible_modulo_timestamp(self, capsys, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["empirical", "--n", "3", "--r", "7", "--samples", "5",
                "--seed", "2"]
        assert cli.main(argv + ["--out", str(out_a)]) == 0
        assert cli.main(argv + ["--out", str(out_b)]) == 0
        capsys.readouterr()
        strip = lambda p: [ln for ln in p.read_text().splitlines()
                           if not ln.startswith("# generated")]
        assert strip(out_a) == strip(out_b)
        assert strip(out_a) != []

    def test_json_mirror(self, capsys):
        code, out, _ = run_cli(
            ["empirical", "--n", "3", "--r", "5", "--t", "n",
             "--samples", "4", "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["tool"] == "trotterkit"
        assert payload["command"] == "empirical"
        assert payload["config"]["t"] == "n"
        assert payload["rows"][0]["t"] == 3.0
        assert payload["rows"][0]["seed"] == 0
        assert payload["columns"][0] == "model"

    def test_t_token_follows_size(self, capsys):
        code, out, _ = run_cli(
            ["trotter-search", "--n", "3,4", "--t", "n", "--eps", "5e-2",
             "--samples", "4", "--criteria", "triangle"], capsys)
        assert code == 0
        rows = [row.split(",") for row in data_lines(out)[1:]]
        pairs = {(cells[1], cells[3]) for cells in rows}
        assert pairs == {("3", "3.0"), ("4", "4.0")}


class TestConfigFile:
    def test_file_supplies_required_fields(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model = heisenberg1d\nn = 3\np = 1\n"
                       "t = 0   # comment\nr = 1\n")
        code, out, _ = run_cli(["bounds", "--config", str(cfg)], capsys)
        assert code == 0
        assert "t=0.0" in out

    def test_flag_overrides_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model = heisenberg1d\nn = 3\nt = 0\nr = 1\n")
        code, out, _ = run_cli(
            ["bounds", "--config", str(cfg), "--r", "4"], capsys)
        assert code == 0
        rows = data_lines(out)[1:]
        assert all(row.split(",")[4] == "4" for row in rows)

    def test_missing_file_is_usage(self, capsys):
        code, _, _ = run_cli(
            ["bounds", "--config", "/no/such/file.cfg"], capsys)
        assert code == 2

    def test_malformed_line_is_usage(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just some words\n")
        code, _, err = run_cli(["bounds", "--config", str(cfg)], capsys)
        assert code == 2
        assert "KEY = VALUE" in err


class TestProtocolCommands:
    def test_figure1_criteria_depend_on_order(self, capsys):
        code, out, _ = run_cli(
            ["figure1", "--n", "3", "--instances", "1", "--samples", "4",
             "--eps", "2e-2"], capsys)
        assert code == 0
        rows = [row.split(",") for row in data_lines(out)[1:]]
        by_p = {}
        for cells in rows:
            by_p.setdefault(cells[2], set()).add(cells[5])
        assert "interference" in by_p["1"]
        assert "interference" not in by_p["2"]
        assert {"empirical", "triangle", "counting", "worst"} <= by_p["2"]
        assert "seed=7" in out  # canned protocols default to a fixed seed

    def test_figure2_has_alpha_column(self, capsys):
        code, out, _ = run_cli(
            ["figure2", "--n", "3", "--instances", "1", "--samples", "4",
             "--alpha", "0,4", "--p", "1", "--eps", "2e-2"], capsys)
        assert code == 0
        header, *rows = data_lines(out)
        assert header.split(",")[1] == "alpha"
        alphas = {cells.split(",")[1] for cells in rows}
        assert alphas == {"0.0", "4.0"}

    def test_error_vs_t_grid(self, capsys):
        code, out, _ = run_cli(
            ["error-vs-t", "--n", "3", "--r", "30", "--t", "geom:1:4:3",
             "--samples", "4"], capsys)
        assert code == 0
        rows = [row.split(",") for row in data_lines(out)[1:]]
        assert [float(cells[4]) for cells in rows] == pytest.approx([1.0, 2.0, 4.0])

    def test_otoc_modes(self, capsys):
        code, out, _ = run_cli(
            ["otoc", "--n", "3", "--t", "1.2", "--p", "1", "--r", "12",
             "--samples", "4"], capsys)
        assert code == 0
        rows = [row.split(",") for row in data_lines(out)[1:]]
        modes = [cells[5] for cells in rows]
        assert modes == ["exact", "trotter", "sampled"]
        exact = float(rows[0][6])
        gap = float(rows[1][7])
        bound_avg = float(rows[1][8])
        assert abs(exact) <= 1.0 + 1e-9
        assert gap <= bound_avg

    def test_sd_scaling_rows(self, capsys):
        code, out, _ = run_cli(
            ["sd-scaling", "--n", "3", "--eps", "5e-2", "--samples", "6"],
            capsys)
        assert code == 0
        cells = data_lines(out)[1].split(",")
        assert int(cells[5]) >= 1
        assert float(cells[7]) > 0.0

    def test_haar_d_matches_library(self, capsys):
        from trotterkit import haarmean

        code, out, _ = run_cli(
            ["haar-d", "--scenario", "one_nonzero", "--d", "2,4"], capsys)
        assert code == 0
        rows = [row.split(",") for row in data_lines(out)[1:]]
        for cells in rows:
            d = int(cells[1])
            assert float(cells[2]) == pytest.approx(haarmean.d_one_nonzero(d),
                                                    abs=1e-12)


def test_console_script_is_wired():
    proc = subprocess.run([sys.executable, "-m", "trotterkit.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "figure1" in proc.stdout
