import csv
import subprocess
import sys

import pytest

from peakmanip.cli import main
from peakmanip.harness import CSV_COLUMNS


def test_run_writes_csv_and_plot_data(tmp_path):
    out, plot = tmp_path / "r.csv", tmp_path / "p.csv"
    code = main(
        [
            "run", "--seed", "1", "--out", str(out), "--plot-data", str(plot),
            "--algorithms", "SPoutdeg", "--budget-fractions", "0.1", "--deltas", "0.3",
            "--placements", "1", "--graphs", "1", "--prob-sets", "2", "--rounds", "2",
        ]
    )
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 3
    assert plot.exists()


def test_run_from_toml_with_override(tmp_path):
    cfg = tmp_path / "g.toml"
    cfg.write_text('seed = 5\nalgorithms = ["SPoutdeg"]\nbudget_fractions = [0.1]\ndeltas = [0.3]\nrounds = 1\n[counts]\nplacements = 1\ngraphs = 1\nprob_sets = 1\n')
    out = tmp_path / "r.csv"
    assert main(["run", str(cfg), "--seed", "2", "--rounds", "2", "--out", str(out)]) == 0
    assert len(open(out).read().splitlines()) == 3


def test_run_requires_a_seed(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["run", "--out", str(tmp_path / "r.csv")])
    assert info.value.code == 2


def test_configuration_error_exit_code(tmp_path, capsys):
    assert main(["run", "--seed", "1", "--out", str(tmp_path / "r.csv"), "--deltas", "3"]) == 2
    assert "delta" in capsys.readouterr().err


def test_unknown_algorithm_exit_code(tmp_path):
    assert main(["run", "--seed", "1", "--out", str(tmp_path / "r.csv"), "--algorithms", "SPmagic"]) == 2


def test_missing_config_is_an_io_error(tmp_path):
    assert main(["run", str(tmp_path / "none.toml"), "--seed", "1", "--out", str(tmp_path / "r.csv")]) == 4


def test_generate_then_campaign(tmp_path, capsys):
    assert main(["generate", "--seed", "3", "--out-dir", str(tmp_path), "--count", "2", "--n", "15"]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "electorate_0.txt", "electorate_1.txt", "graph_0.txt", "graph_1.txt",
    ]
    capsys.readouterr()
    code = main(
        ["campaign", "--graph", str(tmp_path / "graph_0.txt"), "--electorate", str(tmp_path / "electorate_0.txt"), "--rounds", "3"]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("round,") and 2 <= len(lines) <= 4


def test_campaign_needs_both_files(tmp_path):
    (tmp_path / "g.txt").write_text("0 1\n")
    assert main(["campaign", "--graph", str(tmp_path / "g.txt")]) == 2


def test_campaign_parse_error_exit_code(tmp_path, capsys):
    (tmp_path / "g.txt").write_text("0 1\n1 oops\n")
    (tmp_path / "e.txt").write_text("candidates 2\n0 0\n1 1\nvoters 2\n0 0\n1 1\ntarget 0\n")
    assert main(["campaign", "--graph", str(tmp_path / "g.txt"), "--electorate", str(tmp_path / "e.txt")]) == 4
    assert "g.txt:2" in capsys.readouterr().err


def test_capability_error_exit_code(tmp_path):
    # eleven candidates are beyond the swap-distance search
    assert main(["swapdist", "--elections", "1", "--n-candidates", "11", "--noises", "0"]) == 3


def test_bench_and_swapdist_print_tables(capsys):
    assert main(["bench", "--instances", "2", "--algorithms", "SPoutdeg", "SPpagerank1.0_pos"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "algorithm,time_mean_s,time_std_s" and len(out) == 3
    assert main(["swapdist", "--elections", "20"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "peakmanip.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "swapdist" in res.stdout
