import pytest

from padme.cli import main
from padme.harness import read_trace


def test_oracle_prints_table(capsys):
    assert main(["oracle", "--plrs", "0.01,0.03,0.05"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("index,class,perm")
    assert len(lines) == 43
    first = lines[1].split(",")
    assert first[1] == "A" and first[2] == "012"


def test_run_requires_seed_and_out():
    with pytest.raises(SystemExit):
        main(["run", "--seed", "1"])
    with pytest.raises(SystemExit):
        main(["run", "--out", "x.csv"])


def test_run_writes_trace(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["run", "--seed", "2", "--out", str(out), "--iterations", "6", "--hidden", "8",
                 "--buffer-size", "4", "--batch-size", "4", "--loss-probs", "0.1 0.1 0.1"]) == 0
    rows = read_trace(out)
    assert len(rows) == 6
    assert out.read_text().startswith("# padme-trace v1 seed=2")


def test_run_reads_yaml_and_flags_override(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("iterations: 4\nloss_probs: [0.0, 0.0, 0.1]\nagent:\n  hidden: [4]\n")
    out = tmp_path / "t.csv"
    assert main(["run", "--config", str(cfg), "--seed", "0", "--out", str(out), "--iterations", "3"]) == 0
    rows = read_trace(out)
    assert len(rows) == 3 and rows[0]["plr_1"] == "0.0"


def test_two_paths_rejected(tmp_path, capsys):
    assert main(["run", "--seed", "0", "--out", str(tmp_path / "t.csv"), "--loss-probs", "0.1,0.1"]) == 2
    assert "3 paths" in capsys.readouterr().err


def test_bad_config_reports_error(tmp_path, capsys):
    assert main(["run", "--seed", "0", "--out", str(tmp_path / "t.csv"), "--K", "10"]) == 2
    assert "multiple of 4" in capsys.readouterr().err


def test_sweep_writes_one_file_per_seed(tmp_path):
    assert main(["sweep", "--seeds", "0,1", "--out-dir", str(tmp_path), "--iterations", "3",
                 "--hidden", "4"]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["seed000.csv", "seed001.csv"]
