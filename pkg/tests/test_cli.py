import pytest

from macrocolumn.cli import main
from macrocolumn.config import ConfigError, load_config

SMALL = ["--set", "n_envs=2", "--set", "n_features=5", "--set", "width=15", "--seed", "3"]


def test_pair_fixture_trace(capsys):
    assert main(["run", "--fixture", "pair"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("step\tmode")
    assert lines[-1].split("\t")[7:10] == ["beta", "8", "-5"]


def test_run_is_byte_identical(tmp_path):
    outs = []
    for _ in range(2):
        assert main(["run", *SMALL, "--out", str(tmp_path)]) == 0
        outs.append(((tmp_path / "results.csv").read_bytes(),
                     (tmp_path / "summary.txt").read_bytes()))
    assert outs[0] == outs[1]
    summary = outs[0][1].decode()
    for key in ("theta = 8", "w_b = 6", "backoff = 4", "segments = auto", "nav_errors = 0"):
        assert key in summary


def test_seed_changes_outputs(tmp_path):
    main(["run", *SMALL, "--out", str(tmp_path / "a")])
    main(["run", *SMALL[:-2], "--seed", "4", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a/results.csv").read_text() != (tmp_path / "b/results.csv").read_text()


def test_sweep(tmp_path, capsys):
    assert main(["sweep", *SMALL, "--list", "2,1", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("segments\t") and "advisory" in out
    assert (tmp_path / "sweep.csv").exists()


def test_verify_quick_and_fault(capsys):
    assert main(["verify", "--quick"]) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert main(["verify", "--quick", "--fault", "tie"]) == 1
    assert "first divergence cycle" in capsys.readouterr().out


def test_teach(tmp_path, capsys):
    assert main(["teach"]) == 0
    assert "decoded 11 edge(s) identical" in capsys.readouterr().out
    assert main(["teach", "--reps", "1"]) == 0
    assert "not entrenched" in capsys.readouterr().out
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    assert main(["teach", str(empty)]) == 0
    assert capsys.readouterr().out.strip() == "(no edges)"
    bad = tmp_path / "bad.txt"
    bad.write_text("a B 1 A\n")
    assert main(["teach", str(bad)]) == 2


def test_trace_benchmark_env(capsys):
    assert main(["trace", *SMALL, "--env", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 1 + 100


def test_config_errors(tmp_path, capsys):
    assert main(["run", "--set", "bogus=1"]) == 2
    assert main(["run", "--set", "theta=zero"]) == 2
    assert main(["run", "--set", "w_b=9"]) == 2
    cfgfile = tmp_path / "c.txt"
    cfgfile.write_text("n_envs = 2\nno equals sign\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_config(str(cfgfile))


def test_config_file_and_override(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# comment\nn_envs = 7\nsegments = 4\ncomposite = 5,6\n")
    cfg = load_config(str(f), ["n_envs = 9"])
    assert cfg["n_envs"] == 9 and cfg["segments"] == 4 and cfg["composite"] == (5, 6)
    assert cfg.echo()["composite"] == "5,6"
