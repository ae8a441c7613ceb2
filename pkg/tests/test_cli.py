import json

import pytest

from agentminer.cli import main


@pytest.fixture(scope="module")
def log_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "log.csv"
    assert main(["generate", "--cases", "16", "--seed", "3", "-o", str(path)]) == 0
    return path


def test_generate_to_stdout(capsys):
    assert main(["generate", "--cases", "2", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("case,activity,agent,timestamp")


def test_discover(log_csv, tmp_path, capsys):
    assert main(["discover", str(log_csv), "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "mas: size=" in out and "sound=True" in out
    manifest = json.loads((tmp_path / "am-manifest.json").read_text())
    assert "mas" in manifest["nets"]


def test_baseline_then_measure(log_csv, tmp_path, capsys):
    assert main(["baseline", str(log_csv), "--out-dir", str(tmp_path), "--naming", "AOL"]) == 0
    assert main(["measure", str(log_csv), "--net", str(tmp_path / "cm.pnml")]) == 0
    report = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert report["recall"] == pytest.approx(1.0)


def test_pipeline_and_pareto(log_csv, tmp_path, capsys):
    out = tmp_path / "run"
    argv = ["pipeline", str(log_csv), "--am-pairs", "1.0:0.0", "--cm-thresholds", "0.0",
            "--namings", "AAL", "--out-dir", str(out)]
    assert main(argv) == 0
    assert "2 result rows" in capsys.readouterr().out
    assert main(["pareto", str(out / "results.csv"), "--out-dir", str(tmp_path / "f")]) == 0
    assert len(list((tmp_path / "f").glob("pareto_AAL_*.csv"))) == 3


def test_errors_exit_with_two(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("case,activity,agent,timestamp\n")
    assert main(["pipeline", str(empty), "--out-dir", str(tmp_path / "o")]) == 2
    assert "no events after selection" in capsys.readouterr().err
    assert main(["discover", str(tmp_path / "missing.csv")]) == 2


def test_column_flags(tmp_path, capsys):
    from pathlib import Path
    table1 = Path(__file__).parent / "data" / "table1.csv"
    assert main(["discover", str(table1), "--agent-column", "type", "--no-typing",
                 "--out-dir", str(tmp_path)]) == 0
    assert "agent:a3" in capsys.readouterr().out


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
