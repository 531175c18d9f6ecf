import json
from importlib import resources

import pytest

from treeplan.bench import read_csv
from treeplan.cli import main

HANOI3 = str(resources.files("treeplan") / "data" / "hanoi-3.task")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_file(capsys):
    code, out, _ = run(capsys, "run", HANOI3, "--search", "bilevel", "--plan")
    assert code == 0
    lines = out.splitlines()
    summary = json.loads(lines[0])
    assert summary["outcome"] == "solved" and summary["valid"] is True
    assert len(lines) == 1 + summary["plan_length"]
    assert lines[1].startswith("move-")


def test_run_generator_appends_csv(capsys, tmp_path):
    out_csv = tmp_path / "r.csv"
    for _ in range(2):
        code, _, _ = run(capsys, "run", "--gen", "hanoi:4", "--config", "nebula-lite", "--out", str(out_csv))
        assert code == 0
    with open(out_csv) as fh:
        recs = read_csv(fh)
    assert len(recs) == 2 and recs[0].config == "nebula-lite"


def test_run_node_limit(capsys):
    code, out, _ = run(capsys, "run", "--gen", "hanoi:8", "--max-nodes", "1")
    assert code == 0 and json.loads(out)["outcome"] == "resource-limit"


def exit_code(argv):
    try:
        return main(argv)
    except SystemExit as e:  # argparse errors
        return e.code


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["run"],
    ["run", "--gen", "hanoi:3", "--search", "astar"],
    ["run", "--gen", "hanoi:3", "--queue", "fib"],
    ["run", "--gen", "hanoi:99"],
    ["run", "--gen", "hanoi:3", "--budget", "fixed:0"],
    ["run", "--gen", "hanoi:3", "--alternate", "n2:hff"],
    ["run", "/no/such.task"],
    ["suite", "--configs", "lama"],
    ["suite", "--instances", "hanoi:0"],
    ["probe", "--depths", "a,b"],
    ["probe", "--configs", "nope"],
    ["score", "/no/such.csv"],
    ["score", "x.csv", "--limit", "1"],
], ids=lambda a: " ".join(a) or "empty")
def test_usage_errors_exit_1(capsys, argv):
    assert exit_code(argv) == 1
    assert "error" in capsys.readouterr().err


def test_internal_error_exit_2(monkeypatch, capsys):
    import treeplan.cli as cli

    def boom(*a, **k):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "run_search", boom)
    code, _, err = run(capsys, "run", "--gen", "hanoi:3")
    assert code == 2 and "internal error" in err


def test_suite_and_score(capsys, tmp_path):
    out_csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "suite", "--instances", "hanoi:3,grid:5x5", "--configs", "gbfs,bilevel",
                       "--seeds", "2", "--time-limit", "10", "--out", str(out_csv))
    assert code == 0
    assert "coverage=2.00/2" in out
    code, out2, _ = run(capsys, "score", str(out_csv), "--limit", "10")
    assert code == 0 and out2 == out


def test_probe_with_oracles(capsys, tmp_path):
    out_csv = tmp_path / "p.csv"
    code, out, _ = run(capsys, "probe", "--depths", "3,4", "--expansions", "20", "--seeds", "1",
                       "--with-oracles", "--out", str(out_csv))
    assert code == 0
    assert out.splitlines()[0].startswith("config,branching,depth")
    assert "oracle cross-check: ok" in out
    assert out_csv.read_text() in out
