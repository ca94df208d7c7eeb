import json
import subprocess
import sys

import pytest

from svpart.cli import main
from svpart.circuits import ghz, qft

GHZ3 = ghz(3)


@pytest.fixture
def qasm_file(tmp_path):
    path = tmp_path / "ghz3.qasm"
    path.write_text(GHZ3)
    return str(path)


def test_run_verify_ok(qasm_file, capsys):
    rc = main(["run", qasm_file, "--hierarchy", "2", "--verify", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verify"]["ok"] is True
    assert doc["verify"]["deviation"] <= 1e-10
    assert doc["d"] == 3 and doc["g"] == 1 and doc["ranks"] == 2
    assert doc["tasks"]["Exchange"] == 1


def test_run_with_shots(qasm_file, capsys):
    rc = main(["run", qasm_file, "--hierarchy", "2", "--shots", "64", "--seed", "3",
               "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert sum(doc["histogram"].values()) == 64
    assert set(doc["histogram"]) <= {"000", "111"}


def test_run_default_hierarchy_single_rank(qasm_file, capsys):
    rc = main(["run", qasm_file, "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["ranks"] == 1 and doc["hierarchy"] == [3]


def test_ranks_flag_sets_hierarchy(qasm_file, capsys):
    rc = main(["run", qasm_file, "--ranks", "2", "--format", "json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["hierarchy"] == [2]


def test_ranks_hierarchy_conflict(qasm_file, capsys):
    rc = main(["run", qasm_file, "--ranks", "4", "--hierarchy", "2"])
    assert rc == 3


def test_ranks_must_be_power_of_two(qasm_file):
    assert main(["run", qasm_file, "--ranks", "3"]) == 3


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text("qreg q[2];\nfrobnicate q[0];\n")
    assert main(["run", str(bad)]) == 2


def test_missing_file_exit_code():
    assert main(["run", "/nonexistent/x.qasm"]) == 2


def test_oversized_hierarchy_exit_code(qasm_file):
    assert main(["run", qasm_file, "--hierarchy", "9"]) == 3


def test_dump_plan_and_tree(qasm_file, tmp_path, capsys):
    plan_path = tmp_path / "plan.json"
    tree_path = tmp_path / "tree.json"
    rc = main(["run", qasm_file, "--hierarchy", "2",
               "--dump-plan", str(plan_path), "--dump-tree", str(tree_path)])
    assert rc == 0
    plan_doc = json.loads(plan_path.read_text())
    assert [t["kind"] for t in plan_doc["tasks"]][:2] == ["Alloc", "ApplyFused"]
    tree_doc = json.loads(tree_path.read_text())
    assert tree_doc["d"] == 3


def test_dump_state(qasm_file, capsys):
    rc = main(["run", qasm_file, "--hierarchy", "2", "--dump-state", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    amps = doc["state"]
    assert len(amps) == 8
    assert amps[0][0] == pytest.approx(2**-0.5)
    assert amps[7][0] == pytest.approx(2**-0.5)


def test_partition_subcommand(qasm_file, capsys):
    rc = main(["partition", qasm_file, "--hierarchy", "2", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["level0_partitions"] == 2
    assert doc["exchanges"] == 1
    assert doc["tree"]["hierarchy"] == [2]


def test_stats_subcommand(qasm_file, capsys):
    rc = main(["stats", qasm_file, "--hierarchy", "2", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    for key in ("partition_seconds", "compute_seconds", "exchange_seconds",
                "tasks", "amps_moved", "bytes_moved", "exchanges"):
        assert key in doc
    assert doc["amps_moved"] == 4


def test_bench_subcommand(capsys):
    rc = main(["bench", "--family", "ghz", "--qubits", "4..6", "--verify",
               "--format", "json"])
    assert rc == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["d"] for r in rows] == [4, 5, 6]
    assert all(r["ok"] for r in rows)


def test_bench_unknown_family(capsys):
    assert main(["bench", "--family", "nope", "--qubits", "4"]) == 2


def test_bench_text_table(capsys):
    rc = main(["bench", "--family", "ghz", "--qubits", "4,6"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].split()[:2] == ["family", "d"]
    assert len(lines) == 3


def test_out_flag_writes_file(qasm_file, tmp_path, capsys):
    out_path = tmp_path / "result.json"
    rc = main(["run", qasm_file, "--hierarchy", "2", "--format", "json",
               "--out", str(out_path)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out_path.read_text())["d"] == 3


def test_text_format_run(qasm_file, capsys):
    rc = main(["run", qasm_file, "--hierarchy", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "tasks.Exchange: 1" in out


def test_byte_identical_runs(qasm_file, tmp_path):
    # same flags, same seed: the serialized output must not vary at all
    args = ["run", qasm_file, "--hierarchy", "2", "--shots", "128", "--seed", "42",
            "--verify", "--format", "json"]
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        rc = main(args + ["--out", str(path)])
        assert rc == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_entry(qasm_file, tmp_path):
    qft_path = tmp_path / "qft6.qasm"
    qft_path.write_text(qft(6))
    out = subprocess.run(
        [sys.executable, "-m", "svpart.cli", "run", str(qft_path),
         "--hierarchy", "4", "--verify", "--format", "json"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["verify"]["ok"] is True
