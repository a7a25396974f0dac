import io
import math
import subprocess
import sys

import pytest

from conftest import STAT_SEEDS, majority
from rcsforge.cli import _build_parser, build_config, main, run_command
from rcsforge.records import parse_records
from rcsforge.xeb_engine import run_xeb


def _run(argv):
    """Parse argv, run the command, return (exit, stdout text, stderr text)."""
    args = _build_parser().parse_args(argv)
    config = build_config(args)
    out, err = io.StringIO(), io.StringIO()
    code = run_command(config, out_stream=out, err_stream=err)
    return code, out.getvalue(), err.getvalue()


def test_xeb_command_matches_engine():
    code, out, err = _run(
        ["xeb", "--qubits", "12", "--samples", "5000", "--seed", "9", "--threads", "2"]
    )
    assert code == 0
    (record,) = parse_records(out, "jsonl")
    est = run_xeb(12, 5000, 9)
    assert record["schema"] == "xeb_estimate/1"
    assert record["f_xeb"] == est.f_xeb
    assert record["three_sigma"] == est.three_sigma
    assert record["theoretical"] == est.theoretical
    (manifest,) = parse_records(err, "jsonl")
    assert manifest["schema"] == "run_manifest/1"
    assert manifest["command"] == "xeb"
    assert manifest["duration_s"] >= 0.0
    assert manifest["summary"].startswith("f_xeb=")


def test_state_command_rows():
    code, out, _ = _run(["state", "--qubits", "2", "--seed", "5"])
    assert code == 0
    rows = parse_records(out, "jsonl")
    assert [r["index"] for r in rows] == [0, 1, 2, 3]
    assert [r["bitstring"] for r in rows] == ["00", "01", "02", "03"]
    assert math.fsum(r["p"] for r in rows) == pytest.approx(1.0, abs=1e-12)
    assert all("phase" not in r for r in rows)


def test_state_command_phases_and_csv():
    code, out, _ = _run(["state", "--qubits", "1", "--seed", "5", "--phases", "--format", "csv"])
    assert code == 0
    rows = parse_records(out, "csv")
    assert rows[0]["schema"] == "state_row_phase/1"
    assert len(rows) == 2
    assert all(0.0 <= r["phase"] < 2.0 * math.pi for r in rows)
    assert math.fsum(r["p"] for r in rows) == pytest.approx(1.0, abs=1e-12)


def test_state_bitstring_hex_is_little_endian_packed():
    code, out, _ = _run(["state", "--qubits", "9", "--seed", "1"])
    assert code == 0
    rows = parse_records(out, "jsonl")
    assert rows[3]["bitstring"] == "0300"
    assert rows[256]["bitstring"] == "0001"


def test_verify_command():
    code, out, _ = _run(["verify", "--qubits", "3", "--samples", "20000", "--seed", "3"])
    assert code == 0
    rows = parse_records(out, "jsonl")
    assert [r["test"] for r in rows] == [
        "sampler_vs_exact",
        "oracle_vs_exact",
        "sampler_vs_oracle",
    ]
    for r in rows:
        assert r["reject"] == (r["statistic"] > r["critical_value"])
    assert rows[2]["n_b"] == 20000


def test_verify_command_accepts_majority_of_seeds():
    # Full-size verification suite through the CLI: all three KS reports come
    # back reject=false on at least 2 of the 3 fixed seeds.
    outcomes = []
    for seed in STAT_SEEDS:
        _, out, _ = _run(
            ["verify", "--qubits", "4", "--samples", "100000", "--seed", str(seed)]
        )
        rows = parse_records(out, "jsonl")
        outcomes.append(not any(r["reject"] for r in rows))
    assert majority(outcomes)


def test_hist_command_totals():
    code, out, _ = _run(["hist", "--qubits", "12", "--samples", "1", "--seed", "7", "--bins", "8"])
    assert code == 0
    rows = parse_records(out, "jsonl")
    assert len(rows) == 9  # 8 bins plus the overflow row
    assert sum(r["count"] for r in rows) == 4096
    assert rows[0]["bin_left"] == 0.0
    assert rows[1]["bin_left"] == 2.0  # dyadic edges land exactly on 2.0
    assert rows[-1]["bin_right"] is None


def test_hist_multiple_states():
    code, out, _ = _run(["hist", "--qubits", "4", "--samples", "10", "--seed", "2"])
    assert code == 0
    rows = parse_records(out, "jsonl")
    assert sum(r["count"] for r in rows) == 10 * 16


def test_output_file(tmp_path):
    path = tmp_path / "out.jsonl"
    code, out, _ = _run(["state", "--qubits", "1", "--seed", "4", "--out", str(path)])
    assert code == 0
    assert out == ""
    rows = parse_records(path.read_text(), "jsonl")
    assert len(rows) == 2


def test_byte_identical_repeat_runs():
    argv = ["hist", "--qubits", "10", "--samples", "3", "--seed", "21", "--format", "csv"]
    _, first, _ = _run(argv)
    _, second, _ = _run(argv)
    assert first == second


def test_byte_identical_across_threads():
    outs = set()
    for threads in ("1", "2", "8"):
        _, out, _ = _run(
            ["xeb", "--qubits", "30", "--samples", "200000", "--seed", "6", "--threads", threads]
        )
        outs.add(out)
    assert len(outs) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["xeb", "--qubits", "0", "--samples", "10", "--seed", "1"],
        ["xeb", "--qubits", "4", "--samples", "1", "--seed", "1"],
        ["xeb", "--qubits", "4", "--samples", "10", "--seed", "-2"],
        ["xeb", "--qubits", "4", "--samples", "10", "--seed", str(1 << 64)],
        ["xeb", "--qubits", "2000000", "--samples", "10", "--seed", "1"],
        ["state", "--qubits", "27", "--seed", "1"],
        ["verify", "--qubits", "21", "--samples", "10", "--seed", "1"],
        ["hist", "--qubits", "4", "--samples", "1", "--seed", "1", "--bins", "0"],
        ["xeb", "--qubits", "4", "--samples", "10", "--seed", "1", "--threads", "zero"],
    ],
)
def test_argument_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_unknown_command_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_runtime_failure_exits_1(capsys):
    # Within the verify qubit cap but over the batch-memory cap: passes
    # argument validation, fails at runtime.
    assert main(["verify", "--qubits", "20", "--samples", "100000", "--seed", "1"]) == 1
    err = capsys.readouterr().err
    assert "rcsforge: error:" in err


def test_env_cap_override(monkeypatch, capsys):
    monkeypatch.setenv("RCSFORGE_MAX_QUBITS", "10")
    assert main(["xeb", "--qubits", "12", "--samples", "10", "--seed", "1"]) == 2
    capsys.readouterr()
    assert main(["xeb", "--qubits", "10", "--samples", "10", "--seed", "1"]) == 0
    capsys.readouterr()
    # verify stays hard-capped at the oracle limit even if the env raises it
    monkeypatch.setenv("RCSFORGE_MAX_QUBITS", "100")
    assert main(["verify", "--qubits", "25", "--samples", "10", "--seed", "1"]) == 2
    capsys.readouterr()
    monkeypatch.setenv("RCSFORGE_MAX_QUBITS", "bogus")
    assert main(["xeb", "--qubits", "4", "--samples", "10", "--seed", "1"]) == 2
    capsys.readouterr()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rcsforge.cli", "state", "--qubits", "1", "--seed", "3"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    rows = parse_records(proc.stdout, "jsonl")
    assert len(rows) == 2
    manifests = parse_records(proc.stderr, "jsonl")
    assert manifests[-1]["schema"] == "run_manifest/1"
