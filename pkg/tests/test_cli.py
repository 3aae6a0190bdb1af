"""End-to-end harness runs through the CLI entry point."""

import csv

import pytest

from predlift.cli import main


def gen(tmp_path, problem="counter", model="uniform", sigma="4", T="48", seed="1", extra=()):
    out = str(tmp_path / "inst")
    rc = main(
        [
            "generate", "--problem", problem, "--model", model, "--sigma", sigma,
            "--T", T, "--n", "10", "--seed", seed, "--out", out, *extra,
        ]
    )
    assert rc == 0
    return out


def test_generate_run_verify_counter(tmp_path, capsys):
    out = gen(tmp_path)
    rc = main(
        ["run", "--problem", "counter", "--pred", f"{out}.pred",
         "--stream", f"{out}.stream", "--mode", "predicted", "--seed", "5"]
    )
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    day_lines = [l for l in lines if l and l[0].isdigit()]
    assert len(day_lines) == 48
    assert any(l.startswith("#counters") for l in lines)

    rc = main(
        ["verify", "--problem", "counter", "--pred", f"{out}.pred",
         "--stream", f"{out}.stream", "--seed", "5"]
    )
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_modes_agree_on_outputs(tmp_path, capsys):
    out = gen(tmp_path, problem="msf", sigma="6", T="32")

    def day_lines(mode, extra=()):
        rc = main(
            ["run", "--problem", "msf", "--pred", f"{out}.pred",
             "--stream", f"{out}.stream", "--mode", mode, "--seed", "2", *extra]
        )
        assert rc == 0
        return [
            l for l in capsys.readouterr().out.strip().splitlines()
            if l and l[0].isdigit()
        ]

    predicted = day_lines("predicted")
    assert day_lines("offline") == predicted
    assert day_lines("brute-force") == predicted
    assert day_lines("backstopped") == predicted
    boosted = day_lines("boosted", extra=("--bundles", f"{out}.bundles", "--instances-cap", "2"))
    assert boosted == predicted


def test_verify_decmax_instance(tmp_path, capsys):
    out = gen(tmp_path, problem="decmax", model="drop", sigma="0", T="40", extra=())
    rc = main(
        ["verify", "--problem", "decmax", "--instance", f"{out}.inst", "--seed", "3"]
    )
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_deletion_predicted_flow(tmp_path, capsys):
    out = gen(tmp_path, problem="connectivity", extra=("--deletion-predicted",))
    rc = main(
        ["verify", "--problem", "connectivity", "--dstream", f"{out}.dstream", "--seed", "4"]
    )
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_bench_writes_csv(tmp_path, capsys):
    path = str(tmp_path / "bench.csv")
    rc = main(
        ["bench", "--problem", "counter", "--T", "64", "--seeds", "2",
         "--errors", "1,2", "--out", path]
    )
    assert rc == 0
    with open(path) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 4
    assert set(rows[0]) == {
        "model", "T", "l1_error", "preprocess_units", "retrigger_units",
        "total_units", "reschedules", "depth",
    }
    assert all(int(r["l1_error"]) > 0 for r in rows)


def test_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.stream"
    bad.write_text("1 a I\n5 b I\n")
    rc = main(["run", "--problem", "counter", "--stream", str(bad), "--seed", "1"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_missing_files_exit_code():
    rc = main(["run", "--problem", "counter", "--seed", "1"])
    assert rc == 2
