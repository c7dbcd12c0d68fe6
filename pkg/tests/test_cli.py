import json
import os

import pytest

from qccdc import cli


def _run(args):
    return cli.main(args)


def test_compile_writes_artifacts(tmp_path, capsys):
    out = str(tmp_path / "run")
    rc = _run(["compile", "S,2,2,G", "--rounds", "2", "--out", out])
    assert rc == 0
    captured = capsys.readouterr().out
    assert "elapsed per round" in captured
    names = sorted(os.listdir(out))
    stem = "S2_c2_grid_standard_nocool_f1_r2"
    for suffix in (".stim", ".schedule.jsonl", ".gantt.csv", ".device.json",
                   ".mapping.json", ".config.json"):
        assert stem + suffix in names
    assert "metrics.csv" in names


def test_compile_rejects_capacity_one(tmp_path, capsys):
    rc = _run(["compile", "S,3,1,G", "--out", str(tmp_path)])
    assert rc == 1
    assert "capacity" in capsys.readouterr().err


def test_single_chain_row_reports_zero_movement(tmp_path):
    out = str(tmp_path / "run")
    rc = _run(["compile", "R,3,5,C", "--rounds", "1", "--out", out])
    assert rc == 0
    with open(os.path.join(out, "metrics.csv")) as fh:
        header, row = fh.read().strip().splitlines()
    cols = dict(zip(header.split(","), row.split(",")))
    assert cols["n_movement_ops"] == "0"


def test_single_point_sweep_matches_compile(tmp_path):
    out_c = str(tmp_path / "c")
    out_s = str(tmp_path / "s")
    assert _run(["compile", "S,3,2,G", "--rounds", "2", "--out", out_c]) == 0
    assert _run([
        "sweep", "--codes", "S", "--distances", "3", "--capacities", "2",
        "--topologies", "G", "--rounds", "2", "--out", out_s,
    ]) == 0
    with open(os.path.join(out_c, "metrics.csv")) as fh:
        row_c = fh.read().splitlines()[1]
    with open(os.path.join(out_s, "metrics.csv")) as fh:
        row_s = fh.read().splitlines()[1]
    assert row_c == row_s


def test_sweep_worker_count_independent(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        out = str(tmp_path / f"jobs{jobs}")
        rc = _run([
            "sweep", "--distances", "2,3", "--capacities", "2,4",
            "--rounds", "1", "--jobs", jobs, "--out", out,
        ])
        assert rc == 0
        with open(os.path.join(out, "metrics.csv")) as fh:
            outs.append(fh.read())
    assert outs[0] == outs[1]


def test_sweep_records_failures_and_continues(tmp_path):
    out = str(tmp_path / "run")
    # capacity 30 single-trap rows compile; distance 2 with capacity 1 is
    # invalid and must be recorded, not fatal
    rc = _run([
        "sweep", "--distances", "2", "--capacities", "1,2",
        "--rounds", "1", "--out", out,
    ])
    assert rc == 0
    with open(os.path.join(out, "metrics.csv")) as fh:
        lines = fh.read().strip().splitlines()
    assert len(lines) == 3
    statuses = sorted(line.split(",")[-2] for line in lines[1:])
    assert statuses == ["failed", "ok"]


def test_sweep_config_file(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({
        "codes": ["R"], "distances": [3], "capacities": [2],
        "topologies": ["L"], "rounds": 1,
    }))
    out = str(tmp_path / "run")
    assert _run(["sweep", "--config", str(cfg), "--out", out]) == 0
    with open(os.path.join(out, "metrics.csv")) as fh:
        body = fh.read()
    assert "repetition,3,2,linear" in body


def test_verify_clean_configuration(capsys):
    assert _run(["verify", "S,2,2,G", "--rounds", "1"]) == 0
    assert "clean" in capsys.readouterr().out


def test_verify_catches_corrupted_trace(tmp_path, capsys):
    out = str(tmp_path / "run")
    assert _run(["compile", "R,3,2,L", "--rounds", "1", "--out", out]) == 0
    stem = "R3_c2_linear_standard_nocool_f1_r1"
    trace = os.path.join(out, stem + ".schedule.jsonl")
    with open(trace) as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    # inject an extra ion: duplicate a merge without a matching split
    merge = next(r for r in rows if r["kind"] == "merge")
    extra = dict(merge)
    extra["id"] = max(r["id"] for r in rows) + 1
    extra["qubits"] = [99]
    extra["deps"] = []
    rows.append(extra)
    with open(trace, "w") as fh:
        fh.writelines(json.dumps(r) + "\n" for r in rows)
    rc = _run([
        "verify", "--trace", trace,
        "--device", os.path.join(out, stem + ".device.json"),
        "--mapping", os.path.join(out, stem + ".mapping.json"),
    ])
    assert rc == 1
    assert "violation" in capsys.readouterr().err


def test_trace_checker_flags_wise_phase_mixing():
    from qccdc.device import build_device
    from qccdc.verify import check_trace_rows

    device = build_device("linear", n_traps=2, capacity=2)
    seg = next(iter(device.segments))
    trap = next(iter(device.traps))
    rows = [
        {"id": 0, "kind": "split", "qubits": [0], "start": 0, "end": 80,
         "component": trap, "deps": []},
        {"id": 1, "kind": "shuttle", "qubits": [1], "start": 40, "end": 45,
         "component": seg, "deps": []},
    ]
    home = {0: trap}
    assert check_trace_rows(rows, device, home, wise=False) == []
    violations = check_trace_rows(rows, device, home, wise=True)
    assert any("WISE" in v.message for v in violations)


def test_env_var_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QCCDC_ROUNDS", "1")
    out = str(tmp_path / "run")
    assert _run(["compile", "R,3,2,L", "--out", out]) == 0
    assert "rounds=1" in capsys.readouterr().out


def test_noise_config_flag(tmp_path):
    cfg = tmp_path / "noise.json"
    cfg.write_text(json.dumps({"p_meas": 0.25}))
    out = str(tmp_path / "run")
    assert _run(["compile", "R,3,5,C", "--rounds", "1", "--out", out,
                 "--noise-config", str(cfg)]) == 0
    stem = "R3_c5_single_chain_standard_nocool_f1_r1"
    text = open(os.path.join(out, stem + ".stim")).read()
    assert "X_ERROR(0.25)" in text
