"""Command-line front end: compile one configuration, sweep a grid of
configurations, or verify a compiled run against the routing invariants.

Flags can also be supplied through QCCDC_-prefixed environment variables
(e.g. QCCDC_JOBS=4) for CI use.  Sweeps run points in a process pool;
failures are recorded per row and the sweep continues, and output rows are
sorted so the CSV content is independent of worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import emit, verify
from .codes import CodeKind
from .compiler import CompileConfig, CompileResult, compile_config
from .device import QccdDevice, Topology, Wiring
from .noise import NoiseParams

ENV_PREFIX = "QCCDC_"


def _env_default(name: str, fallback=None):
    return os.environ.get(ENV_PREFIX + name.upper(), fallback)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--code", default=_env_default("code", "S"),
                        help="S (rotated surface), R (repetition), U (unrotated)")
    parser.add_argument("--distance", type=int, default=int(_env_default("distance", 3)))
    parser.add_argument("--capacity", type=int, default=int(_env_default("capacity", 2)))
    parser.add_argument("--topology", default=_env_default("topology", "G"),
                        help="G (grid), L (linear), S (switch), C (single chain)")
    parser.add_argument("--wiring", default=_env_default("wiring", "standard"),
                        help="standard or wise")
    parser.add_argument("--improvement", type=float, default=float(_env_default("improvement", 1.0)),
                        help="gate improvement factor f >= 1")
    parser.add_argument("--rounds", type=int, default=int(_env_default("rounds", 5)))
    parser.add_argument("--cooling", choices=["auto", "on", "off"],
                        default=_env_default("cooling", "auto"))
    parser.add_argument("--seed", type=int, default=int(_env_default("seed", 0)))
    parser.add_argument("--noise-config", default=_env_default("noise_config"),
                        help="JSON/TOML file with NoiseParams overrides")


def _noise_from_args(args: argparse.Namespace) -> NoiseParams | None:
    path = getattr(args, "noise_config", None)
    if not path:
        return None
    with open(path, "rb") as fh:
        doc = json.load(fh) if path.endswith(".json") else tomllib.load(fh)
    return NoiseParams.from_config(doc)


def _config_from_args(args: argparse.Namespace) -> CompileConfig:
    cooling = {"auto": None, "on": True, "off": False}[args.cooling]
    base = dict(
        wiring=Wiring.parse(args.wiring),
        gate_improvement=args.improvement,
        rounds=args.rounds,
        cooling=cooling,
        seed=args.seed,
    )
    if getattr(args, "tuple", None):
        return CompileConfig.from_tuple(args.tuple, **base)
    return CompileConfig(
        code=CodeKind.parse(args.code),
        distance=args.distance,
        capacity=args.capacity,
        topology=Topology.parse(args.topology),
        **base,
    )


def _write_artifacts(result: CompileResult, out_dir: str, traces: bool = True) -> str:
    os.makedirs(out_dir, exist_ok=True)
    stem = result.config.stem()
    stim_path = os.path.join(out_dir, stem + ".stim")
    emit.write_text_atomic(stim_path, result.stim_text)
    if traces:
        emit.write_text_atomic(
            os.path.join(out_dir, stem + ".schedule.jsonl"), result.schedule.to_jsonl()
        )
        emit.write_text_atomic(
            os.path.join(out_dir, stem + ".gantt.csv"), result.schedule.to_gantt_csv()
        )
        emit.write_text_atomic(
            os.path.join(out_dir, stem + ".device.json"), result.device.to_json()
        )
        emit.write_text_atomic(
            os.path.join(out_dir, stem + ".mapping.json"), result.mapping.to_json()
        )
        config_doc = {
            "tuple": result.config.tuple_str(),
            "wiring": result.config.wiring.value,
            "gate_improvement": result.config.gate_improvement,
            "rounds": result.config.rounds,
            "cooling": result.config.cooling_enabled,
            "seed": result.config.seed,
        }
        emit.write_text_atomic(
            os.path.join(out_dir, stem + ".config.json"), json.dumps(config_doc, indent=1) + "\n"
        )
    return stim_path


def _failed_row(params: dict, error: str) -> dict:
    row = {col: "" for col in emit.REPORT_COLUMNS}
    row.update(
        {
            "code": params["code"].value,
            "distance": params["distance"],
            "capacity": params["capacity"],
            "topology": params["topology"].value,
            "wiring": params["wiring"].value,
            "gate_improvement": params["gate_improvement"],
            "rounds": params["rounds"],
            "status": "failed",
            "error": error,
        }
    )
    return row


def _compile_row(params: dict, out_dir: str, traces: bool) -> dict:
    try:
        config = CompileConfig(**params)
        result = compile_config(config)
    except Exception as exc:  # record-and-continue per sweep policy
        return _failed_row(params, str(exc))
    stim_path = _write_artifacts(result, out_dir, traces=traces)
    return emit.report_row(
        config,
        result.metrics,
        result.device.counts(),
        result.resource,
        os.path.relpath(stim_path, out_dir),
        gate_bound_us=result.gate_bound_us,
    )


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
        result = compile_config(config, noise_params=_noise_from_args(args))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    stim_path = _write_artifacts(result, args.out, traces=True)
    row = emit.report_row(
        config,
        result.metrics,
        result.device.counts(),
        result.resource,
        os.path.relpath(stim_path, args.out),
        gate_bound_us=result.gate_bound_us,
    )
    emit.write_text_atomic(os.path.join(args.out, "metrics.csv"), emit.rows_to_csv([row]))
    m, r = result.metrics, result.resource
    print(f"config            {config.tuple_str()}  wiring={config.wiring.value}"
          f"  f={config.gate_improvement:g}  rounds={config.rounds}")
    print(f"elapsed per round {m.elapsed_per_round:.1f} us")
    print(f"movement          {m.n_movement_ops} ops ({m.n_hops} hops, "
          f"{m.n_gate_swaps} gate swaps), {m.movement_time} us busy")
    print(f"resources         {r.n_electrodes} electrodes, {r.n_dacs} DACs, "
          f"{r.data_rate_gbit_s:.3f} Gbit/s, {r.power_w:.3f} W")
    print(f"artifacts         {args.out}")
    return 0


def _sweep_space(args: argparse.Namespace) -> list[dict]:
    doc: dict = {}
    if args.config:
        with open(args.config, "rb") as fh:
            if args.config.endswith(".json"):
                doc = json.load(fh)
            else:
                doc = tomllib.load(fh)

    def listed(flag: str, key: str, default: list, conv):
        raw = getattr(args, flag, None)
        if raw:
            return [conv(v) for v in str(raw).split(",")]
        if key in doc:
            return [conv(v) for v in doc[key]]
        return default

    codes_ = listed("codes", "codes", [CodeKind.ROTATED_SURFACE], CodeKind.parse)
    distances = listed("distances", "distances", [3], int)
    capacities = listed("capacities", "capacities", [2], int)
    topologies = listed("topologies", "topologies", [Topology.GRID], Topology.parse)
    wirings = listed("wirings", "wirings", [Wiring.STANDARD], Wiring.parse)
    improvements = listed("improvements", "improvements", [1.0], float)
    rounds = int(doc.get("rounds", args.rounds))
    cooling = {"auto": None, "on": True, "off": False}[args.cooling]

    configs = []
    for code in codes_:
        for d in distances:
            for cap in capacities:
                for topo in topologies:
                    for wiring in wirings:
                        for f in improvements:
                            configs.append(
                                dict(
                                    code=code,
                                    distance=d,
                                    capacity=cap,
                                    topology=topo,
                                    wiring=wiring,
                                    gate_improvement=f,
                                    rounds=rounds,
                                    cooling=cooling,
                                    seed=args.seed,
                                )
                            )
    return configs


def cmd_sweep(args: argparse.Namespace) -> int:
    configs = _sweep_space(args)
    os.makedirs(args.out, exist_ok=True)
    rows: list[dict] = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_compile_row, cfg, args.out, args.traces) for cfg in configs
            ]
            rows = [f.result() for f in futures]
    else:
        rows = [_compile_row(cfg, args.out, args.traces) for cfg in configs]
    rows.sort(
        key=lambda r: (
            r["code"],
            r["distance"],
            r["capacity"],
            r["topology"],
            r["wiring"],
            r["gate_improvement"],
        )
    )
    emit.write_text_atomic(os.path.join(args.out, "metrics.csv"), emit.rows_to_csv(rows))
    n_failed = sum(1 for r in rows if r["status"] != "ok")
    print(f"swept {len(rows)} configurations ({n_failed} failed) -> {args.out}/metrics.csv")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.trace:
        violations = _verify_trace_files(
            args.trace, args.device, args.mapping, wise=args.wise
        )
    else:
        config = _config_from_args(args)
        result = compile_config(config)
        violations = verify.check_stream(result.stream, result.device, result.mapping)
        violations += verify.check_schedule(
            result.schedule,
            result.device,
            result.mapping,
            wise=result.config.wiring is Wiring.WISE,
        )
    if violations:
        print(f"{len(violations)} violation(s); first: {violations[0]}", file=sys.stderr)
        return 1
    print("clean: all routing and scheduling invariants hold")
    return 0


def _verify_trace_files(
    trace_path: str, device_path: str, mapping_path: str, wise: bool = False
):
    """Interval checks on a stored schedule trace (no recompilation)."""
    with open(device_path) as fh:
        device = QccdDevice.from_json(fh.read())
    with open(mapping_path) as fh:
        mapping_doc = json.load(fh)
    home = {int(q): ts[0] for q, ts in mapping_doc["qubits"].items()}
    with open(trace_path) as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    return verify.check_trace_rows(rows, device, home, wise=wise)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qccdc",
        description="Compile QEC parity-check circuits onto trapped-ion QCCD hardware",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser("compile", help="compile one configuration")
    p_compile.add_argument("tuple", nargs="?", help="shorthand CODE,d,capacity,TOPO e.g. S,3,2,G")
    _add_config_flags(p_compile)
    p_compile.add_argument("--out", default=_env_default("out", "out"))
    p_compile.set_defaults(func=cmd_compile)

    p_sweep = sub.add_parser("sweep", help="sweep a grid of configurations")
    p_sweep.add_argument("--config", help="TOML or JSON sweep description")
    p_sweep.add_argument("--codes")
    p_sweep.add_argument("--distances")
    p_sweep.add_argument("--capacities")
    p_sweep.add_argument("--topologies")
    p_sweep.add_argument("--wirings")
    p_sweep.add_argument("--improvements")
    p_sweep.add_argument("--rounds", type=int, default=int(_env_default("rounds", 5)))
    p_sweep.add_argument("--cooling", choices=["auto", "on", "off"],
                         default=_env_default("cooling", "auto"))
    p_sweep.add_argument("--seed", type=int, default=int(_env_default("seed", 0)))
    p_sweep.add_argument("--out", default=_env_default("out", "out"))
    p_sweep.add_argument("--jobs", type=int, default=int(_env_default("jobs", 1)))
    p_sweep.add_argument("--traces", action="store_true",
                         help="also write schedule traces per sweep point")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="replay and check routing invariants")
    p_verify.add_argument("tuple", nargs="?", help="config tuple to recompile and check")
    _add_config_flags(p_verify)
    p_verify.add_argument("--trace", help="schedule.jsonl to check instead of recompiling")
    p_verify.add_argument("--device", help="device.json for --trace")
    p_verify.add_argument("--mapping", help="mapping.json for --trace")
    p_verify.add_argument("--wise", action="store_true",
                          help="also check the WISE same-kind movement phases")
    p_verify.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
