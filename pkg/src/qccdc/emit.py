"""Serialization of compiled artifacts.

to_stim renders a noise-annotated memory experiment as a Stim text circuit:
logical gate lines (R, H, CX, M) in schedule order, noise channel lines
attached to their gates, detectors comparing consecutive same-ancilla
measurements (plus the basis-matching boundary rounds) and one logical
observable.  Output bytes are a pure function of the inputs.

report_rows/rows_to_csv produce the metrics table consumed by the sweep
front end and the evaluation harness.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass

from .codes import CodeLayout, Role, logical_z_support
from .noise import NoiseChannel, NoisyCircuit
from .route import OpKind

_CHANNEL_ARITY = {"Z_ERROR": 1, "DEPOLARIZE1": 1, "DEPOLARIZE2": 2, "X_ERROR": 1}


class EmitError(ValueError):
    pass


@dataclass(frozen=True)
class _LogicalGate:
    bundle: int
    name: str
    qubits: tuple[int, ...]
    anchor: tuple[int, int]  # (start time, op id) of the anchor native op
    op_ids: tuple[int, ...]


def _reconstruct_gates(noisy: NoisyCircuit) -> list[_LogicalGate]:
    schedule = noisy.schedule
    bundles: dict[int, list[int]] = {}
    for i, op in enumerate(schedule.stream.ops):
        if op.is_gate():
            bundles.setdefault(op.bundle, []).append(i)
    gates: list[_LogicalGate] = []
    for bundle, op_ids in sorted(bundles.items()):
        ops = [schedule.stream.ops[i] for i in op_ids]
        kinds = {op.kind for op in ops}
        if OpKind.RESET in kinds:
            (op,) = ops
            name, qubits, anchor_op = "R", op.qubits, op
        elif OpKind.MEASURE in kinds:
            (op,) = ops
            name, qubits, anchor_op = "M", op.qubits, op
        elif OpKind.MS in kinds:
            anchor_op = next(op for op in ops if op.kind is OpKind.MS)
            name, qubits = "CX", anchor_op.qubits
        else:
            anchor_op = min(ops, key=lambda op: (schedule.starts[op.id], op.id))
            name, qubits = "H", (ops[0].qubits[0],)
        gates.append(
            _LogicalGate(
                bundle=bundle,
                name=name,
                qubits=qubits,
                anchor=(schedule.starts[anchor_op.id], anchor_op.id),
                op_ids=tuple(op_ids),
            )
        )
    gates.sort(key=lambda g: g.anchor)
    return gates


def _channel_line(ch: NoiseChannel) -> str:
    targets = " ".join(str(q) for q in ch.qubits)
    return f"{ch.kind.value}({ch.probability!r}) {targets}"


def to_stim(
    noisy: NoisyCircuit,
    layout: CodeLayout,
    rounds: int,
    detectors: bool = True,
) -> str:
    """Render the annotated schedule as a Stim text circuit."""
    schedule = noisy.schedule
    gates = _reconstruct_gates(noisy)

    chan_before: dict[int, list[NoiseChannel]] = {}
    chan_after: dict[int, list[NoiseChannel]] = {}
    orphan: list[tuple[tuple[int, int], NoiseChannel]] = []
    gate_op_ids = {i for g in gates for i in g.op_ids}
    for ch in noisy.channels:
        if ch.op_id in gate_op_ids:
            target = chan_before if ch.position == "before" else chan_after
            target.setdefault(ch.op_id, []).append(ch)
        else:
            orphan.append(((ch.time, ch.op_id), ch))  # gate-swap channels

    lines: list[str] = []
    for q in sorted(layout.qubits, key=lambda qq: qq.id):
        lines.append(f"QUBIT_COORDS({q.x}, {q.y}) {q.id}")

    orphan.sort(key=lambda item: item[0])
    orphan_idx = 0
    measure_order: list[tuple[int, int]] = []  # (qubit, op id) in record order
    for gate in gates:
        while orphan_idx < len(orphan) and orphan[orphan_idx][0] <= gate.anchor:
            lines.append(_channel_line(orphan[orphan_idx][1]))
            orphan_idx += 1
        bundle_channels_before = []
        bundle_channels_after = []
        for op_id in gate.op_ids:
            bundle_channels_before.extend(chan_before.get(op_id, []))
            bundle_channels_after.extend(chan_after.get(op_id, []))
        for ch in sorted(bundle_channels_before, key=lambda c: (c.time, c.op_id, c.qubits)):
            lines.append(_channel_line(ch))
        lines.append(f"{gate.name} {' '.join(str(q) for q in gate.qubits)}")
        if gate.name == "M":
            measure_order.append((gate.qubits[0], gate.op_ids[0]))
        for ch in sorted(bundle_channels_after, key=lambda c: (c.time, c.op_id, c.qubits)):
            lines.append(_channel_line(ch))
    while orphan_idx < len(orphan):
        lines.append(_channel_line(orphan[orphan_idx][1]))
        orphan_idx += 1

    if detectors:
        lines.extend(_detector_lines(layout, rounds, measure_order))
    return "\n".join(lines) + "\n"


def _detector_lines(
    layout: CodeLayout, rounds: int, measure_order: list[tuple[int, int]]
) -> list[str]:
    n_records = len(measure_order)
    rec_of: dict[int, list[int]] = {}
    for idx, (qubit, _) in enumerate(measure_order):
        rec_of.setdefault(qubit, []).append(idx)

    roles = layout.roles()
    ancillas = layout.ancilla_ids()
    data = layout.data_ids()
    for a in ancillas:
        if len(rec_of.get(a, [])) != rounds:
            raise EmitError(
                f"not a memory experiment: ancilla {a} measured "
                f"{len(rec_of.get(a, []))} times, expected {rounds}"
            )
    for q in data:
        if len(rec_of.get(q, [])) != 1:
            raise EmitError(
                f"not a memory experiment: data qubit {q} measured "
                f"{len(rec_of.get(q, []))} times, expected 1"
            )

    def rec(index: int) -> str:
        return f"rec[{index - n_records}]"

    lines: list[str] = []
    z_ancillas = [a for a in ancillas if roles[a] is Role.ANCILLA_Z]
    for a in z_ancillas:
        pos = layout.qubit(a)
        lines.append(f"DETECTOR({pos.x}, {pos.y}, 0) {rec(rec_of[a][0])}")
    for r in range(1, rounds):
        for a in ancillas:
            pos = layout.qubit(a)
            lines.append(
                f"DETECTOR({pos.x}, {pos.y}, {r}) "
                f"{rec(rec_of[a][r])} {rec(rec_of[a][r - 1])}"
            )
    for a in z_ancillas:
        pos = layout.qubit(a)
        targets = [rec(rec_of[a][rounds - 1])]
        targets.extend(rec(rec_of[d][0]) for d in layout.cell_of(a).data)
        lines.append(f"DETECTOR({pos.x}, {pos.y}, {rounds}) {' '.join(targets)}")
    observable = " ".join(rec(rec_of[d][0]) for d in logical_z_support(layout))
    lines.append(f"OBSERVABLE_INCLUDE(0) {observable}")
    return lines


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file and rename, so concurrent writers never
    interleave partial content."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


REPORT_COLUMNS = [
    "code",
    "distance",
    "capacity",
    "topology",
    "wiring",
    "gate_improvement",
    "rounds",
    "elapsed_per_round_us",
    "gate_bound_per_round_us",
    "movement_time_us",
    "n_movement_ops",
    "n_gate_swaps",
    "n_hops",
    "makespan_us",
    "n_traps",
    "n_junctions",
    "n_electrodes",
    "n_dacs",
    "data_rate_mbit_s",
    "power_mw",
    "stim_path",
    "status",
    "error",
]


def report_row(
    config,
    metrics,
    counts,
    resource,
    stim_path: str,
    status: str = "ok",
    error: str = "",
    gate_bound_us: int | None = None,
) -> dict:
    """One metrics-report row for a compiled configuration."""
    return {
        "code": config.code.value,
        "distance": config.distance,
        "capacity": config.capacity,
        "topology": config.topology.value,
        "wiring": config.wiring.value,
        "gate_improvement": config.gate_improvement,
        "rounds": config.rounds,
        "elapsed_per_round_us": metrics.elapsed_per_round if metrics else "",
        "gate_bound_per_round_us": (
            gate_bound_us / config.rounds if gate_bound_us is not None else ""
        ),
        "movement_time_us": metrics.movement_time if metrics else "",
        "n_movement_ops": metrics.n_movement_ops if metrics else "",
        "n_gate_swaps": metrics.n_gate_swaps if metrics else "",
        "n_hops": metrics.n_hops if metrics else "",
        "makespan_us": metrics.makespan if metrics else "",
        "n_traps": counts.n_traps if counts else "",
        "n_junctions": counts.n_junctions if counts else "",
        "n_electrodes": resource.n_electrodes if resource else "",
        "n_dacs": resource.n_dacs if resource else "",
        "data_rate_mbit_s": resource.data_rate_mbit_s if resource else "",
        "power_mw": resource.power_mw if resource else "",
        "stim_path": stim_path,
        "status": status,
        "error": error,
    }


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
