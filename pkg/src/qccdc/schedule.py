"""Timed scheduling of routed op streams.

Greedy list scheduling over the happens-before DAG: every op starts at the
earliest time satisfying its dependencies and trap serialization (gates and
crystal reconfigurations within one trap never overlap).  Junction and
segment exclusivity need no scheduler resource because the router reserves
those components exclusively within each barrier-delimited group.

WISE wiring adds global phases: within each group, movement primitives are
packed into same-kind batches (sub-split odd/even by component id parity)
and distinct batches never overlap in time anywhere on the device.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
from collections import deque
from dataclasses import dataclass

from .device import QccdDevice, Wiring
from .route import MOVE_KINDS, MovementCounts, OpKind, OpStream, StreamOp, count_movement

_WISE_KIND_CYCLE = (
    OpKind.SHUTTLE,
    OpKind.SPLIT,
    OpKind.MERGE,
    OpKind.JUNCTION_ENTRY,
    OpKind.JUNCTION_EXIT,
    OpKind.GATE_SWAP,
)


@dataclass(frozen=True)
class TimingTable:
    """Operation durations in integer microseconds."""

    ms_gate: int = 40
    rotation: int = 5
    measure: int = 400
    reset: int = 50
    shuttle: int = 5
    split: int = 80
    merge: int = 80
    junction_entry: int = 100
    junction_exit: int = 100
    cooling_extra_2q: int = 850  # added to every two-qubit gate when cooling

    def __post_init__(self) -> None:
        for name in (
            "ms_gate",
            "rotation",
            "measure",
            "reset",
            "shuttle",
            "split",
            "merge",
            "junction_entry",
            "junction_exit",
            "cooling_extra_2q",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"timing entry {name} must be positive")

    def duration(self, op: StreamOp, cooling: bool = False) -> int:
        kind = op.kind
        if kind is OpKind.MS:
            return self.ms_gate + (self.cooling_extra_2q if cooling else 0)
        if kind in (OpKind.RX, OpKind.RY, OpKind.RZ):
            return self.rotation
        if kind is OpKind.MEASURE:
            return self.measure
        if kind is OpKind.RESET:
            return self.reset
        if kind is OpKind.SHUTTLE:
            return self.shuttle
        if kind is OpKind.SPLIT:
            return self.split
        if kind is OpKind.MERGE:
            return self.merge
        if kind is OpKind.JUNCTION_ENTRY:
            return self.junction_entry
        if kind is OpKind.JUNCTION_EXIT:
            return self.junction_exit
        if kind is OpKind.GATE_SWAP:
            return 3 * (self.ms_gate + (self.cooling_extra_2q if cooling else 0))
        return 0  # barrier


@dataclass
class Schedule:
    stream: OpStream
    starts: list[int]
    ends: list[int]
    wiring: Wiring
    cooling: bool
    timing: TimingTable

    @property
    def makespan(self) -> int:
        return max(self.ends, default=0)

    def entries(self):
        for op, s, e in zip(self.stream.ops, self.starts, self.ends):
            yield op, s, e

    def op_component(self, op: StreamOp):
        if op.junction is not None:
            return ("junction", op.junction)
        if op.segment is not None and op.kind is OpKind.SHUTTLE:
            return ("segment", op.segment)
        if op.trap is not None:
            return ("trap", op.trap)
        return (None, None)

    def to_jsonl(self) -> str:
        lines = []
        for op, s, e in self.entries():
            ckind, cid = self.op_component(op)
            lines.append(
                json.dumps(
                    {
                        "id": op.id,
                        "kind": op.kind.value,
                        "qubits": list(op.qubits),
                        "start": s,
                        "end": e,
                        "component_kind": ckind,
                        "component": cid,
                        "deps": list(op.deps),
                        "pass": op.pass_no,
                        "pass_boundary": op.is_pass_boundary,
                    }
                )
            )
        return "\n".join(lines) + "\n"

    def to_gantt_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["op", "qubits", "start_us", "end_us", "component"])
        for op, s, e in self.entries():
            if op.kind is OpKind.BARRIER:
                continue
            ckind, cid = self.op_component(op)
            writer.writerow(
                [op.kind.value, " ".join(map(str, op.qubits)), s, e, f"{ckind}:{cid}"]
            )
        return buf.getvalue()


@dataclass(frozen=True)
class ScheduleMetrics:
    elapsed_per_round: float
    movement_time: int
    n_movement_ops: int
    n_gate_swaps: int
    n_hops: int
    makespan: int


class DependencyCycleError(RuntimeError):
    pass


def _groups(stream: OpStream) -> list[list[StreamOp]]:
    """Ops partitioned by barrier boundaries (barriers excluded)."""
    groups: list[list[StreamOp]] = [[]]
    for op in stream.ops:
        if op.kind is OpKind.BARRIER:
            if groups[-1]:
                groups.append([])
        else:
            groups[-1].append(op)
    if groups and not groups[-1]:
        groups.pop()
    return groups


def _wise_phase_deps(stream: OpStream) -> dict[int, int]:
    """Map each movement op to its WISE phase index; phases are global,
    same-kind, odd/even-ordered batches that must execute disjointly."""
    phase_of: dict[int, int] = {}
    phase = 0
    for group in _groups(stream):
        moves = [op for op in group if op.kind in MOVE_KINDS]
        if not moves:
            continue
        queues: dict[int, deque[StreamOp]] = {}
        for op in moves:
            for q in op.qubits:
                queues.setdefault(q, deque()).append(op)
        remaining = len(moves)
        while remaining:
            advanced = False
            for kind in _WISE_KIND_CYCLE:
                ready: list[StreamOp] = []
                seen: set[int] = set()
                for ion in sorted(queues):
                    queue = queues[ion]
                    if not queue:
                        continue
                    head = queue[0]
                    if head.id in seen or head.kind is not kind:
                        continue
                    if all(queues[q][0] is head for q in head.qubits):
                        ready.append(head)
                        seen.add(head.id)
                if not ready:
                    continue
                for parity in (0, 1):
                    batch = [
                        op for op in ready if _component_of(op) % 2 == parity
                    ]
                    if not batch:
                        continue
                    for op in batch:
                        phase_of[op.id] = phase
                        for q in op.qubits:
                            queues[q].popleft()
                    phase += 1
                    remaining -= len(batch)
                    advanced = True
            if not advanced:
                raise DependencyCycleError("movement ops not sequencable into phases")
        phase += 1  # groups never share a phase
    return phase_of


def _component_of(op: StreamOp) -> int:
    if op.kind is OpKind.SHUTTLE:
        return op.segment if op.segment is not None else 0
    if op.kind in (OpKind.JUNCTION_ENTRY, OpKind.JUNCTION_EXIT):
        return op.junction if op.junction is not None else 0
    return op.trap if op.trap is not None else 0


_TRAP_SERIAL_KINDS = (
    OpKind.MS,
    OpKind.RX,
    OpKind.RY,
    OpKind.RZ,
    OpKind.MEASURE,
    OpKind.RESET,
    OpKind.SPLIT,
    OpKind.MERGE,
    OpKind.GATE_SWAP,
)


def build_schedule(
    stream: OpStream,
    device: QccdDevice,
    wiring: Wiring | str = Wiring.STANDARD,
    timing: TimingTable | None = None,
    cooling: bool = False,
    unlimited_resources: bool = False,
) -> Schedule:
    """Greedy dependency- and resource-respecting schedule.

    Deterministic: among ready ops the one with the smallest id is placed
    first.  With unlimited_resources the makespan equals the critical path.
    """
    if isinstance(wiring, str):
        wiring = Wiring.parse(wiring)
    timing = timing or TimingTable()
    ops = stream.ops
    n = len(ops)

    # WISE phases become synthetic zero-duration join nodes: every op of
    # phase p depends on the join that collects all of phase p-1.
    phase_of: dict[int, int] = {}
    if wiring is Wiring.WISE and not unlimited_resources:
        phase_of = _wise_phase_deps(stream)
    phase_ids = sorted(set(phase_of.values()))
    join_of_phase = {p: n + i for i, p in enumerate(phase_ids)}
    total = n + len(phase_ids)

    children: list[list[int]] = [[] for _ in range(total)]
    indeg = [0] * total
    for op in ops:
        for d in op.deps:
            if d >= op.id:
                raise DependencyCycleError(
                    f"op {op.id} depends on {d} which does not precede it"
                )
            children[d].append(op.id)
            indeg[op.id] += 1
    for oid, p in phase_of.items():
        children[oid].append(join_of_phase[p])
        indeg[join_of_phase[p]] += 1
        if p - 1 in join_of_phase:
            children[join_of_phase[p - 1]].append(oid)
            indeg[oid] += 1

    starts = [0] * total
    ends = [0] * total
    dep_ready = [0] * total
    trap_free: dict[int, int] = {}

    ready = [i for i in range(total) if indeg[i] == 0]
    heapq.heapify(ready)
    processed = 0
    while ready:
        oid = heapq.heappop(ready)
        if oid < n:
            op = ops[oid]
            start = dep_ready[oid]
            if not unlimited_resources:
                if op.kind in _TRAP_SERIAL_KINDS and op.trap is not None:
                    start = max(start, trap_free.get(op.trap, 0))
            end = start + timing.duration(op, cooling)
            if not unlimited_resources:
                if op.kind in _TRAP_SERIAL_KINDS and op.trap is not None:
                    trap_free[op.trap] = end
        else:
            start = dep_ready[oid]
            end = start
        starts[oid] = start
        ends[oid] = end
        for child in children[oid]:
            dep_ready[child] = max(dep_ready[child], end)
            indeg[child] -= 1
            if indeg[child] == 0:
                heapq.heappush(ready, child)
        processed += 1
    if processed != total:
        raise DependencyCycleError("dependency cycle detected in op stream")
    return Schedule(stream, starts[:n], ends[:n], wiring, cooling, timing)


def critical_path(stream: OpStream, timing: TimingTable | None = None, cooling: bool = False) -> int:
    """Longest dependency chain by duration (lower bound on any makespan)."""
    timing = timing or TimingTable()
    cp = [0] * len(stream.ops)
    best = 0
    for op in stream.ops:
        base = max((cp[d] for d in op.deps), default=0)
        cp[op.id] = base + timing.duration(op, cooling)
        best = max(best, cp[op.id])
    return best


def serialization_sum(stream: OpStream, timing: TimingTable | None = None, cooling: bool = False) -> int:
    """Total duration of all ops: the analytic bound for one shared trap."""
    timing = timing or TimingTable()
    return sum(timing.duration(op, cooling) for op in stream.ops)


def native_critical_path(native, timing: TimingTable | None = None, cooling: bool = False) -> int:
    """Dependency-only bound of the unrouted native circuit: the longest
    per-qubit chain with no movement and unlimited gate parallelism."""
    from .translate import NativeKind

    timing = timing or TimingTable()
    durations = {
        NativeKind.MS: timing.ms_gate + (timing.cooling_extra_2q if cooling else 0),
        NativeKind.RX: timing.rotation,
        NativeKind.RY: timing.rotation,
        NativeKind.RZ: timing.rotation,
        NativeKind.MEASURE: timing.measure,
        NativeKind.RESET: timing.reset,
    }
    finish: dict[int, int] = {}
    makespan = 0
    for op in native.ops:
        start = max((finish.get(q, 0) for q in op.qubits), default=0)
        end = start + durations[op.kind]
        for q in op.qubits:
            finish[q] = end
        makespan = max(makespan, end)
    return makespan


def movement_time(schedule: Schedule) -> int:
    """Length of the union of intervals where >= 1 movement op is active."""
    intervals = [
        (s, e)
        for op, s, e in schedule.entries()
        if op.kind in MOVE_KINDS and e > s
    ]
    intervals.sort()
    total = 0
    cur_start: int | None = None
    cur_end = 0
    for s, e in intervals:
        if cur_start is None or s > cur_end:
            if cur_start is not None:
                total += cur_end - cur_start
            cur_start, cur_end = s, e
        else:
            cur_end = max(cur_end, e)
    if cur_start is not None:
        total += cur_end - cur_start
    return total


def metrics(schedule: Schedule, rounds: int | None = None) -> ScheduleMetrics:
    rounds = rounds or schedule.stream.rounds
    counts: MovementCounts = count_movement(schedule.stream)
    span = schedule.makespan
    return ScheduleMetrics(
        elapsed_per_round=span / rounds,
        movement_time=movement_time(schedule),
        n_movement_ops=counts.n_movement_ops,
        n_gate_swaps=counts.n_gate_swaps,
        n_hops=counts.n_hops,
        makespan=span,
    )
