"""Invariant checking for routed op streams and their schedules.

check_stream replays the emission order through a fresh RoutingState and
validates positional semantics: ions split only from trap ends, merges
respect capacity, junctions and segments hold one ion, every two-qubit gate
is co-located, and pass boundaries see all ions at rest with every trap at
least one below capacity.

check_schedule validates the timed result: happens-before edges, interval
occupancy of traps, junctions and segments, trap-level gate serialization,
and (for WISE wiring) that distinct movement-primitive kinds never overlap
anywhere on the device.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .device import ComponentKind, QccdDevice
from .place import Mapping
from .route import GATE_KINDS, MOVE_KINDS, OpKind, OpStream
from .schedule import Schedule


@dataclass(frozen=True)
class Violation:
    op_id: int
    message: str

    def __str__(self) -> str:
        return f"op {self.op_id}: {self.message}"


def check_stream(
    stream: OpStream, device: QccdDevice, mapping: Mapping
) -> list[Violation]:
    violations: list[Violation] = []
    pos: dict[int, int] = dict(mapping.home)
    chains: dict[int, list[int]] = {t: [] for t in device.traps}
    for trap in device.traps:
        chains[trap].extend(mapping.occupants(trap))

    def fail(op_id: int, msg: str) -> None:
        violations.append(Violation(op_id, msg))

    for op in stream.ops:
        if op.kind is OpKind.BARRIER:
            if op.is_pass_boundary:
                for q, c in pos.items():
                    if device.kind(c) is not ComponentKind.TRAP:
                        fail(op.id, f"ion {q} rests in non-trap component {c}")
                for t, chain in chains.items():
                    limit = max(1, device.traps[t].capacity - 1)
                    if len(chain) > limit:
                        fail(op.id, f"trap {t} holds {len(chain)} > {limit} at pass boundary")
            continue
        if op.kind is OpKind.SPLIT:
            ion = op.ion
            if pos.get(ion) != op.trap:
                fail(op.id, f"split: ion {ion} not in trap {op.trap}")
                continue
            chain = chains[op.trap]
            if chain[0] != ion and chain[-1] != ion:
                fail(op.id, f"split: ion {ion} not at an end of trap {op.trap}")
            chain.remove(ion)
            pos[ion] = op.segment
        elif op.kind is OpKind.SHUTTLE:
            if pos.get(op.ion) != op.segment:
                fail(op.id, f"shuttle: ion {op.ion} not in segment {op.segment}")
        elif op.kind is OpKind.JUNCTION_ENTRY:
            if pos.get(op.ion) != op.segment:
                fail(op.id, f"junction entry: ion {op.ion} not in segment {op.segment}")
            occupants = sum(1 for c in pos.values() if c == op.junction)
            if occupants >= device.component_capacity(op.junction):
                fail(op.id, f"junction {op.junction} over capacity")
            pos[op.ion] = op.junction
        elif op.kind is OpKind.JUNCTION_EXIT:
            if pos.get(op.ion) != op.junction:
                fail(op.id, f"junction exit: ion {op.ion} not in junction {op.junction}")
            if any(c == op.segment for c in pos.values()):
                fail(op.id, f"segment {op.segment} already occupied")
            pos[op.ion] = op.segment
        elif op.kind is OpKind.MERGE:
            if pos.get(op.ion) != op.segment:
                fail(op.id, f"merge: ion {op.ion} not in segment {op.segment}")
            chain = chains[op.trap]
            if len(chain) >= device.traps[op.trap].capacity:
                fail(op.id, f"merge: trap {op.trap} at capacity")
            seg = device.segments[op.segment]
            other = seg.endpoint_b if seg.endpoint_a == op.trap else seg.endpoint_a
            if device.position(other) < device.position(op.trap):
                chain.insert(0, op.ion)
            else:
                chain.append(op.ion)
            pos[op.ion] = op.trap
        elif op.kind is OpKind.GATE_SWAP:
            a, b = op.qubits
            chain = chains.get(op.trap, [])
            if a not in chain or b not in chain:
                fail(op.id, f"gate swap: ions {a},{b} not both in trap {op.trap}")
                continue
            ia, ib = chain.index(a), chain.index(b)
            if abs(ia - ib) != 1:
                fail(op.id, f"gate swap: ions {a},{b} not adjacent in trap {op.trap}")
            chain[ia], chain[ib] = chain[ib], chain[ia]
        elif op.kind in GATE_KINDS:
            locations = {pos.get(q) for q in op.qubits}
            if len(locations) != 1 or device.kind(next(iter(locations))) is not ComponentKind.TRAP:
                fail(op.id, f"gate {op.kind.value} operands not co-located in a trap: {op.qubits}")
            elif next(iter(locations)) != op.trap:
                fail(op.id, f"gate recorded in trap {op.trap} but ions in {locations}")
        # capacity during movement
        for t, chain in chains.items():
            if len(chain) > device.traps[t].capacity:
                fail(op.id, f"trap {t} over capacity: {len(chain)}")
                break
    return violations


def _presence_intervals(schedule: Schedule, mapping: Mapping):
    """Half-open [start, end) presence intervals per component."""
    stream = schedule.stream
    presence: dict[int, list[tuple[int, int]]] = {}
    current_trap: dict[int, int] = dict(mapping.home)
    entered_at: dict[int, int] = {q: 0 for q in mapping.home}
    seg_enter: dict[int, tuple[int, int]] = {}
    jct_enter: dict[int, tuple[int, int]] = {}

    def add(comp: int, start: int, end: int) -> None:
        presence.setdefault(comp, []).append((start, end))

    order = sorted(range(len(stream.ops)), key=lambda i: (schedule.starts[i], i))
    for i in order:
        op = stream.ops[i]
        s, e = schedule.starts[i], schedule.ends[i]
        if op.kind is OpKind.SPLIT:
            q = op.ion
            add(current_trap[q], entered_at[q], e)
            current_trap.pop(q)
            seg_enter[q] = (op.segment, s)
        elif op.kind is OpKind.JUNCTION_ENTRY:
            q = op.ion
            seg, t0 = seg_enter.pop(q)
            add(seg, t0, e)
            jct_enter[q] = (op.junction, s)
        elif op.kind is OpKind.JUNCTION_EXIT:
            q = op.ion
            jct, t0 = jct_enter.pop(q)
            add(jct, t0, e)
            seg_enter[q] = (op.segment, s)
        elif op.kind is OpKind.MERGE:
            q = op.ion
            seg, t0 = seg_enter.pop(q)
            add(seg, t0, e)
            current_trap[q] = op.trap
            entered_at[q] = s
    horizon = schedule.makespan
    for q, t in current_trap.items():
        add(t, entered_at[q], horizon + 1)
    return presence


def check_schedule(
    schedule: Schedule,
    device: QccdDevice,
    mapping: Mapping,
    wise: bool = False,
) -> list[Violation]:
    violations: list[Violation] = []
    stream = schedule.stream

    for op in stream.ops:
        for d in op.deps:
            if schedule.ends[d] > schedule.starts[op.id]:
                violations.append(
                    Violation(
                        op.id,
                        f"happens-before violated: dep {d} ends at "
                        f"{schedule.ends[d]} after start {schedule.starts[op.id]}",
                    )
                )

    presence = _presence_intervals(schedule, mapping)
    for comp, intervals in presence.items():
        cap = device.component_capacity(comp)
        events: list[tuple[int, int]] = []
        for s, e in intervals:
            events.append((s, 1))
            events.append((e, -1))
        events.sort()
        occ = 0
        for t, delta in events:
            occ += delta
            if occ > cap:
                violations.append(
                    Violation(
                        -1,
                        f"{device.kind(comp).value} {comp} holds {occ} ions at t={t} "
                        f"(capacity {cap})",
                    )
                )
                break

    # Trap-level serialization of gates and crystal ops.
    by_trap: dict[int, list[tuple[int, int, int]]] = {}
    for op in stream.ops:
        if op.trap is None or op.kind in (OpKind.SHUTTLE, OpKind.BARRIER):
            continue
        s, e = schedule.starts[op.id], schedule.ends[op.id]
        if e > s:
            by_trap.setdefault(op.trap, []).append((s, e, op.id))
    for trap, items in by_trap.items():
        items.sort()
        for (s1, e1, i1), (s2, e2, i2) in zip(items, items[1:]):
            if s2 < e1:
                violations.append(
                    Violation(i2, f"trap {trap}: ops {i1} and {i2} overlap in time")
                )

    if wise:
        intervals = [
            (schedule.starts[op.id], schedule.ends[op.id], op.kind.value, op.id)
            for op in stream.ops
            if op.kind in MOVE_KINDS and schedule.ends[op.id] > schedule.starts[op.id]
        ]
        violations.extend(_check_move_phases(intervals))
    return violations


def _check_move_phases(intervals: list[tuple[int, int, str, int]]) -> list[Violation]:
    """No two movement ops of distinct kinds may overlap in time."""
    violations: list[Violation] = []
    intervals = sorted(intervals)
    active: list[tuple[int, str, int]] = []  # (end, kind, id) heap
    for s, e, kind, oid in intervals:
        while active and active[0][0] <= s:
            heapq.heappop(active)
        for _, other_kind, other_id in active:
            if other_kind != kind:
                violations.append(
                    Violation(
                        oid,
                        f"WISE: {kind} overlaps {other_kind} (op {other_id})",
                    )
                )
                break
        heapq.heappush(active, (e, kind, oid))
    return violations


_TRACE_MOVE_KINDS = {k.value for k in MOVE_KINDS}


def check_trace_rows(
    rows: list[dict], device: QccdDevice, home: dict[int, int], wise: bool = False
) -> list[Violation]:
    """Invariant checks on a stored schedule trace (schedule.jsonl rows).

    Covers happens-before, trap-capacity intervals (with initial occupants
    from the mapping), junction exclusivity, segment shuttle exclusivity and
    the WISE same-kind phase rule.  Positional chain-order semantics need
    the full op stream and are checked at compile time instead.
    """
    violations: list[Violation] = []
    by_id = {row["id"]: row for row in rows}
    for row in rows:
        for d in row.get("deps", ()):
            dep = by_id.get(d)
            if dep is None:
                violations.append(Violation(row["id"], f"missing dependency {d}"))
            elif dep["end"] > row["start"]:
                violations.append(
                    Violation(row["id"], f"happens-before violated against op {d}")
                )

    # Trap presence: resident from time 0 (homes), handed over at split/merge.
    presence: dict[int, list[tuple[int, int]]] = {}
    entered: dict[int, tuple[int, int]] = {}  # ion -> (trap, since)
    horizon = max((row["end"] for row in rows), default=0)
    for q, t in home.items():
        entered[q] = (t, 0)
    ordered = sorted(rows, key=lambda r: (r["start"], r["id"]))
    for row in ordered:
        kind = row["kind"]
        if kind == "split":
            ion = row["qubits"][0]
            if ion in entered:
                trap, since = entered.pop(ion)
                presence.setdefault(trap, []).append((since, row["end"]))
            else:
                violations.append(Violation(row["id"], f"split of absent ion {ion}"))
        elif kind == "merge":
            ion = row["qubits"][0]
            if ion in entered:
                violations.append(
                    Violation(row["id"], f"merge of ion {ion} already in trap {entered[ion][0]}")
                )
            entered[ion] = (row["component"], row["start"])
    for ion, (trap, since) in entered.items():
        presence.setdefault(trap, []).append((since, horizon + 1))
    for trap, intervals in presence.items():
        cap = device.component_capacity(trap)
        events: list[tuple[int, int]] = []
        for s, e in intervals:
            events.append((s, 1))
            events.append((e, -1))
        events.sort()
        occ = 0
        for t, delta in events:
            occ += delta
            if occ > cap:
                violations.append(
                    Violation(-1, f"trap {trap} holds {occ} ions at t={t} (capacity {cap})")
                )
                break

    # Junction exclusivity from entry/exit pairs; segment shuttles.
    jct_entry: dict[tuple[int, int], tuple[int, int]] = {}
    occupied: dict[int, list[tuple[int, int]]] = {}
    for row in ordered:
        if row["kind"] == "junction_entry":
            jct_entry[(row["qubits"][0], row["component"])] = (row["start"], row["id"])
        elif row["kind"] == "junction_exit":
            key = (row["qubits"][0], row["component"])
            if key in jct_entry:
                s, _ = jct_entry.pop(key)
                occupied.setdefault(row["component"], []).append((s, row["end"]))
        elif row["kind"] == "shuttle":
            occupied.setdefault(row["component"], []).append((row["start"], row["end"]))
    for comp, intervals in occupied.items():
        cap = device.component_capacity(comp)
        intervals.sort()
        active_ends: list[int] = []
        for s, e in intervals:
            active_ends = [x for x in active_ends if x > s]
            active_ends.append(e)
            if len(active_ends) > cap:
                violations.append(
                    Violation(-1, f"component {comp} holds {len(active_ends)} ions at t={s}")
                )
                break

    if wise:
        move_intervals = [
            (row["start"], row["end"], row["kind"], row["id"])
            for row in rows
            if row["kind"] in _TRACE_MOVE_KINDS and row["end"] > row["start"]
        ]
        violations.extend(_check_move_phases(move_intervals))
    return violations
