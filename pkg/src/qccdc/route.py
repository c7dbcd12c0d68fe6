"""Ion routing: insert movement primitives so every MS gate is co-located.

The router processes the native op stream in passes.  Each pass first drains
every op that is executable without movement, then plans one journey per
ancilla whose next entangling gate needs routing (earliest-gate priority),
reserving capacity on every path component except the source and deleting
saturated components from the working graph.  Journeys whose constrained
path would be longer than the unconstrained shortest path are deferred to a
later pass rather than detoured, which keeps movement counts minimal under
contention.  After the enabled gates execute, a restoration phase returns
displaced ions so that every pass boundary sees empty junctions and
segments and all traps at least one ion below capacity.

Pass and phase boundaries become zero-duration barrier ops in the output
stream; together with per-ion dependency chains they form the happens-before
relation consumed by the scheduler.
"""

from __future__ import annotations

import enum
import heapq
import json
from collections import deque
from dataclasses import dataclass, field

from .codes import Role
from .device import ComponentKind, QccdDevice
from .place import Mapping
from .translate import NativeCircuit, NativeKind


class OpKind(enum.Enum):
    MS = "MS"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    MEASURE = "M"
    RESET = "R"
    SPLIT = "split"
    SHUTTLE = "shuttle"
    MERGE = "merge"
    JUNCTION_ENTRY = "junction_entry"
    JUNCTION_EXIT = "junction_exit"
    GATE_SWAP = "gate_swap"
    BARRIER = "barrier"


GATE_KINDS = (
    OpKind.MS,
    OpKind.RX,
    OpKind.RY,
    OpKind.RZ,
    OpKind.MEASURE,
    OpKind.RESET,
)
MOVE_KINDS = (
    OpKind.SPLIT,
    OpKind.SHUTTLE,
    OpKind.MERGE,
    OpKind.JUNCTION_ENTRY,
    OpKind.JUNCTION_EXIT,
    OpKind.GATE_SWAP,
)

_NATIVE_TO_OP = {
    NativeKind.MS: OpKind.MS,
    NativeKind.RX: OpKind.RX,
    NativeKind.RY: OpKind.RY,
    NativeKind.RZ: OpKind.RZ,
    NativeKind.MEASURE: OpKind.MEASURE,
    NativeKind.RESET: OpKind.RESET,
}


class UnroutableError(RuntimeError):
    pass


@dataclass(frozen=True)
class StreamOp:
    id: int
    kind: OpKind
    qubits: tuple[int, ...] = ()
    angle: float = 0.0
    trap: int | None = None
    segment: int | None = None
    junction: int | None = None
    bundle: int = -1
    deps: tuple[int, ...] = ()
    pass_no: int = 0
    is_pass_boundary: bool = False

    def is_gate(self) -> bool:
        return self.kind in GATE_KINDS

    def is_movement(self) -> bool:
        return self.kind in MOVE_KINDS

    @property
    def ion(self) -> int:
        return self.qubits[0]


@dataclass
class OpStream:
    ops: list[StreamOp]
    qubit_ids: list[int]
    rounds: int = 1

    def to_jsonl(self) -> str:
        lines = []
        for op in self.ops:
            lines.append(
                json.dumps(
                    {
                        "id": op.id,
                        "kind": op.kind.value,
                        "qubits": list(op.qubits),
                        "angle": op.angle,
                        "trap": op.trap,
                        "segment": op.segment,
                        "junction": op.junction,
                        "bundle": op.bundle,
                        "deps": list(op.deps),
                        "pass": op.pass_no,
                        "pass_boundary": op.is_pass_boundary,
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, qubit_ids: list[int], rounds: int = 1) -> "OpStream":
        ops = []
        for line in text.strip().splitlines():
            doc = json.loads(line)
            ops.append(
                StreamOp(
                    id=doc["id"],
                    kind=OpKind(doc["kind"]),
                    qubits=tuple(doc["qubits"]),
                    angle=doc["angle"],
                    trap=doc["trap"],
                    segment=doc["segment"],
                    junction=doc["junction"],
                    bundle=doc["bundle"],
                    deps=tuple(doc["deps"]),
                    pass_no=doc["pass"],
                    is_pass_boundary=doc["pass_boundary"],
                )
            )
        return cls(ops, qubit_ids, rounds)


@dataclass(frozen=True)
class MovementCounts:
    n_movement_ops: int  # primitive reconfigurations t7-t11 plus gate swaps
    n_gate_swaps: int
    n_hops: int  # completed trap-to-trap relocations (merge count)


def count_movement(stream: OpStream) -> MovementCounts:
    moves = 0
    swaps = 0
    hops = 0
    for op in stream.ops:
        if op.kind is OpKind.GATE_SWAP:
            swaps += 1
            moves += 1
        elif op.is_movement():
            moves += 1
            if op.kind is OpKind.MERGE:
                hops += 1
    return MovementCounts(n_movement_ops=moves, n_gate_swaps=swaps, n_hops=hops)


class RoutingState:
    """Positions of every ion plus per-trap chain order.

    Chain index 0 is the end where segments with lexicographically smaller
    direction attach (left/down); merges insert at the entry end and splits
    require the ion to sit at the exit end, possibly after gate swaps.
    """

    def __init__(self, device: QccdDevice, mapping: Mapping) -> None:
        self.device = device
        self.mapping = mapping
        self.pos: dict[int, int] = {}
        self.chains: dict[int, list[int]] = {t: [] for t in device.traps}
        for trap in device.traps:
            for q in mapping.occupants(trap):
                self.pos[q] = trap
                self.chains[trap].append(q)
        self.arrival: dict[int, int] = {q: 0 for q in self.pos}
        self._arrival_seq = 0

    def occupancy(self, trap: int) -> int:
        return len(self.chains[trap])

    def side(self, trap: int, segment: int) -> int:
        """Which chain end the segment attaches to (0 = left/down)."""
        seg = self.device.segments[segment]
        other = seg.endpoint_b if seg.endpoint_a == trap else seg.endpoint_a
        tx, ty = self.device.position(trap)
        ox, oy = self.device.position(other)
        return 0 if (ox, oy) < (tx, ty) else 1

    def swaps_to_end(self, trap: int, ion: int, side: int) -> list[tuple[int, int]]:
        """Adjacent transpositions bringing `ion` to the given end; the
        moving ion partners with each original occupant in turn."""
        chain = self.chains[trap]
        idx = chain.index(ion)
        if side == 0:
            return [(ion, chain[i]) for i in range(idx - 1, -1, -1)]
        return [(ion, chain[i]) for i in range(idx + 1, len(chain))]

    def apply_swap(self, trap: int, a: int, b: int) -> None:
        chain = self.chains[trap]
        ia, ib = chain.index(a), chain.index(b)
        chain[ia], chain[ib] = chain[ib], chain[ia]

    def apply_split(self, trap: int, segment: int, ion: int) -> None:
        self.chains[trap].remove(ion)
        self.pos[ion] = segment

    def apply_merge(self, segment: int, trap: int, ion: int) -> None:
        if self.side(trap, segment) == 0:
            self.chains[trap].insert(0, ion)
        else:
            self.chains[trap].append(ion)
        self.pos[ion] = trap
        self._arrival_seq += 1
        self.arrival[ion] = self._arrival_seq

    def apply_transfer(self, ion: int, component: int) -> None:
        self.pos[ion] = component


def _constrained_path(
    device: QccdDevice,
    avail: dict[int, int],
    src: int,
    dst: int,
) -> list[int] | None:
    """Minimum-hop path from src to dst over components with availability,
    ties broken by the lexicographically smallest component-id sequence.
    The source is exempt from the availability requirement."""
    if src == dst:
        return [src]
    heap: list[tuple[int, tuple[int, ...]]] = [(0, (src,))]
    visited: set[int] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node == dst:
            return list(path)
        if node in visited:
            continue
        visited.add(node)
        for nxt in device.neighbours(node):
            if nxt in visited:
                continue
            if nxt != dst and avail.get(nxt, 0) < 1:
                continue
            if nxt == dst and avail.get(nxt, 0) < 1:
                continue
            heapq.heappush(heap, (dist + 1, path + (nxt,)))
    return None


def _free_path_len(device: QccdDevice, src: int, dst: int) -> int | None:
    if src == dst:
        return 0
    seen = {src}
    frontier = [src]
    dist = 0
    while frontier:
        dist += 1
        nxt_frontier = []
        for node in frontier:
            for nxt in device.neighbours(node):
                if nxt in seen:
                    continue
                if nxt == dst:
                    return dist
                seen.add(nxt)
                nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return None


def shortest_path(
    state: RoutingState,
    ion: int,
    destination_trap: int,
    excluded_components: tuple[int, ...] = (),
) -> list[int] | None:
    """Shortest available path for `ion` to the destination trap given the
    current occupancy; returns None when the move must be deferred."""
    device = state.device
    avail: dict[int, int] = {}
    for cid in device.component_ids():
        kind = device.kind(cid)
        if kind is ComponentKind.TRAP:
            avail[cid] = device.component_capacity(cid) - state.occupancy(cid)
        else:
            avail[cid] = device.component_capacity(cid)
    for ex in excluded_components:
        avail[ex] = 0
    src = state.pos[ion]
    return _constrained_path(device, avail, src, destination_trap)


class _Router:
    def __init__(
        self, native: NativeCircuit, mapping: Mapping, device: QccdDevice
    ) -> None:
        self.native = native
        self.mapping = mapping
        self.device = device
        self.state = RoutingState(device, mapping)
        self.queues: dict[int, deque[int]] = {q: deque() for q in native.qubit_ids}
        for idx, op in enumerate(native.ops):
            for q in op.qubits:
                self.queues[q].append(idx)
        self.n_pending = len(native.ops)
        self.stream: list[StreamOp] = []
        self.last_of: dict[int, int] = {}
        self.current_barrier: int | None = None
        self.group_start = 0
        self.pass_no = 0
        self._free_len_cache: dict[tuple[int, int], int | None] = {}

    # ----- stream emission helpers -------------------------------------

    def _next_id(self) -> int:
        return len(self.stream)

    def _emit(self, op: StreamOp) -> None:
        self.stream.append(op)

    def _deps_for(self, qubits: tuple[int, ...]) -> tuple[int, ...]:
        deps = []
        for q in qubits:
            if q in self.last_of:
                deps.append(self.last_of[q])
        if self.current_barrier is not None:
            deps.append(self.current_barrier)
        return tuple(sorted(set(deps)))

    def _emit_gate(self, native_idx: int) -> None:
        nop = self.native.ops[native_idx]
        oid = self._next_id()
        trap = self.state.pos[nop.qubits[0]]
        self._emit(
            StreamOp(
                id=oid,
                kind=_NATIVE_TO_OP[nop.kind],
                qubits=nop.qubits,
                angle=nop.angle,
                trap=trap,
                bundle=nop.bundle,
                deps=self._deps_for(nop.qubits),
                pass_no=self.pass_no,
            )
        )
        for q in nop.qubits:
            self.last_of[q] = oid
            self.queues[q].popleft()
        self.n_pending -= 1

    def _emit_move(
        self,
        kind: OpKind,
        ion: int,
        trap: int | None = None,
        segment: int | None = None,
        junction: int | None = None,
        partner: int | None = None,
    ) -> None:
        oid = self._next_id()
        qubits = (ion,) if partner is None else (ion, partner)
        self._emit(
            StreamOp(
                id=oid,
                kind=kind,
                qubits=qubits,
                trap=trap,
                segment=segment,
                junction=junction,
                deps=self._deps_for(qubits),
                pass_no=self.pass_no,
            )
        )
        for q in qubits:
            self.last_of[q] = oid

    def _emit_barrier(self, pass_boundary: bool) -> None:
        group = tuple(range(self.group_start, len(self.stream)))
        if not group:
            return
        oid = self._next_id()
        self._emit(
            StreamOp(
                id=oid,
                kind=OpKind.BARRIER,
                deps=group,
                pass_no=self.pass_no,
                is_pass_boundary=pass_boundary,
            )
        )
        self.current_barrier = oid
        self.group_start = len(self.stream)

    # ----- readiness ----------------------------------------------------

    def _is_ready(self, native_idx: int) -> bool:
        op = self.native.ops[native_idx]
        return all(
            self.queues[q] and self.queues[q][0] == native_idx for q in op.qubits
        )

    def _colocated(self, native_idx: int) -> bool:
        op = self.native.ops[native_idx]
        positions = {self.state.pos[q] for q in op.qubits}
        if len(positions) != 1:
            return False
        return self.device.kind(next(iter(positions))) is ComponentKind.TRAP

    def _drain_executable(self, bundle_filter: int | None = None) -> int:
        """Emit every ready op executable without movement.  When
        bundle_filter is set, only ops of that bundle are eligible (used to
        finish a routed gate's decomposition at the remote trap)."""
        emitted = 0
        progress = True
        while progress:
            progress = False
            for q in sorted(self.queues):
                queue = self.queues[q]
                if not queue:
                    continue
                idx = queue[0]
                nop = self.native.ops[idx]
                if bundle_filter is not None and nop.bundle != bundle_filter:
                    continue
                if not self._is_ready(idx):
                    continue
                if not self._colocated(idx):
                    continue
                self._emit_gate(idx)
                emitted += 1
                progress = True
        return emitted

    # ----- trip planning -------------------------------------------------

    def _plan_trips(self) -> list[tuple[int, int, int]]:
        """(gate index, ancilla, destination trap) for every ready MS gate
        whose ions are in different traps, earliest gate first."""
        trips = []
        seen_ancillas: set[int] = set()
        for q in sorted(self.queues):
            queue = self.queues[q]
            if not queue:
                continue
            idx = queue[0]
            nop = self.native.ops[idx]
            if nop.kind is not NativeKind.MS or not self._is_ready(idx):
                continue
            if self._colocated(idx):
                continue
            a, b = nop.qubits
            roles = self.mapping.roles
            if roles[a] is Role.DATA and roles[b] in (Role.ANCILLA_X, Role.ANCILLA_Z):
                data, anc = a, b
            elif roles[b] is Role.DATA and roles[a] in (Role.ANCILLA_X, Role.ANCILLA_Z):
                data, anc = b, a
            else:
                raise UnroutableError(
                    f"two-qubit gate {idx} is not a data-ancilla pair: {nop.qubits}"
                )
            if anc in seen_ancillas:
                continue
            seen_ancillas.add(anc)
            trips.append((idx, anc, self.state.pos[data]))
        trips.sort()
        return trips

    def _free_len(self, src: int, dst: int) -> int | None:
        key = (src, dst)
        if key not in self._free_len_cache:
            self._free_len_cache[key] = _free_path_len(self.device, src, dst)
        return self._free_len_cache[key]

    def _fresh_avail(self) -> dict[int, int]:
        avail: dict[int, int] = {}
        for cid in self.device.component_ids():
            kind = self.device.kind(cid)
            if kind is ComponentKind.TRAP:
                avail[cid] = self.device.component_capacity(cid) - self.state.occupancy(cid)
            else:
                avail[cid] = self.device.component_capacity(cid)
        return avail

    def _allocate(
        self, trips: list[tuple[int, int, int]], attempts: int = 3
    ) -> tuple[list[tuple[int, int, int, list[int]]], list[tuple[int, int, int]]]:
        """Reserve component-disjoint shortest paths, preferring deferral
        over detours.  Allocation restarts with previously failed trips
        first, which resolves preference cycles among equal-length paths."""
        order = list(trips)
        best: tuple[list, list] | None = None
        for _ in range(attempts):
            avail = self._fresh_avail()
            allocated: list[tuple[int, int, int, list[int]]] = []
            failed: list[tuple[int, int, int]] = []
            for gate_idx, ion, dst in order:
                src = self.state.pos[ion]
                free_len = self._free_len(src, dst)
                path = _constrained_path(self.device, avail, src, dst)
                if path is None or free_len is None or len(path) - 1 > free_len:
                    failed.append((gate_idx, ion, dst))
                    continue
                for comp in path[1:]:
                    avail[comp] -= 1
                allocated.append((gate_idx, ion, dst, path))
            if best is None or len(failed) < len(best[1]):
                best = (allocated, failed)
            if not failed:
                break
            order = failed + [t for t in order if t not in failed]
        assert best is not None
        return best

    # ----- journey emission ----------------------------------------------

    def _emit_journey(self, ion: int, path: list[int]) -> None:
        device = self.device
        state = self.state
        prev = path[0]
        for comp in path[1:]:
            prev_kind = device.kind(prev)
            kind = device.kind(comp)
            if kind is ComponentKind.SEGMENT:
                if prev_kind is ComponentKind.TRAP:
                    side = state.side(prev, comp)
                    for a, b in state.swaps_to_end(prev, ion, side):
                        self._emit_move(OpKind.GATE_SWAP, a, trap=prev, partner=b)
                        state.apply_swap(prev, a, b)
                    self._emit_move(OpKind.SPLIT, ion, trap=prev, segment=comp)
                    state.apply_split(prev, comp, ion)
                else:
                    self._emit_move(OpKind.JUNCTION_EXIT, ion, junction=prev, segment=comp)
                    state.apply_transfer(ion, comp)
                self._emit_move(OpKind.SHUTTLE, ion, segment=comp)
            elif kind is ComponentKind.JUNCTION:
                self._emit_move(OpKind.JUNCTION_ENTRY, ion, segment=prev, junction=comp)
                state.apply_transfer(ion, comp)
            else:  # trap
                self._emit_move(OpKind.MERGE, ion, segment=prev, trap=comp)
                state.apply_merge(prev, comp, ion)
            prev = comp

    # ----- restoration -----------------------------------------------------

    def _restore(self) -> None:
        state = self.state
        device = self.device
        while True:
            evictions: list[tuple[int, int, int]] = []  # (-arrival, ion, trap)
            for trap in sorted(state.chains):
                rest_cap = max(1, device.traps[trap].capacity - 1)
                chain = state.chains[trap]
                if len(chain) <= rest_cap:
                    continue
                visitors = sorted(
                    (q for q in chain if self.mapping.home[q] != trap),
                    key=lambda q: -state.arrival[q],
                )
                surplus = len(chain) - rest_cap
                for q in visitors[:surplus]:
                    evictions.append((-state.arrival[q], q, trap))
            if not evictions:
                return
            # Restoration reuses components the outbound journeys reserved,
            # so it must start (and each wave must start) behind a barrier.
            self._emit_barrier(pass_boundary=False)
            evictions.sort()
            planned: list[tuple[int, int, int]] = []
            for _, ion, trap in evictions:
                dest = self._restoration_dest(ion, trap, planned)
                planned.append((0, ion, dest))
            allocated, failed = self._allocate(
                [(i, ion, dest) for i, (_, ion, dest) in enumerate(planned)]
            )
            if not allocated:
                stuck = evictions[0][1]
                raise UnroutableError(
                    f"restoration cannot return ion {stuck} from trap {evictions[0][2]}"
                )
            for _, ion, _, path in allocated:
                self._emit_journey(ion, path)

    def _restoration_dest(
        self, ion: int, current: int, planned: list[tuple[int, int, int]]
    ) -> int:
        home = self.mapping.home[ion]
        queue = self.queues[ion]
        next_ms_dest: int | None = None
        for idx in queue:
            nop = self.native.ops[idx]
            if nop.kind is NativeKind.MS:
                other = nop.qubits[0] if nop.qubits[1] == ion else nop.qubits[1]
                next_ms_dest = self.state.pos[other]
                break
        if next_ms_dest is not None and next_ms_dest != current:
            cap = self.device.traps[next_ms_dest].capacity
            inbound = sum(1 for _, _, d in planned if d == next_ms_dest)
            if self.state.occupancy(next_ms_dest) + inbound + 1 <= cap - 1:
                return next_ms_dest
        return home

    # ----- main loop -------------------------------------------------------

    def run(self) -> OpStream:
        while self.n_pending:
            self.pass_no += 1
            emitted_before = len(self.stream)

            self._drain_executable()
            trips = self._plan_trips()
            if trips:
                allocated, _ = self._allocate(trips)
                for _, ion, _, path in allocated:
                    self._emit_journey(ion, path)
                for gate_idx, _, _, _ in allocated:
                    if self._is_ready(gate_idx) and self._colocated(gate_idx):
                        bundle = self.native.ops[gate_idx].bundle
                        self._emit_gate(gate_idx)
                        self._drain_executable(bundle_filter=bundle)
            self._restore()

            if len(self.stream) == emitted_before:
                stuck = None
                for q in sorted(self.queues):
                    if self.queues[q]:
                        stuck = (q, self.native.ops[self.queues[q][0]])
                        break
                raise UnroutableError(
                    f"no progress in pass {self.pass_no}; stuck at qubit "
                    f"{stuck[0]} op {stuck[1].kind.value}{stuck[1].qubits}"
                )
            if self.n_pending:
                self._emit_barrier(pass_boundary=True)
            self._check_pass_boundary()
        return OpStream(
            ops=self.stream,
            qubit_ids=list(self.native.qubit_ids),
            rounds=self.native.rounds,
        )

    def _check_pass_boundary(self) -> None:
        for q, comp in self.state.pos.items():
            if self.device.kind(comp) is not ComponentKind.TRAP:
                raise UnroutableError(
                    f"pass boundary: ion {q} left in {self.device.kind(comp).value} {comp}"
                )
        for trap, chain in self.state.chains.items():
            rest_cap = max(1, self.device.traps[trap].capacity - 1)
            if len(chain) > rest_cap:
                raise UnroutableError(
                    f"pass boundary: trap {trap} holds {len(chain)} ions (> {rest_cap})"
                )


def route_circuit(
    native: NativeCircuit, mapping: Mapping, device: QccdDevice
) -> OpStream:
    """Insert movement primitives so every MS gate's ions co-reside."""
    return _Router(native, mapping, device).run()
