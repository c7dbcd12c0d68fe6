"""QEC code layouts, syndrome-extraction circuits and interaction graphs.

Supports three code families: repetition chains, rotated surface codes and
unrotated (planar) surface codes.  Layout coordinates are integers; the
rotated code lives on the usual checkerboard with data qubits at odd/odd
positions and check qubits at even/even positions, so every check qubit is
diagonally adjacent to the data qubits of its cell.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field


class CodeKind(enum.Enum):
    REPETITION = "repetition"
    ROTATED_SURFACE = "rotated_surface"
    UNROTATED_SURFACE = "unrotated_surface"

    @classmethod
    def parse(cls, text: str) -> "CodeKind":
        key = text.strip().lower()
        aliases = {
            "r": cls.REPETITION,
            "repetition": cls.REPETITION,
            "s": cls.ROTATED_SURFACE,
            "surface": cls.ROTATED_SURFACE,
            "rotated_surface": cls.ROTATED_SURFACE,
            "u": cls.UNROTATED_SURFACE,
            "unrotated_surface": cls.UNROTATED_SURFACE,
        }
        if key not in aliases:
            raise ValueError(f"unknown code kind: {text!r}")
        return aliases[key]


class Role(enum.Enum):
    DATA = "data"
    ANCILLA_X = "ancilla_X"
    ANCILLA_Z = "ancilla_Z"


ANCILLA_ROLES = (Role.ANCILLA_X, Role.ANCILLA_Z)

# Diagonal neighbour offsets, y grows upward.
NW = (-1, 1)
NE = (1, 1)
SW = (-1, -1)
SE = (1, -1)

# Cell-local CNOT visiting orders.  The Z order and the X order differ by a
# swap of the middle two steps, which keeps every data qubit in at most one
# CNOT per step and keeps all detector parities deterministic (checked by
# the stabilizer-replay tests).  Boundary cells skip the steps whose
# neighbour is missing but keep their remaining CNOTs in the global step
# slots, so the step-wise matching holds across the whole lattice.
Z_ORDER = (NW, NE, SW, SE)
X_ORDER = (NW, SW, NE, SE)

# Rook-offset orders for the unrotated (planar) code; per step the X and Z
# offsets share the same x-parity, which again yields one CNOT per data
# qubit per step.
N4 = (0, 1)
S4 = (0, -1)
W4 = (-1, 0)
E4 = (1, 0)
UZ_ORDER = (N4, E4, W4, S4)
UX_ORDER = (N4, W4, E4, S4)


@dataclass(frozen=True)
class Qubit:
    id: int
    role: Role
    x: int
    y: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Cell:
    ancilla: int
    data: tuple[int, ...]  # ordered by the CNOT schedule


@dataclass
class CodeLayout:
    kind: CodeKind
    distance: int
    qubits: list[Qubit]
    cells: list[Cell]
    x_order: tuple[tuple[int, int], ...] = X_ORDER
    z_order: tuple[tuple[int, int], ...] = Z_ORDER
    _by_id: dict[int, Qubit] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {q.id: q for q in self.qubits}

    def qubit(self, qubit_id: int) -> Qubit:
        return self._by_id[qubit_id]

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def data_ids(self) -> list[int]:
        return [q.id for q in self.qubits if q.role is Role.DATA]

    def ancilla_ids(self) -> list[int]:
        return [q.id for q in self.qubits if q.role in ANCILLA_ROLES]

    def roles(self) -> dict[int, Role]:
        return {q.id: q.role for q in self.qubits}

    def positions(self) -> dict[int, tuple[int, int]]:
        return {q.id: q.pos for q in self.qubits}

    def cell_of(self, ancilla_id: int) -> Cell:
        for cell in self.cells:
            if cell.ancilla == ancilla_id:
                return cell
        raise KeyError(ancilla_id)

    def to_json(self) -> str:
        doc = {
            "kind": self.kind.value,
            "distance": self.distance,
            "x_order": [list(o) for o in self.x_order],
            "z_order": [list(o) for o in self.z_order],
            "qubits": [[q.id, q.role.value, q.x, q.y] for q in self.qubits],
            "cells": [[c.ancilla, list(c.data)] for c in self.cells],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CodeLayout":
        doc = json.loads(text)
        qubits = [Qubit(i, Role(r), x, y) for i, r, x, y in doc["qubits"]]
        cells = [Cell(a, tuple(d)) for a, d in doc["cells"]]
        return cls(
            CodeKind(doc["kind"]),
            doc["distance"],
            qubits,
            cells,
            tuple(tuple(o) for o in doc["x_order"]),
            tuple(tuple(o) for o in doc["z_order"]),
        )


@dataclass(frozen=True)
class Gate:
    name: str  # "R", "H", "CX", "M"
    qubits: tuple[int, ...]


@dataclass
class LogicalCircuit:
    gates: list[Gate]
    rounds: int
    round_boundaries: list[int]  # index of the first gate of each round
    qubit_ids: list[int]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out

    def to_json(self) -> str:
        doc = {
            "rounds": self.rounds,
            "round_boundaries": self.round_boundaries,
            "qubits": self.qubit_ids,
            "gates": [[g.name, list(g.qubits)] for g in self.gates],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LogicalCircuit":
        doc = json.loads(text)
        gates = [Gate(n, tuple(q)) for n, q in doc["gates"]]
        return cls(gates, doc["rounds"], doc["round_boundaries"], doc["qubits"])


@dataclass
class InteractionGraph:
    nodes: list[int]
    edges: dict[tuple[int, int], float]  # (lo, hi) -> weight

    def degree(self, node: int) -> int:
        return sum(1 for e in self.edges if node in e)


def _rotated_sites(distance: int):
    """Data and check sites of the rotated code on the doubled lattice."""
    d = distance
    data = [(2 * c + 1, 2 * r + 1) for r in range(d) for c in range(d)]
    data_set = set(data)
    checks = []  # (pos, role)
    for r in range(d + 1):
        for c in range(d + 1):
            pos = (2 * c, 2 * r)
            adj = [p for p in _diag_neighbours(pos) if p in data_set]
            if len(adj) == 4:
                checks.append((pos, _check_role(c, r)))
            elif len(adj) == 2:
                role = _check_role(c, r)
                on_horizontal_edge = r in (0, d) and 1 <= c <= d - 1
                on_vertical_edge = c in (0, d) and 1 <= r <= d - 1
                if on_horizontal_edge and role is Role.ANCILLA_X:
                    checks.append((pos, role))
                elif on_vertical_edge and role is Role.ANCILLA_Z:
                    checks.append((pos, role))
    return data, checks


def _check_role(c: int, r: int) -> Role:
    return Role.ANCILLA_X if (c + r) % 2 == 0 else Role.ANCILLA_Z


def _diag_neighbours(pos: tuple[int, int]) -> list[tuple[int, int]]:
    x, y = pos
    return [(x + dx, y + dy) for dx, dy in (NW, NE, SW, SE)]


def build_layout(
    kind: CodeKind | str,
    distance: int,
    x_order: tuple[tuple[int, int], ...] | None = None,
    z_order: tuple[tuple[int, int], ...] | None = None,
) -> CodeLayout:
    """Construct the geometric layout of a code instance.

    The cell-local CNOT visiting orders default to the hook-safe standard
    pair and can be overridden (offsets must be a permutation of the
    kind's neighbour offsets).  Deterministic: qubit ids are assigned
    data-first in raster order, then ancillas in raster order.
    """
    if isinstance(kind, str):
        kind = CodeKind.parse(kind)
    if distance < 2:
        raise ValueError(f"distance must be >= 2, got {distance}")

    if kind is CodeKind.REPETITION:
        return _build_repetition(distance)
    if kind is CodeKind.ROTATED_SURFACE:
        xo = tuple(x_order) if x_order else X_ORDER
        zo = tuple(z_order) if z_order else Z_ORDER
        if sorted(xo) != sorted(X_ORDER) or sorted(zo) != sorted(Z_ORDER):
            raise ValueError("orders must permute the diagonal offsets")
        return _build_rotated(distance, xo, zo)
    if kind is CodeKind.UNROTATED_SURFACE:
        xo = tuple(x_order) if x_order else UX_ORDER
        zo = tuple(z_order) if z_order else UZ_ORDER
        if sorted(xo) != sorted(UX_ORDER) or sorted(zo) != sorted(UZ_ORDER):
            raise ValueError("orders must permute the rook offsets")
        return _build_unrotated(distance, xo, zo)
    raise ValueError(f"unknown code kind: {kind}")


def _build_repetition(d: int) -> CodeLayout:
    qubits: list[Qubit] = []
    for i in range(d):
        qubits.append(Qubit(i, Role.DATA, 2 * i, 0))
    cells: list[Cell] = []
    for i in range(d - 1):
        aid = d + i
        qubits.append(Qubit(aid, Role.ANCILLA_Z, 2 * i + 1, 0))
        cells.append(Cell(aid, (i, i + 1)))  # left data then right data
    return CodeLayout(CodeKind.REPETITION, d, qubits, cells)


def _build_rotated(d: int, x_order=X_ORDER, z_order=Z_ORDER) -> CodeLayout:
    data, checks = _rotated_sites(d)
    qubits: list[Qubit] = []
    pos_to_id: dict[tuple[int, int], int] = {}
    for i, pos in enumerate(sorted(data, key=lambda p: (p[1], p[0]))):
        qubits.append(Qubit(i, Role.DATA, pos[0], pos[1]))
        pos_to_id[pos] = i
    cells: list[Cell] = []
    next_id = len(qubits)
    for pos, role in sorted(checks, key=lambda pr: (pr[0][1], pr[0][0])):
        order = x_order if role is Role.ANCILLA_X else z_order
        members = tuple(
            pos_to_id[(pos[0] + dx, pos[1] + dy)]
            for dx, dy in order
            if (pos[0] + dx, pos[1] + dy) in pos_to_id
        )
        qubits.append(Qubit(next_id, role, pos[0], pos[1]))
        cells.append(Cell(next_id, members))
        next_id += 1
    return CodeLayout(CodeKind.ROTATED_SURFACE, d, qubits, cells, x_order, z_order)


def _build_unrotated(d: int, x_order=UX_ORDER, z_order=UZ_ORDER) -> CodeLayout:
    """Planar code on the (2d-1)x(2d-1) lattice, data on even-sum sites."""
    n = 2 * d - 1
    data_pos = [(x, y) for y in range(n) for x in range(n) if (x + y) % 2 == 0]
    qubits: list[Qubit] = []
    pos_to_id: dict[tuple[int, int], int] = {}
    for i, pos in enumerate(data_pos):
        qubits.append(Qubit(i, Role.DATA, pos[0], pos[1]))
        pos_to_id[pos] = i
    cells: list[Cell] = []
    next_id = len(qubits)
    for y in range(n):
        for x in range(n):
            if (x + y) % 2 == 0:
                continue
            role = Role.ANCILLA_X if x % 2 == 1 else Role.ANCILLA_Z
            order = x_order if role is Role.ANCILLA_X else z_order
            members = tuple(
                pos_to_id[(x + dx, y + dy)]
                for dx, dy in order
                if (x + dx, y + dy) in pos_to_id
            )
            qubits.append(Qubit(next_id, role, x, y))
            cells.append(Cell(next_id, members))
            next_id += 1
    return CodeLayout(CodeKind.UNROTATED_SURFACE, d, qubits, cells, x_order, z_order)


def generate_round(layout: CodeLayout) -> LogicalCircuit:
    """One syndrome-extraction round.

    Gates are emitted step-major: all resets, the X-check Hadamards, one
    CNOT layer per cell-local step, the closing Hadamards and finally the
    ancilla measurements.  CNOTs are data->ancilla for Z checks and
    ancilla->data for X checks.
    """
    gates = _round_gates(layout)
    return LogicalCircuit(
        gates=gates,
        rounds=1,
        round_boundaries=[0],
        qubit_ids=[q.id for q in layout.qubits],
    )


def cell_step_targets(layout: CodeLayout, cell: Cell) -> list[int | None]:
    """The cell's data qubit per global CNOT step (None where the cell has
    no neighbour at that step's offset)."""
    role = layout.qubit(cell.ancilla).role
    if layout.kind is CodeKind.REPETITION:
        slots: list[int | None] = [None] * 2
        for i, d in enumerate(cell.data):
            slots[i] = d
        return slots
    order = layout.x_order if role is Role.ANCILLA_X else layout.z_order
    anc = layout.qubit(cell.ancilla)
    pos_of = {layout.qubit(d).pos: d for d in cell.data}
    return [pos_of.get((anc.x + dx, anc.y + dy)) for dx, dy in order]


def _round_gates(layout: CodeLayout) -> list[Gate]:
    roles = layout.roles()
    cells = sorted(layout.cells, key=lambda c: c.ancilla)
    steps = {c.ancilla: cell_step_targets(layout, c) for c in cells}
    gates: list[Gate] = []
    for cell in cells:
        gates.append(Gate("R", (cell.ancilla,)))
    for cell in cells:
        if roles[cell.ancilla] is Role.ANCILLA_X:
            gates.append(Gate("H", (cell.ancilla,)))
    max_steps = max(len(s) for s in steps.values())
    for step in range(max_steps):
        for cell in cells:
            slots = steps[cell.ancilla]
            data = slots[step] if step < len(slots) else None
            if data is None:
                continue
            if roles[cell.ancilla] is Role.ANCILLA_X:
                gates.append(Gate("CX", (cell.ancilla, data)))
            else:
                gates.append(Gate("CX", (data, cell.ancilla)))
    for cell in cells:
        if roles[cell.ancilla] is Role.ANCILLA_X:
            gates.append(Gate("H", (cell.ancilla,)))
    for cell in cells:
        gates.append(Gate("M", (cell.ancilla,)))
    return gates


def generate_memory_experiment(layout: CodeLayout, rounds: int | None = None) -> LogicalCircuit:
    """Memory (logical identity) experiment: reset, `rounds` parity rounds,
    transversal data readout.  Defaults to distance rounds."""
    if rounds is None:
        rounds = layout.distance
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    data = layout.data_ids()
    gates: list[Gate] = [Gate("R", (q,)) for q in data]
    boundaries: list[int] = []
    round_gates = _round_gates(layout)
    for _ in range(rounds):
        boundaries.append(len(gates))
        gates.extend(round_gates)
    gates.extend(Gate("M", (q,)) for q in data)
    return LogicalCircuit(
        gates=gates,
        rounds=rounds,
        round_boundaries=boundaries,
        qubit_ids=[q.id for q in layout.qubits],
    )


def interaction_graph(circuit: LogicalCircuit) -> InteractionGraph:
    """Weighted interaction graph of the circuit's two-qubit gates.

    The weight of a pair is (total gate count - index of first shared gate),
    so early entangling pairs weigh more.
    """
    total = len(circuit.gates)
    edges: dict[tuple[int, int], float] = {}
    for idx, gate in enumerate(circuit.gates):
        if len(gate.qubits) != 2:
            continue
        a, b = gate.qubits
        key = (min(a, b), max(a, b))
        if key not in edges:
            edges[key] = float(total - idx)
    return InteractionGraph(nodes=list(circuit.qubit_ids), edges=edges)


def logical_z_support(layout: CodeLayout) -> list[int]:
    """Data qubits carrying the logical Z operator used as the memory
    observable (bottom row for surface codes, whole chain for repetition)."""
    if layout.kind is CodeKind.REPETITION:
        return layout.data_ids()
    data = [q for q in layout.qubits if q.role is Role.DATA]
    y_min = min(q.y for q in data)
    return [q.id for q in data if q.y == y_min]
