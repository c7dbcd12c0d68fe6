"""QCCD hardware model: traps, junctions, shuttling segments and topologies.

Components live in a single integer id space.  Positions use doubled code
coordinates so that junction midpoints are integers for the checkerboard
(rotated-code) trap pattern and half-integers for full grids; positions are
metadata for placement and plotting, connectivity is what the router uses.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .codes import CodeLayout


class Topology(enum.Enum):
    GRID = "grid"
    LINEAR = "linear"
    SWITCH = "switch"
    SINGLE_CHAIN = "single_chain"

    @classmethod
    def parse(cls, text: str) -> "Topology":
        key = text.strip().lower()
        aliases = {
            "g": cls.GRID,
            "grid": cls.GRID,
            "l": cls.LINEAR,
            "linear": cls.LINEAR,
            "s": cls.SWITCH,
            "switch": cls.SWITCH,
            "c": cls.SINGLE_CHAIN,
            "chain": cls.SINGLE_CHAIN,
            "single_chain": cls.SINGLE_CHAIN,
        }
        if key not in aliases:
            raise ValueError(f"unknown topology: {text!r}")
        return aliases[key]


class Wiring(enum.Enum):
    STANDARD = "standard"
    WISE = "wise"

    @classmethod
    def parse(cls, text: str) -> "Wiring":
        key = text.strip().lower()
        if key in ("standard", "std"):
            return cls.STANDARD
        if key == "wise":
            return cls.WISE
        raise ValueError(f"unknown wiring: {text!r}")


class ComponentKind(enum.Enum):
    TRAP = "trap"
    JUNCTION = "junction"
    SEGMENT = "segment"


@dataclass(frozen=True)
class Trap:
    id: int
    pos: tuple[float, float]
    capacity: int


@dataclass(frozen=True)
class Junction:
    id: int
    pos: tuple[float, float]
    capacity: int = 1


@dataclass(frozen=True)
class Segment:
    id: int
    endpoint_a: int
    endpoint_b: int


@dataclass(frozen=True)
class DeviceCounts:
    n_traps: int
    n_junctions: int
    n_segments: int
    capacity: int


@dataclass
class QccdDevice:
    topology: Topology
    wiring: Wiring
    capacity: int
    traps: dict[int, Trap]
    junctions: dict[int, Junction]
    segments: dict[int, Segment]
    _adjacency: dict[int, list[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        adj: dict[int, list[int]] = {i: [] for i in self.component_ids()}
        for seg in self.segments.values():
            adj[seg.id].append(seg.endpoint_a)
            adj[seg.id].append(seg.endpoint_b)
            adj[seg.endpoint_a].append(seg.id)
            adj[seg.endpoint_b].append(seg.id)
        self._adjacency = {k: sorted(v) for k, v in adj.items()}
        self._validate()

    def _validate(self) -> None:
        if not self.traps:
            raise ValueError("device has no traps")
        for t in self.traps.values():
            if t.capacity < 1:
                raise ValueError(f"trap {t.id} capacity must be >= 1")
        for seg in self.segments.values():
            for end in (seg.endpoint_a, seg.endpoint_b):
                if end in self.segments:
                    raise ValueError("segments must connect non-segment components")
        if len(self.component_ids()) > 1 and not self._connected():
            raise ValueError("component graph is not connected")

    def _connected(self) -> bool:
        ids = self.component_ids()
        if not ids:
            return True
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            for nxt in self._adjacency[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == len(ids)

    def component_ids(self) -> list[int]:
        return sorted([*self.traps, *self.junctions, *self.segments])

    def kind(self, comp_id: int) -> ComponentKind:
        if comp_id in self.traps:
            return ComponentKind.TRAP
        if comp_id in self.junctions:
            return ComponentKind.JUNCTION
        if comp_id in self.segments:
            return ComponentKind.SEGMENT
        raise KeyError(comp_id)

    def component_capacity(self, comp_id: int) -> int:
        if comp_id in self.traps:
            return self.traps[comp_id].capacity
        if comp_id in self.junctions:
            return self.junctions[comp_id].capacity
        return 1  # segment

    def neighbours(self, comp_id: int) -> list[int]:
        return self._adjacency[comp_id]

    def degree(self, comp_id: int) -> int:
        """Number of segments incident to a trap or junction."""
        return len(self._adjacency[comp_id])

    def position(self, comp_id: int) -> tuple[float, float]:
        if comp_id in self.traps:
            return self.traps[comp_id].pos
        if comp_id in self.junctions:
            return self.junctions[comp_id].pos
        seg = self.segments[comp_id]
        ax, ay = self.position(seg.endpoint_a)
        bx, by = self.position(seg.endpoint_b)
        return ((ax + bx) / 2, (ay + by) / 2)

    def counts(self) -> DeviceCounts:
        return DeviceCounts(
            n_traps=len(self.traps),
            n_junctions=len(self.junctions),
            n_segments=len(self.segments),
            capacity=self.capacity,
        )

    def to_json(self) -> str:
        doc = {
            "topology": self.topology.value,
            "wiring": self.wiring.value,
            "capacity": self.capacity,
            "traps": [[t.id, t.pos[0], t.pos[1], t.capacity] for t in self.traps.values()],
            "junctions": [[j.id, j.pos[0], j.pos[1], j.capacity] for j in self.junctions.values()],
            "segments": [[s.id, s.endpoint_a, s.endpoint_b] for s in self.segments.values()],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "QccdDevice":
        doc = json.loads(text)
        return cls(
            topology=Topology(doc["topology"]),
            wiring=Wiring(doc["wiring"]),
            capacity=doc["capacity"],
            traps={t[0]: Trap(t[0], (t[1], t[2]), t[3]) for t in doc["traps"]},
            junctions={j[0]: Junction(j[0], (j[1], j[2]), j[3]) for j in doc["junctions"]},
            segments={s[0]: Segment(s[0], s[1], s[2]) for s in doc["segments"]},
        )


class _Builder:
    """Assigns component ids in construction order: traps, junctions, segments."""

    def __init__(self, topology: Topology, wiring: Wiring, capacity: int) -> None:
        self.topology = topology
        self.wiring = wiring
        self.capacity = capacity
        self.traps: dict[int, Trap] = {}
        self.junctions: dict[int, Junction] = {}
        self.segments: dict[int, Segment] = {}
        self._next = 0

    def add_trap(self, pos: tuple[float, float], capacity: int) -> int:
        tid = self._next
        self._next += 1
        self.traps[tid] = Trap(tid, pos, capacity)
        return tid

    def add_junction(self, pos: tuple[float, float], capacity: int = 1) -> int:
        jid = self._next
        self._next += 1
        self.junctions[jid] = Junction(jid, pos, capacity)
        return jid

    def add_segment(self, a: int, b: int) -> int:
        sid = self._next
        self._next += 1
        self.segments[sid] = Segment(sid, a, b)
        return sid

    def build(self) -> QccdDevice:
        return QccdDevice(
            topology=self.topology,
            wiring=self.wiring,
            capacity=self.capacity,
            traps=self.traps,
            junctions=self.junctions,
            segments=self.segments,
        )


def _grid_from_sites(
    builder: _Builder, sites: list[tuple[int, int]], capacity: int
) -> None:
    """Traps on the given integer sites, 4-way junctions between plaquettes.

    A checkerboard pattern (all sites with even coordinate sum) gets integer
    junction midpoints; a full pattern gets half-integer plaquette centres.
    Degenerate single-row/column grids fall back to direct trap-trap segments.
    """
    site_set = set(sites)
    trap_of: dict[tuple[int, int], int] = {}
    for pos in sites:
        trap_of[pos] = builder.add_trap((float(pos[0]), float(pos[1])), capacity)

    checkerboard = all((x + y) % 2 == 0 for x, y in sites)
    if checkerboard and len(sites) > 1:
        candidates: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for x, y in sites:
            for jx, jy in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                candidates.setdefault((jx, jy), []).append((x, y))
        for jpos in sorted(candidates):
            adj = sorted(candidates[jpos])
            if len(adj) >= 2:
                jid = builder.add_junction((float(jpos[0]), float(jpos[1])))
                for tpos in adj:
                    builder.add_segment(trap_of[tpos], jid)
        return

    xs = sorted({x for x, _ in site_set})
    ys = sorted({y for _, y in site_set})
    if len(xs) == 1 or len(ys) == 1:
        ordered = sorted(site_set)
        for a, b in zip(ordered, ordered[1:]):
            builder.add_segment(trap_of[a], trap_of[b])
        return

    # Full pattern: a 4-way junction inside every complete 2x2 plaquette,
    # then (for ragged layouts) the fewest partial-plaquette junctions that
    # make the graph connected, chosen in coordinate order.
    parent: dict[tuple[int, int], tuple[int, int]] = {s: s for s in site_set}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    def union(a, b) -> None:
        parent[find(a)] = find(b)

    def corners_of(x: int, y: int) -> list[tuple[int, int]]:
        return [
            c
            for c in ((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1))
            if c in site_set
        ]

    def add_junction_at(x: int, y: int, corners: list[tuple[int, int]]) -> None:
        jid = builder.add_junction((x + 0.5, y + 0.5))
        for tpos in corners:
            builder.add_segment(trap_of[tpos], jid)
            union(tpos, corners[0])

    plaquettes = {
        (x - dx, y - dy)
        for x, y in site_set
        for dx in (0, 1)
        for dy in (0, 1)
    }
    partial: list[tuple[tuple[int, int], list[tuple[int, int]]]] = []
    for x, y in sorted(plaquettes):
        corners = corners_of(x, y)
        if len(corners) == 4:
            add_junction_at(x, y, corners)
        elif len(corners) >= 2:
            partial.append(((x, y), corners))
    for (x, y), corners in partial:
        roots = {find(c) for c in corners}
        if len(roots) > 1:
            add_junction_at(x, y, corners)


def build_device(
    topology: Topology | str,
    n_traps: int | None = None,
    capacity: int = 2,
    dims: tuple[int, int] | None = None,
    wiring: Wiring | str = Wiring.STANDARD,
) -> QccdDevice:
    """Construct a device of the given topology.

    Grid devices take either dims=(cols, rows) or a trap count arranged into
    the smallest near-square; linear and switch take n_traps.
    """
    if isinstance(topology, str):
        topology = Topology.parse(topology)
    if isinstance(wiring, str):
        wiring = Wiring.parse(wiring)
    if capacity < 1:
        raise ValueError("capacity must be >= 1")

    builder = _Builder(topology, wiring, capacity)
    if topology is Topology.GRID:
        if dims is None:
            if n_traps is None or n_traps < 1:
                raise ValueError("grid device needs dims or a positive trap count")
            dims = _near_square(n_traps)
        cols, rows = dims
        if cols < 1 or rows < 1:
            raise ValueError(f"nonsensical grid dims: {dims}")
        count = n_traps if n_traps is not None else cols * rows
        sites = [(c, r) for r in range(rows) for c in range(cols)][:count]
        _grid_from_sites(builder, sites, capacity)
    elif topology is Topology.LINEAR:
        if n_traps is None or n_traps < 1:
            raise ValueError("linear device needs a positive trap count")
        prev = None
        for i in range(n_traps):
            tid = builder.add_trap((float(i), 0.0), capacity)
            if prev is not None:
                builder.add_segment(prev, tid)
            prev = tid
    elif topology is Topology.SWITCH:
        if n_traps is None or n_traps < 1:
            raise ValueError("switch device needs a positive trap count")
        tids = []
        for i in range(n_traps):
            angle = 2 * math.pi * i / n_traps
            pos = (round(10 * math.cos(angle), 6), round(10 * math.sin(angle), 6))
            tids.append(builder.add_trap(pos, capacity))
        # The n-way switch is a crossbar: it can pass one ion per port, so its
        # capacity is its degree rather than the single-ion junction default.
        hub = builder.add_junction((0.0, 0.0), capacity=max(1, n_traps))
        for tid in tids:
            builder.add_segment(tid, hub)
    elif topology is Topology.SINGLE_CHAIN:
        builder.add_trap((0.0, 0.0), capacity)
    else:
        raise ValueError(f"unknown topology: {topology}")
    return builder.build()


def _near_square(n: int) -> tuple[int, int]:
    cols = math.isqrt(n)
    if cols * cols < n:
        cols += 1
    rows = (n + cols - 1) // cols
    return (cols, rows)


def device_for_code(
    layout: CodeLayout,
    capacity: int,
    topology: Topology | str,
    wiring: Wiring | str = Wiring.STANDARD,
) -> QccdDevice:
    """Size and shape a device for one logical qubit.

    Cluster size is capacity-1 (1 for capacity 2), giving
    ceil(N / max(1, capacity-1)) traps.  Grid devices mirror the cluster
    geometry so that code-adjacent clusters sit on adjacent traps; linear
    devices chain the clusters; switch connects them to one crossbar
    junction; single_chain holds every ion in one trap.
    """
    if isinstance(topology, str):
        topology = Topology.parse(topology)
    if isinstance(wiring, str):
        wiring = Wiring.parse(wiring)

    n_qubits = layout.n_qubits
    if topology is Topology.SINGLE_CHAIN:
        # Declared capacity keeps one slot above the ion count so the trap
        # still satisfies the rest-state invariant while holding every ion.
        return build_device(topology, capacity=max(capacity, n_qubits + 1), wiring=wiring)
    if capacity < 2:
        raise ValueError("capacity must be >= 2 to host a two-qubit gate")

    from .place import cluster_qubits  # local import to avoid a module cycle

    clustering = cluster_qubits(layout, None, capacity)
    n_clusters = len(clustering.clusters)

    if topology is Topology.LINEAR:
        return build_device(topology, n_traps=n_clusters, capacity=capacity, wiring=wiring)
    if topology is Topology.SWITCH:
        return build_device(topology, n_traps=n_clusters, capacity=capacity, wiring=wiring)

    # Grid: one trap per cluster, placed to preserve the code geometry.
    # For capacity 2 the cluster sites are the qubit sites themselves; larger
    # clusters form a coarse near-square grid and the Hungarian matching in
    # the placement stage assigns clusters to these traps.
    builder = _Builder(topology, wiring, capacity)
    if capacity == 2:
        sites = sorted((q.x, q.y) for q in layout.qubits)
    else:
        cols, rows = _near_square(n_clusters)
        sites = [
            (rank % cols, rows - 1 - rank // cols) for rank in range(n_clusters)
        ]
        sites = sorted(set(sites))
    _grid_from_sites(builder, sites, capacity)
    return builder.build()


def device_from_config(doc: dict) -> QccdDevice:
    """Build a device from a declarative config mapping."""
    topology = Topology.parse(doc.get("topology", "grid"))
    wiring = Wiring.parse(doc.get("wiring", "standard"))
    capacity = int(doc.get("capacity", 2))
    dims = tuple(doc["dims"]) if "dims" in doc else None
    n_traps = doc.get("n_traps")
    return build_device(topology, n_traps=n_traps, capacity=capacity, dims=dims, wiring=wiring)
