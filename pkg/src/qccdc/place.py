"""Qubit-to-ion placement: balanced geometric clustering, then cluster-to-trap
assignment by minimum-cost matching over candidate trap subsets.

Clustering recursively bisects the code layout along the axis of larger
coordinate spread until every part fits in a trap (capacity-1 qubits, at
least 1).  The split point is chosen so the number of leaf clusters equals
ceil(N / target) exactly and leaf sizes stay within one of each other.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .codes import CodeLayout, InteractionGraph, Role
from .device import QccdDevice, Topology

SUBSET_BUDGET = 10_000


@dataclass
class Clustering:
    clusters: list[list[int]]  # qubit ids per cluster
    target_size: int


@dataclass
class Mapping:
    qubit_to_slot: dict[int, tuple[int, int]]  # qubit -> (trap, slot index)
    cluster_to_trap: dict[int, int]
    roles: dict[int, Role]
    home: dict[int, int]  # qubit -> trap

    def trap_of(self, qubit: int) -> int:
        return self.qubit_to_slot[qubit][0]

    def occupants(self, trap: int) -> list[int]:
        out = [
            (slot, q)
            for q, (t, slot) in self.qubit_to_slot.items()
            if t == trap
        ]
        return [q for _, q in sorted(out)]

    def to_json(self) -> str:
        doc = {
            "qubits": {
                str(q): [t, s] for q, (t, s) in sorted(self.qubit_to_slot.items())
            },
            "clusters": {str(c): t for c, t in sorted(self.cluster_to_trap.items())},
            "roles": {str(q): r.value for q, r in sorted(self.roles.items())},
        }
        return json.dumps(doc, indent=1)


def cluster_qubits(
    layout: CodeLayout,
    graph: InteractionGraph | None,
    capacity: int,
) -> Clustering:
    """Partition the layout into ceil(N / (capacity-1)) balanced clusters by
    recursive coordinate bisection.  The interaction graph is accepted for
    interface symmetry; the geometric split already keeps entangled
    neighbours together for grid-structured codes."""
    del graph
    if capacity < 2:
        raise ValueError("capacity must be >= 2")
    target = max(1, capacity - 1)
    ids = sorted(q.id for q in layout.qubits)
    k = math.ceil(len(ids) / target)
    positions = layout.positions()
    clusters = _bisect(ids, k, positions)
    return Clustering(clusters=clusters, target_size=target)


def _bisect(
    ids: list[int], k: int, positions: dict[int, tuple[int, int]]
) -> list[list[int]]:
    if k == 1:
        return [sorted(ids)]
    k_left = (k + 1) // 2
    n = len(ids)
    part_sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    n_left = sum(part_sizes[:k_left])
    xs = [positions[q][0] for q in ids]
    ys = [positions[q][1] for q in ids]
    axis = 0 if (max(xs) - min(xs)) >= (max(ys) - min(ys)) else 1
    ordered = sorted(ids, key=lambda q: (positions[q][axis], positions[q][1 - axis], q))
    left, right = ordered[:n_left], ordered[n_left:]
    return _bisect(left, k_left, positions) + _bisect(right, k - k_left, positions)


def cluster_centroids(
    clustering: Clustering, layout: CodeLayout
) -> list[tuple[float, float]]:
    positions = layout.positions()
    out = []
    for members in clustering.clusters:
        cx = sum(positions[q][0] for q in members) / len(members)
        cy = sum(positions[q][1] for q in members) / len(members)
        out.append((cx, cy))
    return out


def _rescale(
    points: list[tuple[float, float]], targets: list[tuple[float, float]]
) -> list[tuple[float, float]]:
    """Affinely map the bounding box of `points` onto that of `targets`."""
    def bbox(ps):
        xs = [p[0] for p in ps]
        ys = [p[1] for p in ps]
        return min(xs), max(xs), min(ys), max(ys)

    x0, x1, y0, y1 = bbox(points)
    u0, u1, v0, v1 = bbox(targets)
    sx = (u1 - u0) / (x1 - x0) if x1 > x0 else 0.0
    sy = (v1 - v0) / (y1 - y0) if y1 > y0 else 0.0
    cx = (u0 + u1) / 2 - sx * (x0 + x1) / 2
    cy = (v0 + v1) / 2 - sy * (y0 + y1) / 2
    return [(sx * x + cx, sy * y + cy) for x, y in points]


def _matching_cost(
    centroids: list[tuple[float, float]],
    trap_ids: list[int],
    trap_pos: dict[int, tuple[float, float]],
) -> tuple[float, dict[int, int]]:
    cost = np.empty((len(centroids), len(trap_ids)))
    for i, (cx, cy) in enumerate(centroids):
        for j, tid in enumerate(trap_ids):
            tx, ty = trap_pos[tid]
            cost[i, j] = math.hypot(cx - tx, cy - ty)
    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum())
    assignment = {int(i): trap_ids[int(j)] for i, j in zip(rows, cols)}
    return total, assignment


def _candidate_subsets(device: QccdDevice, k: int) -> list[tuple[int, ...]]:
    """Axis-aligned rectangular trap subsets that contain the device centroid
    and have between k and 2k traps, capped at SUBSET_BUDGET."""
    traps = sorted(device.traps.values(), key=lambda t: t.id)
    if len(traps) == k:
        return [tuple(t.id for t in traps)]
    cx = sum(t.pos[0] for t in traps) / len(traps)
    cy = sum(t.pos[1] for t in traps) / len(traps)
    xs = sorted({t.pos[0] for t in traps})
    ys = sorted({t.pos[1] for t in traps})
    subsets: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for x0, x1 in itertools.combinations_with_replacement(xs, 2):
        if not x0 <= cx <= x1:
            continue
        for y0, y1 in itertools.combinations_with_replacement(ys, 2):
            if not y0 <= cy <= y1:
                continue
            inside = tuple(
                t.id
                for t in traps
                if x0 <= t.pos[0] <= x1 and y0 <= t.pos[1] <= y1
            )
            if k <= len(inside) <= 2 * k and inside not in seen:
                seen.add(inside)
                subsets.append(inside)
                if len(subsets) >= SUBSET_BUDGET:
                    return subsets
    if not subsets:
        subsets.append(tuple(t.id for t in traps))
    return subsets


def map_clusters(
    clustering: Clustering, device: QccdDevice, layout: CodeLayout
) -> Mapping:
    """Assign each cluster to a trap via Hungarian matching over candidate
    trap subsets; slot order inside a trap follows qubit id."""
    k = len(clustering.clusters)
    if len(device.traps) < k:
        raise ValueError(
            f"device has {len(device.traps)} traps but {k} clusters are needed"
        )
    centroids = cluster_centroids(clustering, layout)
    trap_pos = {t.id: t.pos for t in device.traps.values()}

    best: tuple[float, tuple[int, ...], dict[int, int]] | None = None
    for subset in _candidate_subsets(device, k):
        if len(subset) < k:
            continue
        targets = [trap_pos[t] for t in subset]
        scaled = _rescale(centroids, targets)
        cost, assignment = _matching_cost(scaled, list(subset), trap_pos)
        key = (cost, subset)
        if best is None or key < (best[0], best[1]):
            best = (cost, subset, assignment)
    assert best is not None
    _, _, assignment = best

    roles = layout.roles()
    qubit_to_slot: dict[int, tuple[int, int]] = {}
    for ci, members in enumerate(clustering.clusters):
        trap = assignment[ci]
        rest_limit = max(1, device.traps[trap].capacity - 1)
        if len(members) > rest_limit:
            raise ValueError(
                f"cluster {ci} of size {len(members)} exceeds trap {trap} rest capacity"
            )
        for slot, q in enumerate(sorted(members)):
            qubit_to_slot[q] = (trap, slot)
    return Mapping(
        qubit_to_slot=qubit_to_slot,
        cluster_to_trap=dict(enumerate(assignment[ci] for ci in range(k))),
        roles=roles,
        home={q: t for q, (t, _) in qubit_to_slot.items()},
    )


def place(layout: CodeLayout, device: QccdDevice, graph: InteractionGraph | None = None) -> Mapping:
    """Cluster then match: the full placement pass."""
    capacity = device.capacity
    if device.topology is Topology.SINGLE_CHAIN:
        trap = next(iter(device.traps))
        qubit_to_slot = {
            q.id: (trap, slot)
            for slot, q in enumerate(sorted(layout.qubits, key=lambda qq: qq.id))
        }
        return Mapping(
            qubit_to_slot=qubit_to_slot,
            cluster_to_trap={0: trap},
            roles=layout.roles(),
            home={q: trap for q in qubit_to_slot},
        )
    clustering = cluster_qubits(layout, graph, capacity)
    return map_clusters(clustering, device, layout)
