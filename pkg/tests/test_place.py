import itertools
import math
import random

import pytest

from qccdc.codes import CodeKind, build_layout, generate_round, interaction_graph
from qccdc.device import build_device, device_for_code
from qccdc.place import Mapping, cluster_centroids, cluster_qubits, map_clusters, place


def test_cluster_sizes_d4_cap9():
    layout = build_layout("rotated_surface", 4)
    clustering = cluster_qubits(layout, None, 9)
    sizes = sorted(len(c) for c in clustering.clusters)
    assert sizes == [7, 8, 8, 8]


def test_singleton_clusters_cap2():
    layout = build_layout("rotated_surface", 3)
    clustering = cluster_qubits(layout, None, 2)
    assert all(len(c) == 1 for c in clustering.clusters)
    assert len(clustering.clusters) == layout.n_qubits


def test_single_cluster_when_everything_fits():
    layout = build_layout("repetition", 3)
    clustering = cluster_qubits(layout, None, 6)
    assert len(clustering.clusters) == 1
    assert sorted(clustering.clusters[0]) == sorted(q.id for q in layout.qubits)


def test_cluster_count_and_balance_property():
    for kind in (CodeKind.ROTATED_SURFACE, CodeKind.REPETITION):
        for d in (2, 3, 4, 5):
            layout = build_layout(kind, d)
            for cap in range(2, 10):
                clustering = cluster_qubits(layout, None, cap)
                target = max(1, cap - 1)
                expected = math.ceil(layout.n_qubits / target)
                assert len(clustering.clusters) == expected
                sizes = [len(c) for c in clustering.clusters]
                # balanced: no cluster above target, sizes within one of
                # each other (implies the <= 2 deviation bound of ragged
                # boundaries whenever clusters are near-full)
                assert max(sizes) <= target
                assert max(sizes) - min(sizes) <= 1
                all_ids = sorted(q for c in clustering.clusters for q in c)
                assert all_ids == sorted(q.id for q in layout.qubits)


def test_clustering_rejects_capacity_one():
    layout = build_layout("repetition", 3)
    with pytest.raises(ValueError):
        cluster_qubits(layout, None, 1)


def test_quadrant_mapping_preserves_geometry():
    layout = build_layout("rotated_surface", 4)
    clustering = cluster_qubits(layout, None, 9)
    device = device_for_code(layout, 9, "grid")
    mapping = map_clusters(clustering, device, layout)
    centroids = cluster_centroids(clustering, layout)
    trap_pos = {t.id: t.pos for t in device.traps.values()}
    # the north-west-most cluster lands on the north-west-most trap, etc.
    for ci, (cx, cy) in enumerate(centroids):
        trap = mapping.cluster_to_trap[ci]
        tx, ty = trap_pos[trap]
        same_side_x = (cx <= sorted(c[0] for c in centroids)[1]) == (
            tx <= sorted(p[0] for p in trap_pos.values())[1]
        )
        same_side_y = (cy <= sorted(c[1] for c in centroids)[1]) == (
            ty <= sorted(p[1] for p in trap_pos.values())[1]
        )
        assert same_side_x and same_side_y


def test_single_cluster_lands_near_centroid():
    layout = build_layout("repetition", 3)
    clustering = cluster_qubits(layout, None, 6)
    device = build_device("grid", dims=(3, 3), capacity=6)
    mapping = map_clusters(clustering, device, layout)
    trap = mapping.cluster_to_trap[0]
    cx = sum(t.pos[0] for t in device.traps.values()) / 9
    cy = sum(t.pos[1] for t in device.traps.values()) / 9
    best = min(
        device.traps.values(), key=lambda t: (t.pos[0] - cx) ** 2 + (t.pos[1] - cy) ** 2
    )
    assert trap == best.id


def _brute_force_cost(centroids, trap_ids, trap_pos):
    best = None
    for perm in itertools.permutations(trap_ids, len(centroids)):
        cost = sum(
            math.hypot(cx - trap_pos[t][0], cy - trap_pos[t][1])
            for (cx, cy), t in zip(centroids, perm)
        )
        if best is None or cost < best:
            best = cost
    return best


def test_matching_cost_equals_brute_force():
    """Hungarian assignment on <= 6 clusters matches the factorial oracle."""
    rng = random.Random(5)
    from qccdc.place import _matching_cost, _rescale

    for _ in range(30):
        k = rng.randrange(2, 7)
        centroids = [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(k)]
        trap_ids = list(range(k))
        trap_pos = {t: (rng.uniform(0, 5), rng.uniform(0, 5)) for t in trap_ids}
        scaled = _rescale(centroids, [trap_pos[t] for t in trap_ids])
        cost, _ = _matching_cost(scaled, trap_ids, trap_pos)
        oracle = _brute_force_cost(scaled, trap_ids, trap_pos)
        assert cost == pytest.approx(oracle, abs=1e-9)


def test_mapping_invariants_and_determinism():
    layout = build_layout("rotated_surface", 3)
    device = device_for_code(layout, 4, "grid")
    m1 = place(layout, device)
    m2 = place(layout, device)
    assert m1.qubit_to_slot == m2.qubit_to_slot
    slots = list(m1.qubit_to_slot.values())
    assert len(slots) == len(set(slots))  # injective on slots
    per_trap = {}
    for trap, _ in slots:
        per_trap[trap] = per_trap.get(trap, 0) + 1
    for trap, n in per_trap.items():
        assert n <= device.traps[trap].capacity - 1


def test_insufficient_traps_rejected():
    layout = build_layout("rotated_surface", 3)
    clustering = cluster_qubits(layout, None, 2)  # 17 clusters
    device = build_device("grid", dims=(2, 2), capacity=2)
    with pytest.raises(ValueError):
        map_clusters(clustering, device, layout)


def test_interacting_qubits_land_within_two_hops():
    """Capacity-2 grid mapping of the rotated code keeps every entangled
    pair within two trap-graph hops (adjacent trap neighbourhoods)."""
    for d in (2, 3, 4):
        layout = build_layout("rotated_surface", d)
        device = device_for_code(layout, 2, "grid")
        mapping = place(layout, device)
        graph = interaction_graph(generate_round(layout))
        # trap adjacency: traps sharing a junction
        adj = {t: set() for t in device.traps}
        for j in device.junctions:
            traps = {
                t
                for s in device.neighbours(j)
                for t in device.neighbours(s)
                if t in device.traps
            }
            for a in traps:
                adj[a] |= traps - {a}
        for (q1, q2) in graph.edges:
            t1, t2 = mapping.trap_of(q1), mapping.trap_of(q2)
            if t1 == t2 or t2 in adj[t1]:
                continue
            assert adj[t1] & adj[t2], f"pair {q1},{q2} farther than 2 hops"


def test_mapping_serialization():
    layout = build_layout("repetition", 3)
    device = device_for_code(layout, 2, "linear")
    mapping = place(layout, device)
    text = mapping.to_json()
    assert '"qubits"' in text and '"clusters"' in text


def test_capacity2_places_one_qubit_per_trap():
    layout = build_layout("rotated_surface", 3)
    device = device_for_code(layout, 2, "grid")
    mapping = place(layout, device)
    per_trap = {}
    for trap, _ in mapping.qubit_to_slot.values():
        per_trap[trap] = per_trap.get(trap, 0) + 1
    assert set(per_trap.values()) == {1}
    assert len(per_trap) == layout.n_qubits
