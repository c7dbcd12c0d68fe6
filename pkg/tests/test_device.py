import random

import pytest

from qccdc.codes import build_layout
from qccdc.device import (
    ComponentKind,
    QccdDevice,
    Topology,
    Wiring,
    build_device,
    device_for_code,
    device_from_config,
)


def test_grid_2x2_example():
    dev = build_device("grid", dims=(2, 2), capacity=4)
    counts = dev.counts()
    assert counts.n_traps == 4
    assert counts.n_junctions >= 1
    assert counts.n_segments >= 4


def test_linear_chain_example():
    dev = build_device("linear", n_traps=5, capacity=2)
    counts = dev.counts()
    assert (counts.n_traps, counts.n_segments, counts.n_junctions) == (5, 4, 0)
    assert all(dev.degree(t) <= 2 for t in dev.traps)


def test_switch_star_example():
    dev = build_device("switch", n_traps=8, capacity=2)
    counts = dev.counts()
    assert counts.n_junctions == 1
    hub = next(iter(dev.junctions))
    assert dev.degree(hub) == 8


def test_single_chain():
    dev = build_device("single_chain", capacity=7)
    assert dev.counts() == dev.counts().__class__(1, 0, 0, 7)


def test_grid_junction_degree_bound():
    for dims in ((2, 2), (3, 3), (4, 3), (5, 5)):
        dev = build_device("grid", dims=dims, capacity=2)
        assert all(dev.degree(j) <= 4 for j in dev.junctions)


def test_segments_join_non_segments():
    dev = build_device("grid", dims=(3, 3), capacity=2)
    for seg in dev.segments.values():
        assert dev.kind(seg.endpoint_a) is not ComponentKind.SEGMENT
        assert dev.kind(seg.endpoint_b) is not ComponentKind.SEGMENT


def test_connectivity_property_random_sizes():
    rng = random.Random(11)
    for _ in range(60):
        topo = rng.choice(["grid", "linear", "switch"])
        n = rng.randrange(1, 26)
        cap = rng.randrange(1, 8)
        if topo == "grid":
            dev = build_device(topo, n_traps=n, capacity=cap)
        else:
            dev = build_device(topo, n_traps=n, capacity=cap)
        # constructor validates connectivity; spot-check the counts too
        assert dev.counts().n_traps == n
        if topo == "linear":
            assert all(dev.degree(t) <= 2 for t in dev.traps)


def test_build_device_rejects_bad_input():
    with pytest.raises(ValueError):
        build_device("grid", n_traps=0, capacity=2)
    with pytest.raises(ValueError):
        build_device("linear", n_traps=3, capacity=0)
    with pytest.raises(ValueError):
        build_device("grid", dims=(0, 3), capacity=2)
    with pytest.raises(ValueError):
        Topology.parse("ring")


def test_device_for_code_cap9_grid():
    layout = build_layout("rotated_surface", 4)
    dev = device_for_code(layout, 9, "grid")
    assert dev.counts().n_traps == 4  # ceil(31 / 8)


def test_device_for_code_cap2_grid():
    layout = build_layout("rotated_surface", 3)
    dev = device_for_code(layout, 2, "grid")
    assert dev.counts().n_traps == 17  # one singleton cluster per qubit


def test_device_for_code_single_chain():
    layout = build_layout("repetition", 3)
    dev = device_for_code(layout, 2, "single_chain")
    counts = dev.counts()
    assert counts.n_traps == 1
    assert counts.capacity > layout.n_qubits  # holds all 5 ions at rest


def test_device_for_code_rejects_capacity_one():
    layout = build_layout("repetition", 3)
    with pytest.raises(ValueError):
        device_for_code(layout, 1, "grid")


def test_cap2_grid_adjacency_is_one_junction_hop():
    layout = build_layout("rotated_surface", 3)
    dev = device_for_code(layout, 2, "grid")
    pos_to_trap = {dev.position(t): t for t in dev.traps}
    for cell in layout.cells:
        anc = layout.qubit(cell.ancilla)
        t_anc = pos_to_trap[(float(anc.x), float(anc.y))]
        anc_junctions = {
            j for s in dev.neighbours(t_anc) for j in dev.neighbours(s) if j != t_anc
        }
        for did in cell.data:
            dq = layout.qubit(did)
            t_data = pos_to_trap[(float(dq.x), float(dq.y))]
            data_junctions = {
                j for s in dev.neighbours(t_data) for j in dev.neighbours(s) if j != t_data
            }
            assert anc_junctions & data_junctions, (cell.ancilla, did)


def test_ragged_cluster_grid_connects():
    layout = build_layout("rotated_surface", 3)  # 17 qubits
    dev = device_for_code(layout, 5, "grid")  # ceil(17/4) = 5 clusters
    assert dev.counts().n_traps == 5  # constructor validates connectivity


def test_json_roundtrip_and_config():
    dev = build_device("grid", dims=(3, 2), capacity=3, wiring="wise")
    back = QccdDevice.from_json(dev.to_json())
    assert back.counts() == dev.counts()
    assert back.wiring is Wiring.WISE
    cfg = {"topology": "linear", "n_traps": 4, "capacity": 2, "wiring": "standard"}
    dev2 = device_from_config(cfg)
    assert dev2.counts().n_traps == 4
    assert dev2.topology is Topology.LINEAR
