import math
import random

import numpy as np
import pytest

from helpers import CNOT, H, equal_up_to_phase, logical_unitary, native_unitary
from qccdc.codes import Gate, LogicalCircuit
from qccdc.translate import (
    NativeKind,
    NativeOp,
    decompose,
    normalize_angle,
    peephole_merge,
)


def _circuit(gates, n):
    return LogicalCircuit(
        gates=[Gate(name, tuple(qs)) for name, qs in gates],
        rounds=1,
        round_boundaries=[0],
        qubit_ids=list(range(n)),
    )


def test_cnot_single_ms_identity():
    native = decompose(_circuit([("CX", (0, 1))], 2), merge=False)
    kinds = [op.kind for op in native.ops]
    assert kinds.count(NativeKind.MS) == 1
    assert len([k for k in kinds if k is not NativeKind.MS]) <= 4
    U = native_unitary(native.ops, 2)
    assert equal_up_to_phase(U, CNOT, tol=1e-10)


def test_cnot_reversed_direction():
    native = decompose(_circuit([("CX", (1, 0))], 2), merge=False)
    U = native_unitary(native.ops, 2)
    swapped = np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    )
    assert equal_up_to_phase(U, swapped, tol=1e-10)


def test_hadamard_two_rotations():
    native = decompose(_circuit([("H", (0,))], 1), merge=False)
    assert len(native.ops) == 2
    assert all(op.is_rotation() for op in native.ops)
    assert equal_up_to_phase(native_unitary(native.ops, 1), H, tol=1e-12)


def test_empty_circuit():
    native = decompose(_circuit([], 1))
    assert native.ops == []


def test_reset_measure_passthrough():
    native = decompose(_circuit([("R", (0,)), ("M", (0,))], 1))
    assert [op.kind for op in native.ops] == [NativeKind.RESET, NativeKind.MEASURE]


def test_unsupported_gate_rejected():
    with pytest.raises(ValueError):
        decompose(_circuit([("T", (0,))], 1))


def test_gate_count_bounds():
    gates = [("H", (0,)), ("CX", (0, 1)), ("CX", (1, 2)), ("H", (2,)), ("CX", (0, 2))]
    native = decompose(_circuit(gates, 3), merge=False)
    counts = native.counts()
    n_cx = sum(1 for g in gates if g[0] == "CX")
    n_h = sum(1 for g in gates if g[0] == "H")
    assert counts[NativeKind.MS] == n_cx
    n_rot = sum(v for k, v in counts.items() if k in (NativeKind.RX, NativeKind.RY, NativeKind.RZ))
    assert n_rot <= 4 * n_cx + 2 * n_h


def test_peephole_merges_same_axis():
    ops = [
        NativeOp(NativeKind.RX, (0,), math.pi / 4),
        NativeOp(NativeKind.RX, (0,), math.pi / 4),
    ]
    from qccdc.translate import NativeCircuit

    merged = peephole_merge(NativeCircuit(ops, [0]))
    assert len(merged.ops) == 1
    assert merged.ops[0].kind is NativeKind.RX
    assert math.isclose(merged.ops[0].angle, math.pi / 2)


def test_peephole_drops_zero_rotation():
    from qccdc.translate import NativeCircuit

    merged = peephole_merge(NativeCircuit([NativeOp(NativeKind.RZ, (0,), 0.0)], [0]))
    assert merged.ops == []


def test_peephole_cancels_inverse_pair():
    from qccdc.translate import NativeCircuit

    ops = [
        NativeOp(NativeKind.RY, (0,), -math.pi / 2),
        NativeOp(NativeKind.RY, (0,), math.pi / 2),
    ]
    assert peephole_merge(NativeCircuit(ops, [0])).ops == []


def test_peephole_respects_interleaved_ms():
    from qccdc.translate import NativeCircuit

    ops = [
        NativeOp(NativeKind.RX, (0,), math.pi / 2),
        NativeOp(NativeKind.MS, (0, 1), math.pi / 2),
        NativeOp(NativeKind.RX, (0,), math.pi / 2),
    ]
    assert len(peephole_merge(NativeCircuit(ops, [0, 1])).ops) == 3


def _random_logical(rng, n_qubits, n_gates):
    gates = []
    for _ in range(n_gates):
        if rng.random() < 0.4:
            gates.append(("H", (rng.randrange(n_qubits),)))
        else:
            a, b = rng.sample(range(n_qubits), 2)
            gates.append(("CX", (a, b)))
    return _circuit(gates, n_qubits)


def test_random_circuits_unitary_equivalence():
    """100 random <=3-qubit circuits: merged and unmerged lowerings both
    match the dense-matrix reference up to global phase at 1e-10."""
    rng = random.Random(20240917)
    for trial in range(100):
        n = rng.choice((2, 3))
        circuit = _random_logical(rng, n, rng.randrange(1, 9))
        reference = logical_unitary(circuit.gates, n)
        for merge in (False, True):
            native = decompose(circuit, merge=merge)
            U = native_unitary(native.ops, n)
            assert equal_up_to_phase(U, reference, tol=1e-10), f"trial {trial} merge={merge}"


def test_merge_preserves_unitary_on_random_rotation_strings():
    from qccdc.translate import NativeCircuit

    rng = random.Random(7)
    kinds = [NativeKind.RX, NativeKind.RY, NativeKind.RZ, NativeKind.MS]
    for _ in range(50):
        ops = []
        for _ in range(rng.randrange(2, 12)):
            kind = rng.choice(kinds)
            if kind is NativeKind.MS:
                ops.append(NativeOp(kind, (0, 1), math.pi / 2))
            else:
                q = rng.randrange(3)
                angle = rng.choice([math.pi, math.pi / 2, -math.pi / 2])
                ops.append(NativeOp(kind, (q,), angle))
        circuit = NativeCircuit(ops, [0, 1, 2])
        merged = peephole_merge(circuit)
        assert equal_up_to_phase(
            native_unitary(merged.ops, 3), native_unitary(circuit.ops, 3), tol=1e-10
        )


def test_angle_normalization():
    assert normalize_angle(5 * math.pi) == pytest.approx(math.pi)
    assert -2 * math.pi < normalize_angle(-7.9) <= 2 * math.pi
    assert normalize_angle(math.pi / 2) == math.pi / 2
