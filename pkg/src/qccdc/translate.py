"""Lowering of {R, H, CX, M} circuits to the native trapped-ion gate set.

Native gates are the two-qubit MS gate plus single-qubit RX/RY/RZ rotations;
measurement and reset pass through.  The CNOT identity uses a single MS gate
and four rotations; the Hadamard costs two rotations.  Both are verified
against dense-matrix oracles in the tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .codes import LogicalCircuit

PI = math.pi
PI_2 = math.pi / 2

_TWO_PI = 2 * math.pi
_ANGLE_EPS = 1e-12


class NativeKind(enum.Enum):
    MS = "MS"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    MEASURE = "M"
    RESET = "R"


ROTATION_KINDS = (NativeKind.RX, NativeKind.RY, NativeKind.RZ)


@dataclass(frozen=True)
class NativeOp:
    kind: NativeKind
    qubits: tuple[int, ...]
    angle: float = 0.0
    bundle: int = -1  # index of the logical gate this op was lowered from

    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS


@dataclass
class NativeCircuit:
    ops: list[NativeOp]
    qubit_ids: list[int]
    rounds: int = 1

    def counts(self) -> dict[NativeKind, int]:
        out: dict[NativeKind, int] = {}
        for op in self.ops:
            out[op.kind] = out.get(op.kind, 0) + 1
        return out


def normalize_angle(angle: float) -> float:
    """Map an angle into (-2*pi, 2*pi] preserving the rotation direction."""
    if angle > _TWO_PI:
        angle = math.fmod(angle, _TWO_PI)
    elif angle <= -_TWO_PI:
        angle = math.fmod(angle, _TWO_PI)
    return angle


def decompose(circuit: LogicalCircuit, merge: bool = True) -> NativeCircuit:
    """Lower a logical circuit to native ops; rotation merging on by default."""
    ops: list[NativeOp] = []
    for idx, gate in enumerate(circuit.gates):
        if gate.name == "R":
            ops.append(NativeOp(NativeKind.RESET, gate.qubits, bundle=idx))
        elif gate.name == "M":
            ops.append(NativeOp(NativeKind.MEASURE, gate.qubits, bundle=idx))
        elif gate.name == "H":
            (q,) = gate.qubits
            ops.append(NativeOp(NativeKind.RY, (q,), -PI_2, bundle=idx))
            ops.append(NativeOp(NativeKind.RZ, (q,), PI, bundle=idx))
        elif gate.name == "CX":
            c, t = gate.qubits
            ops.append(NativeOp(NativeKind.RY, (c,), PI_2, bundle=idx))
            ops.append(NativeOp(NativeKind.MS, (c, t), PI_2, bundle=idx))
            ops.append(NativeOp(NativeKind.RX, (c,), -PI_2, bundle=idx))
            ops.append(NativeOp(NativeKind.RX, (t,), -PI_2, bundle=idx))
            ops.append(NativeOp(NativeKind.RY, (c,), -PI_2, bundle=idx))
        else:
            raise ValueError(f"unsupported gate kind: {gate.name!r}")
    native = NativeCircuit(ops, list(circuit.qubit_ids), circuit.rounds)
    return peephole_merge(native) if merge else native


def peephole_merge(native: NativeCircuit) -> NativeCircuit:
    """Merge same-axis rotations that are adjacent in a qubit's op sequence
    and drop rotations with zero net angle.

    A merged rotation is attributed to the later op's bundle, so rotations
    cancelled across two consecutive CNOTs never charge their time twice.
    """
    ops = list(native.ops)
    keep = [True] * len(ops)
    last_rot: dict[int, int] = {}  # qubit -> index of trailing rotation
    for i, op in enumerate(ops):
        if op.is_rotation():
            (q,) = op.qubits
            if abs(math.remainder(op.angle, _TWO_PI)) < _ANGLE_EPS:
                keep[i] = False
                continue
            j = last_rot.get(q)
            if j is not None and keep[j] and ops[j].kind is op.kind:
                merged = normalize_angle(ops[j].angle + op.angle)
                keep[j] = False
                if abs(math.remainder(merged, _TWO_PI)) < _ANGLE_EPS:
                    keep[i] = False
                    last_rot.pop(q, None)
                else:
                    ops[i] = replace(op, angle=merged)
                    last_rot[q] = i
            else:
                last_rot[q] = i
        else:
            for q in op.qubits:
                last_rot.pop(q, None)
    merged_ops = [op for i, op in enumerate(ops) if keep[i]]
    return NativeCircuit(merged_ops, list(native.qubit_ids), native.rounds)
