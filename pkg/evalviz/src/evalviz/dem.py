"""Detector error model extraction by one-hot fault propagation.

Every elementary fault (each Pauli term of each noise channel) is injected
into its circuit position and propagated through the remaining Clifford
gates in one vectorized pass, yielding its detector signature and logical
effect.  Faults flipping more than two detectors (hook errors) are split
into graph-like pieces: first into their single-qubit Pauli factors, then,
where a factor still spans more than two detectors, into pairs of known
two-detector edges whose signatures XOR to the factor's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stim_text import Circuit, Instruction

BOUNDARY = -1

_PAULI_BITS = {"X": (True, False), "Y": (True, True), "Z": (False, True)}


@dataclass(frozen=True)
class Fault:
    instr_index: int
    paulis: tuple[tuple[int, str], ...]  # ((qubit, 'X'|'Y'|'Z'), ...)
    probability: float


@dataclass
class ErrorModel:
    n_detectors: int
    # (a, b) with a < b, or (a, BOUNDARY): -> [probability, observable parity]
    edges: dict[tuple[int, int], list]
    n_skipped: int = 0
    skipped_mass: float = 0.0


def enumerate_faults(circuit: Circuit) -> list[Fault]:
    faults: list[Fault] = []
    for i, inst in enumerate(circuit.instructions):
        if inst.arg is None:
            continue
        p = inst.arg
        if inst.name == "X_ERROR":
            for q in inst.targets:
                faults.append(Fault(i, ((q, "X"),), p))
        elif inst.name == "Z_ERROR":
            for q in inst.targets:
                faults.append(Fault(i, ((q, "Z"),), p))
        elif inst.name == "DEPOLARIZE1":
            for q in inst.targets:
                for pauli in "XYZ":
                    faults.append(Fault(i, ((q, pauli),), p / 3))
        elif inst.name == "DEPOLARIZE2":
            paulis = ["I", "X", "Y", "Z"]
            for q1, q2 in zip(inst.targets[::2], inst.targets[1::2]):
                for a in range(4):
                    for b in range(4):
                        if a == b == 0:
                            continue
                        terms = tuple(
                            (q, pl)
                            for q, pl in ((q1, paulis[a]), (q2, paulis[b]))
                            if pl != "I"
                        )
                        faults.append(Fault(i, terms, p / 15))
    return faults


def fault_signatures(
    circuit: Circuit, faults: list[Fault]
) -> tuple[list[frozenset[int]], np.ndarray]:
    """Detector signature and observable parity of every fault."""
    n_f = len(faults)
    x = np.zeros((circuit.n_qubits, n_f), dtype=bool)
    z = np.zeros((circuit.n_qubits, n_f), dtype=bool)
    meas = np.zeros((circuit.n_measurements, n_f), dtype=bool)
    by_instr: dict[int, list[int]] = {}
    for col, fault in enumerate(faults):
        by_instr.setdefault(fault.instr_index, []).append(col)

    m = 0
    for i, inst in enumerate(circuit.instructions):
        if i in by_instr:
            for col in by_instr[i]:
                for q, pauli in faults[col].paulis:
                    bx, bz = _PAULI_BITS[pauli]
                    x[q, col] ^= bx
                    z[q, col] ^= bz
        if inst.arg is not None:
            continue
        if inst.name == "R":
            for q in inst.targets:
                x[q] = False
                z[q] = False
        elif inst.name == "H":
            for q in inst.targets:
                x[q], z[q] = z[q].copy(), x[q].copy()
        elif inst.name == "CX":
            for c, t in zip(inst.targets[::2], inst.targets[1::2]):
                x[t] ^= x[c]
                z[c] ^= z[t]
        elif inst.name == "M":
            for q in inst.targets:
                meas[m] = x[q]
                m += 1

    signatures: list[frozenset[int]] = []
    for col in range(n_f):
        flipped = {
            d
            for d, recs in enumerate(circuit.detectors)
            if bool(np.bitwise_xor.reduce(meas[list(recs), col]))
        }
        signatures.append(frozenset(flipped))
    obs_recs = list(circuit.observables.get(0, ()))
    if obs_recs:
        obs = np.bitwise_xor.reduce(meas[obs_recs, :], axis=0)
    else:
        obs = np.zeros(n_f, dtype=bool)
    return signatures, obs


def build_error_model(circuit: Circuit) -> ErrorModel:
    faults = enumerate_faults(circuit)
    signatures, obs = fault_signatures(circuit, faults)

    # signatures of single-Pauli factors, for splitting composite faults
    factor_sig: dict[tuple[int, int, str], tuple[frozenset[int], bool]] = {}
    for fault, sig, o in zip(faults, signatures, obs):
        if len(fault.paulis) == 1 and fault.paulis[0][1] in ("X", "Z"):
            q, pauli = fault.paulis[0]
            factor_sig[(fault.instr_index, q, pauli)] = (sig, bool(o))

    model = ErrorModel(n_detectors=len(circuit.detectors), edges={})

    def add_edge(sig: frozenset[int], o: bool, p: float) -> None:
        if not sig:
            return  # invisible to the decoder (and no logical flip in practice)
        if len(sig) == 1:
            key = (next(iter(sig)), BOUNDARY)
        else:
            a, b = sorted(sig)
            key = (a, b)
        if key in model.edges:
            entry = model.edges[key]
            entry[0] = entry[0] * (1 - p) + p * (1 - entry[0])
        else:
            model.edges[key] = [p, bool(o)]

    def factors_of(fault: Fault) -> list[tuple[frozenset[int], bool]]:
        parts = []
        for q, pauli in fault.paulis:
            components = ("X", "Z") if pauli == "Y" else (pauli,)
            for c in components:
                parts.append(factor_sig[(fault.instr_index, q, c)])
        return parts

    two_det_edges: set[frozenset[int]] = {
        sig for sig in signatures if len(sig) == 2
    }
    boundary_dets: set[int] = {
        next(iter(sig)) for sig in signatures if len(sig) == 1
    }

    def add_split(sig: frozenset[int], o: bool, p: float) -> bool:
        """Split an oversized signature into known graph-like pieces."""
        dets = sorted(sig)
        if len(dets) == 3:
            for i in range(3):
                single = dets[i]
                pair = frozenset(d for d in dets if d != single)
                if pair in two_det_edges and single in boundary_dets:
                    add_edge(pair, o, p)
                    add_edge(frozenset({single}), False, p)
                    return True
            return False
        if len(dets) == 4:
            import itertools

            for combo in itertools.combinations(dets, 2):
                left = frozenset(combo)
                right = frozenset(d for d in dets if d not in left)
                if left in two_det_edges and right in two_det_edges:
                    add_edge(left, o, p)
                    add_edge(right, False, p)
                    return True
        return False

    for fault, sig, o in zip(faults, signatures, obs):
        if len(sig) <= 2:
            add_edge(sig, bool(o), fault.probability)
            continue
        parts = factors_of(fault)
        if all(len(s) <= 2 for s, _ in parts):
            for s, po in parts:
                add_edge(s, po, fault.probability)
            continue
        handled = True
        for s, po in parts:
            if len(s) <= 2:
                add_edge(s, po, fault.probability)
            elif not add_split(s, po, fault.probability):
                handled = False
        if not handled:
            model.n_skipped += 1
            model.skipped_mass += fault.probability
    return model
