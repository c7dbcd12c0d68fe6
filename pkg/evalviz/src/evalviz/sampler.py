"""Batch Pauli-frame sampling of detection events.

Propagates X/Z flip frames for all shots at once through the Clifford
circuit, sampling each noise channel vectorially.  Measurement records the
X frame; resets and measurements re-randomize the unobservable frame
component, mirroring the reference-frame semantics of stabilizer samplers.
"""

from __future__ import annotations

import numpy as np

from .stim_text import Circuit, Instruction


class FrameSampler:
    def __init__(self, circuit: Circuit, shots: int, rng: np.random.Generator):
        self.circuit = circuit
        self.shots = shots
        self.rng = rng
        self.x = np.zeros((circuit.n_qubits, shots), dtype=bool)
        self.z = np.zeros((circuit.n_qubits, shots), dtype=bool)
        self.meas_flips = np.zeros((circuit.n_measurements, shots), dtype=bool)
        self._m = 0

    # -- gates ---------------------------------------------------------
    def _gate(self, inst: Instruction) -> None:
        x, z = self.x, self.z
        if inst.name == "R":
            for q in inst.targets:
                x[q] = False
                z[q] = self.rng.integers(0, 2, self.shots, dtype=np.uint8).astype(bool)
        elif inst.name == "H":
            for q in inst.targets:
                x[q], z[q] = z[q].copy(), x[q].copy()
        elif inst.name == "CX":
            for c, t in zip(inst.targets[::2], inst.targets[1::2]):
                x[t] ^= x[c]
                z[c] ^= z[t]
        elif inst.name == "M":
            for q in inst.targets:
                self.meas_flips[self._m] = x[q]
                self._m += 1
                z[q] ^= self.rng.integers(0, 2, self.shots, dtype=np.uint8).astype(bool)

    # -- noise ---------------------------------------------------------
    def _noise(self, inst: Instruction) -> None:
        p = inst.arg or 0.0
        x, z = self.x, self.z
        if inst.name == "X_ERROR":
            for q in inst.targets:
                x[q] ^= self.rng.random(self.shots) < p
        elif inst.name == "Z_ERROR":
            for q in inst.targets:
                z[q] ^= self.rng.random(self.shots) < p
        elif inst.name == "DEPOLARIZE1":
            for q in inst.targets:
                hit = self.rng.random(self.shots) < p
                which = self.rng.integers(1, 4, self.shots)  # 1=X 2=Y 3=Z
                x[q] ^= hit & (which != 3)
                z[q] ^= hit & (which != 1)
        elif inst.name == "DEPOLARIZE2":
            for q1, q2 in zip(inst.targets[::2], inst.targets[1::2]):
                hit = self.rng.random(self.shots) < p
                which = self.rng.integers(1, 16, self.shots)
                p1 = which // 4  # pauli code on q1: 0=I 1=X 2=Y 3=Z
                p2 = which % 4
                x[q1] ^= hit & ((p1 == 1) | (p1 == 2))
                z[q1] ^= hit & ((p1 == 2) | (p1 == 3))
                x[q2] ^= hit & ((p2 == 1) | (p2 == 2))
                z[q2] ^= hit & ((p2 == 2) | (p2 == 3))

    def run(self) -> tuple[np.ndarray, np.ndarray]:
        for inst in self.circuit.instructions:
            if inst.arg is None:
                self._gate(inst)
            else:
                self._noise(inst)
        circuit = self.circuit
        det = np.zeros((len(circuit.detectors), self.shots), dtype=bool)
        for i, recs in enumerate(circuit.detectors):
            for r in recs:
                det[i] ^= self.meas_flips[r]
        obs = np.zeros(self.shots, dtype=bool)
        for r in circuit.observables.get(0, ()):
            obs ^= self.meas_flips[r]
        return det, obs


def sample_detectors(
    circuit: Circuit, shots: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Detection events [n_detectors, shots] and observable flips [shots]."""
    rng = np.random.default_rng(seed)
    return FrameSampler(circuit, shots, rng).run()
