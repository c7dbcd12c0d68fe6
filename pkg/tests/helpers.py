"""Shared test oracles: dense-matrix gate references and a stabilizer
tableau simulator for replaying emitted circuits."""

from __future__ import annotations

import math

import numpy as np

# ---------------------------------------------------------------------------
# Dense matrix oracle for the translation tests
# ---------------------------------------------------------------------------

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])


def ms(theta: float) -> np.ndarray:
    return math.cos(theta / 2) * np.eye(4) - 1j * math.sin(theta / 2) * np.kron(X, X)


def embed(gate: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Expand a 1- or 2-qubit gate onto an n-qubit register (big-endian)."""
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    k = len(qubits)
    for row in range(dim):
        bits = [(row >> (n - 1 - i)) & 1 for i in range(n)]
        sub_row = 0
        for q in qubits:
            sub_row = (sub_row << 1) | bits[q]
        for sub_col in range(2**k):
            amp = gate[sub_row, sub_col]
            if amp == 0:
                continue
            new_bits = list(bits)
            for j, q in enumerate(qubits):
                new_bits[q] = (sub_col >> (k - 1 - j)) & 1
            col = 0
            for b in new_bits:
                col = (col << 1) | b
            out[row, col] += amp
    return out


def native_unitary(ops, n: int) -> np.ndarray:
    """Unitary of a native-op list (time order) on n qubits."""
    U = np.eye(2**n, dtype=complex)
    table = {"RX": rx, "RY": ry, "RZ": rz}
    for op in ops:
        kind = op.kind.value
        if kind == "MS":
            g = ms(op.angle)
        else:
            g = table[kind](op.angle)
        U = embed(g, op.qubits, n) @ U
    return U


def logical_unitary(gates, n: int) -> np.ndarray:
    U = np.eye(2**n, dtype=complex)
    for g in gates:
        if g.name == "H":
            U = embed(H, g.qubits, n) @ U
        elif g.name == "CX":
            U = embed(CNOT, g.qubits, n) @ U
        else:
            raise ValueError(f"non-unitary gate {g.name}")
    return U


def equal_up_to_phase(U: np.ndarray, V: np.ndarray, tol: float = 1e-10) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(V)), V.shape)
    if abs(U[idx]) < tol:
        return False
    phase = U[idx] / V[idx]
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.allclose(U, phase * V, atol=tol))


# ---------------------------------------------------------------------------
# Stabilizer tableau (Aaronson-Gottesman) for replaying stim documents
# ---------------------------------------------------------------------------


class Tableau:
    """CHP-style stabilizer simulator supporting R, H, CX, M."""

    def __init__(self, n: int, rng=None):
        self.n = n
        self.rng = rng
        size = 2 * n + 1
        self.x = np.zeros((size, n), dtype=np.uint8)
        self.z = np.zeros((size, n), dtype=np.uint8)
        self.r = np.zeros(size, dtype=np.uint8)
        for i in range(n):
            self.x[i, i] = 1  # destabilizers
            self.z[n + i, i] = 1  # stabilizers

    def hadamard(self, q: int) -> None:
        xq = self.x[:, q].copy()
        zq = self.z[:, q].copy()
        self.r ^= xq & zq
        self.x[:, q], self.z[:, q] = zq, xq

    def cnot(self, c: int, t: int) -> None:
        self.r ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ 1)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def phase(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def x_gate(self, q: int) -> None:
        self.r ^= self.z[:, q]

    def z_gate(self, q: int) -> None:
        self.r ^= self.x[:, q]

    def _rowsum(self, h: int, i: int) -> None:
        phase = 2 * (int(self.r[h]) + int(self.r[i]))
        xi, zi = self.x[i], self.z[i]
        xh, zh = self.x[h], self.z[h]
        g = np.zeros(self.n, dtype=np.int64)
        both_i = (xi == 1) & (zi == 1)
        g[both_i] = zh[both_i].astype(np.int64) - xh[both_i].astype(np.int64)
        only_x = (xi == 1) & (zi == 0)
        g[only_x] = (zh[only_x] * (2 * xh[only_x].astype(np.int64) - 1))
        only_z = (xi == 0) & (zi == 1)
        g[only_z] = (xh[only_z] * (1 - 2 * zh[only_z].astype(np.int64)))
        phase += int(g.sum())
        self.r[h] = (phase % 4) // 2
        self.x[h] ^= xi
        self.z[h] ^= zi

    def measure(self, q: int) -> tuple[int, bool]:
        """Measure qubit q in Z basis.  Returns (value, deterministic)."""
        n = self.n
        p = None
        for i in range(n, 2 * n):
            if self.x[i, q]:
                p = i
                break
        if p is not None:
            for i in range(2 * n):
                if i != p and self.x[i, q]:
                    self._rowsum(i, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            bit = self.rng.integers(0, 2) if self.rng is not None else 0
            self.r[p] = bit
            return int(bit), False
        scratch = 2 * n
        self.x[scratch] = 0
        self.z[scratch] = 0
        self.r[scratch] = 0
        for i in range(n):
            if self.x[i, q]:
                self._rowsum(scratch, i + n)
        return int(self.r[scratch]), True

    def reset(self, q: int) -> None:
        value, _ = self.measure(q)
        if value:
            self.x_gate(q)


def sample_stim_noiseless(text: str, rng=None):
    """Replay a stim document's gates (skipping noise lines) and return
    (detector values, detector determinism flags, observable value,
    observable deterministic)."""
    n = 0
    gate_lines = []
    detector_lines = []
    observable_line = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        head = line.split("(")[0].split()[0]
        if head == "QUBIT_COORDS":
            n = max(n, int(line.split()[-1]) + 1)
        elif head in ("R", "H", "CX", "M"):
            gate_lines.append(line)
        elif head == "DETECTOR":
            detector_lines.append(line)
        elif head == "OBSERVABLE_INCLUDE":
            observable_line = line
    tab = Tableau(n, rng=rng)
    records: list[tuple[int, bool]] = []
    for line in gate_lines:
        parts = line.split()
        name, args = parts[0], [int(p) for p in parts[1:]]
        if name == "R":
            for q in args:
                tab.reset(q)
        elif name == "H":
            for q in args:
                tab.hadamard(q)
        elif name == "CX":
            for c, t in zip(args[::2], args[1::2]):
                tab.cnot(c, t)
        elif name == "M":
            for q in args:
                records.append(tab.measure(q))

    def parse_recs(line: str) -> list[int]:
        body = line.split(")", 1)[1] if "(" in line.split()[0] else line.split(" ", 1)[1]
        out = []
        for token in body.split():
            assert token.startswith("rec[") and token.endswith("]")
            out.append(len(records) + int(token[4:-1]))
        return out

    det_values = []
    det_deterministic = []
    for line in detector_lines:
        idxs = parse_recs(line)
        det_values.append(sum(records[i][0] for i in idxs) % 2)
        det_deterministic.append(all(records[i][1] for i in idxs))
    obs_value, obs_det = 0, True
    if observable_line is not None:
        idxs = parse_recs(observable_line)
        obs_value = sum(records[i][0] for i in idxs) % 2
        obs_det = all(records[i][1] for i in idxs)
    return det_values, det_deterministic, obs_value, obs_det
