"""Five-channel stochastic Pauli noise model with movement-induced heating.

Channels: idle dephasing (Z), depolarizing after one- and two-qubit gates,
reset bit flips and measurement bit flips.  Gate error probabilities combine
a background heating term (gamma * duration) with a thermal-motion term
A0 * ln(N)/N * (2*nbar + 1), where N is the trap chain length at gate time
and nbar accumulates per movement primitive and resets when the ion's qubit
is reset.  A gate improvement factor f >= 1 divides every emitted
probability exactly, so a 10x improvement gives 10x lower error rates.

Movement primitives agitate the moved ion at their characteristic heating
rates (quanta per second of transport: 0.1 shuttling, 6 split/merge, 3
junction crossing), accumulating rate x duration motional quanta between
resets.  Default gamma and A0 are anchored so that at a 5x gate improvement
a two-qubit gate on a fresh 2-ion chain costs 1e-3 error with the gamma
term holding 10% of the budget; the one-qubit anchor is 1e-4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .route import MOVE_KINDS, OpKind, OpStream, StreamOp
from .schedule import Schedule

_LN2_OVER_2 = math.log(2.0) / 2.0
_P2Q_ANCHOR = 5e-3  # two-qubit error at f=1 on a fresh 2-ion chain
_GAMMA_SHARE = 0.1  # fraction of the anchor carried by gamma * tau at 40 us

DEFAULT_GAMMA = _GAMMA_SHARE * _P2Q_ANCHOR / 40e-6  # 12.5 /s
DEFAULT_A0_2Q = (1 - _GAMMA_SHARE) * _P2Q_ANCHOR / _LN2_OVER_2
DEFAULT_A0_1Q = DEFAULT_A0_2Q / 10

# Heating rates per movement primitive, in motional quanta per second
# (upper bounds); an op adds rate x duration to the moved ion.
HEATING_RATES = {
    OpKind.SHUTTLE: 0.1,
    OpKind.SPLIT: 6.0,
    OpKind.MERGE: 6.0,
    OpKind.JUNCTION_ENTRY: 3.0,
    OpKind.JUNCTION_EXIT: 3.0,
    OpKind.GATE_SWAP: 0.0,
}


@dataclass(frozen=True)
class NoiseParams:
    t2_s: float = 2.2
    p_reset: float = 5e-3
    p_meas: float = 1e-3
    gamma_per_s: float = DEFAULT_GAMMA
    a0_2q: float = DEFAULT_A0_2Q
    a0_1q: float = DEFAULT_A0_1Q
    gate_improvement: float = 1.0
    cooling: bool = False
    cooled_p2q: float = 2e-3
    cooled_p1q: float = 3e-3

    def __post_init__(self) -> None:
        if self.gate_improvement < 1:
            raise ValueError("gate_improvement must be >= 1")
        if self.t2_s <= 0:
            raise ValueError("t2 must be positive")
        for name in ("p_reset", "p_meas", "cooled_p2q", "cooled_p1q"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must be a probability")

    def with_improvement(self, f: float) -> "NoiseParams":
        return replace(self, gate_improvement=f)

    @classmethod
    def from_config(cls, doc: dict) -> "NoiseParams":
        """Build parameters from a declarative config mapping; unknown keys
        are rejected so sweeps fail loudly on typos."""
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown noise parameter(s): {sorted(unknown)}")
        return cls(**doc)


class ChannelKind(enum.Enum):
    DEPHASE_Z = "Z_ERROR"
    DEPOLARIZE1 = "DEPOLARIZE1"
    DEPOLARIZE2 = "DEPOLARIZE2"
    FLIP_X = "X_ERROR"


@dataclass(frozen=True)
class NoiseChannel:
    kind: ChannelKind
    qubits: tuple[int, ...]
    probability: float
    op_id: int  # the op the channel is attached to
    time: int  # schedule time the channel applies at
    position: str = "after"  # "before" (idle gaps, measure flips) or "after"


@dataclass
class NoisyCircuit:
    schedule: Schedule
    channels: list[NoiseChannel]
    params: NoiseParams
    nbar_at_gate: dict[int, float] = field(default_factory=dict)


def dephasing_prob(t_idle_us: float, params: NoiseParams) -> float:
    """Idle dephasing probability over a gap of t microseconds."""
    if t_idle_us < 0:
        raise ValueError("idle time must be non-negative")
    base = (1.0 - math.exp(-t_idle_us * 1e-6 / params.t2_s)) / 2.0
    return base / params.gate_improvement


def gate_error_prob(
    kind: str,
    tau_us: float,
    chain_nbar: float,
    chain_length: int,
    params: NoiseParams,
) -> float:
    """Depolarizing probability for a gate ('1q' or '2q')."""
    if chain_length < 1:
        raise ValueError("chain length must be >= 1")
    if params.cooling:
        p = params.cooled_p2q if kind == "2q" else params.cooled_p1q
        return min(1.0, p / params.gate_improvement)
    a0 = params.a0_2q if kind == "2q" else params.a0_1q
    scale = math.log(chain_length) / chain_length if chain_length > 1 else 0.0
    p = params.gamma_per_s * tau_us * 1e-6 + a0 * scale * (2.0 * chain_nbar + 1.0)
    return min(1.0, p / params.gate_improvement)


def accumulate_heating(schedule: Schedule, params: NoiseParams) -> tuple[dict[int, float], dict[int, float]]:
    """Per-gate chain nbar (sum over operand ions) at every gate op.

    Replays the schedule in time order: each movement primitive heats the
    moved ion by its rate times its duration, a qubit reset clears its ion,
    and cooling mode suppresses heating entirely.  Returns (chain nbar per
    gate op id, final nbar per ion).
    """
    nbar: dict[int, float] = {q: 0.0 for q in schedule.stream.qubit_ids}
    at_gate: dict[int, float] = {}
    order = sorted(
        range(len(schedule.stream.ops)),
        key=lambda i: (schedule.starts[i], i),
    )
    for i in order:
        op = schedule.stream.ops[i]
        if op.kind in MOVE_KINDS:
            if not params.cooling:
                duration_s = (schedule.ends[i] - schedule.starts[i]) * 1e-6
                nbar[op.ion] = nbar[op.ion] + HEATING_RATES[op.kind] * duration_s
            continue
        if op.kind is OpKind.RESET:
            at_gate[op.id] = nbar[op.ion]
            nbar[op.ion] = 0.0
        elif op.is_gate():
            at_gate[op.id] = sum(nbar[q] for q in op.qubits)
    return at_gate, nbar


def _trap_population(schedule: Schedule) -> dict[int, int]:
    """Chain length (ions present in the gate's trap) for every gate op."""
    stream = schedule.stream
    pops: dict[int, int] = {}
    ion_trap: dict[int, int | None] = {}
    order = sorted(range(len(stream.ops)), key=lambda i: (schedule.starts[i], i))
    # Seed: the router guarantees ions rest in traps at stream start; their
    # home trap is the trap of their first op.
    counts: dict[int, int] = {}
    for i in order:
        op = stream.ops[i]
        for q in op.qubits:
            if q not in ion_trap and op.trap is not None:
                ion_trap[q] = op.trap
    for q, t in ion_trap.items():
        if t is not None:
            counts[t] = counts.get(t, 0) + 1
    for i in order:
        op = stream.ops[i]
        if op.kind is OpKind.SPLIT:
            counts[op.trap] = counts.get(op.trap, 0) - 1
            ion_trap[op.ion] = None
        elif op.kind is OpKind.MERGE:
            counts[op.trap] = counts.get(op.trap, 0) + 1
            ion_trap[op.ion] = op.trap
        elif op.is_gate():
            pops[op.id] = max(1, counts.get(op.trap, 1))
    return pops


def annotate(schedule: Schedule, params: NoiseParams) -> NoisyCircuit:
    """Attach stochastic Pauli channels to a schedule.

    Emits, in deterministic order: one dephasing channel per positive idle
    gap between consecutive gates on a qubit, one depolarizing channel per
    rotation and per MS gate (three per gate swap), an X flip after every
    reset and before every measurement.  Channels with probability zero are
    omitted.
    """
    stream = schedule.stream
    timing = schedule.timing
    nbar_at_gate, _ = accumulate_heating(schedule, params)
    pops = _trap_population(schedule)
    channels: list[NoiseChannel] = []

    last_gate_end: dict[int, int] = {}
    order = sorted(range(len(stream.ops)), key=lambda i: (schedule.starts[i], i))
    for i in order:
        op = stream.ops[i]
        if not op.is_gate() and op.kind is not OpKind.GATE_SWAP:
            continue
        start, end = schedule.starts[i], schedule.ends[i]
        tau = end - start
        for q in op.qubits:
            gap = start - last_gate_end.get(q, 0)
            if gap > 0:
                p = dephasing_prob(gap, params)
                if p > 0:
                    channels.append(
                        NoiseChannel(
                            ChannelKind.DEPHASE_Z, (q,), p, op.id, start, "before"
                        )
                    )
            last_gate_end[q] = end
        if op.kind is OpKind.GATE_SWAP:
            tau_ms = timing.ms_gate + (timing.cooling_extra_2q if schedule.cooling else 0)
            nbar = nbar_at_gate.get(op.id, 0.0)
            p = gate_error_prob("2q", tau_ms, nbar, pops.get(op.id, 2), params)
            for _ in range(3):
                if p > 0:
                    channels.append(
                        NoiseChannel(ChannelKind.DEPOLARIZE2, op.qubits, p, op.id, end)
                    )
        elif op.kind is OpKind.MS:
            nbar = nbar_at_gate.get(op.id, 0.0)
            p = gate_error_prob("2q", tau, nbar, pops.get(op.id, 2), params)
            if p > 0:
                channels.append(
                    NoiseChannel(ChannelKind.DEPOLARIZE2, op.qubits, p, op.id, end)
                )
        elif op.kind in (OpKind.RX, OpKind.RY, OpKind.RZ):
            nbar = nbar_at_gate.get(op.id, 0.0)
            p = gate_error_prob("1q", tau, nbar, pops.get(op.id, 1), params)
            if p > 0:
                channels.append(
                    NoiseChannel(ChannelKind.DEPOLARIZE1, op.qubits, p, op.id, end)
                )
        elif op.kind is OpKind.RESET:
            p = params.p_reset / params.gate_improvement
            if p > 0:
                channels.append(
                    NoiseChannel(ChannelKind.FLIP_X, op.qubits, p, op.id, end)
                )
        elif op.kind is OpKind.MEASURE:
            p = params.p_meas / params.gate_improvement
            if p > 0:
                channels.append(
                    NoiseChannel(ChannelKind.FLIP_X, op.qubits, p, op.id, start, "before")
                )
    return NoisyCircuit(schedule=schedule, channels=channels, params=params, nbar_at_gate=nbar_at_gate)
