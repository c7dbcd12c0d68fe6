"""End-to-end compilation of one configuration.

Pipeline: layout -> parity-check circuit -> native gates -> placement ->
routing -> schedule -> noise annotation -> Stim document + metrics +
resource estimate.  Configurations are hashable value objects and accept
the 4-tuple shorthand "CODE,distance,capacity,TOPOLOGY" (e.g. "S,3,2,G").
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import codes, emit, noise, place, resources, route, schedule, translate
from .codes import CodeKind, CodeLayout, LogicalCircuit
from .device import QccdDevice, Topology, Wiring, device_for_code
from .noise import NoiseParams, NoisyCircuit
from .place import Mapping
from .resources import ResourceEstimate
from .route import OpStream
from .schedule import Schedule, ScheduleMetrics, TimingTable, native_critical_path

_CODE_LETTER = {
    CodeKind.ROTATED_SURFACE: "S",
    CodeKind.REPETITION: "R",
    CodeKind.UNROTATED_SURFACE: "U",
}
_TOPO_LETTER = {
    Topology.GRID: "G",
    Topology.LINEAR: "L",
    Topology.SWITCH: "S",
    Topology.SINGLE_CHAIN: "C",
}


@dataclass(frozen=True)
class CompileConfig:
    code: CodeKind = CodeKind.ROTATED_SURFACE
    distance: int = 3
    capacity: int = 2
    topology: Topology = Topology.GRID
    wiring: Wiring = Wiring.STANDARD
    gate_improvement: float = 1.0
    rounds: int = 5
    cooling: bool | None = None  # None: cooling iff WISE wiring
    seed: int = 0  # recorded for reproducibility; compilation is deterministic

    def __post_init__(self) -> None:
        if self.distance < 2:
            raise ValueError(f"distance must be >= 2, got {self.distance}")
        if self.topology is not Topology.SINGLE_CHAIN and self.capacity < 2:
            raise ValueError("capacity must be >= 2 (capacity 1 cannot host a two-qubit gate)")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.gate_improvement < 1:
            raise ValueError("gate improvement must be >= 1")

    @property
    def cooling_enabled(self) -> bool:
        if self.cooling is None:
            return self.wiring is Wiring.WISE
        return self.cooling

    def tuple_str(self) -> str:
        return (
            f"{_CODE_LETTER[self.code]},{self.distance},"
            f"{self.capacity},{_TOPO_LETTER[self.topology]}"
        )

    def stem(self) -> str:
        cool = "cool" if self.cooling_enabled else "nocool"
        return (
            f"{_CODE_LETTER[self.code]}{self.distance}_c{self.capacity}_"
            f"{self.topology.value}_{self.wiring.value}_{cool}_f{self.gate_improvement:g}_r{self.rounds}"
        )

    @classmethod
    def from_tuple(cls, text: str, **overrides) -> "CompileConfig":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected CODE,distance,capacity,TOPOLOGY, got {text!r}")
        code = CodeKind.parse(parts[0])
        topology = Topology.parse(parts[3])
        return cls(
            code=code,
            distance=int(parts[1]),
            capacity=int(parts[2]),
            topology=topology,
            **overrides,
        )


@dataclass
class CompileResult:
    config: CompileConfig
    layout: CodeLayout
    circuit: LogicalCircuit
    device: QccdDevice
    mapping: Mapping
    stream: OpStream
    schedule: Schedule
    metrics: ScheduleMetrics
    noisy: NoisyCircuit
    stim_text: str
    resource: ResourceEstimate
    gate_bound_us: int


def compile_config(
    config: CompileConfig,
    timing: TimingTable | None = None,
    noise_params: NoiseParams | None = None,
) -> CompileResult:
    timing = timing or TimingTable()
    layout = codes.build_layout(config.code, config.distance)
    circuit = codes.generate_memory_experiment(layout, config.rounds)
    native = translate.decompose(circuit)
    dev = device_for_code(layout, config.capacity, config.topology, config.wiring)
    mapping = place.place(layout, dev)
    stream = route.route_circuit(native, mapping, dev)
    sched = schedule.build_schedule(
        stream, dev, config.wiring, timing, cooling=config.cooling_enabled
    )
    m = schedule.metrics(sched, config.rounds)
    gate_bound = native_critical_path(native, timing, cooling=config.cooling_enabled)
    params = noise_params or NoiseParams()
    params = replace(
        params,
        gate_improvement=config.gate_improvement,
        cooling=config.cooling_enabled,
    )
    noisy = noise.annotate(sched, params)
    stim_text = emit.to_stim(noisy, layout, config.rounds)
    resource = resources.estimate(dev.counts(), config.wiring)
    return CompileResult(
        config=config,
        layout=layout,
        circuit=circuit,
        device=dev,
        mapping=mapping,
        stream=stream,
        schedule=sched,
        metrics=m,
        noisy=noisy,
        stim_text=stim_text,
        resource=resource,
        gate_bound_us=gate_bound,
    )
