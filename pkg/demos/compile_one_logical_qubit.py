"""Walk one configuration through the full compilation flow.

A distance-3 rotated surface code is mapped onto a capacity-2 grid QCCD
device, routed, scheduled and noise-annotated; along the way we print what
each stage produced.  Run:  python demos/compile_one_logical_qubit.py
"""

from qccdc import codes, noise, place, resources, route, schedule, translate
from qccdc.device import device_for_code

# 1. the code and its syndrome-extraction circuit -------------------------
layout = codes.build_layout("rotated_surface", 3)
print(f"layout: {layout.n_qubits} qubits "
      f"({len(layout.data_ids())} data, {len(layout.ancilla_ids())} checks)")

circuit = codes.generate_memory_experiment(layout, rounds=5)
print(f"memory experiment: {len(circuit.gates)} logical gates over 5 rounds")

# 2. lower to the native trapped-ion gate set -----------------------------
native = translate.decompose(circuit)
kinds = native.counts()
print("native ops:", {k.value: v for k, v in sorted(kinds.items(), key=lambda kv: kv[0].value)})

# 3. hardware target and placement ----------------------------------------
device = device_for_code(layout, capacity=2, topology="grid")
print(f"device: {device.counts()}")
mapping = place.place(layout, device)
print(f"placement: {len(mapping.qubit_to_slot)} qubits across "
      f"{len(set(mapping.home.values()))} traps")

# 4. routing: movement primitives so every MS gate is co-located ----------
stream = route.route_circuit(native, mapping, device)
moves = route.count_movement(stream)
print(f"routing: {moves.n_movement_ops} movement primitives, "
      f"{moves.n_hops} trap-to-trap hops, {moves.n_gate_swaps} gate swaps")

# 5. schedule against the hardware timing table ---------------------------
sched = schedule.build_schedule(stream, device)
m = schedule.metrics(sched, rounds=5)
print(f"schedule: {m.elapsed_per_round:.0f} us per round "
      f"({m.movement_time} us with ions in flight)")

# 6. noise annotation and the hardware bill --------------------------------
noisy = noise.annotate(sched, noise.NoiseParams(gate_improvement=5.0))
print(f"noise: {len(noisy.channels)} stochastic Pauli channels at 5x improvement")
est = resources.estimate(device.counts(), device.wiring)
print(f"resources: {est.n_electrodes} electrodes, {est.n_dacs} DACs, "
      f"{est.data_rate_gbit_s:.1f} Gbit/s, {est.power_w:.1f} W")
