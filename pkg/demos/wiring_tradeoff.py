"""Standard vs WISE control wiring: bandwidth and power against round time.

Direct wiring drives every electrode with its own DAC (fast, power-hungry);
the switched demultiplexer shares about a hundred DACs but serializes
movement primitives by kind.  Run:  python demos/wiring_tradeoff.py
"""

from qccdc.codes import build_layout
from qccdc.compiler import CompileConfig, compile_config
from qccdc.device import Wiring, device_for_code
from qccdc.resources import estimate

print("hardware scaling (capacity-2 grid, per logical qubit):")
print(f"{'d':>3} {'electrodes':>11} {'std Gbit/s':>11} {'std W':>8} {'wise Gbit/s':>12} {'wise W':>8}")
for d in (3, 5, 7, 9, 12):
    counts = device_for_code(build_layout("rotated_surface", d), 2, "grid").counts()
    std = estimate(counts, Wiring.STANDARD)
    wise = estimate(counts, Wiring.WISE)
    print(
        f"{d:>3} {std.n_electrodes:>11} {std.data_rate_gbit_s:>11.2f} "
        f"{std.power_w:>8.1f} {wise.data_rate_gbit_s:>12.3f} {wise.power_w:>8.3f}"
    )

print("\nround-time cost of the shared wiring (d=3, capacity 2):")
for wiring in (Wiring.STANDARD, Wiring.WISE):
    cfg = CompileConfig(distance=3, capacity=2, wiring=wiring, rounds=5)
    res = compile_config(cfg)
    cool = "with cooling" if cfg.cooling_enabled else "no cooling"
    print(f"  {wiring.value:>8} ({cool}): {res.metrics.elapsed_per_round:.0f} us per round")
