"""Sweep trap capacities and code distances, then look at the trade-offs.

Reproduces the headline design-space result: capacity-2 grid devices hold a
constant QEC round time as the code grows, while larger traps serialize and
slow down.  Run:  python demos/design_space_sweep.py
"""

from qccdc.compiler import CompileConfig, compile_config

print(f"{'config':>12} {'round time us':>14} {'movement ops':>13} {'electrodes':>11}")
for capacity in (2, 5, 12):
    for distance in (2, 3, 4, 5):
        cfg = CompileConfig(distance=distance, capacity=capacity, rounds=5)
        res = compile_config(cfg)
        m = res.metrics
        print(
            f"{cfg.tuple_str():>12} {m.elapsed_per_round:>14.0f} "
            f"{m.n_movement_ops:>13} {res.resource.n_electrodes:>11}"
        )
    print()

print("capacity 2 stays flat; larger traps trade movement for serialization")
