"""Hardware resource estimation: electrodes, DACs, data rate and power.

Zone accounting: every trap contributes `capacity` linear zones and every
junction one junction zone.  Linear zones carry 10 dynamic electrodes,
junction zones 20, and every zone carries 10 shim electrodes.  Standard
wiring drives each electrode with its own DAC; WISE shares about 100 DACs
for all dynamic electrodes plus one DAC per 100 shim electrodes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .device import DeviceCounts, Wiring

DYNAMIC_PER_LINEAR_ZONE = 10
DYNAMIC_PER_JUNCTION_ZONE = 20
SHIM_PER_ZONE = 10
WISE_BASE_DACS = 100
WISE_SHIM_PER_DAC = 100
DATA_RATE_MBIT_PER_CHANNEL = 50
POWER_MW_PER_CHANNEL = 30


@dataclass(frozen=True)
class ResourceEstimate:
    n_linear_zones: int
    n_junction_zones: int
    n_dynamic_electrodes: int
    n_shim_electrodes: int
    n_electrodes: int
    n_dacs: int
    data_rate_mbit_s: float
    power_mw: float

    @property
    def data_rate_gbit_s(self) -> float:
        return self.data_rate_mbit_s / 1000.0

    @property
    def power_w(self) -> float:
        return self.power_mw / 1000.0


def estimate(counts: DeviceCounts, wiring: Wiring | str) -> ResourceEstimate:
    if isinstance(wiring, str):
        wiring = Wiring.parse(wiring)
    n_lz = counts.n_traps * counts.capacity
    n_jz = counts.n_junctions
    n_de = DYNAMIC_PER_LINEAR_ZONE * n_lz + DYNAMIC_PER_JUNCTION_ZONE * n_jz
    n_se = SHIM_PER_ZONE * (n_lz + n_jz)
    n_e = n_de + n_se
    if wiring is Wiring.STANDARD:
        n_dacs = n_e
    else:
        n_dacs = WISE_BASE_DACS + -(-n_se // WISE_SHIM_PER_DAC)  # ceil division
    channels = n_e if wiring is Wiring.STANDARD else n_dacs
    return ResourceEstimate(
        n_linear_zones=n_lz,
        n_junction_zones=n_jz,
        n_dynamic_electrodes=n_de,
        n_shim_electrodes=n_se,
        n_electrodes=n_e,
        n_dacs=n_dacs,
        data_rate_mbit_s=DATA_RATE_MBIT_PER_CHANNEL * channels,
        power_mw=POWER_MW_PER_CHANNEL * channels,
    )


@dataclass(frozen=True)
class TargetResult:
    reached: bool
    n_electrodes: int | None = None
    distance: int | None = None
    capacity: int | None = None


def electrodes_for_target(
    rows: list[dict],
    target_ler: float,
) -> TargetResult:
    """Smallest electrode count over sweep rows achieving the target logical
    error rate.  Rows need keys: distance, capacity, ler, n_electrodes."""
    feasible = [r for r in rows if r["ler"] <= target_ler]
    if not feasible:
        return TargetResult(reached=False)
    best = min(feasible, key=lambda r: (r["n_electrodes"], r["distance"], r["capacity"]))
    return TargetResult(
        reached=True,
        n_electrodes=best["n_electrodes"],
        distance=best["distance"],
        capacity=best["capacity"],
    )
