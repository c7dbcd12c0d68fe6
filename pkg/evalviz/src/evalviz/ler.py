"""Logical-error-rate estimation: sample, decode, count, bound.

Per-shot failure probability converts to per-round via
p_round = 1 - (1 - p_shot)^(1/rounds); confidence intervals are Wilson
intervals on the shot counts mapped through the same transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .decoder import MatchingDecoder
from .dem import build_error_model
from .sampler import sample_detectors
from .stim_text import Circuit, parse_file


@dataclass(frozen=True)
class LerEstimate:
    shots: int
    failures: int
    rounds: int
    p_shot: float
    ler_per_round: float
    ci_low: float  # per-round, 95%
    ci_high: float

    def overlaps(self, other: "LerEstimate") -> bool:
        return not (self.ci_high < other.ci_low or other.ci_high < self.ci_low)


def wilson_interval(failures: int, shots: int, z: float = 1.96) -> tuple[float, float]:
    if shots == 0:
        return (0.0, 1.0)
    p = failures / shots
    denom = 1 + z * z / shots
    centre = (p + z * z / (2 * shots)) / denom
    half = z * math.sqrt(p * (1 - p) / shots + z * z / (4 * shots * shots)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def per_round(p_shot: float, rounds: int) -> float:
    p_shot = min(max(p_shot, 0.0), 1.0)
    return 1.0 - (1.0 - p_shot) ** (1.0 / rounds)


def estimate_circuit(circuit: Circuit, shots: int, seed: int = 0) -> LerEstimate:
    if shots < 1000:
        raise ValueError("need at least 1000 shots for a meaningful estimate")
    det, obs_actual = sample_detectors(circuit, shots, seed=seed)
    decoder = MatchingDecoder.from_model(build_error_model(circuit))
    obs_predicted = decoder.decode_batch(det)
    failures = int((obs_predicted ^ obs_actual).sum())
    rounds = circuit.rounds
    p_shot = failures / shots
    low, high = wilson_interval(failures, shots)
    return LerEstimate(
        shots=shots,
        failures=failures,
        rounds=rounds,
        p_shot=p_shot,
        ler_per_round=per_round(p_shot, rounds),
        ci_low=per_round(low, rounds),
        ci_high=per_round(high, rounds),
    )


def estimate_ler(stim_path: str, shots: int, seed: int = 0) -> LerEstimate:
    """Monte-Carlo logical error rate of an emitted Stim document."""
    return estimate_circuit(parse_file(stim_path), shots, seed=seed)
