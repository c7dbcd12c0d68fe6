"""Parser for the Stim text-circuit subset the compiler emits.

Supported instructions: QUBIT_COORDS, R, H, CX, M, X_ERROR, Z_ERROR,
DEPOLARIZE1, DEPOLARIZE2, DETECTOR (with optional coordinate arguments and
rec[-k] targets) and OBSERVABLE_INCLUDE.  Record lookbacks are resolved to
absolute measurement indices at parse time, as in the Stim semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

GATE_NAMES = ("R", "H", "CX", "M")
NOISE_NAMES = ("X_ERROR", "Z_ERROR", "DEPOLARIZE1", "DEPOLARIZE2")

_REC_RE = re.compile(r"^rec\[(-\d+)\]$")


class StimParseError(ValueError):
    pass


@dataclass(frozen=True)
class Instruction:
    name: str
    targets: tuple[int, ...]
    arg: float | None = None


@dataclass
class Circuit:
    n_qubits: int
    instructions: list[Instruction]
    coords: dict[int, tuple[float, ...]]
    detectors: list[tuple[int, ...]]  # absolute measurement indices
    detector_coords: list[tuple[float, ...] | None]
    observables: dict[int, list[int]]
    n_measurements: int

    @property
    def rounds(self) -> int:
        """Number of parity-check rounds, read off the detector time axis."""
        times = [c[-1] for c in self.detector_coords if c]
        return int(max(times)) if times else 1


def _split_args(line: str) -> tuple[str, list[float], list[str]]:
    head, _, rest = line.partition(" ")
    args: list[float] = []
    if "(" in head:
        name, _, arg_text = head.partition("(")
        if not arg_text.endswith(")"):
            # arguments may contain spaces: re-join until the closing paren
            joined = line[len(name) + 1 :]
            arg_text, _, rest = joined.partition(")")
            rest = rest.strip()
        else:
            arg_text = arg_text[:-1]
        args = [float(a) for a in arg_text.split(",") if a.strip()]
    else:
        name = head
    return name, args, rest.split()


def parse(text: str) -> Circuit:
    instructions: list[Instruction] = []
    coords: dict[int, tuple[float, ...]] = {}
    detectors: list[tuple[int, ...]] = []
    detector_coords: list[tuple[float, ...] | None] = []
    observables: dict[int, list[int]] = {}
    n_meas = 0
    n_qubits = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, args, fields = _split_args(line)
        if name == "QUBIT_COORDS":
            if len(fields) != 1:
                raise StimParseError(f"line {lineno}: QUBIT_COORDS wants one target")
            q = int(fields[0])
            coords[q] = tuple(args)
            n_qubits = max(n_qubits, q + 1)
        elif name in GATE_NAMES:
            targets = tuple(int(f) for f in fields)
            if not targets:
                raise StimParseError(f"line {lineno}: {name} without targets")
            if name == "CX" and len(targets) % 2:
                raise StimParseError(f"line {lineno}: CX needs target pairs")
            n_qubits = max(n_qubits, max(targets) + 1)
            instructions.append(Instruction(name, targets))
            if name == "M":
                n_meas += len(targets)
        elif name in NOISE_NAMES:
            if len(args) != 1 or not 0 <= args[0] <= 1:
                raise StimParseError(f"line {lineno}: {name} needs one probability")
            targets = tuple(int(f) for f in fields)
            if name == "DEPOLARIZE2" and len(targets) % 2:
                raise StimParseError(f"line {lineno}: DEPOLARIZE2 needs pairs")
            n_qubits = max(n_qubits, max(targets) + 1)
            instructions.append(Instruction(name, targets, args[0]))
        elif name == "DETECTOR":
            recs = _parse_recs(fields, n_meas, lineno)
            detectors.append(recs)
            detector_coords.append(tuple(args) if args else None)
        elif name == "OBSERVABLE_INCLUDE":
            if len(args) != 1:
                raise StimParseError(f"line {lineno}: OBSERVABLE_INCLUDE needs an index")
            recs = _parse_recs(fields, n_meas, lineno)
            observables.setdefault(int(args[0]), []).extend(recs)
        elif name in ("TICK", "SHIFT_COORDS"):
            continue
        else:
            raise StimParseError(f"line {lineno}: unsupported instruction {name!r}")
    return Circuit(
        n_qubits=n_qubits,
        instructions=instructions,
        coords=coords,
        detectors=detectors,
        detector_coords=detector_coords,
        observables=observables,
        n_measurements=n_meas,
    )


def _parse_recs(fields: list[str], n_meas: int, lineno: int) -> tuple[int, ...]:
    out = []
    for f in fields:
        m = _REC_RE.match(f)
        if not m:
            raise StimParseError(f"line {lineno}: expected rec[-k], got {f!r}")
        offset = int(m.group(1))
        index = n_meas + offset
        if index < 0:
            raise StimParseError(f"line {lineno}: lookback {offset} out of range")
        out.append(index)
    return tuple(out)


def parse_file(path: str) -> Circuit:
    with open(path) as fh:
        return parse(fh.read())
