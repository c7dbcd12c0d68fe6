"""Evaluation front end: estimate logical error rates for compiled sweep
outputs and render figure families.

`evalviz ler` walks the rows of a compiler metrics.csv, samples and decodes
each referenced .stim document, and writes ler.csv with per-round estimates
and Wilson confidence bounds.  `evalviz plot` renders a figure family from
metrics.csv (+ ler.csv where needed).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .ler import estimate_ler
from .plots import FAMILIES, plot_family, read_ler, read_metrics

LER_COLUMNS = [
    "code",
    "distance",
    "capacity",
    "topology",
    "wiring",
    "gate_improvement",
    "rounds",
    "shots",
    "failures",
    "p_shot",
    "ler_per_round",
    "ci_low",
    "ci_high",
    "stim_path",
]


def _default_shots(distance: int) -> int:
    return 100_000 if distance <= 5 else 10_000


def cmd_ler(args: argparse.Namespace) -> int:
    rows = read_metrics(args.metrics)
    base = os.path.dirname(os.path.abspath(args.metrics))
    out_rows = []
    for row in rows:
        stim_path = row["stim_path"]
        if not stim_path:
            continue
        full = stim_path if os.path.isabs(stim_path) else os.path.join(base, stim_path)
        shots = args.shots or _default_shots(int(row["distance"]))
        est = estimate_ler(full, shots, seed=args.seed)
        out_rows.append(
            {
                "code": row["code"],
                "distance": row["distance"],
                "capacity": row["capacity"],
                "topology": row["topology"],
                "wiring": row["wiring"],
                "gate_improvement": row["gate_improvement"],
                "rounds": est.rounds,
                "shots": est.shots,
                "failures": est.failures,
                "p_shot": est.p_shot,
                "ler_per_round": est.ler_per_round,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "stim_path": stim_path,
            }
        )
        print(
            f"{row['code']},{row['distance']},{row['capacity']},{row['topology']}"
            f" f={row['gate_improvement']}: {est.failures}/{est.shots} failures,"
            f" per-round LER {est.ler_per_round:.3e}"
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LER_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(out_rows)
    print(f"wrote {len(out_rows)} estimates -> {args.out}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    metrics_rows = read_metrics(args.metrics) if args.metrics else []
    ler_rows = read_ler(args.ler) if args.ler else None
    families = FAMILIES if args.family == "all" else (args.family,)
    written: list[str] = []
    for family in families:
        written += plot_family(family, metrics_rows, ler_rows, args.out)
    for path in written:
        print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="evalviz",
        description="Logical-error-rate evaluation and plots for qccdc outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ler = sub.add_parser("ler", help="estimate logical error rates for a sweep")
    p_ler.add_argument("--metrics", required=True, help="metrics.csv from qccdc sweep")
    p_ler.add_argument("--shots", type=int, default=0,
                       help="shots per point (default: 1e5 at d<=5, 1e4 above)")
    p_ler.add_argument("--seed", type=int, default=0)
    p_ler.add_argument("--out", default="ler.csv")
    p_ler.set_defaults(func=cmd_ler)

    p_plot = sub.add_parser("plot", help="render a figure family")
    p_plot.add_argument("--family", choices=FAMILIES + ("all",), required=True)
    p_plot.add_argument("--metrics", help="metrics.csv from qccdc sweep")
    p_plot.add_argument("--ler", help="ler.csv from `evalviz ler`")
    p_plot.add_argument("--out", default="figures")
    p_plot.set_defaults(func=cmd_plot)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
