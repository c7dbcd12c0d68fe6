"""Figure families over compiler sweep outputs and LER estimates.

Each family renders one PNG and dumps the plotted points as a tidy CSV next
to it.  Families: elapsed_vs_d, ler_vs_d, resources, wiring_tradeoff.
"""

from __future__ import annotations

import csv
import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FAMILIES = ("elapsed_vs_d", "ler_vs_d", "resources", "wiring_tradeoff")


def read_metrics(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        rows = [dict(r) for r in csv.DictReader(fh)]
    return [r for r in rows if r.get("status", "ok") == "ok"]


def read_ler(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return [dict(r) for r in csv.DictReader(fh)]


def _write_tidy(path: str, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def plot_family(
    family: str,
    metrics_rows: list[dict],
    ler_rows: list[dict] | None,
    out_dir: str,
) -> list[str]:
    """Render one figure family; returns the written file paths."""
    if family not in FAMILIES:
        raise ValueError(f"unknown figure family {family!r}; pick from {FAMILIES}")
    os.makedirs(out_dir, exist_ok=True)
    if family == "elapsed_vs_d":
        return _plot_elapsed(metrics_rows, out_dir)
    if family == "ler_vs_d":
        return _plot_ler(ler_rows or [], out_dir)
    if family == "resources":
        return _plot_resources(metrics_rows, out_dir)
    return _plot_wiring(metrics_rows, out_dir)


def _series(rows: list[dict], key) -> dict:
    out: dict = {}
    for r in rows:
        out.setdefault(key(r), []).append(r)
    return out


def _plot_elapsed(rows: list[dict], out_dir: str) -> list[str]:
    rows = [r for r in rows if r["elapsed_per_round_us"]]
    if not rows:
        warnings.warn("elapsed_vs_d: no rows to plot")
        return []
    fig, ax = plt.subplots(figsize=(6, 4))
    tidy = []
    wirings = {r["wiring"] for r in rows}
    key = lambda r: (int(r["capacity"]), r["wiring"])
    for (capacity, wiring), group in sorted(_series(rows, key).items()):
        group = sorted(group, key=lambda r: int(r["distance"]))
        xs = [int(r["distance"]) for r in group]
        ys = [float(r["elapsed_per_round_us"]) / 1000 for r in group]
        label = f"capacity {capacity}"
        if len(wirings) > 1:
            label += f", {wiring}"
        ax.plot(xs, ys, marker="o", label=label)
        tidy.extend(
            {
                "distance": x,
                "capacity": capacity,
                "wiring": wiring,
                "elapsed_ms": y,
                "gate_bound_ms": float(r["gate_bound_per_round_us"] or 0) / 1000,
            }
            for x, y, r in zip(xs, ys, group)
        )
    bounds = [float(r["gate_bound_per_round_us"]) for r in rows if r["gate_bound_per_round_us"]]
    if bounds:
        guide = min(bounds) / 1000
        ax.axhline(guide, linestyle=":", color="grey",
                   label=f"gate-only bound ({guide:.2f} ms)")
    ax.set_xlabel("code distance")
    ax.set_ylabel("QEC round time (ms)")
    ax.legend()
    fig.tight_layout()
    png = os.path.join(out_dir, "elapsed_vs_d.png")
    fig.savefig(png, dpi=150)
    plt.close(fig)
    tidy_path = os.path.join(out_dir, "elapsed_vs_d.csv")
    _write_tidy(
        tidy_path, tidy, ["distance", "capacity", "wiring", "elapsed_ms", "gate_bound_ms"]
    )
    return [png, tidy_path]


def _plot_ler(rows: list[dict], out_dir: str) -> list[str]:
    if not rows:
        warnings.warn("ler_vs_d: no LER estimates to plot")
        return []
    fig, ax = plt.subplots(figsize=(6, 4))
    tidy = []
    key = lambda r: (int(r["capacity"]), float(r["gate_improvement"]))
    for (capacity, improvement), group in sorted(_series(rows, key).items()):
        group = sorted(group, key=lambda r: int(r["distance"]))
        xs = [int(r["distance"]) for r in group]
        ys = [float(r["ler_per_round"]) for r in group]
        lo = [float(r["ci_low"]) for r in group]
        hi = [float(r["ci_high"]) for r in group]
        floor = 1e-9
        ax.errorbar(
            xs,
            [max(y, floor) for y in ys],
            yerr=[[max(y, floor) - max(l, floor) for y, l in zip(ys, lo)],
                  [max(h, floor) - max(y, floor) for y, h in zip(ys, hi)]],
            marker="o",
            capsize=3,
            label=f"capacity {capacity}, {improvement:g}x gates",
        )
        tidy.extend(
            {
                "distance": x,
                "capacity": capacity,
                "gate_improvement": improvement,
                "ler_per_round": y,
                "ci_low": l,
                "ci_high": h,
            }
            for x, y, l, h in zip(xs, ys, lo, hi)
        )
    ax.set_yscale("log")
    ax.set_xlabel("code distance")
    ax.set_ylabel("logical error rate per round")
    ax.legend()
    fig.tight_layout()
    png = os.path.join(out_dir, "ler_vs_d.png")
    fig.savefig(png, dpi=150)
    plt.close(fig)
    tidy_path = os.path.join(out_dir, "ler_vs_d.csv")
    _write_tidy(
        tidy_path, tidy,
        ["distance", "capacity", "gate_improvement", "ler_per_round", "ci_low", "ci_high"],
    )
    return [png, tidy_path]


def _plot_resources(rows: list[dict], out_dir: str) -> list[str]:
    rows = [r for r in rows if r["n_electrodes"]]
    if not rows:
        warnings.warn("resources: no rows to plot")
        return []
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    tidy = []
    for capacity, group in sorted(_series(rows, lambda r: int(r["capacity"])).items()):
        group = sorted(group, key=lambda r: int(r["distance"]))
        xs = [int(r["distance"]) for r in group]
        electrodes = [int(r["n_electrodes"]) for r in group]
        power = [float(r["power_mw"]) / 1000 for r in group]
        ax1.plot(xs, electrodes, marker="o", label=f"capacity {capacity}")
        ax2.plot(xs, power, marker="s", label=f"capacity {capacity}")
        tidy.extend(
            {"distance": x, "capacity": capacity, "n_electrodes": e, "power_w": p}
            for x, e, p in zip(xs, electrodes, power)
        )
    ax1.set_xlabel("code distance")
    ax1.set_ylabel("electrodes per logical qubit")
    ax2.set_xlabel("code distance")
    ax2.set_ylabel("power (W)")
    ax1.legend()
    fig.tight_layout()
    png = os.path.join(out_dir, "resources.png")
    fig.savefig(png, dpi=150)
    plt.close(fig)
    tidy_path = os.path.join(out_dir, "resources.csv")
    _write_tidy(tidy_path, tidy, ["distance", "capacity", "n_electrodes", "power_w"])
    return [png, tidy_path]


def _plot_wiring(rows: list[dict], out_dir: str) -> list[str]:
    rows = [r for r in rows if r["data_rate_mbit_s"]]
    if not rows:
        warnings.warn("wiring_tradeoff: no rows to plot")
        return []
    fig, ax = plt.subplots(figsize=(6, 4))
    tidy = []
    for wiring, group in sorted(_series(rows, lambda r: r["wiring"]).items()):
        group = sorted(group, key=lambda r: int(r["distance"]))
        xs = [int(r["distance"]) for r in group]
        ys = [float(r["data_rate_mbit_s"]) / 1000 for r in group]
        ax.plot(xs, ys, marker="o", label=wiring)
        tidy.extend(
            {"distance": x, "wiring": wiring, "data_rate_gbit_s": y}
            for x, y in zip(xs, ys)
        )
    ax.set_yscale("log")
    ax.set_xlabel("code distance")
    ax.set_ylabel("controller data rate (Gbit/s)")
    ax.legend()
    fig.tight_layout()
    png = os.path.join(out_dir, "wiring_tradeoff.png")
    fig.savefig(png, dpi=150)
    plt.close(fig)
    tidy_path = os.path.join(out_dir, "wiring_tradeoff.csv")
    _write_tidy(tidy_path, tidy, ["distance", "wiring", "data_rate_gbit_s"])
    return [png, tidy_path]
