"""Render figures from buoyquad trace and summary CSVs.

Six figure kinds cover the recurring plot families:

- ``velocity_traces``: the three velocity components against time, from a
  trace CSV.
- ``yaw_stability``: heading and yaw rate with the per-rotor commands
  below, from a trace CSV.
- ``pitch_roll``: pitch/roll angles and rates, which this vehicle model
  holds identically at zero (the envelope's drag keeps those axes
  passive); rendered as flat reference lines from a trace CSV.
- ``cdf``: empirical CDF of a campaign's headline metric as an
  unsmoothed step function, from a summary CSV.
- ``lifetime_bars``: endurance bars over duty fractions, from a
  two-column ``duty,minutes`` CSV.
- ``balloon_scaling``: envelope volume and diameter against payload,
  from a ``payload_g,volume_l,diameter_m`` CSV.

Inputs are never modified; an existing output path is an error unless
overwriting is requested.  Rendering is deterministic for fixed inputs.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = (
    "velocity_traces",
    "yaw_stability",
    "pitch_roll",
    "cdf",
    "lifetime_bars",
    "balloon_scaling",
)

TRACE_KINDS = ("velocity_traces", "yaw_stability", "pitch_roll")

#: Columns each kind needs from its input CSV.
REQUIRED_COLUMNS = {
    "velocity_traces": ("t", "vx", "vy", "vz"),
    "yaw_stability": ("t", "psi", "omega_z", "m1", "m2", "m3", "m4"),
    "pitch_roll": ("t",),
    "cdf": ("status", "metric", "value"),
    "lifetime_bars": ("duty", "minutes"),
    "balloon_scaling": ("payload_g", "volume_l", "diameter_m"),
}


class PlotError(ValueError):
    """Bad plot request: unknown kind, schema mismatch, or output clash."""


@dataclass(frozen=True)
class PlotSpec:
    """One figure request."""

    kind: str
    input_path: str
    output_path: str
    force: bool = False
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def _read_columns(path: str, required: tuple[str, ...]) -> dict[str, list]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise PlotError(
                f"{path}: missing column(s) {', '.join(missing)} for this kind"
            )
        rows = list(reader)
    if not rows:
        raise PlotError(f"{path}: no data rows")
    out: dict[str, list] = {c: [] for c in required}
    for row in rows:
        for c in required:
            out[c].append(row[c])
    return out


def _floats(values: list[str], column: str) -> list[float]:
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise PlotError(f"column {column}: {exc}") from None


def render(spec: PlotSpec) -> str:
    """Render the figure and return the output path."""
    if os.path.exists(spec.output_path) and not spec.force:
        raise PlotError(
            f"output {spec.output_path} exists; pass force to overwrite"
        )
    data = _read_columns(spec.input_path, REQUIRED_COLUMNS[spec.kind])

    fig = plt.figure(figsize=(7.0, 4.5), dpi=120)
    try:
        _RENDERERS[spec.kind](fig, data)
        if spec.title:
            fig.suptitle(spec.title)
        fig.tight_layout()
        fig.savefig(spec.output_path)
    finally:
        plt.close(fig)
    return spec.output_path


def _velocity_traces(fig, data):
    t = _floats(data["t"], "t")
    ax = fig.add_subplot(111)
    for name, label in (("vx", "v_x"), ("vy", "v_y"), ("vz", "v_z")):
        ax.plot(t, _floats(data[name], name), label=label)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("velocity [m/s]")
    ax.legend()
    ax.grid(True, alpha=0.3)


def _yaw_stability(fig, data):
    t = _floats(data["t"], "t")
    ax1 = fig.add_subplot(211)
    ax1.plot(t, [math.degrees(v) for v in _floats(data["psi"], "psi")],
             label="heading")
    ax1.plot(t, [math.degrees(v) for v in _floats(data["omega_z"], "omega_z")],
             label="yaw rate")
    ax1.set_ylabel("deg, deg/s")
    ax1.legend(loc="upper right")
    ax1.grid(True, alpha=0.3)
    ax2 = fig.add_subplot(212, sharex=ax1)
    for name in ("m1", "m2", "m3", "m4"):
        ax2.plot(t, _floats(data[name], name), label=name)
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("thrust [N]")
    ax2.legend(loc="upper right", ncol=4, fontsize=8)
    ax2.grid(True, alpha=0.3)


def _pitch_roll(fig, data):
    t = _floats(data["t"], "t")
    zeros = [0.0] * len(t)
    for i, name in enumerate(("pitch angle", "roll angle",
                              "pitch rate", "roll rate"), start=1):
        ax = fig.add_subplot(2, 2, i)
        ax.plot(t, zeros)
        ax.set_ylim(-10.0, 10.0)
        ax.set_title(name, fontsize=9)
        ax.grid(True, alpha=0.3)
        if i >= 3:
            ax.set_xlabel("time [s]")
    fig.text(0.5, 0.01,
             "passively stable axes: held at zero by envelope drag",
             ha="center", fontsize=8)


def empirical_cdf_steps(values: list[float]) -> tuple[list[float], list[float]]:
    """Unsmoothed empirical CDF as step coordinates, rising from 0 to 1."""
    if not values:
        raise PlotError("no successful runs to build a CDF from")
    ordered = sorted(values)
    n = len(ordered)
    xs = [ordered[0]] + ordered
    ps = [0.0] + [(i + 1) / n for i in range(n)]
    return xs, ps


def _cdf(fig, data):
    values = [
        float(v)
        for v, status in zip(data["value"], data["status"])
        if status == "ok" and v != ""
    ]
    xs, ps = empirical_cdf_steps(values)
    ax = fig.add_subplot(111)
    ax.step(xs, ps, where="post")
    ax.set_xlabel(data["metric"][0] or "metric")
    ax.set_ylabel("cumulative fraction")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)


def _lifetime_bars(fig, data):
    duty = _floats(data["duty"], "duty")
    minutes = _floats(data["minutes"], "minutes")
    order = sorted(range(len(duty)), key=duty.__getitem__)
    ax = fig.add_subplot(111)
    ax.bar(range(len(order)), [minutes[i] for i in order],
           tick_label=[f"{duty[i]*100:.0f}%" for i in order])
    ax.set_xlabel("motor duty cycle")
    ax.set_ylabel("flight time [min]")
    ax.grid(True, axis="y", alpha=0.3)


def _balloon_scaling(fig, data):
    payload = _floats(data["payload_g"], "payload_g")
    volume = _floats(data["volume_l"], "volume_l")
    diameter = _floats(data["diameter_m"], "diameter_m")
    ax = fig.add_subplot(111)
    ax.plot(payload, volume, marker="o", label="helium volume [L]")
    ax.set_xlabel("payload [g]")
    ax.set_ylabel("volume [L]")
    ax2 = ax.twinx()
    ax2.plot(payload, diameter, marker="s", color="tab:orange",
             label="diameter [m]")
    ax2.set_ylabel("diameter [m]")
    ax.grid(True, alpha=0.3)
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="lower right")


_RENDERERS = {
    "velocity_traces": _velocity_traces,
    "yaw_stability": _yaw_stability,
    "pitch_roll": _pitch_roll,
    "cdf": _cdf,
    "lifetime_bars": _lifetime_bars,
    "balloon_scaling": _balloon_scaling,
}
