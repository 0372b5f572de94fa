"""Scenario execution: the integrate-sense-control-detect loop.

One simulated control period runs, in order: wind sample, sensor sampling
(per-channel rates with zero-order hold), state estimation, residual
monitoring, control (normal hierarchical controller, or fault-tolerant
reallocation once a rotor has been isolated), trace logging, battery
accounting, and one RK4 plant step.  Runs are fully deterministic for a
fixed (scenario, seed): a campaign with the same seeds produces
byte-identical traces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .control import CommandedAccel, ControllerState, Setpoint, control_step_detailed
from .dynamics import (
    MotorThrusts,
    VehicleState,
    derivative,
    step_rk4,
    wrap_angle,
)
from .errors import ConfigError, SchemaError, SimulationDiverged
from .fault import FaultStatus, ResidualMonitor, ftc_allocate
from .energy import sim_current_ma
from .scenario import Scenario, parse_scenario_text
from .sensors import SensorReading, SensorRig, WindSampler, inject_spin

BLOWUP_GUARD = 1e6

TRACE_COLUMNS = (
    "t", "x", "y", "z", "vx", "vy", "vz", "psi", "omega_z",
    "sz", "svx", "svy", "somega_z",
    "m1", "m2", "m3", "m4", "q1", "q2",
    "az_cmd", "tau_cmd", "ax_cmd", "ay_cmd",
    "fault_status", "battery_mah",
)


@dataclass(frozen=True, slots=True)
class TraceRecord:
    """One logged control period; column order mirrors TRACE_COLUMNS."""

    t: float
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float
    psi: float
    omega_z: float
    sz: float          # sensed separation (NaN while out of range)
    svx: float
    svy: float
    somega_z: float
    m1: float
    m2: float
    m3: float
    m4: float
    q1: float
    q2: float
    az_cmd: float
    tau_cmd: float
    ax_cmd: float
    ay_cmd: float
    fault_status: str
    battery_mah: float


class StateEstimator:
    """Sensor fusion at firmware fidelity: hold, integrate, low-pass.

    Heading integrates the gyro; lateral velocity rotates the body-frame
    optic flow back to earth axes with that heading and dead-reckons
    position; vertical speed is a low-passed finite difference of the
    altimeter with a jump guard so terrain steps do not masquerade as
    climb rate.
    """

    VZ_TAU = 0.15         # s, vertical-speed low-pass
    JUMP_GUARD = 0.3      # m per altimeter sample; larger deltas = terrain step

    def __init__(self, x0: float, y0: float, z0: float):
        self.x = x0
        self.y = y0
        self.z = z0
        self.v_x = 0.0
        self.v_y = 0.0
        self.v_z = 0.0
        self.psi = 0.0
        self.omega_z = 0.0
        self._last_tof: tuple[float, float] | None = None  # (t, z)

    def update(self, reading: SensorReading, dt: float) -> VehicleState:
        self.omega_z = reading.omega_z
        self.psi = wrap_angle(self.psi + reading.omega_z * dt)
        c, s = math.cos(self.psi), math.sin(self.psi)
        self.v_x = c * reading.v_x - s * reading.v_y
        self.v_y = s * reading.v_x + c * reading.v_y
        self.x += self.v_x * dt
        self.y += self.v_y * dt

        if reading.z_range is not None:
            if self._last_tof is None or reading.t_tof > self._last_tof[0]:
                if self._last_tof is not None:
                    t_prev, z_prev = self._last_tof
                    dz = reading.z_range - z_prev
                    span = reading.t_tof - t_prev
                    if abs(dz) <= self.JUMP_GUARD and span > 0.0:
                        alpha = min(1.0, span / self.VZ_TAU)
                        self.v_z += alpha * (dz / span - self.v_z)
                self._last_tof = (reading.t_tof, reading.z_range)
            self.z = reading.z_range
        return VehicleState(
            x=self.x, y=self.y, z=self.z,
            v_x=self.v_x, v_y=self.v_y, v_z=self.v_z,
            psi=self.psi, omega_z=self.omega_z,
        )


@dataclass
class SimResult:
    """Trace plus the scenario's headline metric and fault events."""

    records: list[TraceRecord]
    metric_name: str
    metric_value: float | None
    detection: FaultStatus
    isolated_correctly: bool | None = None
    events: dict[str, float] = field(default_factory=dict)


def _initial_world_z(sc: Scenario) -> float:
    e = sc.extras
    if sc.type == "hover":
        return e["hover.z0"]
    if sc.type == "altitude_step":
        return e["step.z0"]
    if sc.type == "yaw_disturbance":
        return e["spin.z_d"]
    if sc.type == "fault_injection":
        return e["fault_injection.z0"]
    if sc.type == "wind_gust":
        return e["gust.z_d"]
    if sc.type == "waypoint":
        return sc.waypoints()[0][2]
    return 1.5


def _ground_height(sc: Scenario, t: float) -> float:
    if sc.type == "altitude_step" and t >= sc.extras["step.t_shift"]:
        return sc.extras["step.ground_shift"]
    return 0.0


def _setpoint(sc: Scenario, t: float) -> Setpoint:
    e = sc.extras
    if sc.type == "hover":
        return Setpoint(z_d=e["hover.z_d"])
    if sc.type == "altitude_step":
        return Setpoint(z_d=e["step.z_d"])
    if sc.type == "yaw_disturbance":
        return Setpoint(z_d=e["spin.z_d"])
    if sc.type == "wind_gust":
        return Setpoint(z_d=e["gust.z_d"])
    if sc.type == "fault_injection":
        t_end = e["fault_injection.climb_until"]
        rate = e["fault_injection.climb_rate"]
        z0 = e["fault_injection.z0"]
        if t < t_end:
            return Setpoint(z_d=z0 + rate * t, vz_d=rate)
        return Setpoint(z_d=z0 + rate * t_end)
    if sc.type == "waypoint":
        points = sc.waypoints()
        leg = min(int(t / e["waypoint.leg_duration"]), len(points) - 1)
        x, y, z = points[leg]
        return Setpoint(x_d=x, y_d=y, z_d=z)
    return Setpoint()


def run_scenario(sc: Scenario) -> SimResult:
    """Execute one scenario; deterministic for a fixed (scenario, seed).

    Raises :class:`SimulationDiverged` with the offending record index if
    any state field exceeds the blow-up guard.
    """
    rng = np.random.default_rng(sc.seed)
    rig = SensorRig(sc.sensors, rng, sc.dt)
    wind_sampler = WindSampler(sc.wind, rng, sc.dt)
    monitor = ResidualMonitor(sc.fault, sc.aero, sc.dt)
    cs = ControllerState()
    ftc_cs = ControllerState()

    z0 = _initial_world_z(sc)
    sp0 = _setpoint(sc, 0.0)
    state = VehicleState(x=sp0.x_d, y=sp0.y_d, z=z0)
    estimator = StateEstimator(sp0.x_d, sp0.y_d, z0 - _ground_height(sc, 0.0))

    prev_cmd = MotorThrusts()
    prev_actual = MotorThrusts()
    battery_mah = sc.battery.capacity_mah
    records: list[TraceRecord] = []
    events: dict[str, float] = {}

    lifetime_mode = sc.type == "lifetime_sweep"
    pinned = None
    if lifetime_mode:
        duty = sc.extras["lifetime.duty"]
        if not 0.0 <= duty <= 1.0:
            raise ConfigError(f"lifetime.duty must be in [0, 1], got {duty}")
        level = duty * sc.aero.t_max
        pinned = MotorThrusts(level, level, level, level)

    spin_done = False
    failed_rotor = sc.extras.get("fault_injection.rotor")
    t_inject = sc.extras.get("fault_injection.t_inject", math.inf)

    for k in range(sc.n_steps):
        t = k * sc.dt
        wind = wind_sampler.sample(t)
        ground = _ground_height(sc, t)

        if sc.type == "yaw_disturbance" and not spin_done and t >= sc.extras["spin.t_inject"]:
            state = inject_spin(state, sc.extras["spin.rate"])
            spin_done = True
            events["spin_injected"] = t

        true_accel = derivative(state, prev_actual, sc.aero, wind)
        reading = rig.sample(state, true_accel, t, ground)
        est = estimator.update(reading, sc.dt)

        sp = _setpoint(sc, t)
        status = monitor.update(t, est, reading.a_z, prev_cmd, sp.psi_d)
        if not status.healthy and "fault_detected" not in events:
            events["fault_detected"] = t

        if lifetime_mode:
            commanded = pinned
            cmds = CommandedAccel(0.0, 0.0, 0.0, 0.0)
        elif status.healthy:
            out = control_step_detailed(est, sp, sc.gains, sc.aero, cs, sc.dt)
            commanded = out.thrusts
            cmds = out.commanded
        else:
            commanded, cmds = _ftc_step(sc, est, status, ftc_cs)

        records.append(TraceRecord(
            t=t,
            x=state.x, y=state.y, z=state.z,
            vx=state.v_x, vy=state.v_y, vz=state.v_z,
            psi=state.psi, omega_z=state.omega_z,
            sz=reading.z_range if reading.z_range is not None else math.nan,
            svx=est.v_x, svy=est.v_y, somega_z=est.omega_z,
            m1=commanded.m1, m2=commanded.m2, m3=commanded.m3, m4=commanded.m4,
            q1=commanded.q1, q2=commanded.q2,
            az_cmd=cmds.a_z, tau_cmd=cmds.tau_z, ax_cmd=cmds.a_x, ay_cmd=cmds.a_y,
            fault_status=status.label(),
            battery_mah=battery_mah,
        ))

        actual = commanded
        if failed_rotor is not None and t >= t_inject:
            vals = list(commanded.as_tuple())
            vals[failed_rotor - 1] = 0.0
            actual = MotorThrusts(*vals)

        fraction_sum = sum(actual.as_tuple()) / sc.aero.t_max
        battery_mah -= sim_current_ma(fraction_sum, sc.heading_hold, sc.battery) \
            * sc.dt / 3600.0

        state = step_rk4(state, actual, sc.aero, wind, sc.dt)
        for name, value in zip(("x", "y", "z", "vx", "vy", "vz", "psi", "omega_z"),
                               state.as_tuple()):
            if abs(value) > BLOWUP_GUARD:
                raise SimulationDiverged(k, name, value)
        prev_cmd = commanded
        prev_actual = actual

    detection = monitor.status
    isolated = None
    if failed_rotor is not None:
        isolated = (not detection.healthy) and detection.failed_rotor == failed_rotor
    name, value = _headline_metric(sc, records, events)
    return SimResult(records, name, value, detection, isolated, events)


def _ftc_step(
    sc: Scenario, est: VehicleState, status: FaultStatus, ftc_cs: ControllerState
) -> tuple[MotorThrusts, CommandedAccel]:
    """Descend-and-steer reallocation toward the scenario recovery point.

    The surviving adjacent pair can only push along one side of the y
    axis (+y for survivors {2, 3}, -y for {1, 4}); when the commanded
    acceleration opposes that reachable cone the pair is coasted and
    drag brakes the vehicle, otherwise a runaway past the recovery
    point would follow.
    """
    rx = sc.extras.get("fault_injection.recovery_x", 0.0)
    ry = sc.extras.get("fault_injection.recovery_y", 0.0)
    gx, gy = sc.gains.x, sc.gains.y
    a_x = -gx.k_p * (est.x - rx) - gx.k_d * est.v_x
    a_y = -gy.k_p * (est.y - ry) - gy.k_d * est.v_y
    push = 1.0 if status.failed_rotor in (1, 4) else -1.0
    if a_y * push <= 0.0:
        return MotorThrusts(), CommandedAccel(a_x, a_y, 0.0, 0.0)
    psi_d = math.atan2(a_y, a_x)
    gp = sc.gains.psi
    tau = -gp.k_p * wrap_angle(est.psi - psi_d) - gp.k_d * est.omega_z
    thrusts, psi_d = ftc_allocate(
        a_x, a_y, tau, failed=status.failed_rotor,
        t_max=sc.aero.t_max, norm_mode=sc.norm_mode,
    )
    return thrusts, CommandedAccel(a_x, a_y, 0.0, tau)


def _sustained_entry_time(
    times: list[float], values: list[float], bound: float
) -> float | None:
    """First time |value| <= bound and stays there through the end."""
    entry = None
    for t, v in zip(times, values):
        if abs(v) <= bound:
            if entry is None:
                entry = t
        else:
            entry = None
    return entry


def _headline_metric(
    sc: Scenario, records: list[TraceRecord], events: dict[str, float]
) -> tuple[str, float | None]:
    e = sc.extras
    times = [r.t for r in records]
    if sc.type == "hover":
        z_d = e["hover.z_d"]
        errs = [abs(r.z - z_d) for r in records if r.t >= 1.0]
        return ("tracking_error_m", max(errs) if errs else None)
    if sc.type == "altitude_step":
        z_d = e["step.z_d"]
        t_shift = e["step.t_shift"]
        band = 0.05 * abs(e["step.ground_shift"])
        seps = [r.z - _ground_height(sc, r.t) - z_d for r in records]
        after = [(t, v) for t, v in zip(times, seps) if t >= t_shift]
        entry = _sustained_entry_time([t for t, _ in after], [v for _, v in after], band)
        return ("recovery_latency_s", None if entry is None else entry - t_shift)
    if sc.type == "yaw_disturbance":
        t0 = events.get("spin_injected")
        if t0 is None:
            return ("recovery_time_s", None)
        # Absolute 2 deg/s band: a relative band would make recovery time
        # rate-independent in the linear regime.
        bound = math.radians(2.0)
        after = [(r.t, r.omega_z) for r in records if r.t >= t0]
        entry = _sustained_entry_time([t for t, _ in after], [v for _, v in after], bound)
        return ("recovery_time_s", None if entry is None else entry - t0)
    if sc.type == "fault_injection":
        if "fault_detected" not in events:
            return ("detection_latency_s", None)
        return ("detection_latency_s",
                events["fault_detected"] - e["fault_injection.t_inject"])
    if sc.type == "wind_gust":
        return ("max_displacement_m",
                max(math.hypot(r.x, r.y) for r in records))
    if sc.type == "waypoint":
        x, y, z = sc.waypoints()[-1]
        last = records[-1]
        return ("final_error_m", math.hypot(last.x - x, last.y - y))
    if sc.type == "lifetime_sweep":
        return ("drained_mah", sc.battery.capacity_mah - records[-1].battery_mah)
    return ("none", None)


# --- trace CSV ---------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(value, ".10g")


def write_trace_csv(records: list[TraceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for r in records:
            writer.writerow([
                _fmt(r.t), _fmt(r.x), _fmt(r.y), _fmt(r.z),
                _fmt(r.vx), _fmt(r.vy), _fmt(r.vz),
                _fmt(r.psi), _fmt(r.omega_z),
                _fmt(r.sz), _fmt(r.svx), _fmt(r.svy), _fmt(r.somega_z),
                _fmt(r.m1), _fmt(r.m2), _fmt(r.m3), _fmt(r.m4),
                _fmt(r.q1), _fmt(r.q2),
                _fmt(r.az_cmd), _fmt(r.tau_cmd), _fmt(r.ax_cmd), _fmt(r.ay_cmd),
                r.fault_status, _fmt(r.battery_mah),
            ])


def read_trace_csv(path) -> list[TraceRecord]:
    """Parse a trace CSV, validating the schema; errors carry line numbers."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty trace file") from None
        if tuple(header) != TRACE_COLUMNS:
            missing = set(TRACE_COLUMNS) - set(header)
            detail = f"missing columns: {sorted(missing)}" if missing else f"got {header}"
            raise SchemaError(f"trace header mismatch; {detail}", line=1)
        last_t = -math.inf
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRACE_COLUMNS):
                raise SchemaError(
                    f"expected {len(TRACE_COLUMNS)} fields, got {len(row)}",
                    line=lineno,
                )
            try:
                values = [float(v) for v in row[:23]]
            except ValueError as exc:
                raise SchemaError(str(exc), line=lineno) from None
            try:
                battery = float(row[24])
            except ValueError as exc:
                raise SchemaError(str(exc), line=lineno) from None
            if values[0] <= last_t:
                raise SchemaError("time must be strictly increasing", line=lineno)
            last_t = values[0]
            records.append(TraceRecord(*values, row[23], battery))
    return records


# --- offline fault scan --------------------------------------------------------


def fault_scan(trace_path, sc: Scenario) -> list[tuple[float, int]]:
    """Replay the residual detector over a logged trace.

    Uses the logged commanded thrusts and sensed channels; the vertical
    acceleration is reconstructed by differencing the logged vertical
    velocity.  Returns (time, rotor) for each verdict (at most one).
    """
    records = read_trace_csv(trace_path)
    if not records:
        return []
    dt = records[1].t - records[0].t if len(records) > 1 else sc.dt
    monitor = ResidualMonitor(sc.fault, sc.aero, dt)
    detections: list[tuple[float, int]] = []
    prev: TraceRecord | None = None
    prev_cmd = MotorThrusts()
    for r in records:
        est = VehicleState(
            x=r.x, y=r.y, z=r.z if not math.isnan(r.sz) else r.z,
            v_x=r.svx, v_y=r.svy, v_z=r.vz,
            psi=r.psi, omega_z=r.somega_z,
        )
        a_z_meas = 0.0 if prev is None else (r.vz - prev.vz) / dt
        psi_d = _setpoint(sc, r.t).psi_d
        status = monitor.update(r.t, est, a_z_meas, prev_cmd, psi_d)
        if not status.healthy and not detections:
            detections.append((r.t, status.failed_rotor))
        prev = r
        prev_cmd = MotorThrusts(r.m1, r.m2, r.m3, r.m4)
    return detections


# --- Monte Carlo ----------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloSpec:
    """Campaign description: base scenario text, seeds, optional sweep."""

    base_text: str
    seeds: tuple[int, ...]
    sweep_key: str | None = None
    sweep_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.seeds) < 1:
            raise ConfigError("run count must be >= 1")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if (self.sweep_key is None) != (self.sweep_values is None):
            raise ConfigError("sweep_key and sweep_values go together")
        if self.sweep_values is not None and len(self.sweep_values) != len(self.seeds):
            raise ConfigError("sweep_values must match the run count")


@dataclass(frozen=True)
class RunOutcome:
    run: int
    seed: int
    status: str           # ok | aborted | no_metric
    value: float | None
    detail: str = ""


@dataclass
class McSummary:
    metric_name: str
    outcomes: list[RunOutcome]

    @property
    def values(self) -> list[float]:
        return sorted(o.value for o in self.outcomes if o.status == "ok")

    def cdf_points(self) -> list[tuple[float, float]]:
        """Empirical CDF as unsmoothed steps: (value, cumulative fraction)."""
        vals = self.values
        n = len(vals)
        return [(v, (i + 1) / n) for i, v in enumerate(vals)]

    def percentile(self, p: float) -> float:
        """Conservative (upper) empirical percentile of the metric."""
        vals = self.values
        if not vals:
            raise ValueError("no successful runs")
        return float(np.percentile(vals, p, method="higher"))


def override_scenario_text(text: str, overrides: dict[str, object]) -> str:
    """Replace values of existing keys in scenario text, preserving layout."""
    remaining = dict(overrides)
    out = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        key = stripped.partition("=")[0].strip() if "=" in stripped else None
        if key is not None and key in remaining:
            value = remaining.pop(key)
            if isinstance(value, bool):
                value = "on" if value else "off"
            elif isinstance(value, float):
                value = format(value, ".12g")
            out.append(f"{key} = {value}")
        else:
            out.append(line)
    if remaining:
        raise ConfigError(f"override keys not present in scenario: {sorted(remaining)}")
    return "\n".join(out) + "\n"


def run_montecarlo(spec: MonteCarloSpec) -> McSummary:
    """Independent seeded runs; aborted runs are recorded, not fatal."""
    outcomes = []
    metric_name = "none"
    jobs = sorted(range(len(spec.seeds)), key=lambda i: spec.seeds[i])
    for i in jobs:
        seed = spec.seeds[i]
        overrides: dict[str, object] = {"scenario.seed": seed}
        if spec.sweep_key is not None:
            overrides[spec.sweep_key] = spec.sweep_values[i]
        sc = parse_scenario_text(override_scenario_text(spec.base_text, overrides))
        try:
            result = run_scenario(sc)
        except SimulationDiverged as exc:
            outcomes.append(RunOutcome(i, seed, "aborted", None,
                                       f"diverged at record {exc.record_index}"))
            continue
        metric_name = result.metric_name
        if result.metric_value is None:
            outcomes.append(RunOutcome(i, seed, "no_metric", None))
        else:
            detail = ""
            if result.isolated_correctly is not None:
                rotor = result.detection.failed_rotor
                detail = f"rotor={rotor};correct={int(result.isolated_correctly)}"
            outcomes.append(RunOutcome(i, seed, "ok", result.metric_value, detail))
    return McSummary(metric_name, outcomes)


def write_summary_csv(summary: McSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "seed", "status", "metric", "value", "detail"])
        for o in summary.outcomes:
            writer.writerow([
                o.run, o.seed, o.status, summary.metric_name,
                "" if o.value is None else _fmt(o.value), o.detail,
            ])
