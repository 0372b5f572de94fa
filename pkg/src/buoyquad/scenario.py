"""Scenario files: flat ``key = value`` text, strict schema.

Lines are UTF-8 ``key = value`` pairs with ``#`` comments and blank lines
ignored.  Keys are dotted per subsystem (``aero.c_d``, ``fault.window``,
``scenario.type`` ...).  Unknown keys are errors, and every physics key
must be present: there are no silent defaults inside the simulator.  Use
:func:`default_scenario_text` to produce a complete file for any scenario
type with the calibrated reference values filled in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import calibration as cal
from .control import AxisGains, GainSet
from .dynamics import AeroParams
from .energy import BatteryModel
from .errors import ConfigError
from .fault import FaultConfig
from .sensors import SensorSuite, WindModel

SCENARIO_TYPES = (
    "hover",
    "altitude_step",
    "yaw_disturbance",
    "waypoint",
    "fault_injection",
    "wind_gust",
    "lifetime_sweep",
)

# key -> value kind ("float", "int", "str", "bool")
_COMMON_KEYS: dict[str, str] = {
    "scenario.type": "str",
    "scenario.dt": "float",
    "scenario.duration": "float",
    "scenario.seed": "int",
    "aero.m": "float",
    "aero.c_d": "float",
    "aero.c_z": "float",
    "aero.c_psi": "float",
    "aero.c_dpsi": "float",
    "aero.t_max": "float",
    "gains.z.kp": "float",
    "gains.z.kd": "float",
    "gains.z.ki": "float",
    "gains.psi.kp": "float",
    "gains.psi.kd": "float",
    "gains.x.kp": "float",
    "gains.x.kd": "float",
    "gains.x.ki": "float",
    "gains.y.kp": "float",
    "gains.y.kd": "float",
    "gains.y.ki": "float",
    "gains.integral_clamp": "float",
    "fault.k_omega_z": "float",
    "fault.k_a_z": "float",
    "fault.window": "float",
    "fault.v_residual_eps": "float",
    "fault.psi_eps": "float",
    "fault.norm_mode": "str",
    "sensors.imu_rate": "float",
    "sensors.imu_accel_sigma": "float",
    "sensors.imu_gyro_sigma": "float",
    "sensors.imu_gyro_bias": "float",
    "sensors.tof_rate": "float",
    "sensors.tof_sigma": "float",
    "sensors.tof_max_range": "float",
    "sensors.flow_rate": "float",
    "sensors.flow_sigma": "float",
    "wind.mean_x": "float",
    "wind.mean_y": "float",
    "wind.mean_z": "float",
    "wind.gust_amplitude": "float",
    "wind.gust_dir_x": "float",
    "wind.gust_dir_y": "float",
    "wind.gust_dir_z": "float",
    "wind.gust_start": "float",
    "wind.gust_duration": "float",
    "wind.noise_sigma": "float",
    "wind.noise_tau": "float",
    "battery.capacity_mah": "float",
    "battery.voltage": "float",
    "battery.i_idle_ma": "float",
    "battery.i_motor_full_ma": "float",
    "battery.i_heading_ma": "float",
    "battery.heading_hold": "bool",
}

_TYPE_KEYS: dict[str, dict[str, str]] = {
    "hover": {"hover.z0": "float", "hover.z_d": "float"},
    "altitude_step": {
        "step.z0": "float",
        "step.z_d": "float",
        "step.t_shift": "float",
        "step.ground_shift": "float",
    },
    "yaw_disturbance": {
        "spin.z_d": "float",
        "spin.rate": "float",
        "spin.t_inject": "float",
    },
    "waypoint": {"waypoint.points": "str", "waypoint.leg_duration": "float"},
    "fault_injection": {
        "fault_injection.rotor": "int",
        "fault_injection.t_inject": "float",
        "fault_injection.z0": "float",
        "fault_injection.climb_rate": "float",
        "fault_injection.climb_until": "float",
        "fault_injection.recovery_x": "float",
        "fault_injection.recovery_y": "float",
    },
    "wind_gust": {"gust.z_d": "float"},
    "lifetime_sweep": {"lifetime.duty": "float"},
}


@dataclass
class Scenario:
    """Parsed experiment description; one per simulation run."""

    type: str
    dt: float
    duration: float
    seed: int
    aero: AeroParams
    gains: GainSet
    fault: FaultConfig
    sensors: SensorSuite
    wind: WindModel
    battery: BatteryModel
    heading_hold: bool
    norm_mode: str
    extras: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.type not in SCENARIO_TYPES:
            raise ConfigError(f"unknown scenario.type {self.type!r}")
        if not (self.duration > 0.0):
            raise ConfigError(f"scenario.duration must be > 0, got {self.duration}")
        if not (self.dt > 0.0):
            raise ConfigError(f"scenario.dt must be > 0, got {self.dt}")
        if self.norm_mode not in ("euclidean", "scalar"):
            raise ConfigError(f"fault.norm_mode must be euclidean|scalar, got {self.norm_mode}")
        rotor = self.extras.get("fault_injection.rotor")
        if rotor is not None and rotor not in (1, 2, 3, 4):
            raise ConfigError(f"fault_injection.rotor must be 1..4, got {rotor}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def waypoints(self) -> list[tuple[float, float, float]]:
        raw = self.extras.get("waypoint.points", "")
        points = []
        for chunk in str(raw).split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = [p.strip() for p in chunk.split(",")]
            if len(parts) != 3:
                raise ConfigError(f"waypoint {chunk!r} must be 'x,y,z'")
            try:
                points.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ConfigError(f"waypoint {chunk!r} must be numeric") from None
        if not points:
            raise ConfigError("waypoint.points is empty")
        return points


def _parse_value(key: str, kind: str, raw: str):
    raw = raw.strip()
    try:
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if kind == "int":
            return int(raw)
        if kind == "bool":
            lowered = raw.lower()
            if lowered in ("on", "true", "1", "yes"):
                return True
            if lowered in ("off", "false", "0", "no"):
                return False
            raise ValueError("expected on/off")
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


def parse_scenario_text(text: str) -> Scenario:
    """Parse scenario file content; strict about unknown and missing keys."""
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        pairs[key] = raw

    stype = pairs.get("scenario.type")
    if stype is None:
        raise ConfigError("missing key scenario.type")
    stype = stype.strip()
    if stype not in SCENARIO_TYPES:
        raise ConfigError(f"unknown scenario.type {stype!r}")

    schema = dict(_COMMON_KEYS)
    schema.update(_TYPE_KEYS[stype])

    unknown = sorted(set(pairs) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    missing = sorted(set(schema) - set(pairs))
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")

    values = {key: _parse_value(key, kind, pairs[key]) for key, kind in schema.items()}

    aero = AeroParams(
        m=values["aero.m"],
        c_d=values["aero.c_d"],
        c_z=values["aero.c_z"],
        c_psi=values["aero.c_psi"],
        c_dpsi=values["aero.c_dpsi"],
        t_max=values["aero.t_max"],
    )
    gains = GainSet(
        z=AxisGains(values["gains.z.kp"], values["gains.z.kd"], values["gains.z.ki"]),
        psi=AxisGains(values["gains.psi.kp"], values["gains.psi.kd"]),
        x=AxisGains(values["gains.x.kp"], values["gains.x.kd"], values["gains.x.ki"]),
        y=AxisGains(values["gains.y.kp"], values["gains.y.kd"], values["gains.y.ki"]),
        integral_clamp=values["gains.integral_clamp"],
    )
    fault = FaultConfig(
        k_omega_z=values["fault.k_omega_z"],
        k_a_z=values["fault.k_a_z"],
        window=values["fault.window"],
        v_residual_eps=values["fault.v_residual_eps"],
        psi_eps=values["fault.psi_eps"],
    )
    sensors = SensorSuite(
        imu_rate=values["sensors.imu_rate"],
        imu_accel_sigma=values["sensors.imu_accel_sigma"],
        imu_gyro_sigma=values["sensors.imu_gyro_sigma"],
        imu_gyro_bias=values["sensors.imu_gyro_bias"],
        tof_rate=values["sensors.tof_rate"],
        tof_sigma=values["sensors.tof_sigma"],
        tof_max_range=values["sensors.tof_max_range"],
        flow_rate=values["sensors.flow_rate"],
        flow_sigma=values["sensors.flow_sigma"],
    )
    wind = WindModel(
        mean=(values["wind.mean_x"], values["wind.mean_y"], values["wind.mean_z"]),
        gust_amplitude=values["wind.gust_amplitude"],
        gust_direction=(
            values["wind.gust_dir_x"],
            values["wind.gust_dir_y"],
            values["wind.gust_dir_z"],
        ),
        gust_start=values["wind.gust_start"],
        gust_duration=values["wind.gust_duration"],
        noise_sigma=values["wind.noise_sigma"],
        noise_tau=values["wind.noise_tau"],
    )
    battery = BatteryModel(
        capacity_mah=values["battery.capacity_mah"],
        voltage=values["battery.voltage"],
        i_idle_ma=values["battery.i_idle_ma"],
        i_motor_full_ma=values["battery.i_motor_full_ma"],
        i_heading_ma=values["battery.i_heading_ma"],
    )
    extras = {key: values[key] for key in _TYPE_KEYS[stype]}
    return Scenario(
        type=stype,
        dt=values["scenario.dt"],
        duration=values["scenario.duration"],
        seed=values["scenario.seed"],
        aero=aero,
        gains=gains,
        fault=fault,
        sensors=sensors,
        wind=wind,
        battery=battery,
        heading_hold=values["battery.heading_hold"],
        norm_mode=values["fault.norm_mode"],
        extras=extras,
    )


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario_text(fh.read())


_TYPE_DEFAULTS: dict[str, dict[str, object]] = {
    "hover": {"hover.z0": 1.5, "hover.z_d": 1.5},
    "altitude_step": {
        "step.z0": 1.75,
        "step.z_d": 1.75,
        "step.t_shift": 0.5,
        "step.ground_shift": 1.0,
    },
    "yaw_disturbance": {
        "spin.z_d": 1.5,
        "spin.rate": math.radians(50.0),
        "spin.t_inject": 1.0,
    },
    "waypoint": {
        "waypoint.points": "0,0,1.5; 2,0,1.5; 2,2,1.5",
        "waypoint.leg_duration": 8.0,
    },
    "fault_injection": {
        "fault_injection.rotor": 1,
        "fault_injection.t_inject": 4.0,
        "fault_injection.z0": 1.0,
        "fault_injection.climb_rate": 0.22,
        "fault_injection.climb_until": 12.0,
        "fault_injection.recovery_x": 0.0,
        "fault_injection.recovery_y": 6.0,
    },
    "wind_gust": {"gust.z_d": 1.5},
    "lifetime_sweep": {"lifetime.duty": 0.5},
}

_TYPE_DURATIONS = {
    "hover": 60.0,
    "altitude_step": 8.0,
    "yaw_disturbance": 20.0,
    "waypoint": 24.0,
    "fault_injection": 20.0,
    "wind_gust": 20.0,
    "lifetime_sweep": 60.0,
}


def default_scenario_text(
    stype: str,
    seed: int = 1,
    noisy: bool = False,
    overrides: dict[str, object] | None = None,
) -> str:
    """A complete scenario file using the calibrated reference values.

    ``noisy`` switches the reference sensor noise model on; the default
    is noise-free.  ``overrides`` replaces individual keys (which must
    exist in the schema for the chosen type).
    """
    if stype not in SCENARIO_TYPES:
        raise ConfigError(f"unknown scenario type {stype!r}")
    sensors = cal.REFERENCE_SENSORS
    aero = cal.REFERENCE_AERO
    gains = cal.REFERENCE_GAINS
    fault = cal.REFERENCE_FAULT
    battery = cal.REFERENCE_BATTERY
    values: dict[str, object] = {
        "scenario.type": stype,
        "scenario.dt": cal.DT,
        "scenario.duration": _TYPE_DURATIONS[stype],
        "scenario.seed": seed,
        "aero.m": aero.m,
        "aero.c_d": aero.c_d,
        "aero.c_z": aero.c_z,
        "aero.c_psi": aero.c_psi,
        "aero.c_dpsi": aero.c_dpsi,
        "aero.t_max": aero.t_max,
        "gains.z.kp": gains.z.k_p,
        "gains.z.kd": gains.z.k_d,
        "gains.z.ki": gains.z.k_i,
        "gains.psi.kp": gains.psi.k_p,
        "gains.psi.kd": gains.psi.k_d,
        "gains.x.kp": gains.x.k_p,
        "gains.x.kd": gains.x.k_d,
        "gains.x.ki": gains.x.k_i,
        "gains.y.kp": gains.y.k_p,
        "gains.y.kd": gains.y.k_d,
        "gains.y.ki": gains.y.k_i,
        "gains.integral_clamp": gains.integral_clamp,
        "fault.k_omega_z": fault.k_omega_z,
        "fault.k_a_z": fault.k_a_z,
        "fault.window": fault.window,
        "fault.v_residual_eps": fault.v_residual_eps,
        "fault.psi_eps": fault.psi_eps,
        "fault.norm_mode": "euclidean",
        "sensors.imu_rate": sensors.imu_rate,
        "sensors.imu_accel_sigma": sensors.imu_accel_sigma if noisy else 0.0,
        "sensors.imu_gyro_sigma": sensors.imu_gyro_sigma if noisy else 0.0,
        "sensors.imu_gyro_bias": sensors.imu_gyro_bias if noisy else 0.0,
        "sensors.tof_rate": sensors.tof_rate,
        "sensors.tof_sigma": sensors.tof_sigma if noisy else 0.0,
        "sensors.tof_max_range": sensors.tof_max_range,
        "sensors.flow_rate": sensors.flow_rate,
        "sensors.flow_sigma": sensors.flow_sigma if noisy else 0.0,
        "wind.mean_x": 0.0,
        "wind.mean_y": 0.0,
        "wind.mean_z": 0.0,
        "wind.gust_amplitude": 0.0,
        "wind.gust_dir_x": 1.0,
        "wind.gust_dir_y": 0.0,
        "wind.gust_dir_z": 0.0,
        "wind.gust_start": 0.0,
        "wind.gust_duration": 0.0,
        "wind.noise_sigma": 0.0,
        "wind.noise_tau": 1.0,
        "battery.capacity_mah": battery.capacity_mah,
        "battery.voltage": battery.voltage,
        "battery.i_idle_ma": battery.i_idle_ma,
        "battery.i_motor_full_ma": battery.i_motor_full_ma,
        "battery.i_heading_ma": battery.i_heading_ma,
        "battery.heading_hold": "on",
    }
    values.update(_TYPE_DEFAULTS[stype])
    if overrides:
        schema = dict(_COMMON_KEYS)
        schema.update(_TYPE_KEYS[stype])
        for key, val in overrides.items():
            if key not in schema:
                raise ConfigError(f"override for unknown key {key}")
            values[key] = val

    lines = [f"# {stype} scenario (generated reference config)"]
    for key in sorted(values):
        val = values[key]
        if isinstance(val, bool):
            val = "on" if val else "off"
        elif isinstance(val, float):
            val = format(val, ".12g")
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def default_scenario(stype: str, seed: int = 1, noisy: bool = False,
                     overrides: dict[str, object] | None = None) -> Scenario:
    """Parsed counterpart of :func:`default_scenario_text`."""
    return parse_scenario_text(default_scenario_text(stype, seed, noisy, overrides))
