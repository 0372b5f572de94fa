"""Motor thrust curve, battery endurance model, and balloon sizing.

The endurance model is a constant-current budget:

    minutes = capacity * 60 / (i_idle + i_heading*[heading] + duty * n * i_motor)

Parameters are fitted to the measured full-duty endpoints (16.7 min with
heading hold, 22.7 min without).  The idle draw is taken from the
radio/compute class of the electronics (a few mA at a 1 Hz telemetry
beacon); the remaining current splits into the per-motor full-thrust draw
and the heading-hold overhead.  The duty fractions behind the published
duty-cycled endurance figures (60.2 and 81.6 min) are not stated anywhere;
they are recovered from the same fit and exposed as
:data:`FITTED_DUTY_ANCHORS` rather than assumed.

Balloon sizing solves the buoyancy balance for a spherical envelope,

    (rho_air - rho_gas) * V = payload + sigma_envelope * area(V),

by fixed-point iteration; the envelope areal density default comes from
weighing a 90 cm latex balloon at 25.9 g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

G = 9.81  # m/s^2

# Published endurance anchors (minutes) for the 300 mAh pack.
ENDURANCE_FULL_DUTY_HEADING_MIN = 16.7
ENDURANCE_FULL_DUTY_FREE_MIN = 22.7
ENDURANCE_CYCLED_HEADING_MIN = 60.2
ENDURANCE_CYCLED_FREE_MIN = 81.6
QUAD_BASELINE_MIN = 6.6

_CAPACITY_MAH = 300.0
_IDLE_MA = 3.3  # 1 Hz / 250 kbps telemetry beacon class

# Fit: the two full-duty endpoints pin the total motor draw and the
# heading overhead; the idle split is the datasheet-class choice above.
_I_FULL_FREE = _CAPACITY_MAH * 60.0 / ENDURANCE_FULL_DUTY_FREE_MIN
_I_FULL_HEADING = _CAPACITY_MAH * 60.0 / ENDURANCE_FULL_DUTY_HEADING_MIN
_HEADING_MA = _I_FULL_HEADING - _I_FULL_FREE
_MOTOR_FULL_MA = (_I_FULL_FREE - _IDLE_MA) / 4.0

#: Duty fractions recovered from the duty-cycled endurance anchors (fit
#: outputs, not published values).
FITTED_DUTY_ANCHORS = {
    "heading": (_CAPACITY_MAH * 60.0 / ENDURANCE_CYCLED_HEADING_MIN
                - _IDLE_MA - _HEADING_MA) / (4.0 * _MOTOR_FULL_MA),
    "free": (_CAPACITY_MAH * 60.0 / ENDURANCE_CYCLED_FREE_MIN
             - _IDLE_MA) / (4.0 * _MOTOR_FULL_MA),
}


@dataclass(frozen=True, slots=True)
class MotorCurve:
    """PWM-to-thrust map: quadratic by default, table-overridable.

    The parametric form assumes rotation speed proportional to PWM and
    thrust proportional to speed squared, pinned to the published
    endpoints.  A lookup table (pwm, thrust_n), strictly increasing in
    pwm and non-decreasing in thrust with thrust(0) = 0 and
    thrust(pwm_max) = thrust_max, overrides it with linear interpolation.
    """

    pwm_max: float = 65535.0
    thrust_max: float = 0.154  # 15.7 gram-force
    rpm_max: float = 26000.0
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        for name in ("pwm_max", "thrust_max", "rpm_max"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")
        if self.table is not None:
            table = tuple((float(p), float(th)) for p, th in self.table)
            object.__setattr__(self, "table", table)
            if len(table) < 2:
                raise DomainError("lookup table needs at least two points")
            if table[0] != (0.0, 0.0):
                raise DomainError("lookup table must start at (0, 0)")
            last_p, last_t = table[0]
            for p, th in table[1:]:
                if p <= last_p:
                    raise DomainError(f"table pwm must be strictly increasing at {p}")
                if th < last_t:
                    raise DomainError(f"table thrust must be non-decreasing at {p}")
                last_p, last_t = p, th
            if not math.isclose(last_p, self.pwm_max, rel_tol=1e-9):
                raise DomainError("table must end at pwm_max")
            if not math.isclose(last_t, self.thrust_max, rel_tol=1e-9):
                raise DomainError("table must end at thrust_max")


def thrust_from_pwm(pwm: float, curve: MotorCurve) -> float:
    """Thrust in newtons for a PWM command in [0, pwm_max]."""
    if not math.isfinite(pwm) or pwm < 0.0 or pwm > curve.pwm_max:
        raise DomainError(f"pwm must be in [0, {curve.pwm_max}], got {pwm}")
    if curve.table is None:
        frac = pwm / curve.pwm_max
        return curve.thrust_max * frac * frac
    pts = curve.table
    for (p0, t0), (p1, t1) in zip(pts, pts[1:]):
        if pwm <= p1:
            if p1 == p0:
                return t1
            w = (pwm - p0) / (p1 - p0)
            return t0 + w * (t1 - t0)
    return pts[-1][1]


@dataclass(frozen=True, slots=True)
class BatteryModel:
    """Pack capacity and the fitted current split (all mA)."""

    capacity_mah: float = _CAPACITY_MAH
    voltage: float = 4.2
    i_idle_ma: float = _IDLE_MA
    i_motor_full_ma: float = _MOTOR_FULL_MA
    i_heading_ma: float = _HEADING_MA

    def __post_init__(self):
        for name in self.__slots__:
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")


#: Comparison pack for a similarly sized conventional quadrotor, which
#: must thrust continuously just to hover (6.6 min on the same cell).
QUAD_BASELINE_BATTERY = BatteryModel(
    i_idle_ma=50.0,
    i_motor_full_ma=(_CAPACITY_MAH * 60.0 / QUAD_BASELINE_MIN - 50.0) / 4.0,
    i_heading_ma=1e-9,
)


def lifetime_minutes(
    duty: float,
    heading_hold: bool,
    battery: BatteryModel,
    active_motors: int = 4,
) -> float:
    """Endurance in minutes at a constant motor duty fraction."""
    if not math.isfinite(duty) or not 0.0 <= duty <= 1.0:
        raise DomainError(f"duty must be in [0, 1], got {duty}")
    if active_motors < 0:
        raise DomainError(f"active_motors must be >= 0, got {active_motors}")
    current = battery.i_idle_ma + duty * active_motors * battery.i_motor_full_ma
    if heading_hold:
        current += battery.i_heading_ma
    return battery.capacity_mah * 60.0 / current


def sim_current_ma(
    thrusts_fraction_sum: float, heading_hold: bool, battery: BatteryModel
) -> float:
    """Instantaneous pack draw given the sum of per-rotor thrust fractions.

    A rotor at thrust fraction f draws f * i_motor_full, which makes a
    constant-duty run drain exactly to the :func:`lifetime_minutes`
    prediction.
    """
    current = battery.i_idle_ma + thrusts_fraction_sum * battery.i_motor_full_ma
    if heading_hold:
        current += battery.i_heading_ma
    return current


@dataclass(frozen=True, slots=True)
class BalloonSpec:
    """Gas/air densities, envelope areal density, and a reference payload."""

    rho_air: float = 1.204    # kg/m^3 at 20 C sea level
    rho_gas: float = 0.1664   # helium
    envelope_kg_per_m2: float = 0.0259 / (math.pi * 0.9**2)  # 25.9 g / 90 cm balloon
    payload: float = 0.0      # kg

    def __post_init__(self):
        if not (self.rho_air > self.rho_gas > 0.0):
            raise DomainError(
                f"need rho_air > rho_gas > 0, got {self.rho_air}, {self.rho_gas}"
            )
        if self.envelope_kg_per_m2 < 0.0:
            raise DomainError("envelope_kg_per_m2 must be >= 0")
        if self.payload < 0.0:
            raise DomainError("payload must be >= 0")


def sphere_diameter(volume_m3: float) -> float:
    return (6.0 * volume_m3 / math.pi) ** (1.0 / 3.0)


def sphere_area(volume_m3: float) -> float:
    d = sphere_diameter(volume_m3)
    return math.pi * d * d


def net_lift_kg(volume_m3: float, spec: BalloonSpec) -> float:
    """Payload mass a given volume supports at neutral buoyancy."""
    return (spec.rho_air - spec.rho_gas) * volume_m3 - \
        spec.envelope_kg_per_m2 * sphere_area(volume_m3)


def size_balloon(
    payload: float | None, spec: BalloonSpec, tol: float = 1e-9, max_iter: int = 500
) -> tuple[float, float]:
    """Volume (liters) and diameter (m) for neutral buoyancy at a payload (kg).

    Solves the buoyancy balance with envelope mass growing with surface
    area by fixed-point iteration to ``tol`` (relative).
    """
    if payload is None:
        payload = spec.payload
    if not math.isfinite(payload) or payload < 0.0:
        raise DomainError(f"payload must be >= 0, got {payload}")
    if payload == 0.0 and spec.envelope_kg_per_m2 == 0.0:
        return (0.0, 0.0)
    delta_rho = spec.rho_air - spec.rho_gas
    v = max(payload / delta_rho, 1e-9)
    for _ in range(max_iter):
        v_next = (payload + spec.envelope_kg_per_m2 * sphere_area(v)) / delta_rho
        if abs(v_next - v) <= tol * max(v_next, 1e-12):
            return (v_next * 1000.0, sphere_diameter(v_next))
        v = v_next
    raise DomainError(
        f"balloon sizing did not converge for payload {payload} kg; "
        "envelope mass grows too fast for the density gap"
    )


def ballast_trim(lift_n: float, platform_weight_n: float) -> float:
    """Detachable ballast mass (kg) to null excess lift."""
    if not math.isfinite(lift_n) or not math.isfinite(platform_weight_n):
        raise DomainError("lift and weight must be finite")
    if lift_n < platform_weight_n:
        raise DomainError(
            f"lift {lift_n} N is below platform weight {platform_weight_n} N; "
            "under-inflated (negative ballast)"
        )
    return (lift_n - platform_weight_n) / G


def load_motor_table(path) -> MotorCurve:
    """Read a two-column, headered CSV ``pwm,thrust_n`` into a MotorCurve."""
    import csv

    from .errors import SchemaError

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty motor table") from None
        if [h.strip() for h in header] != ["pwm", "thrust_n"]:
            raise SchemaError(f"expected header 'pwm,thrust_n', got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError("expected two columns", line=lineno)
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError as exc:
                raise SchemaError(str(exc), line=lineno) from None
    if not rows:
        raise SchemaError("motor table has no data rows")
    return MotorCurve(pwm_max=rows[-1][0], thrust_max=rows[-1][1], table=tuple(rows))
