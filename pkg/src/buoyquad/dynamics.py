"""Planar + vertical + yaw dynamics of a buoyancy-neutral quadrotor.

The vehicle hangs from a neutrally buoyant envelope, so weight is fully
cancelled and hover needs no thrust.  The four rotors lie in the horizontal
plane and push along the diagonals of the body square:

    rotor 1 -> (-x, -y)     rotor 3 -> (+x, +y)     (diagonal pair q1)
    rotor 2 -> (-x, +y)     rotor 4 -> (+x, -y)     (diagonal pair q2)

Horizontal force is the signed sum of rotor thrusts per axis with linear
drag against the air-relative velocity.  Vertical force has no dedicated
actuator: it comes from the wake interaction between the two diagonal
pairs.  With both pairs active and balanced the inter-rotor flow traps a
high-pressure cushion and the vehicle rises; a single active pair leaves
an unopposed low-pressure wake and the vehicle sinks.  That behaviour is
modelled by the coupling term

    a_z = C_z * (L(m) - (q1 - q2)^2),   L(m) = 4*sqrt(m1*m2*m3*m4)

where ``L`` equals ``q1*q2`` whenever each diagonal pair is internally
balanced (m1 == m3, m2 == m4, the regime the pair-level controller works
in) and vanishes as soon as any pair has an idle rotor, which is what
makes two-adjacent-rotor flight descend.  Yaw torque is proportional to
the pair imbalance ``q1 - q2``; an optional linear yaw damping term keeps
the spin rate bounded (set ``c_dpsi = 0`` for the undamped form).

All functions are pure and operate on immutable value types; identical
inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    wrapped = math.fmod(theta, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    elif wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True, slots=True)
class VehicleState:
    """Position (m), velocity (m/s), yaw (rad, in (-pi, pi]), yaw rate (rad/s)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    v_x: float = 0.0
    v_y: float = 0.0
    v_z: float = 0.0
    psi: float = 0.0
    omega_z: float = 0.0

    def __post_init__(self):
        if not (
            math.isfinite(self.x) and math.isfinite(self.y)
            and math.isfinite(self.z) and math.isfinite(self.v_x)
            and math.isfinite(self.v_y) and math.isfinite(self.v_z)
            and math.isfinite(self.psi) and math.isfinite(self.omega_z)
        ):
            for name in self.__slots__:
                _require_finite(name, getattr(self, name))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x, self.y, self.z, self.v_x, self.v_y, self.v_z, self.psi, self.omega_z)


@dataclass(frozen=True, slots=True)
class MotorThrusts:
    """Per-rotor thrust commands in newtons, all nonnegative.

    ``q1``/``q2`` are the diagonal pair sums, always computed from the
    individual thrusts so they can never drift out of sync.
    """

    m1: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    def __post_init__(self):
        # NaNs fail the >= test, infinities fail the finite-sum test.
        if not (
            self.m1 >= 0.0 and self.m2 >= 0.0
            and self.m3 >= 0.0 and self.m4 >= 0.0
            and math.isfinite(self.m1 + self.m2 + self.m3 + self.m4)
        ):
            for name in self.__slots__:
                value = getattr(self, name)
                _require_finite(name, value)
                if value < 0.0:
                    raise DomainError(f"{name} must be >= 0, got {value}")

    @property
    def q1(self) -> float:
        return self.m1 + self.m3

    @property
    def q2(self) -> float:
        return self.m2 + self.m4

    @classmethod
    def from_pairs(cls, q1: float, q2: float) -> "MotorThrusts":
        """Split pair sums evenly across each diagonal (the balanced regime)."""
        return cls(0.5 * q1, 0.5 * q2, 0.5 * q1, 0.5 * q2)

    def clamped(self, t_max: float) -> "MotorThrusts":
        """Saturate every rotor to [0, t_max]."""
        return MotorThrusts(
            min(max(self.m1, 0.0), t_max),
            min(max(self.m2, 0.0), t_max),
            min(max(self.m3, 0.0), t_max),
            min(max(self.m4, 0.0), t_max),
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.m1, self.m2, self.m3, self.m4)


@dataclass(frozen=True, slots=True)
class AeroParams:
    """Mass and aerodynamic coefficients of the vehicle.

    m       -- mass, kg
    c_d     -- linear drag coefficient, 1/s
    c_z     -- vertical wake-coupling gain, (m/s^2) per N^2
    c_psi   -- yaw torque gain, (rad/s^2) per N of pair imbalance
    c_dpsi  -- yaw damping, 1/s (0 disables damping)
    t_max   -- per-rotor thrust ceiling, N
    """

    m: float
    c_d: float
    c_z: float
    c_psi: float
    c_dpsi: float = 0.0
    t_max: float = 0.154

    def __post_init__(self):
        for name in self.__slots__:
            _require_finite(name, getattr(self, name))
        if self.m <= 0.0:
            raise DomainError(f"mass must be > 0, got {self.m}")
        if self.c_d < 0.0:
            raise DomainError(f"c_d must be >= 0, got {self.c_d}")
        if self.c_z <= 0.0:
            raise DomainError(f"c_z must be > 0, got {self.c_z}")
        if self.c_psi <= 0.0:
            raise DomainError(f"c_psi must be > 0, got {self.c_psi}")
        if self.c_dpsi < 0.0:
            raise DomainError(f"c_dpsi must be >= 0, got {self.c_dpsi}")
        if self.t_max <= 0.0:
            raise DomainError(f"t_max must be > 0, got {self.t_max}")


@dataclass(frozen=True, slots=True)
class GeometryConfig:
    """Rotor layout: pair separation (m) and angle between adjacent arms (rad)."""

    d_separation: float
    alpha: float

    def __post_init__(self):
        _require_finite("d_separation", self.d_separation)
        _require_finite("alpha", self.alpha)
        if self.d_separation <= 0.0:
            raise DomainError(f"d_separation must be > 0, got {self.d_separation}")
        if not 0.0 < self.alpha < math.pi:
            raise DomainError(f"alpha must be in (0, pi), got {self.alpha}")


@dataclass(frozen=True, slots=True)
class StateDerivative:
    """Per-second rates of VehicleState; a_* alias the velocity rates."""

    dx: float
    dy: float
    dz: float
    dv_x: float
    dv_y: float
    dv_z: float
    dpsi: float
    domega_z: float

    @property
    def a_x(self) -> float:
        return self.dv_x

    @property
    def a_y(self) -> float:
        return self.dv_y

    @property
    def a_z(self) -> float:
        return self.dv_z

    def as_tuple(self) -> tuple[float, ...]:
        return (self.dx, self.dy, self.dz, self.dv_x, self.dv_y, self.dv_z,
                self.dpsi, self.domega_z)


def yaw_coefficient(geometry: GeometryConfig) -> float:
    """Per-thrust yaw moment arm in meters: d_separation * sin(alpha / 2).

    Dividing the arm by the vehicle's yaw moment of inertia gives the
    ``c_psi`` coefficient used in :class:`AeroParams`.
    """
    return geometry.d_separation * math.sin(0.5 * geometry.alpha)


def c_psi_from_geometry(geometry: GeometryConfig, yaw_inertia: float) -> float:
    """Yaw torque gain (rad/s^2 per N) from the moment arm and yaw inertia."""
    if yaw_inertia <= 0.0 or not math.isfinite(yaw_inertia):
        raise DomainError(f"yaw_inertia must be > 0, got {yaw_inertia}")
    return yaw_coefficient(geometry) / yaw_inertia


def wake_coupling(m1: float, m2: float, m3: float, m4: float) -> float:
    """Effective pair-coupling lift term, 4*sqrt(m1*m2*m3*m4).

    Equals q1*q2 when each diagonal pair is balanced; zero whenever any
    rotor is idle, so pair-broken (adjacent-only) operation never lifts.
    """
    return 4.0 * math.sqrt(m1 * m2 * m3 * m4)


def _rhs(
    v_x: float, v_y: float, v_z: float, omega_z: float,
    m1: float, m2: float, m3: float, m4: float,
    p: AeroParams, w_x: float, w_y: float, w_z: float,
) -> tuple[float, float, float, float, float, float, float, float]:
    # Hot path shared by derivative() and step_rk4(); no validation here.
    q1 = m1 + m3
    q2 = m2 + m4
    inv_m = 1.0 / p.m
    a_x = (m3 + m4 - m1 - m2) * inv_m - p.c_d * (v_x - w_x)
    a_y = (m3 + m2 - m1 - m4) * inv_m - p.c_d * (v_y - w_y)
    dq = q1 - q2
    a_z = p.c_z * (4.0 * math.sqrt(m1 * m2 * m3 * m4) - dq * dq) - p.c_d * (v_z - w_z)
    domega = p.c_psi * dq - p.c_dpsi * omega_z
    return (v_x, v_y, v_z, a_x, a_y, a_z, omega_z, domega)


def derivative(
    state: VehicleState,
    thrusts: MotorThrusts,
    params: AeroParams,
    wind: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> StateDerivative:
    """Continuous-time state derivative under the given thrusts and wind.

    Wind enters as relative-velocity drag, -c_d * (v - w), on every axis.
    Raises :class:`DomainError` for non-finite wind components (state and
    thrusts are validated at construction).
    """
    w_x, w_y, w_z = wind
    for name, value in (("w_x", w_x), ("w_y", w_y), ("w_z", w_z)):
        _require_finite(name, value)
    rates = _rhs(
        state.v_x, state.v_y, state.v_z, state.omega_z,
        thrusts.m1, thrusts.m2, thrusts.m3, thrusts.m4,
        params, w_x, w_y, w_z,
    )
    return StateDerivative(*rates)


def step_rk4(
    state: VehicleState,
    thrusts: MotorThrusts,
    params: AeroParams,
    wind: tuple[float, float, float] = (0.0, 0.0, 0.0),
    dt: float = 0.005,
) -> VehicleState:
    """One classical RK4 step with thrusts and wind held constant over dt.

    Yaw is re-wrapped to (-pi, pi] in the returned state only; the
    intermediate stages stay unwrapped to keep the integrand smooth.
    """
    if not (dt > 0.0) or not math.isfinite(dt):
        raise DomainError(f"dt must be > 0, got {dt}")
    w_x, w_y, w_z = wind
    for name, value in (("w_x", w_x), ("w_y", w_y), ("w_z", w_z)):
        _require_finite(name, value)

    m1, m2, m3, m4 = thrusts.m1, thrusts.m2, thrusts.m3, thrusts.m4
    # Thrust and wind terms are constant over the step; each stage only
    # re-evaluates the state-linear drag/damping parts.
    inv_m = 1.0 / params.m
    c_d = params.c_d
    c_dpsi = params.c_dpsi
    q1 = m1 + m3
    q2 = m2 + m4
    dq = q1 - q2
    fx = (m3 + m4 - m1 - m2) * inv_m + c_d * w_x
    fy = (m3 + m2 - m1 - m4) * inv_m + c_d * w_y
    fz = params.c_z * (4.0 * math.sqrt(m1 * m2 * m3 * m4) - dq * dq) + c_d * w_z
    tq = params.c_psi * dq

    vx0, vy0, vz0, om0 = state.v_x, state.v_y, state.v_z, state.omega_z
    h = 0.5 * dt

    ax1 = fx - c_d * vx0
    ay1 = fy - c_d * vy0
    az1 = fz - c_d * vz0
    do1 = tq - c_dpsi * om0

    ax2 = fx - c_d * (vx0 + h * ax1)
    ay2 = fy - c_d * (vy0 + h * ay1)
    az2 = fz - c_d * (vz0 + h * az1)
    do2 = tq - c_dpsi * (om0 + h * do1)

    ax3 = fx - c_d * (vx0 + h * ax2)
    ay3 = fy - c_d * (vy0 + h * ay2)
    az3 = fz - c_d * (vz0 + h * az2)
    do3 = tq - c_dpsi * (om0 + h * do2)

    ax4 = fx - c_d * (vx0 + dt * ax3)
    ay4 = fy - c_d * (vy0 + dt * ay3)
    az4 = fz - c_d * (vz0 + dt * az3)
    do4 = tq - c_dpsi * (om0 + dt * do3)

    sixth = dt / 6.0
    # Position stage slopes are the stage velocities, which collapses the
    # weighted sum to v0*dt plus the first three acceleration stages.
    pos_w = dt * sixth
    return VehicleState(
        state.x + dt * vx0 + pos_w * (ax1 + ax2 + ax3),
        state.y + dt * vy0 + pos_w * (ay1 + ay2 + ay3),
        state.z + dt * vz0 + pos_w * (az1 + az2 + az3),
        vx0 + sixth * (ax1 + 2.0 * ax2 + 2.0 * ax3 + ax4),
        vy0 + sixth * (ay1 + 2.0 * ay2 + 2.0 * ay3 + ay4),
        vz0 + sixth * (az1 + 2.0 * az2 + 2.0 * az3 + az4),
        wrap_angle(state.psi + dt * om0 + pos_w * (do1 + do2 + do3)),
        om0 + sixth * (do1 + 2.0 * do2 + 2.0 * do3 + do4),
    )
