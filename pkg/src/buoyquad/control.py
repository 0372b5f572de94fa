"""Two-stage hierarchical flight controller.

Stage one regulates altitude and yaw: PID loops produce a vertical
acceleration command and a yaw torque command, which are mapped to the
diagonal pair sums (q1, q2) by inverting the pair-level force model

    F1(q1, q2) = (c_z * (q1*q2 - (q1 - q2)^2),  c_psi * (q1 - q2)).

The inversion is done by clamped Newton-Raphson with an analytic
closed-form solution as both the oracle and the fallback.  Stage two
adds lateral motion: position PIDs produce differential-thrust commands
(in newtons) that are mixed across the rotors while preserving the pair
sums, scaled down jointly if they would drive any rotor negative.

Controller state (the integral accumulators) is single-owner per
simulated vehicle; everything else is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .dynamics import AeroParams, MotorThrusts, VehicleState, wrap_angle
from .errors import DomainError


@dataclass(frozen=True, slots=True)
class AxisGains:
    """PID gains for one controlled axis (set k_i = 0 for PD)."""

    k_p: float
    k_d: float = 0.0
    k_i: float = 0.0

    def __post_init__(self):
        for name in self.__slots__:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be a finite nonnegative gain, got {v}")


@dataclass(frozen=True, slots=True)
class GainSet:
    """Gains per controlled axis plus the shared integral clamp."""

    z: AxisGains
    psi: AxisGains
    x: AxisGains
    y: AxisGains
    integral_clamp: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.integral_clamp) or self.integral_clamp <= 0.0:
            raise DomainError(f"integral_clamp must be > 0, got {self.integral_clamp}")


@dataclass(frozen=True, slots=True)
class Setpoint:
    """Desired position/heading with optional feedforward rates."""

    x_d: float = 0.0
    y_d: float = 0.0
    z_d: float = 0.0
    psi_d: float = 0.0
    vx_d: float = 0.0
    vy_d: float = 0.0
    vz_d: float = 0.0
    omega_d: float = 0.0

    def __post_init__(self):
        for name in self.__slots__:
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        object.__setattr__(self, "psi_d", wrap_angle(self.psi_d))


class CommandedAccel(NamedTuple):
    """Outer-loop outputs: lateral thrust-differential commands (N),
    vertical acceleration command (m/s^2), yaw torque command (rad/s^2)."""

    a_x: float
    a_y: float
    a_z: float
    tau_z: float


@dataclass
class ControllerState:
    """Integral accumulators and allocation latches, one per vehicle."""

    int_z: float = 0.0
    int_x: float = 0.0
    int_y: float = 0.0
    t: float = 0.0
    saturated: bool = False
    lateral_budget_limited: bool = False
    descent_parity: bool = False

    def reset(self) -> None:
        self.int_z = self.int_x = self.int_y = 0.0
        self.saturated = False
        self.lateral_budget_limited = False
        self.descent_parity = False


def _clamp(value: float, bound: float) -> float:
    return min(max(value, -bound), bound)


def outer_loop_altitude_yaw(
    state: VehicleState,
    sp: Setpoint,
    gains: GainSet,
    cs: ControllerState,
    dt: float,
) -> tuple[float, float]:
    """Altitude and yaw PID step: returns (a_z, tau_z) commands.

    Signs are corrective: a positive altitude deficit (z below z_d)
    commands a climb.  Yaw error is the wrapped angular difference.
    The altitude integrator is clamped and frozen while any rotor was
    saturated on the previous step (anti-windup).
    """
    if not (dt > 0.0) or not math.isfinite(dt):
        raise DomainError(f"dt must be > 0, got {dt}")
    e_z = state.z - sp.z_d
    if not cs.saturated:
        cs.int_z = _clamp(cs.int_z + e_z * dt, gains.integral_clamp)
    g = gains.z
    a_z = -g.k_p * e_z - g.k_d * (state.v_z - sp.vz_d) - g.k_i * cs.int_z

    e_psi = wrap_angle(state.psi - sp.psi_d)
    g = gains.psi
    tau_z = -g.k_p * e_psi - g.k_d * (state.omega_z - sp.omega_d)
    cs.t += dt
    return a_z, tau_z


def f1_forward(q1: float, q2: float, params: AeroParams) -> tuple[float, float]:
    """Pair-level force model: (a_z, tau_z) produced by balanced pair sums."""
    dq = q1 - q2
    return (params.c_z * (q1 * q2 - dq * dq), params.c_psi * dq)


def invert_f1_closed_form(
    a_z_cmd: float, tau_z_cmd: float, params: AeroParams
) -> tuple[float, float]:
    """Unique nonnegative (q1, q2) realizing the commands, analytically.

    With s = tau_z/c_psi and p = a_z/c_z + s^2 the solution satisfies
    q1 - q2 = s and q1*q2 = p, i.e. the roots of a quadratic whose sum is
    sqrt(s^2 + 4p).  Commands with p < 0 are infeasible (no nonnegative
    pair reaches that much descent at that torque); they are projected to
    p = 0, which keeps the torque exact and yields the strongest feasible
    descent a_z = -c_z * s^2 with one pair fully off.
    """
    if not math.isfinite(a_z_cmd) or not math.isfinite(tau_z_cmd):
        raise DomainError("commands must be finite")
    s = tau_z_cmd / params.c_psi
    p = a_z_cmd / params.c_z + s * s
    if p < 0.0:
        p = 0.0
    total = math.sqrt(s * s + 4.0 * p)
    q1 = 0.5 * (total + s)
    q2 = 0.5 * (total - s)
    return (max(q1, 0.0), max(q2, 0.0))


class NewtonResult(NamedTuple):
    q1: float
    q2: float
    iterations: int
    fell_back: bool


def invert_f1_newton(
    a_z_cmd: float,
    tau_z_cmd: float,
    params: AeroParams,
    init: tuple[float, float] | None = None,
    tol: float = 1e-10,
    max_iter: int = 25,
) -> NewtonResult:
    """Invert F1 by Newton-Raphson on the nonnegative orthant.

    Iterates q <- q - J^-1 * (F1(q) - target), clamping each iterate to
    q >= 0.  The default start point solves the (linear) torque equation
    first and sits slightly inside the orthant on that line; a full step
    then never lands on the singular corner q1 = q2 = 0 and convergence
    is quadratic for every feasible target.  Falls back to the closed
    form on a singular Jacobian or if the residual has not converged
    after max_iter; the flag in the result records whether the fallback
    was taken.  Never returns non-finite values.
    """
    if not (tol > 0.0):
        raise DomainError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    if not math.isfinite(a_z_cmd) or not math.isfinite(tau_z_cmd):
        raise DomainError("commands must be finite")

    c_z, c_psi = params.c_z, params.c_psi
    if init is None:
        s0 = tau_z_cmd / c_psi
        margin = 0.05 * (1.0 + abs(s0))
        init = (max(s0, 0.0) + margin, max(-s0, 0.0) + margin)
    q1, q2 = max(init[0], 0.0), max(init[1], 0.0)
    scale = max(1.0, abs(a_z_cmd), abs(tau_z_cmd))
    for iteration in range(max_iter + 1):
        az, tau = f1_forward(q1, q2, params)
        r_a = az - a_z_cmd
        r_t = tau - tau_z_cmd
        if math.hypot(r_a, r_t) < tol * scale:
            return NewtonResult(q1, q2, iteration, False)
        dq = q1 - q2
        # J = [[c_z*(q2 - 2dq), c_z*(q1 + 2dq)], [c_psi, -c_psi]]
        j11 = c_z * (q2 - 2.0 * dq)
        j12 = c_z * (q1 + 2.0 * dq)
        det = -c_psi * (j11 + j12)
        if abs(det) < 1e-14 or not math.isfinite(det):
            break
        d1 = (-c_psi * r_a - j12 * r_t) / det
        d2 = (-c_psi * r_a + j11 * r_t) / det
        q1 = max(q1 - d1, 0.0)
        q2 = max(q2 - d2, 0.0)
        if not (math.isfinite(q1) and math.isfinite(q2)):
            break
    q1, q2 = invert_f1_closed_form(a_z_cmd, tau_z_cmd, params)
    return NewtonResult(q1, q2, max_iter, True)


def lateral_mix(q1: float, q2: float, a_x_cmd: float, a_y_cmd: float) -> MotorThrusts:
    """Distribute pair sums across rotors with lateral differentials.

    M1 = (q1 - a_x - a_y)/2   M3 = (q1 + a_x + a_y)/2
    M2 = (q2 - a_x + a_y)/2   M4 = (q2 + a_x - a_y)/2

    Each pair splits around q/2 with an equal-and-opposite differential,
    so M1 + M3 == q1 and M2 + M4 == q2 hold for any in-budget command and
    the net lateral force is (2*a_x, 2*a_y)/m.  The commands are scaled
    down jointly (direction preserved) so every rotor stays nonnegative.
    """
    if q1 < 0.0 or q2 < 0.0:
        raise DomainError(f"pair sums must be >= 0, got ({q1}, {q2})")
    a_x, a_y, _ = scale_lateral_to_budget(q1, q2, a_x_cmd, a_y_cmd)
    d1 = 0.5 * (a_x + a_y)
    d2 = 0.5 * (a_x - a_y)
    h1 = 0.5 * q1
    h2 = 0.5 * q2
    # max() only clips sub-ulp negatives from rounding at an active budget
    # constraint; in-budget commands are mixed exactly.
    return MotorThrusts(
        max(h1 - d1, 0.0),
        max(h2 - d2, 0.0),
        max(h1 + d1, 0.0),
        max(h2 + d2, 0.0),
    )


def scale_lateral_to_budget(
    q1: float, q2: float, a_x: float, a_y: float
) -> tuple[float, float, float]:
    """Largest direction-preserving scaling of (a_x, a_y) keeping rotors >= 0.

    Returns the scaled commands and the scale factor in (0, 1].
    """
    u = abs(a_x + a_y)   # differential carried by the q1 pair
    v = abs(a_x - a_y)   # differential carried by the q2 pair
    scale = 1.0
    if u > q1:
        scale = min(scale, q1 / u)
    if v > q2:
        scale = min(scale, q2 / v)
    if scale < 1.0:
        return (a_x * scale, a_y * scale, scale)
    return (a_x, a_y, 1.0)


class ControlOutput(NamedTuple):
    thrusts: MotorThrusts
    commanded: CommandedAccel
    newton: NewtonResult
    budget_scale: float
    saturated: bool


def control_step_detailed(
    state: VehicleState,
    sp: Setpoint,
    gains: GainSet,
    params: AeroParams,
    cs: ControllerState,
    dt: float,
) -> ControlOutput:
    """Full pipeline: outer loops -> F1 inversion -> lateral PID -> mix -> clamp.

    Pair sums from the inversion are clamped to [0, 2*t_max] before
    mixing (per-rotor feasibility); the final per-rotor clamp at t_max
    sets the saturation latch that freezes the integrators next step.
    """
    a_z, tau_z = outer_loop_altitude_yaw(state, sp, gains, cs, dt)

    s = tau_z / params.c_psi
    p = a_z / params.c_z + s * s
    if a_z == 0.0 and tau_z == 0.0:
        # Exact equilibrium: hover consumes nothing, skip the solver.
        result = NewtonResult(0.0, 0.0, 0, False)
    elif p < 0.0:
        # Descent-dominant command: no balanced-pair solution reaches it,
        # so run one diagonal pair alone (the configuration that sinks)
        # and alternate which pair carries the burst each period.  The
        # torque ripple cancels over consecutive periods while the mean
        # vertical force matches the command exactly.
        ripple = math.sqrt(-p)
        s_tot = s + (ripple if cs.descent_parity else -ripple)
        cs.descent_parity = not cs.descent_parity
        if s_tot >= 0.0:
            result = NewtonResult(s_tot, 0.0, 0, False)
        else:
            result = NewtonResult(0.0, -s_tot, 0, False)
    else:
        result = invert_f1_newton(a_z, tau_z, params)
    e_x = state.x - sp.x_d
    e_y = state.y - sp.y_d
    if not cs.saturated and not cs.lateral_budget_limited:
        cs.int_x = _clamp(cs.int_x + e_x * dt, gains.integral_clamp)
        cs.int_y = _clamp(cs.int_y + e_y * dt, gains.integral_clamp)
    gx, gy = gains.x, gains.y
    a_x = -gx.k_p * e_x - gx.k_d * (state.v_x - sp.vx_d) - gx.k_i * cs.int_x
    a_y = -gy.k_p * e_y - gy.k_d * (state.v_y - sp.vy_d) - gy.k_i * cs.int_y

    # Lateral authority floor: raise both pair sums by a common increment
    # so the differentials fit (at hover the vertical loop provides no
    # budget at all).  The common raise keeps q1 - q2, hence yaw torque,
    # exact; the altitude integrator absorbs the small lift coupling.
    floor_raise = max(abs(a_x + a_y) - result.q1, abs(a_x - a_y) - result.q2, 0.0)
    q_cap = 2.0 * params.t_max
    q1 = min(result.q1 + floor_raise, q_cap)
    q2 = min(result.q2 + floor_raise, q_cap)

    a_x_s, a_y_s, scale = scale_lateral_to_budget(q1, q2, a_x, a_y)
    cs.lateral_budget_limited = scale < 1.0
    mixed = lateral_mix(q1, q2, a_x_s, a_y_s)
    final = mixed.clamped(params.t_max)
    cs.saturated = any(
        f != m for f, m in zip(final.as_tuple(), mixed.as_tuple())
    )
    commanded = CommandedAccel(a_x, a_y, a_z, tau_z)
    return ControlOutput(final, commanded, result, scale, cs.saturated)


def control_step(
    state: VehicleState,
    sp: Setpoint,
    gains: GainSet,
    params: AeroParams,
    cs: ControllerState,
    dt: float,
) -> MotorThrusts:
    """Per-rotor thrusts for one control period (see control_step_detailed)."""
    return control_step_detailed(state, sp, gains, params, cs, dt).thrusts
