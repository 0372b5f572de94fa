"""Rotor fault detection, isolation, and fault-tolerant thrust allocation.

Detection compares the measured response against a model shadow driven by
the commanded thrusts.  A dead rotor produces three persistent signatures
at once: the heading runs away from its setpoint, the yaw rate deviates
from the model (the surviving pair imbalance torques the vehicle), and
the vertical acceleration collapses (a broken diagonal pair cannot trap
the pressure cushion, see :mod:`buoyquad.dynamics`).  Only when all three
residuals exceed their thresholds over a full persistence window is a
verdict issued, which rejects gusts and other short-lived disturbances.

Isolation follows the force map: a fault in the q1 pair (rotors 1/3)
always spins the vehicle negative, a fault in the q2 pair (rotors 2/4)
positive; within the pair, the sign of the lateral y-velocity residual
picks the rotor (losing rotor 1 removes a (-x,-y) pusher so the vehicle
drifts +y, and so on around the square):

    omega_z < 0:  e_vy > 0 -> rotor 1,   e_vy < 0 -> rotor 3
    omega_z > 0:  e_vy > 0 -> rotor 4,   e_vy < 0 -> rotor 2

After isolation the vehicle descends and steers to a recovery point with
the two rotors that remain after also shutting down the failed rotor's
far-adjacent neighbour (the one across the pair-separation gap).  The
survivors are one rotor from each diagonal pair; with both pairs broken
the wake cushion is gone, so this configuration can only descend while
it steers, which is exactly the intended recovery behaviour.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .dynamics import AeroParams, MotorThrusts, VehicleState, step_rk4, wrap_angle
from .errors import DomainError, UnrecoverableFault

# Far-adjacent neighbour across the pair-separation gap (rotors 1/2 sit on
# one side, 3/4 on the other; 1-4 and 2-3 face each other across the gap).
# Shutting both leaves adjacent survivors {2, 3} or {1, 4}.
FAR_ADJACENT = {1: 4, 2: 3, 3: 2, 4: 1}

#: Verdict table: (omega sign, y-velocity residual sign) -> failed rotor.
ISOLATION_TABLE = {
    (-1, +1): 1,
    (-1, -1): 3,
    (+1, +1): 4,
    (+1, -1): 2,
}


@dataclass(frozen=True, slots=True)
class FaultConfig:
    """Residual thresholds and the persistence window.

    k_omega_z      -- yaw-rate residual threshold, rad/s
    k_a_z          -- vertical-acceleration residual threshold, m/s^2
    window         -- persistence duration, s
    v_residual_eps -- dead-band on the lateral velocity residual, m/s
    psi_eps        -- dead-band on the heading error gate, rad
    """

    k_omega_z: float
    k_a_z: float
    window: float = 1.25
    v_residual_eps: float = 0.05
    psi_eps: float = 0.03

    def __post_init__(self):
        for name in self.__slots__:
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")


class ResidualSample(NamedTuple):
    """One time-stamped residual set plus the measured yaw rate."""

    t: float
    e_psi: float
    e_omega_z: float
    e_a_z: float
    e_v_x: float
    e_v_y: float
    omega_z: float


class FaultEvidence:
    """Time-ordered residual samples over the trailing persistence window."""

    def __init__(self, window: float):
        if not (window > 0.0):
            raise DomainError(f"window must be > 0, got {window}")
        self.window = window
        self._samples: deque[ResidualSample] = deque()

    def append(self, sample: ResidualSample) -> None:
        if self._samples and sample.t <= self._samples[-1].t:
            raise DomainError(
                f"samples must be time-ordered: {sample.t} after {self._samples[-1].t}"
            )
        self._samples.append(sample)
        cutoff = sample.t - self.window
        # Keep one sample at/just before the window edge so the span test
        # sees a full window.
        while len(self._samples) > 2 and self._samples[1].t <= cutoff:
            self._samples.popleft()

    def __len__(self) -> int:
        return len(self._samples)

    @property
    def samples(self) -> tuple[ResidualSample, ...]:
        return tuple(self._samples)

    def spans_window(self) -> bool:
        if len(self._samples) < 2:
            return False
        return self._samples[-1].t - self._samples[0].t >= self.window * (1.0 - 1e-9)

    def raw_samples(self) -> deque[ResidualSample]:
        """The live pruned buffer (trailing window plus one edge sample)."""
        return self._samples

    def window_samples(self) -> tuple[ResidualSample, ...]:
        newest = self._samples[-1].t
        cutoff = newest - self.window
        return tuple(s for s in self._samples if s.t >= cutoff - 1e-12)


@dataclass(frozen=True, slots=True)
class FaultStatus:
    """Per-rotor health verdict; at most one rotor failed per event."""

    failed_rotor: int | None = None
    detected_at: float | None = None

    @property
    def healthy(self) -> bool:
        return self.failed_rotor is None

    def label(self) -> str:
        return "healthy" if self.healthy else f"failed_m{self.failed_rotor}"


HEALTHY = FaultStatus()


class ModelExpectation(NamedTuple):
    """Model-predicted response after one control period."""

    omega_z: float
    a_z: float
    v_x: float
    v_y: float
    next_state: VehicleState


def expected_response(
    state: VehicleState,
    thrusts: MotorThrusts,
    params: AeroParams,
    dt: float = 0.005,
) -> ModelExpectation:
    """Propagate the model one period under the commanded thrusts.

    Returns the yaw rate and lateral velocities the vehicle should show at
    the end of the period and the vertical acceleration the thrusts should
    produce there.  Chaining the returned state propagates expectations
    across a whole persistence window.
    """
    nxt = step_rk4(state, thrusts, params, dt=dt)
    dq = thrusts.q1 - thrusts.q2
    coupling = 4.0 * math.sqrt(thrusts.m1 * thrusts.m2 * thrusts.m3 * thrusts.m4)
    a_z = params.c_z * (coupling - dq * dq) - params.c_d * nxt.v_z
    return ModelExpectation(nxt.omega_z, a_z, nxt.v_x, nxt.v_y, nxt)


def detect(evidence: FaultEvidence, config: FaultConfig) -> FaultStatus:
    """Issue a verdict from the trailing window of residuals.

    Fires only when the heading error, the yaw-rate residual, and the
    vertical-acceleration residual all exceed their thresholds on every
    sample of a full window.  The pair is picked by the sign of the
    measured yaw rate, the rotor within the pair by the sign of the
    window-mean lateral velocity residual (dead-banded).  Insufficient or
    ambiguous evidence returns a provisional healthy status.
    """
    if not evidence.spans_window():
        return HEALTHY
    samples = evidence.raw_samples()
    newest = samples[-1]
    # Newest-first gate: in healthy flight the latest residuals sit at the
    # noise floor and the scan exits immediately.
    if (
        abs(newest.e_psi) <= config.psi_eps
        or abs(newest.e_omega_z) <= config.k_omega_z
        or abs(newest.e_a_z) <= config.k_a_z
    ):
        return HEALTHY
    for s in samples:
        if abs(s.e_psi) <= config.psi_eps:
            return HEALTHY
        if abs(s.e_omega_z) <= config.k_omega_z:
            return HEALTHY
        if abs(s.e_a_z) <= config.k_a_z:
            return HEALTHY
    mean_evy = sum(s.e_v_y for s in samples) / len(samples)
    if abs(mean_evy) <= config.v_residual_eps:
        return HEALTHY
    omega_now = newest.omega_z
    if omega_now == 0.0:
        return HEALTHY
    key = (1 if omega_now > 0.0 else -1, 1 if mean_evy > 0.0 else -1)
    return FaultStatus(failed_rotor=ISOLATION_TABLE[key], detected_at=newest.t)


class ResidualMonitor:
    """Online detector: one per vehicle, single-writer.

    Holds a model shadow state re-anchored to the estimated state every
    window, propagates it with the commanded thrusts, and accumulates the
    residual evidence.  The verdict is immutable once issued.
    """

    #: First-order filter time constant applied to the acceleration
    #: residual before thresholding; accelerometer noise is white and a
    #: single flicker below threshold must not break window persistence.
    A_Z_FILTER_TAU = 0.08

    def __init__(self, config: FaultConfig, params: AeroParams, dt: float):
        if not (dt > 0.0):
            raise DomainError(f"dt must be > 0, got {dt}")
        self.config = config
        self.params = params
        self.dt = dt
        self.evidence = FaultEvidence(config.window)
        self.status = HEALTHY
        self._shadow: VehicleState | None = None
        self._anchor_t = 0.0
        self._e_a_z_filtered = 0.0
        self._alpha_az = dt / (dt + self.A_Z_FILTER_TAU)

    def update(
        self,
        t: float,
        est_state: VehicleState,
        a_z_meas: float,
        commanded: MotorThrusts,
        psi_desired: float,
    ) -> FaultStatus:
        """Ingest one sample; returns the (possibly new) verdict.

        ``commanded`` is the thrust set actually sent to the motors over
        the period ending at ``t``; ``a_z_meas`` the measured vertical
        acceleration at ``t``.
        """
        if not self.status.healthy:
            return self.status
        if self._shadow is None:
            self._shadow = est_state
            self._anchor_t = t
            return self.status

        exp = expected_response(self._shadow, commanded, self.params, self.dt)
        self._shadow = exp.next_state
        self._e_a_z_filtered += self._alpha_az * (
            (a_z_meas - exp.a_z) - self._e_a_z_filtered
        )
        sample = ResidualSample(
            t=t,
            e_psi=wrap_angle(est_state.psi - psi_desired),
            e_omega_z=est_state.omega_z - exp.omega_z,
            e_a_z=self._e_a_z_filtered,
            e_v_x=est_state.v_x - exp.v_x,
            e_v_y=est_state.v_y - exp.v_y,
            omega_z=est_state.omega_z,
        )
        self.evidence.append(sample)

        # Re-anchor the shadow periodically to bound open-loop drift, but
        # only while the model agrees with the measurements: resetting with
        # elevated residuals would wipe the evidence a verdict needs.
        quiet = (
            abs(sample.e_omega_z) <= self.config.k_omega_z
            and abs(sample.e_a_z) <= self.config.k_a_z
            and abs(sample.e_v_y) <= self.config.v_residual_eps
        )
        if quiet and t - self._anchor_t >= self.config.window:
            self._shadow = est_state
            self._anchor_t = t

        self.status = detect(self.evidence, self.config)
        return self.status


def ftc_allocate(
    a_x_cmd: float,
    a_y_cmd: float,
    tau_z_cmd: float,
    failed: int | Sequence[int],
    t_max: float | None = None,
    norm_mode: str = "euclidean",
) -> tuple[MotorThrusts, float]:
    """Reallocate thrust after isolating a failed rotor.

    The failed rotor and its far-adjacent neighbour are switched off; the
    surviving adjacent pair receives ``(n + tau_z)/2`` and ``(n - tau_z)/2``
    where ``n`` is the magnitude of the lateral command.  The desired
    heading is derived from the lateral command, psi_d = atan2(a_y, a_x),
    since yaw is no longer independently controllable.  Outputs are
    clamped to [0, t_max].

    ``norm_mode`` selects the reading of the lateral command magnitude:
    "euclidean" (vector norm, default) or "scalar" (|a_x + a_y|).
    """
    failed_set = {failed} if isinstance(failed, int) else set(failed)
    if len(failed_set) != 1:
        raise UnrecoverableFault(
            f"cannot reallocate around rotors {sorted(failed_set)}; descend-only"
        )
    rotor = failed_set.pop()
    if rotor not in FAR_ADJACENT:
        raise DomainError(f"rotor id must be 1..4, got {rotor}")
    if norm_mode == "euclidean":
        n = math.hypot(a_x_cmd, a_y_cmd)
    elif norm_mode == "scalar":
        n = abs(a_x_cmd + a_y_cmd)
    else:
        raise DomainError(f"unknown norm_mode {norm_mode!r}")

    hi = 0.5 * (n + tau_z_cmd)
    lo = 0.5 * (n - tau_z_cmd)
    cap = math.inf if t_max is None else t_max
    hi = min(max(hi, 0.0), cap)
    lo = min(max(lo, 0.0), cap)

    off = {rotor, FAR_ADJACENT[rotor]}
    thrust = [0.0, 0.0, 0.0, 0.0]
    if off == {1, 4}:
        # Survivors 2 and 3: torque = c_psi*(m3 - m2), set by hi - lo.
        thrust[2] = hi
        thrust[1] = lo
    else:
        # Survivors 1 and 4: torque = c_psi*(m1 - m4).
        thrust[0] = hi
        thrust[3] = lo
    psi_d = math.atan2(a_y_cmd, a_x_cmd)
    return MotorThrusts(*thrust), psi_d
