"""Sensor models, measurement noise, and wind/disturbance injection.

Three sensor channels with independent sample rates and zero-order hold
between samples: an IMU (3-axis accelerometer + yaw gyro), a downward
time-of-flight altimeter that ranges the surface below up to a hard
maximum, and an optic-flow sensor that measures lateral velocity in the
body frame.  All stochastic draws come from a single per-run generator,
so a fixed seed reproduces bit-identical readings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import StateDerivative, VehicleState
from .errors import DomainError


@dataclass(frozen=True, slots=True)
class SensorSuite:
    """Channel rates (Hz), noise sigmas, and the altimeter range limit."""

    imu_rate: float = 500.0
    imu_accel_sigma: float = 0.0
    imu_gyro_sigma: float = 0.0
    imu_gyro_bias: float = 0.0
    tof_rate: float = 50.0
    tof_sigma: float = 0.0
    tof_max_range: float = 4.0
    flow_rate: float = 50.0
    flow_sigma: float = 0.0

    def __post_init__(self):
        for name in ("imu_rate", "tof_rate", "flow_rate"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")
        for name in ("imu_accel_sigma", "imu_gyro_sigma", "tof_sigma", "flow_sigma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be >= 0, got {v}")
        if self.tof_max_range <= 0.0:
            raise DomainError(f"tof_max_range must be > 0, got {self.tof_max_range}")
        if self.tof_rate > 50.0:
            raise DomainError(
                f"tof_rate is limited to 50 Hz by the ranging part, got {self.tof_rate}"
            )


@dataclass(frozen=True, slots=True)
class SensorReading:
    """One composite reading; fields hold the last sample of each channel.

    ``z_range`` is None when the surface below is beyond the altimeter's
    range.  ``v_x``/``v_y`` are body-frame lateral velocities.  Channel
    timestamps record when each channel last sampled; ``t`` is the query
    time and is never earlier than any channel timestamp.
    """

    t: float
    a_x: float
    a_y: float
    a_z: float
    omega_z: float
    z_range: float | None
    v_x: float
    v_y: float
    t_imu: float
    t_tof: float
    t_flow: float


class SensorRig:
    """Stateful sampler owning the per-channel hold registers and the RNG."""

    def __init__(self, suite: SensorSuite, rng: np.random.Generator, dt: float):
        if dt <= 0.0:
            raise DomainError(f"dt must be > 0, got {dt}")
        self.suite = suite
        self.rng = rng
        self.dt = dt
        # Integer step cadence per channel avoids float-drift aliasing.
        self._imu_every = max(1, round(1.0 / (suite.imu_rate * dt)))
        self._tof_every = max(1, round(1.0 / (suite.tof_rate * dt)))
        self._flow_every = max(1, round(1.0 / (suite.flow_rate * dt)))
        self._step = 0
        self._imu = (0.0, 0.0, 0.0, 0.0, 0.0)  # ax, ay, az, omega, t
        self._tof: tuple[float | None, float] = (None, 0.0)
        self._flow = (0.0, 0.0, 0.0)

    def _noise(self, sigma: float) -> float:
        return self.rng.normal(0.0, sigma) if sigma > 0.0 else 0.0

    def sample(
        self,
        state: VehicleState,
        true_accel: StateDerivative,
        t: float,
        ground_height_below: float = 0.0,
    ) -> SensorReading:
        """Advance one control period and return the held/fresh readings."""
        s = self.suite
        if self._step % self._imu_every == 0:
            self._imu = (
                true_accel.a_x + self._noise(s.imu_accel_sigma),
                true_accel.a_y + self._noise(s.imu_accel_sigma),
                true_accel.a_z + self._noise(s.imu_accel_sigma),
                state.omega_z + s.imu_gyro_bias + self._noise(s.imu_gyro_sigma),
                t,
            )
        if self._step % self._tof_every == 0:
            separation = state.z - ground_height_below
            if 0.0 <= separation <= s.tof_max_range:
                self._tof = (max(separation + self._noise(s.tof_sigma), 0.0), t)
            else:
                self._tof = (None, t)
        if self._step % self._flow_every == 0:
            c, sn = math.cos(state.psi), math.sin(state.psi)
            vb_x = c * state.v_x + sn * state.v_y
            vb_y = -sn * state.v_x + c * state.v_y
            self._flow = (
                vb_x + self._noise(s.flow_sigma),
                vb_y + self._noise(s.flow_sigma),
                t,
            )
        self._step += 1
        return SensorReading(
            t=t,
            a_x=self._imu[0], a_y=self._imu[1], a_z=self._imu[2],
            omega_z=self._imu[3],
            z_range=self._tof[0],
            v_x=self._flow[0], v_y=self._flow[1],
            t_imu=self._imu[4], t_tof=self._tof[1], t_flow=self._flow[2],
        )


@dataclass(frozen=True, slots=True)
class WindModel:
    """Mean wind plus one raised-cosine gust and seeded colored noise.

    The gust adds ``amplitude * direction`` scaled by a raised-cosine
    envelope over [gust_start, gust_start + gust_duration].  The colored
    component is a first-order (AR(1)) process with standard deviation
    ``noise_sigma`` and correlation time ``noise_tau`` per axis.
    """

    mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gust_amplitude: float = 0.0
    gust_direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    gust_start: float = 0.0
    gust_duration: float = 0.0
    noise_sigma: float = 0.0
    noise_tau: float = 1.0

    def __post_init__(self):
        for v in (*self.mean, *self.gust_direction):
            if not math.isfinite(v):
                raise DomainError("wind vectors must be finite")
        if self.gust_amplitude < 0.0:
            raise DomainError(f"gust_amplitude must be >= 0, got {self.gust_amplitude}")
        if self.gust_duration < 0.0:
            raise DomainError(f"gust_duration must be >= 0, got {self.gust_duration}")
        if self.noise_sigma < 0.0:
            raise DomainError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.noise_tau <= 0.0:
            raise DomainError(f"noise_tau must be > 0, got {self.noise_tau}")

    @property
    def is_still(self) -> bool:
        return (
            self.mean == (0.0, 0.0, 0.0)
            and self.gust_amplitude == 0.0
            and self.noise_sigma == 0.0
        )


def gust_envelope(t: float, start: float, duration: float) -> float:
    """Raised-cosine pulse: 0 outside [start, start+duration], 1 mid-pulse."""
    if duration <= 0.0 or t < start or t > start + duration:
        return 0.0
    phase = (t - start) / duration
    return 0.5 * (1.0 - math.cos(2.0 * math.pi * phase))


class WindSampler:
    """Per-run wind stream; deterministic for a fixed seed and call sequence."""

    def __init__(self, model: WindModel, rng: np.random.Generator, dt: float):
        self.model = model
        self.rng = rng
        self.dt = dt
        self._colored = [0.0, 0.0, 0.0]
        if model.noise_sigma > 0.0:
            self._rho = math.exp(-dt / model.noise_tau)
            self._drive = model.noise_sigma * math.sqrt(1.0 - self._rho**2)
        else:
            self._rho = 0.0
            self._drive = 0.0

    def sample(self, t: float) -> tuple[float, float, float]:
        """Wind vector at time t; call once per step in time order."""
        if t < 0.0:
            raise DomainError(f"t must be >= 0, got {t}")
        m = self.model
        if m.is_still:
            return (0.0, 0.0, 0.0)
        env = m.gust_amplitude * gust_envelope(t, m.gust_start, m.gust_duration)
        if self._drive > 0.0:
            for i in range(3):
                self._colored[i] = (
                    self._rho * self._colored[i]
                    + self._drive * self.rng.normal()
                )
        return (
            m.mean[0] + env * m.gust_direction[0] + self._colored[0],
            m.mean[1] + env * m.gust_direction[1] + self._colored[1],
            m.mean[2] + env * m.gust_direction[2] + self._colored[2],
        )


def sample_wind(t: float, model: WindModel, rng: np.random.Generator | None = None,
                dt: float = 0.005) -> tuple[float, float, float]:
    """One-shot wind sample (deterministic part only unless an rng is given)."""
    sampler = WindSampler(model, rng if rng is not None else np.random.default_rng(0), dt)
    return sampler.sample(t)


def inject_spin(state: VehicleState, rate: float) -> VehicleState:
    """Impulse yaw disturbance: returns the state with omega_z replaced."""
    if not math.isfinite(rate):
        raise DomainError(f"rate must be finite, got {rate}")
    return VehicleState(
        x=state.x, y=state.y, z=state.z,
        v_x=state.v_x, v_y=state.v_y, v_z=state.v_z,
        psi=state.psi, omega_z=rate,
    )
