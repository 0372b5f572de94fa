"""Reference parameter set and the procedure that produced it.

None of the aerodynamic coefficients are measured directly; they are
calibrated against published performance anchors of the prototype, and
every derivation is spelled out here so the numbers are reproducible:

* ``MASS`` and ``T_MAX`` are the weighed take-off mass (126.2 g) and the
  bench-measured single-rotor thrust ceiling (15.7 gram-force).
* ``C_D`` makes the axis-aligned terminal speed at full single-pair
  differential (2 * T_MAX of net force) equal the measured 1.5 m/s:
  C_D = 2*T_MAX / (MASS * 1.5).
* ``C_PSI`` is the yaw moment arm of the rotor layout (80 mm pair
  separation, 90 degree arm angle) divided by the estimated yaw moment
  of inertia.  The inertia is not published; 2.3e-3 kg m^2 comes from a
  mass-budget estimate dominated by the envelope shell and is a config
  input, not a claim.
* ``C_DPSI`` makes the max-differential spin-up asymptote at the measured
  346 deg/s ceiling: C_DPSI = C_PSI * 2*T_MAX / omega_max.
* ``C_Z`` is tuned so the 1.0 m altitude-step scenario re-enters a 5%
  band around two seconds with the reference gains (step-test tuning,
  Ziegler-Nichols style start then manual polish).
* Controller gains come from the same step tests on the calibrated
  plant; fault thresholds sit a comfortable margin above the residual
  noise floor of the reference sensor suite while keeping the detection
  latency of an injected fault well under the latency budget.

Scenario files carry all of these explicitly; nothing here is silently
assumed by the simulator.
"""

from __future__ import annotations

import math

from .control import AxisGains, GainSet
from .dynamics import AeroParams, GeometryConfig, c_psi_from_geometry
from .energy import BatteryModel
from .fault import FaultConfig
from .sensors import SensorSuite

MASS = 0.1262          # kg, platform + reference payload
T_MAX = 0.154          # N per rotor (15.7 gram-force)
AXIS_TERMINAL_SPEED = 1.5          # m/s at full single-pair differential
YAW_RATE_CEILING = math.radians(346.0)  # rad/s at max differential thrust
YAW_INERTIA = 2.3e-3   # kg m^2, mass-budget estimate (config input)

GEOMETRY = GeometryConfig(d_separation=0.08, alpha=math.pi / 2.0)

C_D = 2.0 * T_MAX / (MASS * AXIS_TERMINAL_SPEED)
C_PSI = c_psi_from_geometry(GEOMETRY, YAW_INERTIA)
C_DPSI = C_PSI * 2.0 * T_MAX / YAW_RATE_CEILING
C_Z = 16.0             # step-test tuned, see module docstring

REFERENCE_AERO = AeroParams(
    m=MASS, c_d=C_D, c_z=C_Z, c_psi=C_PSI, c_dpsi=C_DPSI, t_max=T_MAX
)

REFERENCE_GAINS = GainSet(
    z=AxisGains(k_p=10.0, k_d=4.0, k_i=0.8),
    psi=AxisGains(k_p=2.0, k_d=1.0),
    x=AxisGains(k_p=0.05, k_d=0.10, k_i=0.01),
    y=AxisGains(k_p=0.05, k_d=0.10, k_i=0.01),
    integral_clamp=0.5,
)

REFERENCE_FAULT = FaultConfig(
    k_omega_z=0.15,
    k_a_z=0.12,
    window=1.25,
    v_residual_eps=0.05,
    psi_eps=0.03,
)

#: Reference noise model: datasheet-class magnitudes for the named parts,
#: not published values.
REFERENCE_SENSORS = SensorSuite(
    imu_rate=500.0,
    imu_accel_sigma=0.02,
    imu_gyro_sigma=0.005,
    imu_gyro_bias=0.001,
    tof_rate=50.0,
    tof_sigma=0.01,
    tof_max_range=4.0,
    flow_rate=50.0,
    flow_sigma=0.02,
)

REFERENCE_BATTERY = BatteryModel()

DT = 0.005  # s, integrator and controller period
