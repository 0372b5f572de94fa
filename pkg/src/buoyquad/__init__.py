"""Simulator for a buoyancy-neutral quadrotor with horizontal rotors.

Subsystems: :mod:`~buoyquad.dynamics` (vehicle model and integrator),
:mod:`~buoyquad.control` (hierarchical altitude/yaw + lateral controller),
:mod:`~buoyquad.fault` (rotor fault detection, isolation, reallocation),
:mod:`~buoyquad.sensors` (sensor/wind models), :mod:`~buoyquad.energy`
(thrust curve, endurance, balloon sizing), :mod:`~buoyquad.scenario` and
:mod:`~buoyquad.harness` (experiment definition and execution), and
:mod:`~buoyquad.cli` (command-line surface).
"""

__version__ = "0.1.0"

from .dynamics import (
    AeroParams,
    GeometryConfig,
    MotorThrusts,
    StateDerivative,
    VehicleState,
    derivative,
    step_rk4,
    wrap_angle,
    yaw_coefficient,
)
from .control import (
    AxisGains,
    ControllerState,
    GainSet,
    Setpoint,
    control_step,
    invert_f1_closed_form,
    invert_f1_newton,
    lateral_mix,
    outer_loop_altitude_yaw,
)
from .fault import (
    FaultConfig,
    FaultEvidence,
    FaultStatus,
    ResidualMonitor,
    detect,
    expected_response,
    ftc_allocate,
)
from .sensors import SensorReading, SensorRig, SensorSuite, WindModel, inject_spin
from .energy import (
    BalloonSpec,
    BatteryModel,
    MotorCurve,
    ballast_trim,
    lifetime_minutes,
    size_balloon,
    thrust_from_pwm,
)
from .scenario import Scenario, default_scenario, default_scenario_text, load_scenario
from .harness import (
    MonteCarloSpec,
    SimResult,
    TraceRecord,
    fault_scan,
    read_trace_csv,
    run_montecarlo,
    run_scenario,
    write_trace_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
