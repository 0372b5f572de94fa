"""Planar motion envelope: terminal speeds and the wind limit.

The drag-limited terminal speed along a principal axis (one full motor
pair) exceeds the diagonal (single rotor) by exactly sqrt(2) in this
model.  Steady wind beyond the equivalent thrust authority blows the
vehicle off station no matter what the controller does.
"""

import math

from buoyquad.calibration import REFERENCE_AERO
from buoyquad.dynamics import MotorThrusts, VehicleState, step_rk4
from buoyquad.harness import run_scenario
from buoyquad.scenario import default_scenario


def terminal(thrusts):
    state = VehicleState()
    for _ in range(4000):
        state = step_rk4(state, thrusts, REFERENCE_AERO, dt=0.005)
    return math.hypot(state.v_x, state.v_y)


def main():
    p = REFERENCE_AERO
    v_axis = terminal(MotorThrusts(0.0, 0.0, p.t_max, p.t_max))
    v_diag = terminal(MotorThrusts(0.0, 0.0, p.t_max, 0.0))
    print(f"axis terminal speed (full pair):   {v_axis:.3f} m/s")
    print(f"diagonal terminal speed (1 rotor): {v_diag:.3f} m/s")
    print(f"ratio: {v_axis / v_diag:.4f} (sqrt(2) = {math.sqrt(2):.4f})\n")

    hold_limit = 2.0 * p.t_max / (p.m * p.c_d)
    print(f"station keeping is possible below {hold_limit:.1f} m/s of steady wind:")
    for wind in (1.0, 3.0, 6.0):
        sc = default_scenario("wind_gust", overrides={
            "wind.mean_x": wind, "scenario.duration": 30.0})
        res = run_scenario(sc)
        drift = res.metric_value
        verdict = "holds nearby" if drift < 5.0 else "blown away"
        print(f"  steady {wind:3.1f} m/s -> max displacement {drift:7.1f} m ({verdict})")


if __name__ == "__main__":
    main()
