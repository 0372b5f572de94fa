"""Yaw authority: spin-up ceiling and recovery from an induced vortex.

Full differential thrust on one diagonal pair torques the vehicle until
yaw damping balances it at the rate ceiling; a disturbance-injection
scenario then shows the heading loop absorbing an induced spin.
"""

import math

from buoyquad.calibration import REFERENCE_AERO
from buoyquad.dynamics import MotorThrusts, VehicleState, step_rk4
from buoyquad.harness import run_scenario
from buoyquad.scenario import default_scenario


def main():
    p = REFERENCE_AERO
    state = VehicleState()
    thrusts = MotorThrusts.from_pairs(2.0 * p.t_max, 0.0)
    print("open-loop spin-up at max differential thrust:")
    for k in range(1, 2001):
        state = step_rk4(state, thrusts, p, dt=0.005)
        if k % 400 == 0:
            print(f"  t={k * 0.005:4.1f} s  omega = {math.degrees(state.omega_z):6.1f} deg/s")
    print(f"asymptote: {math.degrees(p.c_psi * 2 * p.t_max / p.c_dpsi):.0f} deg/s\n")

    for rate in (30.0, 50.0, 80.0):
        sc = default_scenario("yaw_disturbance",
                              overrides={"spin.rate": math.radians(rate)})
        res = run_scenario(sc)
        print(f"induced spin {rate:4.0f} deg/s -> recovered in {res.metric_value:.2f} s")


if __name__ == "__main__":
    main()
