"""Losing a rotor mid-climb: detect, isolate, descend, and steer home.

Rotor 1 dies at t = 4 s during a steady climb.  The residual monitor
watches heading error, yaw-rate deviation, and the collapse of vertical
acceleration; once all three persist for a full window it names the
dead rotor from the spin direction and the lateral drift.  Control then
switches to the two surviving adjacent rotors, which can only descend
while they steer, and heads for the recovery point.

Writes the trace to rotor_failure_trace.csv next to this script (try
``buoyquad faultscan`` on it, or the plot CLI from the plots package).
"""

import math
import pathlib

from buoyquad.harness import run_scenario, write_trace_csv
from buoyquad.scenario import default_scenario


def main():
    sc = default_scenario("fault_injection", overrides={"scenario.duration": 30.0})
    res = run_scenario(sc)
    t_inject = sc.extras["fault_injection.t_inject"]
    t_detect = res.detection.detected_at
    print(f"rotor 1 cut at t = {t_inject:.1f} s during a "
          f"{sc.extras['fault_injection.climb_rate']} m/s climb")
    print(f"verdict: {res.detection.label()} at t = {t_detect:.2f} s "
          f"({t_detect - t_inject:.2f} s after the failure)\n")

    print(f"  {'t':>5} {'z':>6} {'omega':>7} {'v_y':>6} {'status':>10}")
    for r in res.records[::200]:
        print(f"  {r.t:5.1f} {r.z:6.2f} {r.omega_z:+7.2f} {r.vy:+6.2f} "
              f"{r.fault_status:>10}")

    ry = sc.extras["fault_injection.recovery_y"]
    last = res.records[-1]
    dist = math.hypot(last.x, last.y - ry)
    print(f"\nfinal position ({last.x:+.2f}, {last.y:+.2f}), "
          f"{dist:.2f} m from the recovery point, altitude {last.z:.2f} m "
          "(descending throughout the recovery)")

    out = pathlib.Path(__file__).with_name("rotor_failure_trace.csv")
    write_trace_csv(res.records, out)
    print(f"trace written to {out.name}")


if __name__ == "__main__":
    main()
