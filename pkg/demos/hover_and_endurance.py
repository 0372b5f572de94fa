"""Hover for free: the equilibrium that motivates the whole platform.

A neutrally buoyant vehicle holds altitude with its rotors off, so the
battery only feeds the radio.  This demo runs a 60 s hover, shows the
controller never spends a newton-second, and prints the endurance table
for duty-cycled operation against a conventional quadrotor baseline.
"""

from buoyquad.energy import (
    BatteryModel,
    FITTED_DUTY_ANCHORS,
    QUAD_BASELINE_BATTERY,
    lifetime_minutes,
)
from buoyquad.harness import run_scenario
from buoyquad.scenario import default_scenario


def main():
    sc = default_scenario("hover")
    res = run_scenario(sc)
    worst = max(abs(r.z - 1.5) for r in res.records)
    spent = sum((r.m1 + r.m2 + r.m3 + r.m4) * sc.dt for r in res.records)
    drained = sc.battery.capacity_mah - res.records[-1].battery_mah
    print(f"60 s hover: max altitude error {worst:.1e} m, "
          f"thrust-time integral {spent:.1e} N*s, battery drained {drained:.4f} mAh")
    print("(the only draw is the telemetry radio)\n")

    battery = BatteryModel()
    print("endurance (300 mAh pack):")
    print(f"  {'duty':>8} {'heading':>8} {'minutes':>8}")
    rows = [
        (1.0, True), (1.0, False),
        (FITTED_DUTY_ANCHORS["heading"], True),
        (FITTED_DUTY_ANCHORS["free"], False),
        (0.0, False),
    ]
    for duty, heading in rows:
        minutes = lifetime_minutes(duty, heading, battery)
        print(f"  {duty:8.3f} {'on' if heading else 'off':>8} {minutes:8.1f}")
    quad = lifetime_minutes(1.0, False, QUAD_BASELINE_BATTERY)
    print(f"\nconventional quadrotor on the same pack: {quad:.1f} minutes "
          "(it must thrust continuously just to hover)")


if __name__ == "__main__":
    main()
