"""How much helium does a payload cost?

Solves the neutral-buoyancy balance for a spherical latex envelope over
a payload sweep, shows the ballast trim for the reference stack, and the
motor PWM-to-thrust curve endpoints.
"""

from buoyquad.energy import (
    BalloonSpec,
    MotorCurve,
    ballast_trim,
    size_balloon,
    thrust_from_pwm,
)


def main():
    spec = BalloonSpec()
    print("neutral-buoyancy sizing (latex envelope, helium at 20 C sea level):")
    print(f"  {'payload g':>10} {'volume L':>10} {'diameter m':>11}")
    for grams in (50, 100, 126.2, 200, 300, 400, 500):
        volume_l, diameter = size_balloon(grams / 1000.0, spec)
        print(f"  {grams:10.1f} {volume_l:10.1f} {diameter:11.3f}")

    print("\nballast trim examples:")
    weight = 0.1262 * 9.81
    print(f"  lift equals the 126.2 g stack -> {ballast_trim(weight, weight)*1000:.1f} g")
    print(f"  0.0981 N of excess lift       -> {ballast_trim(weight + 0.0981, weight)*1000:.1f} g")

    curve = MotorCurve()
    print("\nmotor curve (quadratic default, table-overridable):")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        pwm = frac * curve.pwm_max
        print(f"  pwm {frac*100:3.0f}% -> {thrust_from_pwm(pwm, curve)*1000:6.1f} mN")


if __name__ == "__main__":
    main()
