"""Acceptance suite: one test per headline criterion, each printing a
PASS/FAIL line with the measured value against its stated tolerance.
Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
import time

import numpy as np
import pytest

from buoyquad.calibration import REFERENCE_AERO
from buoyquad.control import f1_forward, invert_f1_closed_form, invert_f1_newton
from buoyquad.dynamics import MotorThrusts, VehicleState, derivative, step_rk4
from buoyquad.energy import (
    BatteryModel,
    FITTED_DUTY_ANCHORS,
    QUAD_BASELINE_BATTERY,
    lifetime_minutes,
)
from buoyquad.harness import MonteCarloSpec, run_montecarlo, run_scenario, write_trace_csv
from buoyquad.scenario import default_scenario, default_scenario_text, parse_scenario_text


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_equilibrium_hover():
    sc = default_scenario("hover")  # 60 s, zero noise
    t0 = time.perf_counter()
    res = run_scenario(sc)
    runtime = time.perf_counter() - t0
    worst = max(abs(r.z - 1.5) for r in res.records)
    integral = sum((r.m1 + r.m2 + r.m3 + r.m4) * sc.dt for r in res.records)
    ok = worst < 1e-6 and integral < 1e-3 and runtime < 1.0
    _report(
        "equilibrium hover",
        ok,
        f"max|z-z_d|={worst:.2e} (<1e-6), thrust integral={integral:.2e} N*s "
        f"(<1e-3), runtime={runtime:.2f}s (<1)",
    )


def test_vertical_sign_laws():
    t0 = time.perf_counter()
    t_max = REFERENCE_AERO.t_max
    grid = np.linspace(0.0, 2.0 * t_max, 64)
    violations = 0
    for q1 in grid:
        for q2 in grid:
            a_z = derivative(
                VehicleState(), MotorThrusts.from_pairs(q1, q2), REFERENCE_AERO
            ).a_z
            if (a_z > 0.0) != (q1 * q2 > (q1 - q2) ** 2):
                violations += 1
    runtime = time.perf_counter() - t0
    ok = violations == 0 and runtime < 1.0
    _report(
        "vertical sign laws",
        ok,
        f"grid 64x64 over [0, 2*t_max]^2: {violations} violations of "
        f"(a_z > 0 iff q1*q2 > (q1-q2)^2), runtime={runtime:.2f}s (<1)",
    )


def test_inversion_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst_pair = 0.0
    worst_round = 0.0
    fallbacks = 0
    for _ in range(1000):
        s = rng.uniform(-0.3, 0.3)
        p = rng.uniform(0.0, 0.09)
        a_z = REFERENCE_AERO.c_z * (p - s * s)
        tau = REFERENCE_AERO.c_psi * s
        ref = invert_f1_closed_form(a_z, tau, REFERENCE_AERO)
        res = invert_f1_newton(a_z, tau, REFERENCE_AERO, tol=1e-13, max_iter=80)
        fallbacks += res.fell_back
        worst_pair = max(worst_pair, abs(res.q1 - ref[0]), abs(res.q2 - ref[1]))
        back = f1_forward(ref[0], ref[1], REFERENCE_AERO)
        worst_round = max(worst_round, abs(back[0] - a_z), abs(back[1] - tau))
    ok = worst_pair < 1e-9 and worst_round < 1e-8 and fallbacks == 0
    _report(
        "inversion oracle equivalence",
        ok,
        f"1000 feasible targets: max|newton-closed|={worst_pair:.2e} (<1e-9), "
        f"max round-trip residual={worst_round:.2e} (<1e-8), fallbacks={fallbacks}",
    )


def test_altitude_step_latency():
    text = default_scenario_text("altitude_step", noisy=True)
    t0 = time.perf_counter()
    summary = run_montecarlo(MonteCarloSpec(base_text=text, seeds=tuple(range(100))))
    runtime = time.perf_counter() - t0
    n_ok = len(summary.values)
    p90 = summary.percentile(90)
    ok = n_ok == 100 and 1.5 <= p90 <= 2.7 and runtime < 30.0
    _report(
        "altitude-step latency",
        ok,
        f"100 noisy runs of the 1.75->0.75 m separation step: {n_ok} recovered "
        f"into the 5% band, p90={p90:.2f}s (in [1.5, 2.7]), runtime={runtime:.1f}s (<30)",
    )


def test_fault_detection_latency():
    latencies = []
    detected = 0
    for rotor in (1, 2, 3, 4):
        text = default_scenario_text("fault_injection", noisy=True, overrides={
            "fault_injection.rotor": rotor,
            "fault_injection.recovery_y": 6.0 if rotor in (1, 4) else -6.0,
        })
        seeds = tuple(range(rotor * 1000, rotor * 1000 + 25))
        summary = run_montecarlo(MonteCarloSpec(base_text=text, seeds=seeds))
        for o in summary.outcomes:
            if o.status == "ok":
                detected += 1
                latencies.append(o.value)
    p90 = float(np.percentile(latencies, 90, method="higher"))

    # noise-free subset: exhaustive per-rotor isolation
    correct = 0
    for rotor in (1, 2, 3, 4):
        sc = default_scenario("fault_injection", overrides={
            "fault_injection.rotor": rotor,
            "fault_injection.recovery_y": 6.0 if rotor in (1, 4) else -6.0,
        })
        res = run_scenario(sc)
        correct += bool(res.isolated_correctly)
    ok = detected == 100 and p90 <= 5.5 and correct == 4
    _report(
        "fault detection latency",
        ok,
        f"100 noisy injections: {detected} detected, p90={p90:.2f}s (<=5.5); "
        f"noise-free isolation {correct}/4 rotors correct",
    )


def test_ftc_descend_and_steer():
    details = []
    ok = True
    for rotor in (1, 2, 3, 4):
        ry = 6.0 if rotor in (1, 4) else -6.0
        sc = default_scenario("fault_injection", overrides={
            "fault_injection.rotor": rotor,
            "fault_injection.recovery_y": ry,
            "scenario.duration": 40.0,
        })
        res = run_scenario(sc)
        t_det = res.detection.detected_at
        after = [r for r in res.records if r.t >= t_det and r.z > 0.0]
        max_vz = max(r.vz for r in after)
        descend_ok = max_vz <= 1e-9

        aligned_t = None
        for r in after:
            if r.ax_cmd == 0.0 and r.ay_cmd == 0.0:
                continue
            psi_d = math.atan2(r.ay_cmd, r.ax_cmd)
            if abs((r.psi - psi_d + math.pi) % (2 * math.pi) - math.pi) < 0.15:
                aligned_t = r.t
                break
        dists = [math.hypot(r.x, r.y - ry) for r in after if r.t >= aligned_t + 0.2]
        min_i = min(range(len(dists)), key=dists.__getitem__)
        worst_rise = max(
            (b - a for a, b in zip(dists[:min_i], dists[1 : min_i + 1])),
            default=0.0,
        )
        approach_ok = worst_rise <= 1e-6 and dists[min_i] < 0.5 * dists[0]
        ok = ok and descend_ok and approach_ok
        details.append(
            f"m{rotor}: max_vz={max_vz:+.1e}, approach {dists[0]:.2f}->"
            f"{dists[min_i]:.2f} m monotone(rise<={worst_rise:.1e})"
        )
    _report("FTC descend-and-steer", ok, "; ".join(details))


def test_lifetime_anchors():
    battery = BatteryModel()
    anchors = [
        (1.0, True, 16.7),
        (1.0, False, 22.7),
        (FITTED_DUTY_ANCHORS["heading"], True, 60.2),
        (FITTED_DUTY_ANCHORS["free"], False, 81.6),
    ]
    errors = []
    for duty, heading, target in anchors:
        minutes = lifetime_minutes(duty, heading, battery)
        errors.append(abs(minutes - target) / target)
    quad = lifetime_minutes(1.0, False, QUAD_BASELINE_BATTERY)
    duties = np.linspace(0.0, 1.0, 21)
    series = [lifetime_minutes(d, True, battery) for d in duties]
    monotone = all(a > b for a, b in zip(series, series[1:]))
    ok = max(errors) < 0.05 and abs(quad - 6.6) / 6.6 < 1e-6 and monotone
    _report(
        "lifetime anchors",
        ok,
        f"16.7/22.7/60.2/81.6 min reproduced within "
        f"{max(errors)*100:.2f}% (<5%) by one parameter set; quad baseline "
        f"{quad:.1f} min; strictly decreasing in duty: {monotone}",
    )


def _terminal_speed(thrusts: MotorThrusts) -> float:
    state = VehicleState()
    for _ in range(4000):  # 20 s: > 30 drag time constants
        state = step_rk4(state, thrusts, REFERENCE_AERO, dt=0.005)
    return math.hypot(state.v_x, state.v_y)


def test_terminal_speeds():
    p = REFERENCE_AERO
    v_axis = _terminal_speed(MotorThrusts(0.0, 0.0, p.t_max, p.t_max))
    v_diag = _terminal_speed(MotorThrusts(0.0, 0.0, p.t_max, 0.0))
    analytic = 2.0 * p.t_max / (p.m * p.c_d)
    axis_err = abs(v_axis - analytic) / analytic
    # The two principal directions differ by sqrt(2); the measured vehicle
    # showed 1.63 with the faster direction labelled diagonal, documented
    # as a model-vs-measurement orientation gap.
    ratio = max(v_axis, v_diag) / min(v_axis, v_diag)
    ratio_err = abs(ratio - math.sqrt(2.0)) / math.sqrt(2.0)
    ok = axis_err < 0.01 and ratio_err < 0.01
    _report(
        "terminal speeds",
        ok,
        f"axis={v_axis:.4f} m/s vs analytic 2*t_max/(m*c_d)={analytic:.4f} "
        f"({axis_err*100:.3f}%<1%); principal-direction ratio={ratio:.4f} vs "
        f"sqrt(2) ({ratio_err*100:.3f}%<1%)",
    )


def test_yaw_rate_ceiling():
    p = REFERENCE_AERO
    state = VehicleState()
    thrusts = MotorThrusts.from_pairs(2.0 * p.t_max, 0.0)
    for _ in range(2400):  # 12 s of max differential thrust
        state = step_rk4(state, thrusts, p, dt=0.005)
    omega_deg = math.degrees(state.omega_z)
    err = abs(omega_deg - 346.0) / 346.0
    ok = err < 0.02
    _report(
        "yaw-rate ceiling",
        ok,
        f"max-differential spin-up asymptote {omega_deg:.1f} deg/s vs 346 "
        f"({err*100:.2f}%<2%)",
    )


def test_determinism(tmp_path):
    text = default_scenario_text("fault_injection", noisy=True)
    sc = parse_scenario_text(text)
    blobs = []
    for i in range(2):
        res = run_scenario(sc)
        path = tmp_path / f"run{i}.csv"
        write_trace_csv(res.records, path)
        blobs.append(path.read_bytes())
    ok = blobs[0] == blobs[1]
    _report(
        "determinism",
        ok,
        f"two runs of (scenario, seed={sc.seed}): trace CSVs byte-identical "
        f"({len(blobs[0])} bytes)",
    )
