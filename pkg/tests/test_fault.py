import math

import pytest

from buoyquad.control import (
    AxisGains,
    ControllerState,
    GainSet,
    Setpoint,
    control_step_detailed,
)
from buoyquad.dynamics import (
    AeroParams,
    MotorThrusts,
    VehicleState,
    derivative,
    step_rk4,
)
from buoyquad.errors import DomainError, UnrecoverableFault
from buoyquad.fault import (
    FAR_ADJACENT,
    FaultConfig,
    FaultEvidence,
    ResidualMonitor,
    ResidualSample,
    detect,
    expected_response,
    ftc_allocate,
)

PARAMS = AeroParams(m=0.1262, c_d=1.627, c_z=12.0, c_psi=24.6, c_dpsi=1.25, t_max=0.154)
CONFIG = FaultConfig(k_omega_z=0.15, k_a_z=0.12, window=1.25, v_residual_eps=0.05,
                     psi_eps=0.03)
GAINS = GainSet(
    z=AxisGains(k_p=6.0, k_d=4.0, k_i=0.5),
    psi=AxisGains(k_p=2.0, k_d=1.0),
    x=AxisGains(k_p=0.05, k_d=0.1, k_i=0.01),
    y=AxisGains(k_p=0.05, k_d=0.1, k_i=0.01),
    integral_clamp=0.5,
)
DT = 0.005


# --- expected_response ------------------------------------------------------


def test_expected_response_zero_at_rest():
    exp = expected_response(VehicleState(), MotorThrusts(), PARAMS, DT)
    assert (exp.omega_z, exp.a_z, exp.v_x, exp.v_y) == (0.0, 0.0, 0.0, 0.0)


def test_expected_response_balanced_pairs():
    q = 0.2
    thrusts = MotorThrusts.from_pairs(q, q)
    state = VehicleState(v_z=0.3, omega_z=0.4)
    exp = expected_response(state, thrusts, PARAMS, DT)
    # Balanced pairs: no commanded torque, the yaw rate decays by damping only.
    assert exp.omega_z < state.omega_z
    assert exp.omega_z == pytest.approx(state.omega_z * math.exp(-PARAMS.c_dpsi * DT),
                                        rel=1e-6)
    # Vertical response is the coupling lift minus drag at the new state.
    nxt = step_rk4(state, thrusts, PARAMS, dt=DT)
    assert exp.a_z == pytest.approx(PARAMS.c_z * q * q - PARAMS.c_d * nxt.v_z)


def closed_loop(n_steps, fail_rotor=None, fail_at=0, sp=Setpoint(z_d=1.0),
                climb_rate=0.25):
    """Minimal integrate-control loop with an optional rotor cutoff.

    The altitude setpoint ramps so the rotors carry sustained thrust
    (a fault on an idle rotor is unobservable). Returns the monitor and
    trajectory history.
    """
    state = VehicleState(z=sp.z_d)
    cs = ControllerState()
    monitor = ResidualMonitor(CONFIG, PARAMS, DT)
    prev_cmd = MotorThrusts()     # what the monitor thinks was applied
    prev_actual = MotorThrusts()  # what physically ran (failed rotor dead)
    history = []
    for k in range(n_steps):
        t = k * DT
        target = Setpoint(z_d=sp.z_d + climb_rate * t, vz_d=climb_rate,
                          psi_d=sp.psi_d)
        a_z_meas = derivative(state, prev_actual, PARAMS).a_z
        status = monitor.update(t, state, a_z_meas, prev_cmd, target.psi_d)
        out = control_step_detailed(state, target, GAINS, PARAMS, cs, DT)
        commanded = out.thrusts
        actual = commanded
        if fail_rotor is not None and k >= fail_at:
            vals = list(commanded.as_tuple())
            vals[fail_rotor - 1] = 0.0
            actual = MotorThrusts(*vals)
        history.append((t, state, status))
        state = step_rk4(state, actual, PARAMS, dt=DT)
        prev_cmd = commanded
        prev_actual = actual
    return monitor, history


def test_healthy_closed_loop_residuals_are_tiny():
    monitor, _ = closed_loop(800)
    assert monitor.status.healthy
    worst = max(
        max(abs(s.e_omega_z), abs(s.e_a_z), abs(s.e_v_x), abs(s.e_v_y))
        for s in monitor.evidence.samples
    )
    assert worst < 1e-9


@pytest.mark.parametrize("rotor", [1, 2, 3, 4])
def test_injected_fault_is_isolated_to_the_right_rotor(rotor):
    monitor, history = closed_loop(1600, fail_rotor=rotor, fail_at=200)
    assert not monitor.status.healthy
    assert monitor.status.failed_rotor == rotor
    latency = monitor.status.detected_at - 200 * DT
    assert CONFIG.window <= latency < 5.5


def test_m1_cutoff_signature_spins_negative_drops_and_drifts_y_positive():
    monitor, history = closed_loop(1600, fail_rotor=1, fail_at=200)
    t_detect = monitor.status.detected_at
    at_detect = min(history, key=lambda rec: abs(rec[0] - t_detect))[1]
    assert at_detect.omega_z < 0.0
    assert at_detect.v_z < 0.0  # altitude dropping despite climb command
    assert at_detect.v_y > 0.0


# --- detect decision tree ----------------------------------------------------


def synth_evidence(n, dt, e_psi=0.0, e_omega=0.0, e_az=0.0, e_vy=0.0, omega=0.0,
                   window=1.25):
    ev = FaultEvidence(window)
    for k in range(n):
        ev.append(ResidualSample(k * dt, e_psi, e_omega, e_az, 0.0, e_vy, omega))
    return ev


def test_detect_zero_residuals_stays_healthy():
    ev = synth_evidence(400, 0.005)
    assert detect(ev, CONFIG).healthy


def test_detect_requires_full_window():
    ev = synth_evidence(40, 0.005, e_psi=1.0, e_omega=1.0, e_az=1.0, e_vy=1.0,
                        omega=-1.0)
    assert detect(ev, CONFIG).healthy  # only 0.2 s of evidence


def test_detect_fires_after_window_with_all_gates():
    ev = synth_evidence(300, 0.005, e_psi=0.2, e_omega=0.5, e_az=0.5, e_vy=0.2,
                        omega=-1.0)
    status = detect(ev, CONFIG)
    assert status.failed_rotor == 1


def test_detect_transient_shorter_than_window_never_fires():
    ev = FaultEvidence(CONFIG.window)
    dt = 0.005
    burst = int(1.0 / dt)  # 1.0 s < 1.25 s window
    status_history = []
    for k in range(800):
        inside = 200 <= k < 200 + burst
        mag = 1.0 if inside else 0.0
        ev.append(ResidualSample(k * dt, mag, mag, mag, 0.0, mag, -mag))
        status_history.append(detect(ev, CONFIG))
    assert all(s.healthy for s in status_history)


def test_detect_latency_monotone_in_window():
    dt = 0.005
    latencies = []
    for window in (0.5, 1.0, 1.5):
        cfg = FaultConfig(k_omega_z=0.15, k_a_z=0.12, window=window,
                          v_residual_eps=0.05, psi_eps=0.03)
        ev = FaultEvidence(window)
        detected = None
        for k in range(1200):
            mag = 1.0 if k >= 100 else 0.0
            ev.append(ResidualSample(k * dt, mag, mag, mag, 0.0, mag, -mag))
            status = detect(ev, cfg)
            if not status.healthy:
                detected = k * dt
                break
        assert detected is not None
        latencies.append(detected)
    assert latencies == sorted(latencies)


def test_detect_verdict_table_covers_all_quadrants():
    for omega, evy, rotor in ((-1.0, 0.2, 1), (-1.0, -0.2, 3),
                              (1.0, 0.2, 4), (1.0, -0.2, 2)):
        ev = synth_evidence(300, 0.005, e_psi=0.2, e_omega=0.5, e_az=0.5,
                            e_vy=evy, omega=omega)
        assert detect(ev, CONFIG).failed_rotor == rotor


def test_evidence_rejects_time_travel():
    ev = FaultEvidence(1.0)
    ev.append(ResidualSample(0.0, 0, 0, 0, 0, 0, 0))
    with pytest.raises(DomainError):
        ev.append(ResidualSample(0.0, 0, 0, 0, 0, 0, 0))


# --- fault-tolerant allocation ------------------------------------------------


def test_ftc_reference_case():
    thrusts, psi_d = ftc_allocate(3.0, 4.0, 1.0, failed=1)
    assert thrusts.as_tuple() == (0.0, 2.0, 3.0, 0.0)
    assert psi_d == pytest.approx(math.atan2(4.0, 3.0), abs=1e-12)
    assert psi_d == pytest.approx(0.9273, abs=1e-4)


def test_ftc_zero_commands_zero_thrusts():
    thrusts, _ = ftc_allocate(0.0, 0.0, 0.0, failed=2)
    assert thrusts.as_tuple() == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("rotor", [1, 2, 3, 4])
def test_ftc_switches_off_failed_and_far_adjacent(rotor):
    thrusts, _ = ftc_allocate(1.0, 2.0, 0.3, failed=rotor)
    vals = thrusts.as_tuple()
    assert vals[rotor - 1] == 0.0
    assert vals[FAR_ADJACENT[rotor] - 1] == 0.0
    assert sum(1 for v in vals if v > 0.0) == 2


@pytest.mark.parametrize("rotor", [1, 2, 3, 4])
def test_ftc_outputs_always_descend(rotor):
    # Broken pairs mean no wake lift: a_z <= 0 for any command.
    for ax, ay, tau in ((3.0, 4.0, 1.0), (0.5, -0.2, -0.4), (0.0, 2.0, 0.0),
                        (1.0, 1.0, 5.0)):
        thrusts, _ = ftc_allocate(ax, ay, tau, failed=rotor)
        d = derivative(VehicleState(), thrusts, PARAMS)
        assert d.a_z <= 1e-12


def test_ftc_respects_thrust_ceiling():
    thrusts, _ = ftc_allocate(30.0, 40.0, 1.0, failed=1, t_max=0.154)
    assert max(thrusts.as_tuple()) <= 0.154


def test_ftc_scalar_norm_mode():
    thrusts, _ = ftc_allocate(3.0, 4.0, 1.0, failed=1, norm_mode="scalar")
    assert thrusts.m3 == pytest.approx((7.0 + 1.0) / 2)
    assert thrusts.m2 == pytest.approx((7.0 - 1.0) / 2)


def test_ftc_multi_failure_is_unrecoverable():
    with pytest.raises(UnrecoverableFault):
        ftc_allocate(1.0, 1.0, 0.0, failed=[1, 2])


def test_ftc_torque_sign_is_consistent_across_survivor_sets():
    # Positive commanded torque must yield positive model yaw acceleration
    # for either surviving pair.
    for rotor in (1, 2, 3, 4):
        thrusts, _ = ftc_allocate(1.0, 0.5, 0.4, failed=rotor)
        d = derivative(VehicleState(), thrusts, PARAMS)
        assert d.domega_z > 0.0
