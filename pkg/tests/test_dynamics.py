import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buoyquad.dynamics import (
    AeroParams,
    GeometryConfig,
    MotorThrusts,
    VehicleState,
    c_psi_from_geometry,
    derivative,
    step_rk4,
    wake_coupling,
    wrap_angle,
    yaw_coefficient,
)
from buoyquad.errors import DomainError

UNIT = AeroParams(m=1.0, c_d=0.0, c_z=1.0, c_psi=1.0, c_dpsi=0.0, t_max=10.0)


def test_rest_zero_thrust_gives_zero_derivative():
    d = derivative(VehicleState(), MotorThrusts(), UNIT)
    assert d.as_tuple() == (0.0,) * 8


def test_equal_thrusts_rise_without_lateral_or_yaw():
    t = 0.7
    d = derivative(VehicleState(), MotorThrusts(t, t, t, t), UNIT)
    assert d.a_x == 0.0 and d.a_y == 0.0 and d.domega_z == 0.0
    assert d.a_z == pytest.approx(UNIT.c_z * (2.0 * t) ** 2)
    assert d.a_z > 0.0


def test_direct_arithmetic_on_motion_equations():
    # m=1, c_d=0, c_z=1, c_psi=1, thrusts (1, 0, 2, 0): q1=3, q2=0.
    d = derivative(VehicleState(), MotorThrusts(1.0, 0.0, 2.0, 0.0), UNIT)
    assert d.a_x == pytest.approx(1.0)
    assert d.a_y == pytest.approx(1.0)
    assert d.a_z == pytest.approx(-9.0)
    assert d.domega_z == pytest.approx(3.0)


def test_derivative_rejects_nonfinite_wind():
    with pytest.raises(DomainError):
        derivative(VehicleState(), MotorThrusts(), UNIT, wind=(math.nan, 0.0, 0.0))


def test_state_and_thrusts_reject_nonfinite_or_negative():
    with pytest.raises(DomainError):
        VehicleState(x=math.inf)
    with pytest.raises(DomainError):
        MotorThrusts(m1=-0.1)
    with pytest.raises(DomainError):
        MotorThrusts(m2=math.nan)


def test_pair_sums_are_exact():
    t = MotorThrusts(0.1, 0.2, 0.3, 0.4)
    assert t.q1 == 0.1 + 0.3
    assert t.q2 == 0.2 + 0.4


def test_wake_coupling_matches_pair_product_when_balanced():
    q1, q2 = 1.3, 0.7
    t = MotorThrusts.from_pairs(q1, q2)
    assert wake_coupling(*t.as_tuple()) == pytest.approx(q1 * q2, rel=1e-12)
    # Any idle rotor kills the coupling entirely.
    assert wake_coupling(0.0, 0.5, 1.0, 0.5) == 0.0


# --- integrator ---------------------------------------------------------


def test_rk4_fixed_point_at_equilibrium():
    s = VehicleState(x=1.0, y=-2.0, z=3.0)
    out = step_rk4(s, MotorThrusts(), UNIT, dt=0.005)
    assert out == s


def test_rk4_rejects_nonpositive_dt():
    with pytest.raises(DomainError):
        step_rk4(VehicleState(), MotorThrusts(), UNIT, dt=0.0)
    with pytest.raises(DomainError):
        step_rk4(VehicleState(), MotorThrusts(), UNIT, dt=-0.01)


def test_rk4_constant_acceleration_matches_half_a_t_squared():
    # c_d = 0 and all four rotors equal: a_z = c_z*(2T)^2, constant.
    t_rotor = 0.5
    a = UNIT.c_z * (2.0 * t_rotor) ** 2
    thrusts = MotorThrusts(t_rotor, t_rotor, t_rotor, t_rotor)
    dt, n = 0.005, 200
    s = VehicleState()
    for _ in range(n):
        s = step_rk4(s, thrusts, UNIT, dt=dt)
    t_end = n * dt
    assert s.z == pytest.approx(0.5 * a * t_end**2, abs=1e-10)
    assert s.v_z == pytest.approx(a * t_end, abs=1e-10)


def test_rk4_exponential_drag_decay():
    # Thrusts off, c_d > 0: v_x(t) = v0 * exp(-c_d * t).
    params = AeroParams(m=1.0, c_d=1.3, c_z=1.0, c_psi=1.0)
    v0 = 2.0
    dt = 0.005
    s = VehicleState(v_x=v0)
    for _ in range(200):
        s = step_rk4(s, MotorThrusts(), params, dt=dt)
    expected = v0 * math.exp(-params.c_d * 1.0)
    assert abs(s.v_x - expected) / expected < 1e-6


def test_rk4_wraps_yaw():
    s = VehicleState(psi=math.pi - 0.001, omega_z=1.0)
    out = step_rk4(s, MotorThrusts(), UNIT, dt=0.01)
    assert -math.pi < out.psi <= math.pi
    assert out.psi == pytest.approx(-math.pi + 0.009, abs=1e-12)


def test_equilibrium_bit_stable_over_many_steps():
    s0 = VehicleState(x=0.25, y=-1.5, z=2.0)
    s = s0
    for _ in range(100_000):
        s = step_rk4(s, MotorThrusts(), UNIT, dt=0.005)
    for a, b in zip(s.as_tuple(), s0.as_tuple()):
        assert abs(a - b) < 1e-12


# --- invariants and properties ------------------------------------------

thrust_vals = st.floats(min_value=0.0, max_value=2.0, allow_nan=False)
small_floats = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@given(q=st.floats(min_value=1e-6, max_value=2.0))
def test_vertical_sign_law(q):
    both = derivative(VehicleState(), MotorThrusts.from_pairs(q, q), UNIT)
    assert both.a_z > 0.0
    single = derivative(VehicleState(), MotorThrusts.from_pairs(q, 0.0), UNIT)
    assert single.a_z < 0.0


@given(q=st.floats(min_value=0.0, max_value=2.0), omega=small_floats)
def test_yaw_neutrality_for_balanced_pairs(q, omega):
    params = AeroParams(m=1.0, c_d=0.0, c_z=1.0, c_psi=2.0, c_dpsi=0.4)
    d = derivative(VehicleState(omega_z=omega), MotorThrusts.from_pairs(q, q), params)
    assert d.domega_z == pytest.approx(-params.c_dpsi * omega)


@given(m1=thrust_vals, m2=thrust_vals, m3=thrust_vals, m4=thrust_vals,
       dx=small_floats, dy=small_floats, dz=small_floats)
@settings(max_examples=60)
def test_frame_shift_invariance(m1, m2, m3, m4, dx, dy, dz):
    thrusts = MotorThrusts(m1, m2, m3, m4)
    base = VehicleState(x=0.1, y=0.2, z=0.3, v_x=1.0, v_y=-0.5, v_z=0.2,
                        psi=0.3, omega_z=-0.1)
    shifted = VehicleState(x=base.x + dx, y=base.y + dy, z=base.z + dz,
                           v_x=base.v_x, v_y=base.v_y, v_z=base.v_z,
                           psi=base.psi, omega_z=base.omega_z)
    assert derivative(base, thrusts, UNIT).as_tuple() == \
        derivative(shifted, thrusts, UNIT).as_tuple()


@given(m1=thrust_vals, m2=thrust_vals, m3=thrust_vals, m4=thrust_vals)
@settings(max_examples=60)
def test_lateral_map_is_linear_with_gain_inverse_mass(m1, m2, m3, m4):
    params = AeroParams(m=0.37, c_d=0.0, c_z=1.0, c_psi=1.0)
    thrusts = MotorThrusts(m1, m2, m3, m4)
    d = derivative(VehicleState(), thrusts, params)
    fx = m3 + m4 - m1 - m2
    fy = m3 + m2 - m1 - m4
    assert d.a_x == pytest.approx(fx / params.m, abs=1e-12)
    assert d.a_y == pytest.approx(fy / params.m, abs=1e-12)


def test_lateral_gain_against_finite_differences_of_integrator():
    # Numerically differentiate the integrator over a tiny step; with
    # c_d = 0 the velocity slope is the lateral force over mass.
    params = AeroParams(m=0.5, c_d=0.0, c_z=1.0, c_psi=1.0)
    thrusts = MotorThrusts(0.1, 0.4, 0.9, 0.2)
    dt = 1e-4
    s1 = step_rk4(VehicleState(), thrusts, params, dt=dt)
    fx = thrusts.m3 + thrusts.m4 - thrusts.m1 - thrusts.m2
    fy = thrusts.m3 + thrusts.m2 - thrusts.m1 - thrusts.m4
    assert s1.v_x / dt == pytest.approx(fx / params.m, rel=1e-9)
    assert s1.v_y / dt == pytest.approx(fy / params.m, rel=1e-9)


# --- geometry ------------------------------------------------------------


def test_yaw_arm_reference_geometry():
    # 80 mm separation with 90 degree arms: 0.08 * sin(45 deg).
    arm = yaw_coefficient(GeometryConfig(d_separation=0.08, alpha=math.pi / 2))
    assert arm == pytest.approx(0.0565685, abs=1e-6)


def test_yaw_arm_limits():
    tiny = yaw_coefficient(GeometryConfig(d_separation=0.1, alpha=1e-9))
    assert tiny == pytest.approx(0.0, abs=1e-9)
    wide = yaw_coefficient(GeometryConfig(d_separation=0.1, alpha=math.pi - 1e-12))
    assert wide == pytest.approx(0.1)


def test_c_psi_from_geometry():
    geom = GeometryConfig(d_separation=0.08, alpha=math.pi / 2)
    assert c_psi_from_geometry(geom, 0.0023) == pytest.approx(
        yaw_coefficient(geom) / 0.0023
    )
    with pytest.raises(DomainError):
        c_psi_from_geometry(geom, 0.0)


def test_geometry_invariants():
    with pytest.raises(DomainError):
        GeometryConfig(d_separation=0.0, alpha=1.0)
    with pytest.raises(DomainError):
        GeometryConfig(d_separation=0.1, alpha=math.pi)


# --- angle wrapping -------------------------------------------------------


@given(theta=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_wrap_angle_range_and_congruence(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)


def test_wrap_angle_boundary():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
