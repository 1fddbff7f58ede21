import math

import pytest
from hypothesis import given, strategies as st

from icingplant.plant import PlantConfig, PlantState
from icingplant.tanks import (
    AirTankInput,
    EmptyAirTankError,
    EmptyTankError,
    WaterTankInput,
    air_density_rhs,
    air_temp_rhs,
    water_level_rhs,
    water_temp_rhs,
)


def make_state(cfg, h=0.8, t_w=70.0, rho_a=7.0, t_a=70.0):
    return PlantState.initial(cfg, h=h, t_w=t_w, rho_a=rho_a, t_a=t_a,
                              t_ts=-6.0, v_ts=30.0)


# --- water level ------------------------------------------------------------

def test_level_balance_zero():
    cfg = PlantConfig()
    state = make_state(cfg)
    inp = WaterTankInput(mdot_i_w=0.02, mdot_o_w=0.02)
    assert water_level_rhs(state, inp, cfg) == 0.0


def test_level_drain_rate_hand_value():
    # -0.025 / (1000 * 0.12566) by hand
    cfg = PlantConfig(s1=0.12566)
    state = make_state(cfg)
    inp = WaterTankInput(mdot_i_w=0.0, mdot_o_w=0.025)
    expected = -0.025 / (1000.0 * 0.12566)
    assert water_level_rhs(state, inp, cfg) == pytest.approx(expected, rel=1e-12)
    assert water_level_rhs(state, inp, cfg) == pytest.approx(-1.9894e-4, rel=1e-4)


def test_level_rhs_linear_in_net_flow():
    cfg = PlantConfig()
    state = make_state(cfg)
    one = water_level_rhs(state, WaterTankInput(mdot_i_w=0.03, mdot_o_w=0.01), cfg)
    two = water_level_rhs(state, WaterTankInput(mdot_i_w=0.06, mdot_o_w=0.02), cfg)
    assert two == pytest.approx(2.0 * one, rel=1e-12)


# --- water temperature --------------------------------------------------------

def test_temp_equilibrium_fixed_point():
    cfg = PlantConfig(kappa_w=10.0)
    state = make_state(cfg, t_w=70.4)
    inp = WaterTankInput(p_heat_w=10.0 * 70.4)
    assert water_temp_rhs(state, inp, cfg) == 0.0


def test_temp_heating_rate_hand_value():
    # 2300 W into 100 kg of water: 2300 / (100 * 4186)
    cfg = PlantConfig(s1=0.125, kappa_w=0.0)
    state = make_state(cfg, h=0.8)   # m_w = 1000 * 0.125 * 0.8 = 100 kg
    inp = WaterTankInput(p_heat_w=2300.0)
    expected = 2300.0 / (100.0 * 4186.0)
    assert water_temp_rhs(state, inp, cfg) == pytest.approx(expected, rel=1e-12)
    assert water_temp_rhs(state, inp, cfg) == pytest.approx(5.4945e-3, rel=1e-4)


def test_temp_inflow_at_tank_temperature_is_neutral():
    cfg = PlantConfig(kappa_w=0.0)
    state = make_state(cfg, t_w=70.0)
    inp = WaterTankInput(mdot_i_w=0.05, t_i_w=70.0 + 273.15, p_heat_w=0.0)
    assert water_temp_rhs(state, inp, cfg) == 0.0


def test_temp_empty_tank_raises():
    cfg = PlantConfig()
    state = make_state(cfg, h=5e-4)
    with pytest.raises(EmptyTankError):
        water_temp_rhs(state, WaterTankInput(), cfg)


def test_leak_in_kelvin_switch():
    cfg_c = PlantConfig(kappa_w=5.0)
    cfg_k = PlantConfig(kappa_w=5.0, leak_in_kelvin=True)
    state = make_state(cfg_c, t_w=70.0)
    rc = water_temp_rhs(state, WaterTankInput(), cfg_c)
    rk = water_temp_rhs(state, WaterTankInput(), cfg_k)
    m_w = 1000.0 * cfg_c.s1 * state.h
    assert rk - rc == pytest.approx(-5.0 * 273.15 / (m_w * 4186.0), rel=1e-9)


def test_heater_power_bounds():
    cfg = PlantConfig()
    with pytest.raises(ValueError, match="p_heat_w"):
        WaterTankInput(p_heat_w=2500.0).validate(cfg)
    with pytest.raises(ValueError, match="mass rates"):
        WaterTankInput(mdot_i_w=-0.1).validate(cfg)


# --- air tank -----------------------------------------------------------------

def test_air_density_balance_and_hand_value():
    cfg = PlantConfig(v_at=0.5)
    state = make_state(cfg)
    assert air_density_rhs(state, AirTankInput(mdot_i_a=0.01, mdot_o_a=0.01), cfg) == 0.0
    assert air_density_rhs(state, AirTankInput(mdot_i_a=0.01), cfg) == pytest.approx(0.02)


def test_air_density_antisymmetric():
    cfg = PlantConfig()
    state = make_state(cfg)
    fwd = air_density_rhs(state, AirTankInput(mdot_i_a=0.02, mdot_o_a=0.005), cfg)
    rev = air_density_rhs(state, AirTankInput(mdot_i_a=0.005, mdot_o_a=0.02), cfg)
    assert fwd == -rev


def test_air_temp_equilibrium_and_hand_value():
    cfg = PlantConfig(kappa_a=4.0, v_at=0.5)
    state = make_state(cfg, t_a=70.0, rho_a=1.2)
    assert air_temp_rhs(state, AirTankInput(p_heat_a=4.0 * 70.0), cfg) == 0.0
    # 1000 W into 0.6 kg of air: 1000 / (0.6 * 1005)
    cfg0 = PlantConfig(kappa_a=0.0, v_at=0.5)
    rate = air_temp_rhs(state, AirTankInput(p_heat_a=1000.0), cfg0)
    assert rate == pytest.approx(1000.0 / (0.6 * 1005.0), rel=1e-12)
    assert rate == pytest.approx(1.6584, rel=1e-4)


def test_air_temp_neutral_inflow():
    cfg = PlantConfig(kappa_a=0.0)
    state = make_state(cfg, t_a=70.0)
    inp = AirTankInput(mdot_i_a=0.01, t_i_a=70.0 + 273.15)
    assert air_temp_rhs(state, inp, cfg) == 0.0


def test_air_temp_empty_tank():
    cfg = PlantConfig()
    state = make_state(cfg, rho_a=0.0)
    with pytest.raises(EmptyAirTankError):
        air_temp_rhs(state, AirTankInput(), cfg)


# --- shared properties ----------------------------------------------------------

def test_euler_mass_balance_exactness():
    """Constant-flow Euler trajectory equals the closed form."""
    cfg = PlantConfig()
    state = make_state(cfg, h=0.5)
    inp = WaterTankInput(mdot_i_w=0.01, mdot_o_w=0.004)
    dt = 1.0
    rate = water_level_rhs(state, inp, cfg)
    h = state.h
    for _ in range(600):
        h += dt * rate
    assert h == pytest.approx(state.h + 600 * dt * rate, rel=1e-12)


@given(a=st.floats(0, 0.05), b=st.floats(0, 0.05), lam=st.floats(0, 1))
def test_level_rhs_affine_superposition(a, b, lam):
    cfg = PlantConfig()
    state = make_state(cfg)
    ra = water_level_rhs(state, WaterTankInput(mdot_i_w=a), cfg)
    rb = water_level_rhs(state, WaterTankInput(mdot_i_w=b), cfg)
    rmix = water_level_rhs(state, WaterTankInput(mdot_i_w=lam * a + (1 - lam) * b), cfg)
    assert rmix == pytest.approx(lam * ra + (1 - lam) * rb, rel=1e-9, abs=1e-15)


def test_rhs_affine_in_power():
    cfg = PlantConfig(kappa_w=3.0)
    state = make_state(cfg)
    r0 = water_temp_rhs(state, WaterTankInput(p_heat_w=0.0), cfg)
    r1 = water_temp_rhs(state, WaterTankInput(p_heat_w=1000.0), cfg)
    r2 = water_temp_rhs(state, WaterTankInput(p_heat_w=2000.0), cfg)
    assert r2 - r1 == pytest.approx(r1 - r0, rel=1e-9)


def test_finite_difference_recovers_rhs():
    """Differencing the Euler trajectory at dt = 1e-3 returns the RHS."""
    cfg = PlantConfig(kappa_w=8.0)
    state = make_state(cfg, h=0.6, t_w=65.0)
    inp = WaterTankInput(mdot_i_w=0.01, mdot_o_w=0.002, t_i_w=300.0,
                         p_heat_w=1200.0)
    dt = 1e-3
    dh = water_level_rhs(state, inp, cfg)
    dtw = water_temp_rhs(state, inp, cfg)
    h1 = state.h + dt * dh
    t1 = state.t_w + dt * dtw
    assert (h1 - state.h) / dt == pytest.approx(dh, rel=1e-6)
    assert (t1 - state.t_w) / dt == pytest.approx(dtw, rel=1e-6)
