"""Lumped-parameter tank dynamics.

Water tank (pressurised cylinder, cross-section S1):

    dh/dt   = (mdot_i_w - mdot_o_w) / (rho_w * S1)
    dT_w/dt = (mdot_i_w * C_e * (T_i_w - T_w_K) + P_heat_w - kappa_w * T_w)
              / (m_w * C_e),        m_w = rho_w * S1 * h,  T_w_K = T_w + 273.15

Air tank (treated as a blower of volume V_AT):

    drho_a/dt = (mdot_i_a - mdot_o_a) / V_AT
    dT_a/dt   = (mdot_i_a * C_p * (T_i_a - (T_a + 273.15)) + P_heat_a
                 - kappa_a * T_a) / (m_a * C_p),   m_a = rho_a * V_AT

The leak terms use the Celsius temperature as printed; set
``cfg.leak_in_kelvin`` to switch them to Kelvin.  All four right-hand
sides are pure functions of (state, input, config).
"""

from __future__ import annotations

from dataclasses import dataclass

from .plant import PlantConfig, PlantState

# below this level the water temperature ODE loses its mass and the
# simulation must stop rather than silently clamp
MIN_WATER_LEVEL_M = 1.0e-3


class EmptyTankError(RuntimeError):
    """Water level has fallen below the minimum usable level."""

    def __init__(self, h: float):
        super().__init__(
            f"water level h={h:.6g} m is below the {MIN_WATER_LEVEL_M} m minimum; "
            "the tank is empty for modelling purposes"
        )
        self.h = h


class EmptyAirTankError(RuntimeError):
    """Air mass in the tank is not positive."""

    def __init__(self, m_a: float):
        super().__init__(f"air tank mass m_a={m_a:.6g} kg must be positive")
        self.m_a = m_a


@dataclass
class WaterTankInput:
    """Boundary flows and heating for the water tank.

    mdot_i_w / mdot_o_w: inflow/outflow mass rates (kg/s, >= 0).
    t_i_w: inflow temperature (K).  p_heat_w: heater power (W), capped by
    the installed heater bank.
    """

    mdot_i_w: float = 0.0
    mdot_o_w: float = 0.0
    t_i_w: float = 293.15
    p_heat_w: float = 0.0

    def validate(self, cfg: PlantConfig) -> None:
        if self.mdot_i_w < 0 or self.mdot_o_w < 0:
            raise ValueError("water tank mass rates must be >= 0")
        if not (0.0 <= self.p_heat_w <= cfg.p_heat_w_max):
            raise ValueError(
                f"p_heat_w={self.p_heat_w} outside [0, {cfg.p_heat_w_max}] W")


@dataclass
class AirTankInput:
    """Boundary flows and heating for the air tank."""

    mdot_i_a: float = 0.0
    mdot_o_a: float = 0.0
    t_i_a: float = 343.85
    p_heat_a: float = 0.0

    def validate(self, cfg: PlantConfig) -> None:
        if self.mdot_i_a < 0 or self.mdot_o_a < 0:
            raise ValueError("air tank mass rates must be >= 0")
        if self.p_heat_a < 0:
            raise ValueError("p_heat_a must be >= 0")


def water_level_rhs(state: PlantState, inp: WaterTankInput, cfg: PlantConfig) -> float:
    """dh/dt in m/s from the mass balance."""
    return (inp.mdot_i_w - inp.mdot_o_w) / (cfg.rho_w * cfg.s1)


def water_temp_rhs(state: PlantState, inp: WaterTankInput, cfg: PlantConfig) -> float:
    """dT_w/dt in degC/s from the energy balance.

    Raises EmptyTankError when the level is below the usable minimum.
    """
    if state.h < MIN_WATER_LEVEL_M:
        raise EmptyTankError(state.h)
    m_w = cfg.rho_w * cfg.s1 * state.h
    t_w_k = state.t_w + 273.15
    leak_t = t_w_k if cfg.leak_in_kelvin else state.t_w
    num = inp.mdot_i_w * cfg.c_e * (inp.t_i_w - t_w_k) + inp.p_heat_w - cfg.kappa_w * leak_t
    return num / (m_w * cfg.c_e)


def air_density_rhs(state: PlantState, inp: AirTankInput, cfg: PlantConfig) -> float:
    """drho_a/dt in kg/m^3/s."""
    return (inp.mdot_i_a - inp.mdot_o_a) / cfg.v_at


def air_temp_rhs(state: PlantState, inp: AirTankInput, cfg: PlantConfig) -> float:
    """dT_a/dt in degC/s.  Raises EmptyAirTankError when m_a <= 0."""
    m_a = state.rho_a * cfg.v_at
    if m_a <= 0.0:
        raise EmptyAirTankError(m_a)
    t_a_k = state.t_a + 273.15
    leak_t = t_a_k if cfg.leak_in_kelvin else state.t_a
    num = inp.mdot_i_a * cfg.c_p * (inp.t_i_a - t_a_k) + inp.p_heat_a - cfg.kappa_a * leak_t
    return num / (m_a * cfg.c_p)
