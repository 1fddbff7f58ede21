"""Valve flow laws and the PI actuator loop.

Water valve (orifice law with the catalogue flow factor Kv):

    Q_wv = A * C_d * sqrt(2 dP / rho_w)
    C_d  = 4 Kv / (pi D^2) * sqrt(rho_w / 2)
    dP   = 1/2 xi rho_w v_wv^2,     xi = pi D^4 / (8000 Kv^2)

Printed this way the chain is dimensionally inconsistent: with Kv in
m^3/h the discharge coefficient evaluates to ~1e6.  The default
``unit_consistent`` mode restores the factors implied by the standard Kv
definition Q[m^3/h] = Kv * sqrt(dP[bar]) (divide Kv by 3600 and the
square root by sqrt(1e5)), giving C_d ~ 0.868; ``literal``
evaluates the formula exactly as printed.  The xi formula is only a
plausible loss coefficient with D in millimetres (~0.326); with D in
metres it is ~3e-13.  Both switches live in PlantConfig.

Air valve (compressible orifice flow, evaluated as printed; no choking
clamp, so the curve has a single interior maximum at the critical ratio
(2/(gamma+1))^(gamma/(gamma-1)) and decreases on either side):

    Q_av = A / rho_a * sqrt(2 gamma / (R (gamma-1))) * P_a / sqrt(T_a)
           * (P_av/P_a)^(1/gamma) * sqrt(1 - (P_av/P_a)^((gamma-1)/gamma))

The PI controller acts on the opening area with output clamped to
[0, a_max] and conditional integration as anti-windup.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .plant import PIGains, ValveSpec, ValveState


class BackflowError(ValueError):
    """Downstream pressure exceeds tank pressure; reverse flow is not modelled."""


def discharge_coefficient(spec: ValveSpec, rho_w: float,
                          mode: str = "unit_consistent") -> float:
    """Discharge coefficient C_d for the water valve."""
    base = 4.0 * spec.kv / (math.pi * spec.d**2) * math.sqrt(rho_w / 2.0)
    if mode == "literal":
        return base
    if mode == "unit_consistent":
        return base / 3600.0 / math.sqrt(1.0e5)
    raise ValueError(f"unknown cd mode: {mode!r}")


def pressure_drop_coefficient(spec: ValveSpec, d_in_mm: bool = True) -> float:
    """Pressure drop coefficient xi (dimensionless)."""
    d = spec.d * 1e3 if d_in_mm else spec.d
    return math.pi * d**4 / (8000.0 * spec.kv**2)


def water_pressure_drop(spec: ValveSpec, rho_w: float, v_wv: float,
                        d_in_mm: bool = True) -> float:
    """Dynamic pressure drop dP = 1/2 xi rho v^2 (Pa)."""
    xi = pressure_drop_coefficient(spec, d_in_mm)
    return 0.5 * xi * rho_w * v_wv * v_wv


class WaterValveFlow(NamedTuple):
    q: float                    # volumetric flow (m^3/s)
    dp: float                   # pressure drop used (Pa)
    warning: Optional[str]      # set when dp leaves the valve's envelope


def _envelope_warning(dp: float, spec: ValveSpec) -> Optional[str]:
    lo, hi = spec.p_range
    if dp < lo or dp > hi:
        return (f"valve pressure drop {dp:.4g} Pa outside operating envelope "
                f"[{lo:.4g}, {hi:.4g}] Pa")
    return None


def water_valve_flow(area: float, spec: ValveSpec, rho_w: float, v_wv: float,
                     cd_mode: str = "unit_consistent",
                     xi_d_in_mm: bool = True) -> WaterValveFlow:
    """Water flow through the valve from the xi-based dynamic drop.

    Composes C_d, xi and the orifice law.  Returns zero flow at zero
    opening.  An out-of-envelope pressure drop attaches a warning to the
    result instead of raising.
    """
    if area < 0:
        raise ValueError("opening area must be >= 0")
    if v_wv < 0:
        raise ValueError("valve velocity must be >= 0")
    dp = water_pressure_drop(spec, rho_w, v_wv, xi_d_in_mm)
    if area == 0.0:
        return WaterValveFlow(0.0, dp, None)
    cd = discharge_coefficient(spec, rho_w, cd_mode)
    q = area * cd * math.sqrt(2.0 * dp / rho_w)
    return WaterValveFlow(q, dp, _envelope_warning(dp, spec))


def water_valve_flow_dp(area: float, spec: ValveSpec, rho_w: float, dp: float,
                        cd_mode: str = "unit_consistent") -> WaterValveFlow:
    """Water flow through the valve from an imposed pressure difference
    (tank pressurisation minus downstream pressure)."""
    if area < 0:
        raise ValueError("opening area must be >= 0")
    if dp < 0:
        raise ValueError("pressure difference must be >= 0")
    if area == 0.0:
        return WaterValveFlow(0.0, dp, None)
    cd = discharge_coefficient(spec, rho_w, cd_mode)
    q = area * cd * math.sqrt(2.0 * dp / rho_w)
    return WaterValveFlow(q, dp, _envelope_warning(dp, spec))


def air_valve_flow(area: float, spec: ValveSpec, rho_a: float, t_a_k: float,
                   p_a: float, p_av: float, gamma: float = 1.4,
                   r_air: float = 287.0) -> float:
    """Volumetric air flow through the valve (m^3/s, referenced to tank
    density).

    Requires 0 < P_av <= P_a and T_a > 0; returns 0 at zero opening or at
    pressure ratio 1.
    """
    if area < 0:
        raise ValueError("opening area must be >= 0")
    if t_a_k <= 0:
        raise ValueError("tank temperature must be positive (K)")
    if rho_a <= 0:
        raise ValueError("air density must be positive")
    if p_av <= 0:
        raise ValueError("downstream pressure must be positive")
    if p_av > p_a:
        raise BackflowError(
            f"downstream pressure {p_av:.6g} Pa exceeds tank pressure {p_a:.6g} Pa")
    if area == 0.0 or p_av == p_a:
        return 0.0
    ratio = p_av / p_a
    flux = (math.sqrt(2.0 * gamma / (r_air * (gamma - 1.0)))
            * p_a / math.sqrt(t_a_k)
            * ratio ** (1.0 / gamma)
            * math.sqrt(1.0 - ratio ** ((gamma - 1.0) / gamma)))
    return area / rho_a * flux


def critical_pressure_ratio(gamma: float = 1.4) -> float:
    """Pressure ratio of the interior flow maximum, (2/(gamma+1))^(gamma/(gamma-1))."""
    return (2.0 / (gamma + 1.0)) ** (gamma / (gamma - 1.0))


def pi_step(valve: ValveState, setpoint: float, measured: float,
            gains: PIGains, a_max: float, dt: float) -> ValveState:
    """One PI update of the valve opening area.

    Positional form A = clamp(kp*e + ki*I, 0, a_max) with e = setpoint -
    measured.  The integrator only accumulates while the unclamped output
    stays inside the actuator range (conditional integration), so its
    magnitude never grows past the value it had at saturation onset.  A
    disabled valve is forced shut and its integrator reset.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not valve.enabled:
        return ValveState(area=0.0, integ=0.0, enabled=False)
    e = setpoint - measured
    integ = valve.integ + e * dt
    u = gains.kp * e + gains.ki * integ
    if u > a_max or u < 0.0:
        # saturated: keep the previous integrator value
        integ = valve.integ
        u = gains.kp * e + gains.ki * integ
    area = min(max(u, 0.0), a_max)
    return ValveState(area=area, integ=integ, enabled=True)
