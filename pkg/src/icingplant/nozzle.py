"""Atomizer nozzle: outlet velocity by continuity, mix temperature by a
fitted predictor.

Continuity across the contraction gives S_i v_i = S_o v_o, and with the
inlet surface a fixed factor larger than the outlet, v_out is simply that
area ratio times v_in (1.2 by default).  The mix temperature T_n is not
sensed on the real plant; it is estimated from T_TS, T_w and T_a by a
pluggable predictor (linear polynomial by default, MLP optional) and is a
monitored quantity only -- it feeds no other equation.  Each nozzle
carries a heating patch meant to keep T_n above 0 degC; a predicted
temperature at or below freezing is a reportable freeze-risk event.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fitting.tables import envelope_warnings


@dataclass
class NozzleSpec:
    """Geometry ratio and heating-patch flag."""

    area_ratio: float = 1.2     # S_i / S_o, must exceed 1
    heating: bool = True

    def __post_init__(self):
        if self.area_ratio <= 1:
            raise ValueError("nozzle area ratio must exceed 1")


def outlet_velocity(v_in: float, spec: NozzleSpec) -> float:
    """Outlet velocity v_out = area_ratio * v_in (m/s)."""
    if v_in < 0:
        raise ValueError("inlet velocity must be >= 0")
    return spec.area_ratio * v_in


def nozzle_temperature(t_ts: float, t_w: float, t_a: float,
                       predictor) -> tuple[float, list[str]]:
    """Predicted mix temperature in the nozzles (degC) plus any
    out-of-envelope warnings.  Inputs outside the commissioning-data
    ranges are warned about, never rejected."""
    warnings = envelope_warnings({"T_TS": t_ts, "T_w": t_w, "T_a": t_a})
    t_n = predictor.evaluate({"T_TS": t_ts, "T_w": t_w, "T_a": t_a})
    return t_n, warnings


def freeze_risk(t_n: float, spec: NozzleSpec) -> bool:
    """True when the heating patch is on yet the predicted mix
    temperature is at or below freezing."""
    return spec.heating and t_n <= 0.0
