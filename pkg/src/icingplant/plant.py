"""Plant configuration and composite state records.

PlantConfig holds every physical constant, geometry value and mode switch
shared by the tank, valve, nozzle and test-section models.  PlantState is
the full continuous state advanced by the simulation engine plus the
derived outputs recorded at each step.  Both are plain value types: safe
to copy, compare and serialise, with no behaviour beyond validation.

Config files are JSON with explicit unit-suffix keys (``"Kv_m3ph": 0.05``,
``"P0_bar": 7.0``); values are converted to SI on load and back on dump.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, replace
from typing import Any, Optional

from .units import bar_to_pa, pa_to_bar


@dataclass
class ValveSpec:
    """Proportional solenoid valve characteristics.

    D: orifice diameter (m).  Kv: catalogue flow factor (m^3/h at 1 bar).
    p_range: admissible pressure-drop interval (Pa).  a_max: maximal
    opening area (m^2), defaulting to the full orifice pi*D^2/4.
    """

    d: float = 1.2e-3
    kv: float = 0.05
    p_range: tuple[float, float] = (0.0, 1.6e6)
    a_max: Optional[float] = None

    def __post_init__(self):
        if self.a_max is None:
            self.a_max = math.pi * self.d**2 / 4.0

    def violations(self) -> list[str]:
        out = []
        if self.d <= 0:
            out.append("valve.d must be positive")
        if self.kv <= 0:
            out.append("valve.kv must be positive")
        if self.a_max is None or self.a_max <= 0:
            out.append("valve.a_max must be positive")
        if self.p_range[0] < 0 or self.p_range[1] <= self.p_range[0]:
            out.append("valve.p_range must be a nonempty interval with p_min >= 0")
        return out


@dataclass
class PIGains:
    """Positional PI gains.  Output is clamped to [0, a_max] by the
    controller; the integrator is frozen while the output saturates."""

    kp: float = 0.0
    ki: float = 0.0

    def violations(self, label: str = "pi") -> list[str]:
        out = []
        if self.kp < 0:
            out.append(f"{label}.kp must be >= 0")
        if self.ki < 0:
            out.append(f"{label}.ki must be >= 0")
        return out


@dataclass
class PlantConfig:
    """All physical constants, geometry and mode switches.

    Temperatures inside the leak terms are Celsius as printed unless
    ``leak_in_kelvin`` is set.  ``water_dp_mode`` selects the valve
    pressure-drop closure: ``dynamic_xi`` is the literal xi-based chain
    (kept for auditability; it has no controllable equilibrium), while
    ``tank_differential`` uses dP = P0 - P_av and is what the shipped
    scenario runs with.
    """

    # water tank geometry
    s1: float = math.pi * 0.2**2          # cross section (m^2)
    h_max: float = 1.0                    # tank height (m)
    capacity_l: float = 125.0             # nominal capacity (L)
    p0: float = 7.0e5                     # pressurisation (Pa)

    # heating and thermodynamics
    heater_bank_w: tuple[float, ...] = (500.0, 500.0, 500.0, 500.0, 300.0)
    p_heat_a_max: float = 2000.0          # air heater ceiling (W)
    c_e: float = 4186.0                   # water specific heat (J/(kg K))
    c_p: float = 1005.0                   # air specific heat (J/(kg K))
    kappa_w: float = 0.0                  # water-tank leak coefficient (W/degC)
    kappa_a: float = 0.0                  # air-tank leak coefficient (W/degC)
    leak_in_kelvin: bool = False

    rho_w: float = 1000.0                 # water density (kg/m^3)
    v_at: float = 0.5                     # air tank volume (m^3), placeholder
    gamma: float = 1.4
    r_air: float = 287.0                  # J/(kg K); 2870.0 selectable

    # valves
    valve: ValveSpec = field(default_factory=ValveSpec)
    pi_water: PIGains = field(default_factory=lambda: PIGains(kp=5.0e-3, ki=1.0e-2))
    pi_air: PIGains = field(default_factory=lambda: PIGains(kp=1.1e-3, ki=2.2e-3))
    p_av_water: float = 101325.0          # downstream pressure at water valves (Pa)
    p_av_air: float = 101325.0            # downstream pressure at air valves (Pa)
    water_dp_mode: str = "dynamic_xi"     # or "tank_differential"
    cd_mode: str = "unit_consistent"      # or "literal"
    xi_d_in_mm: bool = True
    xi_area_floor: float = 1.0e-9         # velocity-closure floor on A (m^2)

    # nozzles and test section
    nozzle_area_ratio: float = 1.2
    nozzle_inlet_area: float = 3.0e-6     # m^2, placeholder
    nozzle_heating: bool = True
    a_ts: float = 0.8                     # test-section cross section (m^2), calibratable
    n_conduits: int = 12
    lwc_per_bus: bool = False             # divide aggregate flow by active conduits

    # integration and boundary flows
    dt: float = 1.0
    water_inflow_kg_s: float = 0.0
    t_in_water_k: float = 293.15
    air_inflow_mode: str = "track_outflow"  # or "constant"
    air_inflow_kg_s: float = 0.0
    t_in_air_k: float = 343.85

    # predictor selection
    t_n_model: str = "polynomial"         # or "mlp"
    mvd_model: str = "products_4"         # Eq-(20) structure; "qa_factored" = Eq-(19)

    # recorded-but-unused geometry from the level derivation (orifice area,
    # surface/orifice velocities, initial height); never evaluated
    unused_geometry: dict = field(default_factory=lambda: {
        "s2_m2": None, "v1_mps": None, "v2_mps": None, "h0_m": None,
    })

    @property
    def p_heat_w_max(self) -> float:
        return sum(self.heater_bank_w)

    def violations(self) -> list[str]:
        """Every violated invariant, by field name.  Empty list means ok."""
        bad = []
        for name in ("s1", "h_max", "capacity_l", "p0", "c_e", "c_p",
                     "rho_w", "v_at", "a_ts", "nozzle_inlet_area"):
            if getattr(self, name) <= 0:
                bad.append(f"{name} must be positive")
        if self.gamma <= 1:
            bad.append("gamma > 1 required")
        if self.r_air <= 0:
            bad.append("r_air must be positive")
        if self.dt <= 0:
            bad.append("dt must be positive")
        if not (1 <= self.n_conduits <= 12):
            bad.append("n_conduits must be within [1, 12]")
        if self.nozzle_area_ratio <= 1:
            bad.append("nozzle_area_ratio must exceed 1")
        if any(p < 0 for p in self.heater_bank_w):
            bad.append("heater_bank_w entries must be >= 0")
        if self.kappa_w < 0 or self.kappa_a < 0:
            bad.append("leak coefficients must be >= 0")
        if self.water_dp_mode not in ("dynamic_xi", "tank_differential"):
            bad.append("water_dp_mode must be 'dynamic_xi' or 'tank_differential'")
        if self.cd_mode not in ("unit_consistent", "literal"):
            bad.append("cd_mode must be 'unit_consistent' or 'literal'")
        if self.air_inflow_mode not in ("track_outflow", "constant"):
            bad.append("air_inflow_mode must be 'track_outflow' or 'constant'")
        bad += self.valve.violations()
        bad += self.pi_water.violations("pi_water")
        bad += self.pi_air.violations("pi_air")
        return bad

    def copy(self, **changes) -> "PlantConfig":
        return replace(self, **changes)


def validate_config(cfg: PlantConfig) -> list[str]:
    """Return the list of violated invariants (empty = ok)."""
    return cfg.violations()


class ConfigError(ValueError):
    """Raised when a config file cannot be interpreted."""


# JSON key -> (attribute, to-SI, from-SI).  Identity where units coincide.
_CFG_KEYS = {
    "S1_m2": ("s1", None),
    "H_m": ("h_max", None),
    "capacity_l": ("capacity_l", None),
    "P0_bar": ("p0", "bar"),
    "heater_bank_w": ("heater_bank_w", "tuple"),
    "air_heater_max_w": ("p_heat_a_max", None),
    "C_e_j_per_kgk": ("c_e", None),
    "C_p_j_per_kgk": ("c_p", None),
    "kappa_w_w_per_c": ("kappa_w", None),
    "kappa_a_w_per_c": ("kappa_a", None),
    "leak_in_kelvin": ("leak_in_kelvin", None),
    "rho_w_kg_per_m3": ("rho_w", None),
    "V_AT_m3": ("v_at", None),
    "gamma": ("gamma", None),
    "R_j_per_kgk": ("r_air", None),
    "P_av_water_bar": ("p_av_water", "bar"),
    "P_av_air_bar": ("p_av_air", "bar"),
    "water_dp_mode": ("water_dp_mode", None),
    "cd_mode": ("cd_mode", None),
    "xi_d_in_mm": ("xi_d_in_mm", None),
    "nozzle_area_ratio": ("nozzle_area_ratio", None),
    "nozzle_inlet_area_m2": ("nozzle_inlet_area", None),
    "nozzle_heating": ("nozzle_heating", None),
    "A_TS_m2": ("a_ts", None),
    "n_conduits": ("n_conduits", None),
    "lwc_per_bus": ("lwc_per_bus", None),
    "dt_s": ("dt", None),
    "water_inflow_kg_s": ("water_inflow_kg_s", None),
    "T_in_water_c": ("t_in_water_k", "degC"),
    "air_inflow_mode": ("air_inflow_mode", None),
    "air_inflow_kg_s": ("air_inflow_kg_s", None),
    "T_in_air_c": ("t_in_air_k", "degC"),
    "t_n_model": ("t_n_model", None),
    "mvd_model": ("mvd_model", None),
    "unused_geometry": ("unused_geometry", None),
}


def config_from_dict(doc: dict[str, Any]) -> PlantConfig:
    """Build a PlantConfig from a unit-suffixed JSON document.

    Unknown keys are rejected so typos cannot silently fall back to
    defaults.
    """
    cfg = PlantConfig()
    for key, value in doc.items():
        if key == "valve":
            spec = ValveSpec(
                d=value.get("D_mm", 1.2) * 1e-3,
                kv=value.get("Kv_m3ph", 0.05),
                p_range=(bar_to_pa(value.get("p_min_bar", 0.0)),
                         bar_to_pa(value.get("p_max_bar", 16.0))),
            )
            cfg = cfg.copy(valve=spec)
            continue
        if key in ("pi_water", "pi_air"):
            cfg = cfg.copy(**{key: PIGains(kp=value["kp"], ki=value["ki"])})
            continue
        if key not in _CFG_KEYS:
            raise ConfigError(f"unknown config key: {key!r}")
        attr, conv = _CFG_KEYS[key]
        if conv == "bar":
            value = bar_to_pa(value)
        elif conv == "degC":
            value = value + 273.15
        elif conv == "tuple":
            value = tuple(value)
        cfg = cfg.copy(**{attr: value})
    problems = cfg.violations()
    if problems:
        raise ConfigError("invalid config: " + "; ".join(problems))
    return cfg


def config_to_dict(cfg: PlantConfig) -> dict[str, Any]:
    """Dump a PlantConfig to the unit-suffixed JSON document form."""
    return {
        "S1_m2": cfg.s1, "H_m": cfg.h_max, "capacity_l": cfg.capacity_l,
        "P0_bar": pa_to_bar(cfg.p0),
        "heater_bank_w": list(cfg.heater_bank_w),
        "air_heater_max_w": cfg.p_heat_a_max,
        "C_e_j_per_kgk": cfg.c_e, "C_p_j_per_kgk": cfg.c_p,
        "kappa_w_w_per_c": cfg.kappa_w, "kappa_a_w_per_c": cfg.kappa_a,
        "leak_in_kelvin": cfg.leak_in_kelvin,
        "rho_w_kg_per_m3": cfg.rho_w, "V_AT_m3": cfg.v_at,
        "gamma": cfg.gamma, "R_j_per_kgk": cfg.r_air,
        "valve": {
            "D_mm": cfg.valve.d * 1e3, "Kv_m3ph": cfg.valve.kv,
            "p_min_bar": pa_to_bar(cfg.valve.p_range[0]),
            "p_max_bar": pa_to_bar(cfg.valve.p_range[1]),
        },
        "pi_water": {"kp": cfg.pi_water.kp, "ki": cfg.pi_water.ki},
        "pi_air": {"kp": cfg.pi_air.kp, "ki": cfg.pi_air.ki},
        "P_av_water_bar": pa_to_bar(cfg.p_av_water),
        "P_av_air_bar": pa_to_bar(cfg.p_av_air),
        "water_dp_mode": cfg.water_dp_mode, "cd_mode": cfg.cd_mode,
        "xi_d_in_mm": cfg.xi_d_in_mm,
        "nozzle_area_ratio": cfg.nozzle_area_ratio,
        "nozzle_inlet_area_m2": cfg.nozzle_inlet_area,
        "nozzle_heating": cfg.nozzle_heating,
        "A_TS_m2": cfg.a_ts, "n_conduits": cfg.n_conduits,
        "lwc_per_bus": cfg.lwc_per_bus,
        "dt_s": cfg.dt,
        "water_inflow_kg_s": cfg.water_inflow_kg_s,
        "T_in_water_c": cfg.t_in_water_k - 273.15,
        "air_inflow_mode": cfg.air_inflow_mode,
        "air_inflow_kg_s": cfg.air_inflow_kg_s,
        "T_in_air_c": cfg.t_in_air_k - 273.15,
        "t_n_model": cfg.t_n_model, "mvd_model": cfg.mvd_model,
        "unused_geometry": dict(cfg.unused_geometry),
    }


def load_config(path: str) -> PlantConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return config_from_dict(doc)


def save_config(cfg: PlantConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2)
        fh.write("\n")


@dataclass
class ValveState:
    """One proportional valve: opening area, PI integrator, on/off."""

    area: float = 0.0        # m^2, within [0, a_max]
    integ: float = 0.0       # integrator accumulation (m^3)
    enabled: bool = True

    def to_dict(self) -> dict:
        return {"area": self.area, "integ": self.integ, "enabled": self.enabled}

    @classmethod
    def from_dict(cls, d: dict) -> "ValveState":
        return cls(area=d["area"], integ=d["integ"], enabled=d["enabled"])


@dataclass
class PlantState:
    """Continuous plant state plus derived outputs.

    Temperatures are degC, flows m^3/s, areas m^2.  ``mvd_um`` is None
    whenever the liquid water content is zero (no droplets, no median
    diameter).
    """

    h: float                         # water level (m)
    t_w: float                       # water-tank temperature (degC)
    rho_a: float                     # air density in tank (kg/m^3)
    t_a: float                       # air-tank temperature (degC)
    water_valves: list[ValveState]
    air_valves: list[ValveState]
    q_wv: list[float]                # per-conduit water flow (m^3/s)
    q_av: list[float]                # per-conduit air flow (m^3/s)
    t_ts: float = -6.5               # exogenous test-section temperature (degC)
    v_ts: float = 34.2               # exogenous wind velocity (m/s)
    t_n: float = 0.0                 # nozzle mix temperature (degC), derived
    lwc_gm3: float = 0.0             # derived (g/m^3)
    mvd_um: Optional[float] = None   # derived (um); None when lwc == 0
    nozzle_v_out: float = 0.0        # derived outlet velocity (m/s)

    @classmethod
    def initial(cls, cfg: PlantConfig, h: float, t_w: float, rho_a: float,
                t_a: float, t_ts: float, v_ts: float) -> "PlantState":
        n = cfg.n_conduits
        return cls(
            h=h, t_w=t_w, rho_a=rho_a, t_a=t_a,
            water_valves=[ValveState() for _ in range(n)],
            air_valves=[ValveState() for _ in range(n)],
            q_wv=[0.0] * n, q_av=[0.0] * n,
            t_ts=t_ts, v_ts=v_ts,
        )

    def violations(self, cfg: PlantConfig) -> list[str]:
        bad = []
        if not (0.0 <= self.h <= cfg.h_max):
            bad.append(f"h={self.h} outside [0, {cfg.h_max}]")
        if self.rho_a <= 0:
            bad.append("rho_a must be positive")
        for kind, valves in (("water", self.water_valves), ("air", self.air_valves)):
            for i, v in enumerate(valves):
                if not (0.0 <= v.area <= cfg.valve.a_max + 1e-15):
                    bad.append(f"{kind} valve {i + 1} area outside [0, a_max]")
        if any(q < 0 for q in self.q_wv + self.q_av):
            bad.append("flows must be >= 0")
        return bad

    def to_dict(self) -> dict:
        d = asdict(self)
        d["water_valves"] = [v.to_dict() for v in self.water_valves]
        d["air_valves"] = [v.to_dict() for v in self.air_valves]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlantState":
        d = dict(d)
        d["water_valves"] = [ValveState.from_dict(v) for v in d["water_valves"]]
        d["air_valves"] = [ValveState.from_dict(v) for v in d["air_valves"]]
        return cls(**d)
