"""Fixed-step deterministic integration of the full plant.

Evaluation order within one step is fixed: tank ODEs (explicit Euler)
first, then the PI loops and valve flow laws, then the algebraic outputs
(nozzle velocity and temperature, LWC, MVD).  The water tank's outflow
mass rate is closed from the valves: mdot_o_w = rho_w * sum of conduit
flows; the air tank replenishes per the configured inflow mode.

Event semantics: row k of the trace records the state after the update
ending at t_k together with the inputs that produced it.  Events (and
live operator commands) scheduled at grid index k are applied after row k
is emitted and before the k -> k+1 update, so their effect is first
visible in row k+1.  Running a scenario and issuing the same actions live
at the same steps therefore produce bit-identical traces.

The engine is single-threaded and uses no randomness: a trace is a pure
function of (scenario, config).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from . import nozzle as nozzle_mod
from . import test_section
from .fitting.predictor import (
    Predictor,
    mvd_products_4,
    mvd_qa_factored,
    t_n_polynomial,
)
from .plant import ConfigError, PlantConfig, PlantState, ValveState
from .scenario import Event, Scenario, ScenarioError, setpoint_si
from .tanks import MIN_WATER_LEVEL_M, AirTankInput, EmptyTankError, WaterTankInput, \
    air_density_rhs, air_temp_rhs, water_level_rhs, water_temp_rhs
from .units import lph_to_m3s, lpm_to_m3s, m3s_to_lph, m3s_to_lpm
from .valves import air_valve_flow, pi_step, water_valve_flow, water_valve_flow_dp


class SimulationHalt(RuntimeError):
    """Integration stopped mid-run; carries the step index and cause."""

    def __init__(self, step_index: int, reason: str):
        super().__init__(f"simulation halted at step {step_index}: {reason}")
        self.step_index = step_index
        self.reason = reason


@dataclass
class ControlInputs:
    """Setpoints and exogenous drives in force during one update."""

    water_setpoints: list[float]          # m^3/s per conduit
    air_setpoints: list[float]            # m^3/s per conduit
    t_ts: float                           # degC
    v_ts: float                           # m/s
    p_heat_w: float = 0.0                 # W
    p_heat_a: float = 0.0                 # W

    def copy(self) -> "ControlInputs":
        return ControlInputs(list(self.water_setpoints), list(self.air_setpoints),
                             self.t_ts, self.v_ts, self.p_heat_w, self.p_heat_a)


def default_predictors(cfg: PlantConfig) -> tuple[Predictor, Predictor]:
    """(T_n predictor, MVD predictor) named by the config."""
    if cfg.t_n_model == "polynomial":
        t_n = t_n_polynomial()
    else:
        raise ConfigError(
            f"t_n_model {cfg.t_n_model!r} needs an explicitly supplied predictor")
    if cfg.mvd_model == "products_4":
        m = mvd_products_4()
    elif cfg.mvd_model == "qa_factored":
        m = mvd_qa_factored()
    else:
        raise ConfigError(
            f"mvd_model {cfg.mvd_model!r} needs an explicitly supplied predictor")
    return t_n, m


def air_tank_pressure(state: PlantState, cfg: PlantConfig) -> float:
    """Ideal-gas tank pressure P_a = rho_a R T_K (Pa)."""
    return state.rho_a * cfg.r_air * (state.t_a + 273.15)


def advance(state: PlantState, inputs: ControlInputs, cfg: PlantConfig,
            dt: float, t_n_pred: Predictor, mvd_pred: Predictor,
            nozzle_spec: Optional[nozzle_mod.NozzleSpec] = None,
            ) -> tuple[PlantState, list[str]]:
    """One full plant update; returns (next state, warnings)."""
    if nozzle_spec is None:
        nozzle_spec = nozzle_mod.NozzleSpec(cfg.nozzle_area_ratio, cfg.nozzle_heating)
    warnings: list[str] = []

    # --- tanks (Euler on the current flows) ---
    mdot_o_w = cfg.rho_w * sum(state.q_wv)
    mdot_o_a = state.rho_a * sum(state.q_av)
    w_in = WaterTankInput(
        mdot_i_w=cfg.water_inflow_kg_s, mdot_o_w=mdot_o_w,
        t_i_w=cfg.t_in_water_k, p_heat_w=inputs.p_heat_w)
    w_in.validate(cfg)
    mdot_i_a = mdot_o_a if cfg.air_inflow_mode == "track_outflow" else cfg.air_inflow_kg_s
    a_in = AirTankInput(
        mdot_i_a=mdot_i_a, mdot_o_a=mdot_o_a,
        t_i_a=cfg.t_in_air_k, p_heat_a=inputs.p_heat_a)
    a_in.validate(cfg)

    dh = water_level_rhs(state, w_in, cfg)
    dtw = water_temp_rhs(state, w_in, cfg)        # raises on empty tank
    drho = air_density_rhs(state, a_in, cfg)
    dta = air_temp_rhs(state, a_in, cfg)

    h_next = state.h + dt * dh
    if h_next < MIN_WATER_LEVEL_M:
        # halt at the crossing step instead of letting the level go
        # unphysical and tripping the entry guard one step later
        raise EmptyTankError(h_next)

    new = PlantState(
        h=h_next,
        t_w=state.t_w + dt * dtw,
        rho_a=state.rho_a + dt * drho,
        t_a=state.t_a + dt * dta,
        water_valves=list(state.water_valves),
        air_valves=list(state.air_valves),
        q_wv=list(state.q_wv),
        q_av=list(state.q_av),
        t_ts=inputs.t_ts,
        v_ts=inputs.v_ts,
    )

    # --- valves: PI update, then flow laws on the new areas ---
    p_a = air_tank_pressure(new, cfg)
    t_a_k = new.t_a + 273.15
    dp_water = cfg.p0 - cfg.p_av_water
    envelope_seen = set()
    for i in range(cfg.n_conduits):
        wv = pi_step(state.water_valves[i], inputs.water_setpoints[i],
                     state.q_wv[i], cfg.pi_water, cfg.valve.a_max, dt)
        if cfg.water_dp_mode == "tank_differential":
            flow = water_valve_flow_dp(wv.area, cfg.valve, cfg.rho_w, dp_water,
                                       cfg.cd_mode)
        else:
            v_wv = state.q_wv[i] / max(wv.area, cfg.xi_area_floor)
            flow = water_valve_flow(wv.area, cfg.valve, cfg.rho_w, v_wv,
                                    cfg.cd_mode, cfg.xi_d_in_mm)
        if flow.warning and flow.warning not in envelope_seen:
            envelope_seen.add(flow.warning)
            warnings.append(flow.warning)
        new.water_valves[i] = wv
        new.q_wv[i] = flow.q

        av = pi_step(state.air_valves[i], inputs.air_setpoints[i],
                     state.q_av[i], cfg.pi_air, cfg.valve.a_max, dt)
        new.air_valves[i] = av
        new.q_av[i] = air_valve_flow(av.area, cfg.valve, new.rho_a, t_a_k,
                                     p_a, cfg.p_av_air, cfg.gamma, cfg.r_air)

    _algebraic_outputs(new, cfg, t_n_pred, mvd_pred, nozzle_spec, warnings)
    return new, warnings


def _algebraic_outputs(state: PlantState, cfg: PlantConfig,
                       t_n_pred: Predictor, mvd_pred: Predictor,
                       nozzle_spec: nozzle_mod.NozzleSpec,
                       warnings: list[str]) -> None:
    """Fill the derived fields of ``state`` in place (nozzles, then test
    section).  Raises WindVelocityError when v_TS is not positive."""
    active_air = [q for q, v in zip(state.q_av, state.air_valves) if v.enabled]
    if active_air:
        v_in_mean = sum(active_air) / len(active_air) / cfg.nozzle_inlet_area
        state.nozzle_v_out = nozzle_mod.outlet_velocity(v_in_mean, nozzle_spec)
    else:
        state.nozzle_v_out = 0.0

    t_n, warns = nozzle_mod.nozzle_temperature(state.t_ts, state.t_w, state.t_a,
                                               t_n_pred)
    state.t_n = t_n
    warnings.extend(warns)
    if nozzle_mod.freeze_risk(t_n, nozzle_spec):
        warnings.append(
            f"freeze risk: predicted T_n={t_n:.2f} degC at or below 0 "
            "with nozzle heating on")

    q_w_total = sum(state.q_wv)
    n_active_w = sum(1 for v in state.water_valves if v.enabled)
    q_for_lwc = q_w_total
    if cfg.lwc_per_bus and n_active_w > 0:
        q_for_lwc = q_w_total / n_active_w
    state.lwc_gm3 = test_section.lwc(q_for_lwc, state.v_ts, cfg)

    q_a_lpm = m3s_to_lpm(sum(active_air) / len(active_air)) if active_air else 0.0
    mvd_um, warns = test_section.mvd(q_a_lpm, state.lwc_gm3, state.t_ts,
                                     state.v_ts, mvd_pred)
    state.mvd_um = mvd_um
    warnings.extend(warns)


@dataclass
class TraceRow:
    """One time-grid snapshot in plant units."""

    t: float
    h_m: float
    t_w_c: float
    rho_a_kg_m3: float
    t_a_c: float
    t_ts_c: float
    v_ts_mps: float
    t_n_c: float
    lwc_gm3: float
    mvd_um: Optional[float]
    nozzle_v_out_mps: float
    n_active_water: int
    n_active_air: int
    water: list[dict[str, Any]]    # per conduit: enabled, setpoint_lph, flow_lph, opening
    air: list[dict[str, Any]]      # per conduit: enabled, setpoint_lpm, flow_lpm, opening
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "t": self.t, "h_m": self.h_m, "t_w_c": self.t_w_c,
            "rho_a_kg_m3": self.rho_a_kg_m3, "t_a_c": self.t_a_c,
            "t_ts_c": self.t_ts_c, "v_ts_mps": self.v_ts_mps,
            "t_n_c": self.t_n_c, "lwc_gm3": self.lwc_gm3,
            "mvd_um": self.mvd_um, "nozzle_v_out_mps": self.nozzle_v_out_mps,
            "n_active_water": self.n_active_water,
            "n_active_air": self.n_active_air,
            "water": self.water, "air": self.air, "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TraceRow":
        return cls(**d)


def make_row(t: float, state: PlantState, inputs: ControlInputs,
             a_max: float) -> TraceRow:
    water = []
    air = []
    for i, v in enumerate(state.water_valves):
        water.append({
            "enabled": v.enabled,
            "setpoint_lph": m3s_to_lph(inputs.water_setpoints[i]),
            "flow_lph": m3s_to_lph(state.q_wv[i]),
            "opening": v.area / a_max,
        })
    for i, v in enumerate(state.air_valves):
        air.append({
            "enabled": v.enabled,
            "setpoint_lpm": m3s_to_lpm(inputs.air_setpoints[i]),
            "flow_lpm": m3s_to_lpm(state.q_av[i]),
            "opening": v.area / a_max,
        })
    return TraceRow(
        t=t, h_m=state.h, t_w_c=state.t_w, rho_a_kg_m3=state.rho_a,
        t_a_c=state.t_a, t_ts_c=state.t_ts, v_ts_mps=state.v_ts,
        t_n_c=state.t_n, lwc_gm3=state.lwc_gm3, mvd_um=state.mvd_um,
        nozzle_v_out_mps=state.nozzle_v_out,
        n_active_water=sum(1 for v in state.water_valves if v.enabled),
        n_active_air=sum(1 for v in state.air_valves if v.enabled),
        water=water, air=air,
    )


class Trace:
    """Uniform-time-grid sequence of rows with CSV/JSON round-trip.

    The CSV column order is fixed: the scalar block below, then per-
    conduit water columns (enabled, setpoint, flow, opening) for conduits
    1..n, then the matching air columns, then the warnings column
    (semicolon-joined).  An absent MVD is an empty field.
    """

    SCALARS = ("t", "h_m", "t_w_c", "rho_a_kg_m3", "t_a_c", "t_ts_c",
               "v_ts_mps", "t_n_c", "lwc_gm3", "mvd_um", "nozzle_v_out_mps",
               "n_active_water", "n_active_air")

    def __init__(self, rows: list[TraceRow], n_conduits: int):
        self.rows = rows
        self.n_conduits = n_conduits

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> TraceRow:
        return self.rows[i]

    def column(self, name: str) -> list:
        return [getattr(row, name) for row in self.rows]

    def header(self) -> list[str]:
        cols = list(self.SCALARS)
        for i in range(1, self.n_conduits + 1):
            cols += [f"w{i}_enabled", f"w{i}_setpoint_lph", f"w{i}_flow_lph",
                     f"w{i}_opening"]
        for i in range(1, self.n_conduits + 1):
            cols += [f"a{i}_enabled", f"a{i}_setpoint_lpm", f"a{i}_flow_lpm",
                     f"a{i}_opening"]
        cols.append("warnings")
        return cols

    @staticmethod
    def _fmt(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "1" if value else "0"
        if isinstance(value, float):
            return repr(value)
        return str(value)

    def save_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for row in self.rows:
                cells = [self._fmt(getattr(row, s)) for s in self.SCALARS]
                for v in row.water:
                    cells += [self._fmt(v["enabled"]), self._fmt(v["setpoint_lph"]),
                              self._fmt(v["flow_lph"]), self._fmt(v["opening"])]
                for v in row.air:
                    cells += [self._fmt(v["enabled"]), self._fmt(v["setpoint_lpm"]),
                              self._fmt(v["flow_lpm"]), self._fmt(v["opening"])]
                cells.append("; ".join(row.warnings))
                writer.writerow(cells)

    @classmethod
    def load_csv(cls, path: str) -> "Trace":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            n_conduits = sum(1 for h in header if h.endswith("_flow_lph"))
            rows = []
            for cells in reader:
                rec = dict(zip(header, cells))
                water = []
                air = []
                for i in range(1, n_conduits + 1):
                    water.append({
                        "enabled": rec[f"w{i}_enabled"] == "1",
                        "setpoint_lph": float(rec[f"w{i}_setpoint_lph"]),
                        "flow_lph": float(rec[f"w{i}_flow_lph"]),
                        "opening": float(rec[f"w{i}_opening"]),
                    })
                    air.append({
                        "enabled": rec[f"a{i}_enabled"] == "1",
                        "setpoint_lpm": float(rec[f"a{i}_setpoint_lpm"]),
                        "flow_lpm": float(rec[f"a{i}_flow_lpm"]),
                        "opening": float(rec[f"a{i}_opening"]),
                    })
                rows.append(TraceRow(
                    t=float(rec["t"]), h_m=float(rec["h_m"]),
                    t_w_c=float(rec["t_w_c"]),
                    rho_a_kg_m3=float(rec["rho_a_kg_m3"]),
                    t_a_c=float(rec["t_a_c"]), t_ts_c=float(rec["t_ts_c"]),
                    v_ts_mps=float(rec["v_ts_mps"]), t_n_c=float(rec["t_n_c"]),
                    lwc_gm3=float(rec["lwc_gm3"]),
                    mvd_um=float(rec["mvd_um"]) if rec["mvd_um"] else None,
                    nozzle_v_out_mps=float(rec["nozzle_v_out_mps"]),
                    n_active_water=int(rec["n_active_water"]),
                    n_active_air=int(rec["n_active_air"]),
                    water=water, air=air,
                    warnings=rec["warnings"].split("; ") if rec["warnings"] else [],
                ))
        return cls(rows, n_conduits)

    def save_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"n_conduits": self.n_conduits,
                       "rows": [r.to_dict() for r in self.rows]}, fh)
            fh.write("\n")

    @classmethod
    def load_json(cls, path: str) -> "Trace":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls([TraceRow.from_dict(r) for r in doc["rows"]], doc["n_conduits"])


def export_trace(trace: Trace, path: str, fmt: str) -> str:
    """Lossless dump of a trace; ``fmt`` is 'csv' or 'json'."""
    if fmt == "csv":
        trace.save_csv(path)
    elif fmt == "json":
        trace.save_json(path)
    else:
        raise ValueError(f"unknown export format: {fmt!r} (expected csv or json)")
    return path


class Simulator:
    """Stepwise scenario execution with an operator command queue.

    ``run()`` plays the whole scenario; a live session instead alternates
    ``queue_action`` and ``step_once``.  Commands queued between steps are
    applied at the same point of the loop as scripted events with that
    boundary time, so live steering and scripted scenarios are
    interchangeable.
    """

    def __init__(self, cfg: PlantConfig, scenario: Scenario,
                 t_n_pred: Optional[Predictor] = None,
                 mvd_pred: Optional[Predictor] = None):
        problems = cfg.violations()
        if problems:
            raise ConfigError("invalid config: " + "; ".join(problems))
        problems = scenario.validate(cfg.n_conduits)
        if problems:
            raise ScenarioError("invalid scenario: " + "; ".join(problems))
        self.cfg = cfg
        self.scenario = scenario
        default_tn, default_mvd = (None, None)
        if t_n_pred is None or mvd_pred is None:
            default_tn, default_mvd = default_predictors(cfg)
        self.t_n_pred = t_n_pred or default_tn
        self.mvd_pred = mvd_pred or default_mvd
        self.nozzle_spec = nozzle_mod.NozzleSpec(cfg.nozzle_area_ratio,
                                                 cfg.nozzle_heating)
        self._pending: list[Event] = []
        self.reset()

    # --- lifecycle -----------------------------------------------------

    def reset(self) -> TraceRow:
        """Rebuild the initial state; returns row 0."""
        init = self.scenario.initial
        cfg = self.cfg
        rho_a = init.rho_a_kg_m3
        if rho_a is None:
            rho_a = cfg.p0 / (cfg.r_air * (init.t_a_c + 273.15))
        state = PlantState.initial(cfg, h=init.h_m, t_w=init.t_w_c, rho_a=rho_a,
                                   t_a=init.t_a_c, t_ts=init.t_ts_c,
                                   v_ts=init.v_ts_mps)
        enabled = set(init.enabled_valves or range(1, cfg.n_conduits + 1))
        for i in range(cfg.n_conduits):
            on = (i + 1) in enabled
            state.water_valves[i].enabled = on
            state.air_valves[i].enabled = on
        self.inputs = ControlInputs(
            water_setpoints=[lph_to_m3s(init.water_setpoint_lph)] * cfg.n_conduits,
            air_setpoints=[lpm_to_m3s(init.air_setpoint_lpm)] * cfg.n_conduits,
            t_ts=init.t_ts_c, v_ts=init.v_ts_mps,
            p_heat_w=init.p_heat_w, p_heat_a=init.p_heat_a,
        )
        if init.pre_settled:
            self._pre_settle(state)
        self.state = state
        self.k = 0
        self._pending.clear()
        warnings: list[str] = []
        try:
            _algebraic_outputs(state, cfg, self.t_n_pred, self.mvd_pred,
                               self.nozzle_spec, warnings)
        except test_section.WindVelocityError as exc:
            raise SimulationHalt(0, str(exc)) from exc
        row = make_row(0.0, state, self.inputs, cfg.valve.a_max)
        row.warnings = warnings
        self.last_row = row
        return row

    def _pre_settle(self, state: PlantState) -> None:
        """Solve valve areas and PI integrators so flows start on their
        setpoints.  Requires the differential water law and ki > 0."""
        cfg = self.cfg
        if cfg.water_dp_mode != "tank_differential":
            raise ConfigError(
                "pre_settled initial state requires water_dp_mode="
                "'tank_differential' (the xi-based law has no equilibrium)")
        if cfg.pi_water.ki <= 0 or cfg.pi_air.ki <= 0:
            raise ConfigError("pre_settled initial state requires ki > 0")
        g_w = water_valve_flow_dp(1.0, cfg.valve, cfg.rho_w,
                                  cfg.p0 - cfg.p_av_water, cfg.cd_mode).q
        p_a = air_tank_pressure(state, cfg)
        g_a = air_valve_flow(1.0, cfg.valve, state.rho_a, state.t_a + 273.15,
                             p_a, cfg.p_av_air, cfg.gamma, cfg.r_air)
        for i in range(cfg.n_conduits):
            for valves, flows, setpoints, gain, gains in (
                    (state.water_valves, state.q_wv,
                     self.inputs.water_setpoints, g_w, cfg.pi_water),
                    (state.air_valves, state.q_av,
                     self.inputs.air_setpoints, g_a, cfg.pi_air)):
                if not valves[i].enabled:
                    continue
                area = setpoints[i] / gain
                if area > cfg.valve.a_max:
                    raise ScenarioError(
                        f"setpoint unreachable: conduit {i + 1} needs opening "
                        f"{area:.3e} m^2 > a_max {cfg.valve.a_max:.3e} m^2")
                valves[i] = ValveState(area=area, integ=area / gains.ki,
                                       enabled=True)
                flows[i] = gain * area

    # --- operator commands ---------------------------------------------

    def queue_action(self, action: str, args: dict) -> int:
        """Queue a live command; returns the first step index whose
        snapshot will reflect it."""
        ev = Event(t=self.k * self.scenario.step, action=action, args=dict(args))
        problems = ev.validate(math.inf, self.cfg.n_conduits)
        if problems:
            raise ScenarioError("; ".join(problems))
        self._pending.append(ev)
        return self.k + 1

    def _apply_event(self, ev: Event) -> None:
        inputs = self.inputs
        if ev.action in ("set_water_setpoint", "set_air_setpoint"):
            value = setpoint_si(ev.action, ev.args)
            target = (inputs.water_setpoints if ev.action == "set_water_setpoint"
                      else inputs.air_setpoints)
            valve = ev.args.get("valve")
            if valve is None:
                for i in range(len(target)):
                    target[i] = value
            else:
                target[valve - 1] = value
        elif ev.action in ("enable_valve", "disable_valve"):
            on = ev.action == "enable_valve"
            i = ev.args["valve"] - 1
            kind = ev.args.get("kind", "both")
            if kind in ("water", "both"):
                self.state.water_valves[i].enabled = on
            if kind in ("air", "both"):
                self.state.air_valves[i].enabled = on
        elif ev.action == "set_t_ts":
            inputs.t_ts = float(ev.args["value_c"])
        elif ev.action == "set_v_ts":
            inputs.v_ts = float(ev.args["value_mps"])
        elif ev.action == "set_heater_power":
            if ev.args["tank"] == "water":
                inputs.p_heat_w = float(ev.args["value_w"])
            else:
                inputs.p_heat_a = float(ev.args["value_w"])

    # --- stepping -------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.k >= self.scenario.n_steps

    def step_once(self) -> TraceRow:
        """Apply due events, advance one step, emit the new row."""
        if self.finished:
            raise SimulationHalt(self.k, "scenario duration already reached")
        for ev in self.scenario.events_at_step(self.k):
            self._apply_event(ev)
        for ev in self._pending:
            self._apply_event(ev)
        self._pending.clear()

        try:
            self.state, warnings = advance(
                self.state, self.inputs, self.cfg, self.scenario.step,
                self.t_n_pred, self.mvd_pred, self.nozzle_spec)
        except (EmptyTankError, test_section.WindVelocityError, ValueError) as exc:
            raise SimulationHalt(self.k + 1, str(exc)) from exc
        self.k += 1
        row = make_row(self.k * self.scenario.step, self.state, self.inputs,
                       self.cfg.valve.a_max)
        row.warnings = warnings
        self.last_row = row
        return row

    def run(self) -> Trace:
        """Play the scenario to its end and return the full trace."""
        rows = [self.reset()]
        while not self.finished:
            rows.append(self.step_once())
        return Trace(rows, self.cfg.n_conduits)


def run(scenario: Scenario, cfg: PlantConfig,
        t_n_pred: Optional[Predictor] = None,
        mvd_pred: Optional[Predictor] = None) -> Trace:
    """Run a scenario against a config; convenience wrapper."""
    return Simulator(cfg, scenario, t_n_pred, mvd_pred).run()
