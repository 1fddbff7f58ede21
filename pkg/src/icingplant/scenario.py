"""Scenario files: a timed event list driving the simulation engine.

A scenario is a duration, a step size, an initial operating point and an
ordered list of (time, action, args) events.  Setpoints arrive in plant
units (L/h per water conduit, L/min per air conduit) and are converted at
this boundary.  Events whose timestamp falls between grid points are
applied at the first grid point at or after their time; an event at a
grid time takes effect before that step's update.

Action vocabulary (also the live-operator command vocabulary):

    set_water_setpoint   {"value_lph": q, ["valve": i]}      all conduits when no valve
    set_air_setpoint     {"value_lpm": q, ["valve": i]}
    enable_valve         {"valve": i, ["kind": "water"|"air"|"both"]}
    disable_valve        {"valve": i, ["kind": ...]}
    set_t_ts             {"value_c": t}
    set_v_ts             {"value_mps": v}
    set_heater_power     {"tank": "water"|"air", "value_w": p}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .units import lph_to_m3s, lpm_to_m3s

ACTIONS = (
    "set_water_setpoint", "set_air_setpoint",
    "enable_valve", "disable_valve",
    "set_t_ts", "set_v_ts", "set_heater_power",
)


class ScenarioError(ValueError):
    """Malformed scenario content."""


@dataclass
class Event:
    t: float
    action: str
    args: dict[str, Any] = field(default_factory=dict)

    def validate(self, duration: float, n_conduits: int) -> list[str]:
        bad = []
        if not (0.0 <= self.t <= duration):
            bad.append(f"event at t={self.t} outside [0, {duration}]")
        if self.action not in ACTIONS:
            bad.append(f"unknown action {self.action!r}")
            return bad
        if self.action == "set_water_setpoint":
            if self.args.get("value_lph", -1.0) < 0:
                bad.append("set_water_setpoint needs value_lph >= 0")
        elif self.action == "set_air_setpoint":
            if self.args.get("value_lpm", -1.0) < 0:
                bad.append("set_air_setpoint needs value_lpm >= 0")
        elif self.action in ("enable_valve", "disable_valve"):
            valve = self.args.get("valve")
            if not isinstance(valve, int) or not (1 <= valve <= n_conduits):
                bad.append(f"{self.action} needs valve in [1, {n_conduits}]")
            if self.args.get("kind", "both") not in ("water", "air", "both"):
                bad.append(f"{self.action} kind must be water|air|both")
        elif self.action == "set_t_ts":
            if "value_c" not in self.args:
                bad.append("set_t_ts needs value_c")
        elif self.action == "set_v_ts":
            if self.args.get("value_mps", -1.0) <= 0:
                bad.append("set_v_ts needs value_mps > 0")
        elif self.action == "set_heater_power":
            if self.args.get("tank") not in ("water", "air"):
                bad.append("set_heater_power tank must be water|air")
            if self.args.get("value_w", -1.0) < 0:
                bad.append("set_heater_power needs value_w >= 0")
        if "valve" in self.args and self.action not in ("enable_valve", "disable_valve"):
            valve = self.args["valve"]
            if not isinstance(valve, int) or not (1 <= valve <= n_conduits):
                bad.append(f"{self.action} valve must be in [1, {n_conduits}]")
        return bad


@dataclass
class InitialState:
    """Operating point at t = 0.

    With ``pre_settled`` the engine solves each enabled valve's opening
    area (and PI integrator) so flows start exactly on their setpoints;
    otherwise all valves start shut.
    """

    h_m: float = 0.8
    t_w_c: float = 70.4
    rho_a_kg_m3: Optional[float] = None    # None: from P0 and T_a by ideal gas
    t_a_c: float = 70.7
    t_ts_c: float = -6.5
    v_ts_mps: float = 34.2
    water_setpoint_lph: float = 0.0        # per conduit
    air_setpoint_lpm: float = 0.0          # per conduit
    enabled_valves: Optional[list[int]] = None   # None: all
    p_heat_w: float = 0.0
    p_heat_a: float = 0.0
    pre_settled: bool = False

    def to_dict(self) -> dict:
        return {
            "h_m": self.h_m, "T_w_c": self.t_w_c,
            "rho_a_kg_m3": self.rho_a_kg_m3, "T_a_c": self.t_a_c,
            "T_TS_c": self.t_ts_c, "v_TS_mps": self.v_ts_mps,
            "water_setpoint_lph": self.water_setpoint_lph,
            "air_setpoint_lpm": self.air_setpoint_lpm,
            "enabled_valves": self.enabled_valves,
            "P_heat_w_w": self.p_heat_w, "P_heat_a_w": self.p_heat_a,
            "pre_settled": self.pre_settled,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InitialState":
        return cls(
            h_m=d.get("h_m", 0.8),
            t_w_c=d.get("T_w_c", 70.4),
            rho_a_kg_m3=d.get("rho_a_kg_m3"),
            t_a_c=d.get("T_a_c", 70.7),
            t_ts_c=d.get("T_TS_c", -6.5),
            v_ts_mps=d.get("v_TS_mps", 34.2),
            water_setpoint_lph=d.get("water_setpoint_lph", 0.0),
            air_setpoint_lpm=d.get("air_setpoint_lpm", 0.0),
            enabled_valves=d.get("enabled_valves"),
            p_heat_w=d.get("P_heat_w_w", 0.0),
            p_heat_a=d.get("P_heat_a_w", 0.0),
            pre_settled=d.get("pre_settled", False),
        )


@dataclass
class Scenario:
    duration: float
    step: float = 1.0
    initial: InitialState = field(default_factory=InitialState)
    events: list[Event] = field(default_factory=list)

    def validate(self, n_conduits: int = 12) -> list[str]:
        bad = []
        if self.duration <= 0:
            bad.append("duration must be positive")
        if self.step <= 0:
            bad.append("step must be positive")
        if self.initial.v_ts_mps <= 0:
            bad.append("initial v_TS must be positive")
        if self.initial.water_setpoint_lph < 0 or self.initial.air_setpoint_lpm < 0:
            bad.append("initial setpoints must be >= 0")
        last_t = -math.inf
        for ev in self.events:
            bad.extend(ev.validate(self.duration, n_conduits))
            if ev.t < last_t:
                bad.append(f"event times must be nondecreasing (t={ev.t})")
            last_t = max(last_t, ev.t)
        return bad

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))

    def events_at_step(self, k: int) -> list[Event]:
        """Events applied at grid index k: ceil(t/step) == k."""
        out = []
        for ev in self.events:
            if math.ceil(ev.t / self.step - 1e-12) == k:
                out.append(ev)
        return out

    def to_dict(self) -> dict:
        return {
            "duration_s": self.duration,
            "step_s": self.step,
            "initial": self.initial.to_dict(),
            "events": [{"t": e.t, "action": e.action, "args": e.args}
                       for e in self.events],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            events = [Event(t=e["t"], action=e["action"], args=e.get("args", {}))
                      for e in d.get("events", [])]
            return cls(
                duration=d["duration_s"],
                step=d.get("step_s", 1.0),
                initial=InitialState.from_dict(d.get("initial", {})),
                events=events,
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed scenario document: {exc}") from exc


def load_scenario(path: str, n_conduits: int = 12) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    scenario = Scenario.from_dict(doc)
    problems = scenario.validate(n_conduits)
    if problems:
        raise ScenarioError("invalid scenario: " + "; ".join(problems))
    return scenario


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")


def setpoint_si(action: str, args: dict) -> float:
    """Convert an event's plant-unit setpoint to m^3/s."""
    if action == "set_water_setpoint":
        return lph_to_m3s(args["value_lph"])
    if action == "set_air_setpoint":
        return lpm_to_m3s(args["value_lpm"])
    raise ValueError(f"{action} carries no setpoint")
