"""Deterministic simulator and modelling toolkit for a subsonic
icing-wind-tunnel water/air injection plant.

First-principles tank/valve/nozzle dynamics coupled to data-driven
predictors of nozzle temperature and droplet median volumetric diameter,
a scenario engine with PI flow control on all 24 conduit valves, a
statistics/fitting pipeline, and a live-steering service.
"""

from .plant import (
    ConfigError,
    PIGains,
    PlantConfig,
    PlantState,
    ValveSpec,
    ValveState,
    load_config,
    save_config,
    validate_config,
)
from .scenario import Event, InitialState, Scenario, ScenarioError, load_scenario, \
    save_scenario
from .engine import SimulationHalt, Simulator, Trace, TraceRow, export_trace, run
from .tanks import EmptyTankError
from .test_section import WindVelocityError, lwc, mvd
from .nozzle import NozzleSpec, outlet_velocity

__version__ = "0.1.0"

__all__ = [
    "PlantConfig", "PlantState", "ValveSpec", "ValveState", "PIGains",
    "ConfigError", "validate_config", "load_config", "save_config",
    "Scenario", "InitialState", "Event", "ScenarioError",
    "load_scenario", "save_scenario",
    "Simulator", "Trace", "TraceRow", "run", "export_trace", "SimulationHalt",
    "EmptyTankError", "WindVelocityError",
    "lwc", "mvd", "NozzleSpec", "outlet_velocity",
]
