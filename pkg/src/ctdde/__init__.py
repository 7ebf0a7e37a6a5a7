"""Simulation and analysis of difference equations with continuous time,

    x(t+1) - x(t) + sum_k a_k(t) x(h_k(t)) = 0,

with variable coefficients and delays: parsing, interval enclosures,
simulation, envelopes and sufficient oscillation / existence criteria.
"""

__version__ = "0.1.0"

from .engine import EquationSpec, InitialCondition, SimConfig, detect_oscillation, residual, simulate
from .expr import evaluate, parse
from .interval import Interval, eval_interval
from .trajectory import GridSpec, Trajectory

__all__ = [
    "EquationSpec", "InitialCondition", "SimConfig", "simulate", "residual", "detect_oscillation",
    "parse", "evaluate", "Interval", "eval_interval", "GridSpec", "Trajectory", "__version__",
]
