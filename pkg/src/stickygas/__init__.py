"""Sticky-particle solutions of 1-D pressureless gas dynamics and Euler-Poisson
by metric projection onto the cone of monotone maps."""

__version__ = "0.1.0"

from .grid import (Atoms, ClosedForm, GridMeasure, PiecewiseConstant, SampledAtQuantiles,
                   UniformInterval, initial_data, quantile_map, sample_velocity, uniform_grid)
from .cone import (MonotoneMap, ProjectionResult, project, project_bruteforce,
                   tangent_membership)
from .pressureless import (EulerianState, LagrangianState, block_velocity, solve_at,
                           to_eulerian, trajectory)
from .euler_poisson import (EPForce, EPState, ep_force, ep_solve_at, ep_trajectory,
                            ep_velocity)
from . import diagnostics, oracle

__all__ = [
    "Atoms", "ClosedForm", "GridMeasure", "PiecewiseConstant", "SampledAtQuantiles",
    "UniformInterval", "initial_data", "quantile_map", "sample_velocity", "uniform_grid",
    "MonotoneMap", "ProjectionResult", "project", "project_bruteforce", "tangent_membership",
    "EulerianState", "LagrangianState", "block_velocity", "solve_at", "to_eulerian",
    "trajectory", "EPForce", "EPState", "ep_force", "ep_solve_at", "ep_trajectory",
    "ep_velocity", "diagnostics", "oracle",
]
