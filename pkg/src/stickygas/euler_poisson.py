"""Sticky-particle Euler-Poisson dynamics on the uniform reference grid.

With the reference measure uniform on [0, 1], the Lagrangian force of the
attractive Poisson interaction is ``F(m) = 1/2 - m``, independent of the
state. The modified velocity is therefore ``Y_t = vbar + t F`` and

    X_t = P_C(xbar + t vbar + t**2 / 2 * F),    V_t = P_{H(X_t)} Y_t,

both in closed form, with no time stepping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cone
from .grid import GridMeasure
from .pressureless import LagrangianState, _map_times, block_velocity


@dataclass(frozen=True)
class EPForce:
    f: np.ndarray


@dataclass(frozen=True)
class EPState(LagrangianState):
    y: np.ndarray = None
    force: EPForce = None


def ep_force(g: GridMeasure) -> EPForce:
    """Cell force ``1/2 - m_i``; exact cell average since F is linear in m."""
    if not g.is_uniform:
        raise ValueError("the Euler-Poisson force is only available on the uniform grid")
    return EPForce(0.5 - g.midpoints)


def _resolve_force(force, g: GridMeasure) -> EPForce:
    # extension point: any constant-in-time Lagrangian force vector
    if force is None:
        return ep_force(g)
    if isinstance(force, EPForce):
        f = force.f
    else:
        f = np.asarray(force, dtype=float)
    if f.shape != (g.n,):
        raise ValueError("force vector has the wrong length")
    return EPForce(np.asarray(f, dtype=float))


def ep_velocity(x: cone.MonotoneMap, y, g: GridMeasure) -> np.ndarray:
    """Projection of the modified velocity onto functions of ``x``."""
    return block_velocity(x, y, g)


def ep_solve_at(xbar, vbar, t: float, g: GridMeasure, force=None) -> EPState:
    xbar = np.asarray(xbar, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    F = _resolve_force(force, g)
    t = float(t)
    arg = xbar + t * vbar + (0.5 * t * t) * F.f
    x = cone.project(arg, g).map
    y = vbar + t * F.f
    return EPState(t, x, ep_velocity(x, y, g), g, y=y, force=F)


def ep_trajectory(xbar, vbar, times, g: GridMeasure, force=None,
                  threads: int | None = None):
    times = list(times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted")
    F = _resolve_force(force, g)
    return _map_times(lambda t: ep_solve_at(xbar, vbar, t, g, F), times, threads)
