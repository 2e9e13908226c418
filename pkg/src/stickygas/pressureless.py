"""Sticky-particle solution of pressureless gas dynamics by projection.

The Lagrangian map at time ``t`` is the projection of free flight onto the
monotone cone, ``X_t = P_C(xbar + t * vbar)``. The Lagrangian velocity is
the orthogonal projection of ``vbar`` onto vectors that are functions of
``X_t``, i.e. the weighted mean of ``vbar`` over every level set of ``X_t``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cone
from .cone import MonotoneMap
from .grid import GridMeasure, MASS_TOL


@dataclass(frozen=True)
class LagrangianState:
    t: float
    x: MonotoneMap
    v: np.ndarray
    grid: GridMeasure

    def momentum(self) -> float:
        return float(np.dot(self.grid.weights, self.v))

    def energy(self) -> float:
        return 0.5 * self.grid.inner(self.v, self.v)


@dataclass(frozen=True)
class EulerianState:
    """Atomic density: parallel arrays, positions strictly increasing."""

    positions: np.ndarray
    masses: np.ndarray
    velocities: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(m), float(v))
                for x, m, v in zip(self.positions, self.masses, self.velocities)]

    def __len__(self) -> int:
        return self.positions.size


def level_sets(values) -> np.ndarray:
    """Group index per cell; consecutive cells with equal values share one."""
    values = np.asarray(values)
    ids = np.zeros(values.size, dtype=np.int64)
    ids[1:] = np.cumsum(values[1:] != values[:-1])
    return ids


def group_mean(values, weights, ids) -> np.ndarray:
    """Weighted mean of ``values`` over each group, broadcast back to cells."""
    sw = np.bincount(ids, weights=weights)
    swv = np.bincount(ids, weights=weights * values)
    return (swv / sw)[ids]


def block_velocity(x: MonotoneMap, vbar, g: GridMeasure) -> np.ndarray:
    """Orthogonal projection of ``vbar`` onto vectors constant on ``x``'s level sets.

    Groups are keyed on equal values of ``x``, so two pools that happen to
    land on the same position also share a velocity. Cells that form their
    own level set keep their value bit for bit.
    """
    vbar = np.asarray(vbar, dtype=float)
    if vbar.shape != x.values.shape:
        raise ValueError("velocity and map lengths differ")
    ids = level_sets(x.values)
    out = vbar.copy()
    counts = np.bincount(ids)
    pooled = counts[ids] > 1
    if np.any(pooled):
        out[pooled] = group_mean(vbar, g.weights, ids)[pooled]
    return out


def solve_at(xbar, vbar, t: float, g: GridMeasure) -> LagrangianState:
    xbar = np.asarray(xbar, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    x = cone.project(xbar + t * vbar, g).map
    return LagrangianState(float(t), x, block_velocity(x, vbar, g), g)


def to_eulerian(s: LagrangianState) -> EulerianState:
    """Push the grid forward: merge equal positions into atoms."""
    vals = s.x.values
    if np.any(vals[1:] < vals[:-1]):
        raise ValueError("Lagrangian map is not monotone")
    ids = level_sets(vals)
    first = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    mass = np.bincount(ids, weights=s.grid.weights)
    vel = s.v[first]
    # v must be a function of x: constant on every level set
    if np.any(s.v != vel[ids]):
        raise ValueError("velocity is not constant on the level sets of x")
    if abs(mass.sum() - 1.0) > MASS_TOL:
        raise ValueError("atom masses do not sum to 1")
    return EulerianState(vals[first].copy(), mass, vel.copy())


def _map_times(func, times, threads):
    times = [float(t) for t in times]
    if threads is None or threads <= 1 or len(times) < 2:
        return [func(t) for t in times]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, times))


def trajectory(xbar, vbar, times, g: GridMeasure, threads: int | None = None):
    """Independent ``solve_at`` evaluations, returned in the order of ``times``."""
    times = list(times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted")
    xbar = np.asarray(xbar, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    return _map_times(lambda t: solve_at(xbar, vbar, t, g), times, threads)
