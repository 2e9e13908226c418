"""Event-driven sticky-particle simulator, independent of the projection route.

Particles fly freely (or with constant acceleration) until two neighbours
touch; touching particles merge, conserving mass and momentum. The projection
solver never calls into this module, so it serves as a cross-check.

The constant-acceleration mode is used for Euler-Poisson data: the force on a
cluster is the mass-weighted mean of the cell forces it contains, which does
not change between merges. That discrete model is our own construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridMeasure
from .pressureless import EulerianState, level_sets

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class ParticleSystem:
    positions: np.ndarray
    velocities: np.ndarray
    masses: np.ndarray
    accelerations: np.ndarray = None
    t: float = 0.0
    merges: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.accelerations is None:
            object.__setattr__(self, "accelerations", np.zeros_like(self.positions))

    @property
    def particles(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(v), float(m))
                for x, v, m in zip(self.positions, self.velocities, self.masses)]

    def __len__(self) -> int:
        return self.positions.size

    def momentum(self) -> float:
        return float(np.dot(self.masses, self.velocities))

    def energy(self) -> float:
        return 0.5 * float(np.dot(self.masses, self.velocities ** 2))


def from_grid(xbar, vbar, g: GridMeasure, force=None) -> ParticleSystem:
    """One particle per distinct ``xbar`` value.

    Mass is the summed cell weight, velocity (and acceleration, when a cell
    force is given) the weighted mean over the cells.
    """
    xbar = np.asarray(xbar, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    w = g.weights
    ids = level_sets(xbar)
    mass = np.bincount(ids, weights=w)
    first = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    vel = np.bincount(ids, weights=w * vbar) / mass
    acc = None
    if force is not None:
        acc = np.bincount(ids, weights=w * np.asarray(force, dtype=float)) / mass
    return ParticleSystem(xbar[first].copy(), vel, mass, acc)


def _contact_time(gap: float, dv: float, da: float) -> float:
    """Smallest tau > 0 solving gap + dv*tau + da*tau**2/2 = 0, else inf.

    ``dv``/``da`` are right-minus-left velocity/acceleration.
    """
    if da == 0.0:
        return gap / -dv if dv < 0 else math.inf
    a, b, c = 0.5 * da, dv, gap
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return math.inf
    sq = math.sqrt(disc)
    # both roots, computed without cancellation
    q = -0.5 * (b + math.copysign(sq, b))
    roots = [q / a] + ([c / q] if q != 0 else [])
    pos = [r for r in roots if r > 0]
    return min(pos) if pos else math.inf


def _next_event(x, v, a):
    gaps = np.diff(x)
    dv = np.diff(v)
    da = np.diff(a)
    if not np.any(da):
        with np.errstate(divide="ignore"):
            tau = np.where(dv < 0, gaps / np.where(dv < 0, -dv, 1.0), np.inf)
    else:
        tau = np.array([_contact_time(g_, b_, c_) for g_, b_, c_ in zip(gaps, dv, da)])
    if tau.size == 0:
        return math.inf, -1
    k = int(np.argmin(tau))
    return max(float(tau[k]), 0.0), k


def _merge(x, v, a, m, forced):
    """Merge neighbour groups that touch; ``forced`` pair index always merges."""
    join = np.diff(x) <= MERGE_TOL
    if forced >= 0:
        join[forced] = True
    ids = np.zeros(x.size, dtype=np.int64)
    ids[1:] = np.cumsum(~join)
    mass = np.bincount(ids, weights=m)
    pos = np.bincount(ids, weights=m * x) / mass
    vel = np.bincount(ids, weights=m * v) / mass
    acc = np.bincount(ids, weights=m * a) / mass
    # keep singletons bit-exact
    single = np.bincount(ids) == 1
    first = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    pos[single] = x[first[single]]
    vel[single] = v[first[single]]
    acc[single] = a[first[single]]
    return pos, vel, acc, mass, x.size - mass.size


def evolve(sys: ParticleSystem, t_end: float) -> ParticleSystem:
    """Advance to ``t_end``; a contact exactly at ``t_end`` is resolved."""
    if t_end < sys.t:
        raise ValueError("cannot evolve backwards in time")
    x = sys.positions.astype(float)
    v = sys.velocities.astype(float)
    a = sys.accelerations.astype(float)
    m = sys.masses.astype(float)
    t = float(sys.t)
    merges = sys.merges
    while True:
        tau, k = _next_event(x, v, a)
        if t + tau > t_end:
            tau, k = t_end - t, -1
        x = x + v * tau + 0.5 * a * tau * tau
        v = v + a * tau
        t = t + tau if k >= 0 else float(t_end)
        x, v, a, m, nm = _merge(x, v, a, m, k)
        merges += nm
        if k < 0:
            break
    return ParticleSystem(x, v, m, a, t, merges)


def compare(sys_end: ParticleSystem, eul: EulerianState) -> float:
    """Max abs discrepancy between ordered particles and atoms (inf on count mismatch)."""
    if len(sys_end) != len(eul):
        return math.inf
    if len(eul) == 0:
        return 0.0
    return float(max(np.max(np.abs(sys_end.positions - eul.positions)),
                     np.max(np.abs(sys_end.masses - eul.masses)),
                     np.max(np.abs(sys_end.velocities - eul.velocities))))


def to_eulerian(sys: ParticleSystem) -> EulerianState:
    return EulerianState(sys.positions.copy(), sys.masses.copy(), sys.velocities.copy())
