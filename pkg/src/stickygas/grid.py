"""Reference measure on [0, 1] and Lagrangian initial data.

The reference measure is Lebesgue measure on [0, 1], split into ``n`` cells.
A cell carries its mass ``w_i`` and is represented by its midpoint ``m_i``.
Initial Eulerian data (density, velocity) are turned into Lagrangian data
``(xbar, vbar)`` by the monotone rearrangement (generalized inverse CDF).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

MASS_TOL = 1e-12


@dataclass(frozen=True)
class GridMeasure:
    weights: np.ndarray
    midpoints: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.midpoints, dtype=float)
        if w.ndim != 1 or w.shape != m.shape or w.size == 0:
            raise ValueError("weights and midpoints must be nonempty 1-D arrays of equal length")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("cell weights must be positive and finite")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"cell weights sum to {w.sum()!r}, expected 1")
        if np.any(np.diff(m) <= 0) or m[0] <= 0 or m[-1] >= 1:
            raise ValueError("midpoints must be strictly increasing inside (0, 1)")
        w.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "midpoints", m)

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def is_uniform(self) -> bool:
        n = self.n
        uniform_m = (np.arange(n) + 0.5) / n
        return bool(np.allclose(self.weights, 1.0 / n, rtol=0, atol=1e-15)
                    and np.allclose(self.midpoints, uniform_m, rtol=0, atol=1e-14))

    def inner(self, a, b) -> float:
        """Weighted L2 inner product sum_i w_i a_i b_i."""
        return float(np.dot(self.weights, np.asarray(a) * np.asarray(b)))

    def norm(self, a) -> float:
        return float(np.sqrt(self.inner(a, a)))


def uniform_grid(n: int) -> GridMeasure:
    """Uniform grid with ``w_i = 1/n`` and ``m_i = (i - 1/2)/n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return GridMeasure(np.full(n, 1.0 / n), (np.arange(n) + 0.5) / n)


# -- initial density -------------------------------------------------------

@dataclass(frozen=True)
class UniformInterval:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("UniformInterval requires b > a")


@dataclass(frozen=True)
class Atoms:
    """Finite sum of Dirac masses, given as ``(position, mass)`` pairs."""

    atoms: tuple = field(default=())

    def __post_init__(self):
        pairs = tuple((float(x), float(m)) for x, m in self.atoms)
        if not pairs:
            raise ValueError("Atoms needs at least one atom")
        if any(m <= 0 for _, m in pairs):
            raise ValueError("atom masses must be positive")
        object.__setattr__(self, "atoms", pairs)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Density ``densities[k]`` on ``[breakpoints[k], breakpoints[k+1])``."""

    breakpoints: tuple
    densities: tuple

    def __post_init__(self):
        b = tuple(float(x) for x in self.breakpoints)
        d = tuple(float(x) for x in self.densities)
        if len(b) != len(d) + 1 or not d:
            raise ValueError("need len(breakpoints) == len(densities) + 1")
        if any(hi <= lo for lo, hi in zip(b, b[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(x < 0 for x in d):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "densities", d)


InitialDensity = Union[UniformInterval, Atoms, PiecewiseConstant]


def total_mass(rho: InitialDensity) -> float:
    if isinstance(rho, UniformInterval):
        return 1.0
    if isinstance(rho, Atoms):
        return float(sum(m for _, m in rho.atoms))
    if isinstance(rho, PiecewiseConstant):
        b = np.asarray(rho.breakpoints)
        return float(np.dot(rho.densities, np.diff(b)))
    raise TypeError(f"unsupported density {type(rho).__name__}")


def quantile_map(rho: InitialDensity, g: GridMeasure) -> np.ndarray:
    """Monotone transport ``xbar`` pushing the grid forward to ``rho``.

    Evaluates the left-continuous generalized inverse
    ``inf{x : M(x) >= m_i}`` of the CDF ``M`` at every cell midpoint.
    """
    mass = total_mass(rho)
    if abs(mass - 1.0) > MASS_TOL:
        raise ValueError(f"density has total mass {mass!r}, expected 1")
    m = g.midpoints

    if isinstance(rho, UniformInterval):
        return rho.a + m * (rho.b - rho.a)

    if isinstance(rho, Atoms):
        pairs = sorted(rho.atoms)
        pos = np.array([x for x, _ in pairs])
        cum = np.cumsum([w for _, w in pairs])
        k = np.searchsorted(cum, m, side="left")
        return pos[np.minimum(k, pos.size - 1)]

    if isinstance(rho, PiecewiseConstant):
        b = np.asarray(rho.breakpoints)
        d = np.asarray(rho.densities)
        cum = np.concatenate([[0.0], np.cumsum(d * np.diff(b))])
        # first segment k (1-based) with cum[k] >= m; it has positive density
        k = np.searchsorted(cum[1:], m, side="left")
        k = np.minimum(k, d.size - 1)
        x = b[k] + (m - cum[k]) / d[k]
        return np.minimum(x, b[k + 1])

    raise TypeError(f"unsupported density {type(rho).__name__}")


# -- initial velocity ------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    func: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SampledAtQuantiles:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


InitialVelocity = Union[ClosedForm, SampledAtQuantiles]


def sample_velocity(v: InitialVelocity, xbar: Sequence[float]) -> np.ndarray:
    """Lagrangian initial velocity ``vbar = v o xbar``."""
    xbar = np.asarray(xbar, dtype=float)
    if isinstance(v, SampledAtQuantiles):
        out = np.array(v.values, dtype=float)
        if out.shape != xbar.shape:
            raise ValueError(f"got {out.size} velocity samples for {xbar.size} cells")
    elif isinstance(v, ClosedForm):
        out = np.broadcast_to(np.asarray(v.func(xbar), dtype=float), xbar.shape).copy()
    else:
        raise TypeError(f"unsupported velocity {type(v).__name__}")
    if not np.all(np.isfinite(out)):
        raise ValueError("initial velocity is not finite on the grid")
    return out


def initial_data(rho: InitialDensity, v: InitialVelocity, g: GridMeasure):
    """Convenience: ``(xbar, vbar)`` for the given Eulerian data."""
    xbar = quantile_map(rho, g)
    return xbar, sample_velocity(v, xbar)
