"""Checks tying computed trajectories back to the PDEs.

Weak residuals integrate against atomic densities exactly (finite sums over
cells); only the time integral is approximated, by the midpoint rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridMeasure
from .pressureless import EulerianState, LagrangianState, solve_at, to_eulerian

CONSERVATION_TOL = 1e-9


# -- test functions --------------------------------------------------------

def _bump(s):
    """exp(-1/(1-s^2)) on |s| < 1 and its derivative."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    q = np.where(inside, 1.0 - s * s, 1.0)
    f = np.where(inside, np.exp(-1.0 / q), 0.0)
    df = np.where(inside, f * (-2.0 * s / (q * q)), 0.0)
    return f, df


def _poly(s, power=4):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    q = np.where(inside, 1.0 - s * s, 0.0)
    return q ** power, np.where(inside, -2.0 * power * s * q ** (power - 1), 0.0)


@dataclass(frozen=True)
class TestFunction:
    """Separable window ``phi(t, x) = T((t - tc)/tw) * S((x - xc)/xw)``.

    ``T`` is always the smooth bump; ``S`` is the bump (``kind="bump"``), the
    bump times ``cos(pi * frequency * s)`` (``"sine-window"``), or
    ``(1 - s^2)^4`` (``"polynomial-window"``).
    """

    __test__ = False  # not a pytest class

    kind: str
    t_center: float
    t_width: float
    x_center: float
    x_width: float
    frequency: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bump", "sine-window", "polynomial-window"):
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.t_width <= 0 or self.x_width <= 0:
            raise ValueError("window widths must be positive")

    @property
    def support(self):
        return ((self.t_center - self.t_width, self.t_center + self.t_width),
                (self.x_center - self.x_width, self.x_center + self.x_width))

    def _space(self, x):
        s = (np.asarray(x, dtype=float) - self.x_center) / self.x_width
        if self.kind == "polynomial-window":
            f, df = _poly(s)
        else:
            f, df = _bump(s)
            if self.kind == "sine-window":
                k = math.pi * self.frequency
                c, dc = np.cos(k * s), -k * np.sin(k * s)
                f, df = f * c, df * c + f * dc
        return f, df / self.x_width

    def _time(self, t):
        f, df = _bump((np.asarray(t, dtype=float) - self.t_center) / self.t_width)
        return f, df / self.t_width

    def __call__(self, t, x):
        return self._time(t)[0] * self._space(x)[0]

    def grad(self, t, x):
        """(phi, d/dt phi, d/dx phi); ``t`` broadcasts against ``x``.

        A scalar ``t`` with an array of positions is the per-snapshot case;
        a column of times against a (times, cells) array evaluates a whole
        trajectory at once.
        """
        T, dT = self._time(t)
        S, dS = self._space(x)
        return T * S, dT * S, T * dS


# -- weak residuals ----------------------------------------------------------

def quadrature_times(h: float, t_end: float) -> np.ndarray:
    """Midpoints ``(k + 1/2) h`` of a uniform grid on ``[0, K h] ⊇ [0, t_end]``."""
    if h <= 0:
        raise ValueError("h must be positive")
    k = int(math.ceil(t_end / h - 1e-9))
    return (np.arange(max(k, 1)) + 0.5) * h


def _split(traj, phi: TestFunction, h: float):
    traj = list(traj)
    if not traj or traj[0].t != 0.0:
        raise ValueError("trajectory must start with the t = 0 state")
    samples = traj[1:]
    ts = np.array([s.t for s in samples])
    expected = (np.arange(ts.size) + 0.5) * h
    if ts.size == 0 or not np.allclose(ts, expected, rtol=0, atol=1e-9 * max(h, 1.0)):
        raise ValueError("trajectory must be sampled at the midpoints (k + 1/2) h")
    t_hi = phi.support[0][1]
    if ts[-1] + 0.5 * h < t_hi - 1e-12:
        raise ValueError(f"trajectory ends at {ts[-1] + 0.5 * h}, test function support reaches {t_hi}")
    xs = np.stack([s.x.values for s in samples])
    vs = np.stack([s.v for s in samples])
    return traj[0], ts[:, None], xs, vs


def weak_residual_continuity(traj, phi: TestFunction, h: float) -> float:
    """|-sum w phi(0, xbar) - int sum w (phi_t + v phi_x)(t, x(t)) dt|.

    ``traj[0]`` is the initial state, ``traj[1:]`` the midpoint samples.
    """
    init, ts, xs, vs = _split(traj, phi, h)
    w = init.grid.weights
    _, pt, px = phi.grad(ts, xs)
    total = -np.dot(w, phi(0.0, init.x.values)) - h * np.sum((pt + vs * px) @ w)
    return abs(float(total))


def weak_residual_momentum(traj, phi: TestFunction, h: float, force=None) -> float:
    """Momentum analogue; includes ``int sum w phi F`` when a force is present.

    The force is taken from the states (Euler-Poisson states carry it) unless
    given explicitly.
    """
    init, ts, xs, vs = _split(traj, phi, h)
    w = init.grid.weights
    if force is None and getattr(init, "force", None) is not None:
        force = init.force.f
    f, pt, px = phi.grad(ts, xs)
    integrand = (pt + vs * px) * vs
    if force is not None:
        integrand = integrand + f * np.asarray(force, dtype=float)
    total = -np.dot(w, phi(0.0, init.x.values) * init.v) - h * np.sum(integrand @ w)
    return abs(float(total))


# -- CDF -------------------------------------------------------------------

def cdf(eul: EulerianState, x: float) -> float:
    """Right-continuous cumulative mass ``rho((-inf, x])``."""
    k = np.searchsorted(eul.positions, x, side="right")
    return float(min(np.sum(eul.masses[:k]), 1.0))


# -- reports ---------------------------------------------------------------

@dataclass
class Report:
    rows: list = field(default_factory=list)        # (t, mass, momentum, energy, atom_count)
    residuals: dict = field(default_factory=dict)   # phi id -> (continuity, momentum)
    stability: list = field(default_factory=list)   # (t, lhs, rhs)
    flags: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags


def conservation_report(traj, check_energy: bool = True) -> Report:
    """Mass, momentum, energy and atom count per state, with drift flags.

    Energy decay is only flagged (``check_energy``) for unforced flow.
    """
    traj = list(traj)
    if not traj:
        raise ValueError("empty trajectory")
    rep = Report()
    for s in traj:
        eul = to_eulerian(s)
        rep.rows.append((s.t, float(eul.masses.sum()), s.momentum(), s.energy(), len(eul)))
    p0 = rep.rows[0][2]
    for (t, mass, p, e, _), prev in zip(rep.rows, [None] + rep.rows[:-1]):
        if abs(mass - 1.0) > 1e-12:
            rep.flags.append(f"mass {mass!r} at t={t}")
        if abs(p - p0) > CONSERVATION_TOL:
            rep.flags.append(f"momentum drift {p - p0:.3e} at t={t}")
        if check_energy and prev is not None and t >= 0 and e > prev[3] + CONSERVATION_TOL:
            rep.flags.append(f"energy increase {e - prev[3]:.3e} at t={t}")
    return rep


def stability_experiment(data1, data2, times, g: GridMeasure, solver=solve_at) -> Report:
    """Contraction bound ``|x1 - x2| <= |xbar1 - xbar2| + t |vbar1 - vbar2|``.

    ``data1``/``data2`` are ``(xbar, vbar)`` pairs on the same grid.
    """
    (x1, v1), (x2, v2) = data1, data2
    x1, v1, x2, v2 = (np.asarray(a, dtype=float) for a in (x1, v1, x2, v2))
    if not (x1.shape == x2.shape == v1.shape == v2.shape == (g.n,)):
        raise ValueError("both data sets must live on the same grid")
    dx, dv = g.norm(x1 - x2), g.norm(v1 - v2)
    rep = Report()
    for t in times:
        s1, s2 = solver(x1, v1, t, g), solver(x2, v2, t, g)
        lhs = g.norm(s1.x.values - s2.x.values)
        rhs = dx + abs(t) * dv
        rep.stability.append((float(t), lhs, rhs))
        if lhs > rhs + CONSERVATION_TOL:
            rep.flags.append(f"stability bound violated at t={t}: {lhs} > {rhs}")
    return rep


def quadrature_trajectory(solver, xbar, vbar, g: GridMeasure, h: float, t_end: float):
    """Initial state followed by midpoint samples, as the residuals expect."""
    ts = quadrature_times(h, t_end)
    return [solver(xbar, vbar, 0.0, g)] + [solver(xbar, vbar, t, g) for t in ts]


def default_test_functions(xbar, vbar, t_end: float, max_accel: float = 0.0):
    """Fixed family of windows covering where the mass can travel by ``t_end``.

    The wide windows are centred at the centre of mass and straddle t = 0,
    so the initial-data term is exercised. The two ``side`` windows sit on
    the outer flanks of the initial data.
    """
    xbar = np.asarray(xbar, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    xc = float(np.mean(xbar))
    spread = float(np.max(np.abs(xbar - xc)))
    reach = spread + t_end * float(np.max(np.abs(vbar), initial=0.0)) + 0.5 * max_accel * t_end ** 2
    xw = 1.25 * reach + 0.5
    sw = 0.5 * spread if spread > 0 else 0.5
    return {
        "bump": TestFunction("bump", 0.0, t_end, xc, xw),
        "sine": TestFunction("sine-window", 0.0, t_end, xc, xw, frequency=1.0),
        "poly": TestFunction("polynomial-window", 0.0, t_end, xc, xw),
        "side_left": TestFunction("bump", 0.0, t_end, xc - 0.8 * spread, sw),
        "side_right": TestFunction("bump", 0.0, t_end, xc + 0.8 * spread, sw),
    }
