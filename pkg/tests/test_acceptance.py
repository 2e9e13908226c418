"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test records a ``[PASS]`` / ``[FAIL]`` line; the lines are repeated in
the terminal summary under "acceptance criteria".
"""

import json
import time

import numpy as np
import pytest

import conftest
from stickygas import cli, cone, diagnostics, grid, oracle
from stickygas.euler_poisson import ep_force, ep_solve_at
from stickygas.pressureless import solve_at, to_eulerian, trajectory

SEED = 20240611
# a weak residual that has reached this level counts as converged
ROUNDOFF_FLOOR = 1e-13


def record(k, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _random_case(rng, n_max):
    """Sorted data on the uniform grid; every other case puts several cells on one atom.

    Velocity is a function of position, so cells sharing an atom share it.
    """
    n = int(rng.integers(1, n_max + 1))
    g = grid.uniform_grid(n)
    if rng.random() < 0.5:
        k = int(rng.integers(1, n + 1))
        which = np.minimum((np.arange(n) * k) // n, k - 1)
        return g, np.sort(rng.uniform(-2, 2, k))[which], rng.standard_normal(k)[which]
    return g, np.sort(rng.standard_normal(n)), rng.standard_normal(n)


# -- criteria 1 and 2 --------------------------------------------------------

@pytest.fixture(scope="module")
def cone_instances():
    rng = np.random.default_rng(SEED)
    cone.project(np.zeros(3), grid.uniform_grid(3))  # compile outside the timed region
    out = []
    start = time.perf_counter()
    for n in range(2, 11):
        for _ in range(1000):
            g = conftest.random_grid(rng, n)
            y = rng.standard_normal(n) * rng.choice([1e-3, 1.0, 1e3])
            out.append((g, y, cone.project(y, g), cone.project_bruteforce(y, g)))
    return out, time.perf_counter() - start


def test_criterion_1_projection_matches_bruteforce(cone_instances):
    inst, elapsed = cone_instances
    worst = max(g.norm(p.map.values - b.map.values) / max(1.0, g.norm(y)) for g, y, p, b in inst)
    ok = worst <= 1e-9 and elapsed < 10
    record(1, ok, f"{len(inst)} instances, max weighted-norm gap {worst:.2e} (tol 1e-9), {elapsed:.2f} s (< 10 s)")
    assert ok


def test_criterion_2_projection_characterization(cone_instances):
    inst, _ = cone_instances
    rng = np.random.default_rng(SEED + 1)
    orth = obt = 0.0
    for g, y, p, _ in inst:
        scale = 1.0 + g.inner(y, y)
        orth = max(orth, abs(g.inner(p.residual, p.map.values)) / scale)
        # obtuse angle against random monotone vectors and against +-1
        zs = [np.cumsum(np.abs(rng.standard_normal(g.n))) + rng.standard_normal() for _ in range(5)]
        zs += [np.ones(g.n), -np.ones(g.n)]
        obt = max(obt, max(g.inner(p.residual, z) for z in zs) / scale)
    ok = orth <= 1e-9 and obt <= 1e-9
    record(2, ok, f"max |<y-Py, Py>| {orth:.2e}, max <y-Py, z> {obt:.2e} (tol 1e-9)")
    assert ok


# -- criteria 3, 4, 5 --------------------------------------------------------

@pytest.fixture(scope="module")
def sticky_runs():
    rng = np.random.default_rng(SEED + 2)
    runs = []
    start = time.perf_counter()
    for _ in range(200):
        g, xbar, vbar = _random_case(rng, 64)
        times = np.sort(rng.uniform(0, 5, 20))
        traj = trajectory(xbar, vbar, times, g)
        sys_ = oracle.from_grid(xbar, vbar, g)
        gaps = []
        for t, s in zip(times, traj):
            sys_ = oracle.evolve(sys_, t)
            gaps.append(oracle.compare(sys_, to_eulerian(s)))
        runs.append((g, xbar, vbar, traj, gaps))
    return runs, time.perf_counter() - start


def test_criterion_3_sticky_oracle_equivalence(sticky_runs):
    runs, elapsed = sticky_runs
    worst = max(max(gaps) for *_, gaps in runs)
    merges = sum(len(r[1]) - len(to_eulerian(r[3][-1])) for r in runs)
    ok = worst <= 1e-8 and elapsed < 30
    record(3, ok, f"200 data sets x 20 times, max discrepancy {worst:.2e} (tol 1e-8), "
                  f"{merges} cells absorbed, {elapsed:.2f} s (< 30 s)")
    assert ok


def test_criterion_4_velocity_identities(sticky_runs):
    runs, _ = sticky_runs
    a = b = 0.0
    for g, xbar, vbar, traj, _ in runs:
        for s in traj:
            a = max(a, abs(g.inner(vbar - s.v, s.v)) / (1 + g.inner(vbar, vbar)))
            r = xbar + s.t * vbar - s.x.values
            b = max(b, abs(g.inner(r, s.v)) / (1 + g.inner(r, r)))
    ok = a <= 1e-9 and b <= 1e-9
    record(4, ok, f"max scaled |<vbar-v, v>| {a:.2e}, |<free-x, v>| {b:.2e} (tol 1e-9)")
    assert ok


def test_criterion_5_conservation_and_dissipation(sticky_runs, pair_grid):
    runs, _ = sticky_runs
    mass = mom = rise = 0.0
    for g, _, vbar, traj, _ in runs:
        p0 = g.inner(vbar, np.ones(g.n))
        e = [0.5 * g.inner(vbar, vbar)] + [s.energy() for s in traj]
        rise = max(rise, float(np.max(np.diff(e))))
        for s in traj:
            mass = max(mass, abs(to_eulerian(s).masses.sum() - 1.0))
            mom = max(mom, abs(s.momentum() - p0))
    head = [solve_at([-1.0, 1.0], [1.0, -1.0], t, pair_grid).energy() for t in (0.0, 0.5, 1.0, 2.0)]
    ok = mass <= 1e-12 and mom <= 1e-9 and rise <= 1e-9 and head == [0.5, 0.5, 0.0, 0.0]
    record(5, ok, f"mass drift {mass:.2e} (1e-12), momentum drift {mom:.2e} (1e-9), "
                  f"max energy rise {rise:.2e} (1e-9), head-on energies {head}")
    assert ok


# -- criterion 6 -------------------------------------------------------------

def test_criterion_6_stability_bound():
    rng = np.random.default_rng(SEED + 3)
    violations, worst = 0, -np.inf
    for _ in range(100):
        n = int(rng.integers(1, 65))
        g = grid.uniform_grid(n)
        rep = diagnostics.stability_experiment(conftest.random_data(rng, n), conftest.random_data(rng, n),
                                               np.sort(rng.uniform(0, 5, 10)), g)
        violations += len(rep.flags)
        worst = max(worst, max(lhs - rhs for _, lhs, rhs in rep.stability))
    ok = violations == 0
    record(6, ok, f"100 pairs x 10 times, {violations} violations, max lhs - rhs {worst:.2e}")
    assert ok


# -- criterion 7 -------------------------------------------------------------

def test_criterion_7_euler_poisson(pair_grid):
    x2 = ep_solve_at([-1.0, 1.0], [0.0, 0.0], 2.0, pair_grid).x.values
    x4 = ep_solve_at([-1.0, 1.0], [0.0, 0.0], 4.0, pair_grid).x.values
    closed = max(np.max(np.abs(x2 - [-0.5, 0.5])), np.max(np.abs(x4)))
    rng = np.random.default_rng(SEED + 4)
    gap = mom = 0.0
    for _ in range(100):
        g, xbar, vbar = _random_case(rng, 32)
        p0 = g.inner(vbar, np.ones(g.n))
        sys_ = oracle.from_grid(xbar, vbar, g, force=ep_force(g).f)
        for t in np.sort(rng.uniform(0, 5, 20)):
            s = ep_solve_at(xbar, vbar, t, g)
            sys_ = oracle.evolve(sys_, t)
            gap = max(gap, oracle.compare(sys_, to_eulerian(s)))
            mom = max(mom, abs(s.momentum() - p0))
    ok = closed <= 1e-12 and mom <= 1e-9 and gap <= 1e-8
    record(7, ok, f"closed-form error {closed:.2e} (1e-12), momentum drift {mom:.2e} (1e-9), "
                  f"oracle discrepancy {gap:.2e} over 100 instances (1e-8)")
    assert ok


# -- criterion 8 -------------------------------------------------------------

def _residual_table(solver, xbar, vbar, t_end, accel, h0=1e-3, levels=3):
    g = grid.uniform_grid(len(xbar))
    phis = diagnostics.default_test_functions(xbar, vbar, t_end, accel)
    rows = {pid: [] for pid in phis}
    for k in range(levels):
        h = h0 / 2 ** k
        tr = diagnostics.quadrature_trajectory(solver, xbar, vbar, g, h, t_end)
        for pid, phi in phis.items():
            rows[pid].append((diagnostics.weak_residual_continuity(tr, phi, h),
                              diagnostics.weak_residual_momentum(tr, phi, h)))
    return {pid: np.array(r) for pid, r in rows.items()}


def _converges(col):
    return all(a >= 2 * b or b <= ROUNDOFF_FLOOR for a, b in zip(col[:-1], col[1:]))


def test_criterion_8_weak_residuals():
    scenarios = {
        "head-on": _residual_table(solve_at, np.array([-1.0, 1.0]), np.array([1.0, -1.0]), 2.0, 0.0),
        "ep-pair": _residual_table(ep_solve_at, np.array([-1.0, 1.0]), np.zeros(2), 4.0, 0.25),
    }
    ok, worst, floored = True, 0.0, 0
    for name, table in scenarios.items():
        for pid, r in table.items():
            worst = max(worst, float(r[0].max()))
            for col, label in ((0, "continuity"), (1, "momentum")):
                good = r[0, col] <= 1e-4 and _converges(r[:, col])
                floored += int(r[-1, col] <= ROUNDOFF_FLOOR)
                if not good:
                    print(f"  {name}/{pid}/{label}: {r[:, col]}")
                ok &= good
    record(8, ok, f"2 scenarios x 5 windows x 2 equations, max residual at h=1e-3 {worst:.2e} (1e-4), "
                  f"ratio >= 2 per halving ({floored} series at the {ROUNDOFF_FLOOR:.0e} roundoff floor)")
    assert ok


# -- criterion 9 -------------------------------------------------------------

def test_criterion_9_determinism_and_linear_time(tmp_path):
    cfg = {"schema": 1, "n": 2000, "density": {"type": "uniform", "a": -1, "b": 1},
           "velocity": {"type": "polynomial", "coefficients": [0.1, -1.0, 0.0, 0.7]},
           "model": "pressureless", "times": {"start": 0, "end": 4, "count": 40}}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    outs = []
    for threads in ("1", "8"):
        out = tmp_path / f"t{threads}"
        assert cli.main(["run", "--config", str(tmp_path / "c.json"), "--out", str(out),
                         "--threads", threads]) == 0
        outs.append(b"".join((out / f).read_bytes() for f in ("snapshots.csv", "report.csv", "meta.json")))
    identical = outs[0] == outs[1]

    def best_time(n, reps=5):
        g = grid.uniform_grid(n)
        rng = np.random.default_rng(n)
        y = g.midpoints - 1.5 * np.sin(6 * g.midpoints) + 0.01 * rng.standard_normal(n)
        cone.project(y, g)
        best = np.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            cone.project(y, g)
            best = min(best, time.perf_counter() - t0)
        return best

    small, large = best_time(500_000), best_time(1_000_000)
    ratio = large / small
    ok = identical and ratio <= 2.2
    record(9, ok, f"threads 1 vs 8 byte-identical: {identical}; projection 5e5 -> 1e6 "
                  f"{small * 1e3:.1f} ms -> {large * 1e3:.1f} ms, ratio {ratio:.2f} (<= 2.2)")
    assert ok
