"""Command line front end: ``stickygas run | verify | residuals``.

Exit codes: 0 success, 1 failed verification suite, 2 bad config,
3 invariant violated during a run.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, cone, diagnostics, euler_poisson, grid, oracle, pressureless

log = logging.getLogger("stickygas")

SCHEMA_VERSION = 1
MODELS = ("pressureless", "euler_poisson")


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


# -- config ----------------------------------------------------------------

def _keys(d, required, optional=(), where="config"):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(d) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"missing field(s) in {where}: {missing}")


def parse_density(d) -> grid.InitialDensity:
    kind = d.get("type") if isinstance(d, dict) else None
    if kind == "uniform":
        _keys(d, ("type", "a", "b"), where="density")
        return grid.UniformInterval(float(d["a"]), float(d["b"]))
    if kind == "atoms":
        _keys(d, ("type", "atoms"), where="density")
        return grid.Atoms(tuple((float(x), float(m)) for x, m in d["atoms"]))
    if kind == "piecewise_constant":
        _keys(d, ("type", "breakpoints", "densities"), where="density")
        return grid.PiecewiseConstant(tuple(d["breakpoints"]), tuple(d["densities"]))
    raise ConfigError(f"unknown density type {kind!r}")


def parse_velocity(d) -> grid.InitialVelocity:
    kind = d.get("type") if isinstance(d, dict) else None
    if kind == "zero":
        _keys(d, ("type",), where="velocity")
        return grid.ClosedForm(lambda x: np.zeros_like(x))
    if kind == "polynomial":
        _keys(d, ("type", "coefficients"), where="velocity")
        coef = np.asarray(d["coefficients"], dtype=float)
        return grid.ClosedForm(lambda x: np.polynomial.polynomial.polyval(x, coef))
    if kind == "sampled":
        _keys(d, ("type", "values"), where="velocity")
        return grid.SampledAtQuantiles(tuple(d["values"]))
    raise ConfigError(f"unknown velocity type {kind!r}")


def parse_times(value) -> list[float]:
    if isinstance(value, dict):
        _keys(value, ("start", "end", "count"), where="times")
        count = int(value["count"])
        if count < 1:
            raise ConfigError("times.count must be >= 1")
        times = np.linspace(float(value["start"]), float(value["end"]), count).tolist()
    elif isinstance(value, list):
        times = [float(t) for t in value]
    else:
        raise ConfigError("times must be a list or {start, end, count}")
    if any(t < 0 or not math.isfinite(t) for t in times):
        raise ConfigError("times must be finite and nonnegative")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ConfigError("times must be sorted")
    return times


class Scenario:
    def __init__(self, raw: dict):
        _keys(raw, ("schema", "n", "density", "velocity", "model", "times"), ("seed",))
        if raw["schema"] != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema {raw['schema']!r}")
        self.raw = raw
        self.n = int(raw["n"])
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        self.model = raw["model"]
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        self.seed = int(raw.get("seed", 0))
        self.times = parse_times(raw["times"])
        self.grid = grid.uniform_grid(self.n)
        try:
            rho = parse_density(raw["density"])
            vel = parse_velocity(raw["velocity"])
            self.xbar, self.vbar = grid.initial_data(rho, vel, self.grid)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def solver(self):
        return pressureless.solve_at if self.model == "pressureless" else euler_poisson.ep_solve_at

    def trajectory(self, times, threads=None):
        if self.model == "pressureless":
            return pressureless.trajectory(self.xbar, self.vbar, times, self.grid, threads=threads)
        return euler_poisson.ep_trajectory(self.xbar, self.vbar, times, self.grid, threads=threads)


def load_config(path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return Scenario(raw)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


# -- run -------------------------------------------------------------------

def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def cmd_run(args) -> int:
    sc = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj = sc.trajectory(sc.times, threads=args.threads)

    snap_rows, violations = [], []
    for s in traj:
        eul = pressureless.to_eulerian(s)
        for k, (x, m, v) in enumerate(eul.atoms):
            snap_rows.append((s.t, k, x, m, v))
        if abs(eul.masses.sum() - 1.0) > 1e-12:
            violations.append(f"snapshot masses sum to {eul.masses.sum()!r} at t={s.t}")
    report = diagnostics.conservation_report(traj, check_energy=sc.model == "pressureless")
    violations += report.flags

    write_csv(out / "snapshots.csv", ("t", "atom_index", "position", "mass", "velocity"), snap_rows)
    write_csv(out / "report.csv", ("t", "mass", "momentum", "energy", "atom_count"), report.rows)
    meta = {
        "config": sc.raw,
        "versions": {"stickygas": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    for v in violations:
        log.error("invariant violated: %s", v)
    return 3 if violations else 0


# -- residuals -------------------------------------------------------------

def cmd_residuals(args) -> int:
    sc = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t_end = max(sc.times[-1], 1e-12) if sc.times else 1.0
    accel = 0.5 if sc.model == "euler_poisson" else 0.0
    phis = diagnostics.default_test_functions(sc.xbar, sc.vbar, t_end, accel)
    rows = []
    for r in range(args.refinements + 1):
        h = args.h / 2 ** r
        traj = diagnostics.quadrature_trajectory(sc.solver, sc.xbar, sc.vbar, sc.grid, h, t_end)
        for pid, phi in phis.items():
            rows.append((pid, h, diagnostics.weak_residual_continuity(traj, phi, h),
                         diagnostics.weak_residual_momentum(traj, phi, h)))
    with open(out / "residuals.csv", "w", newline="") as fh:
        fh.write("phi_id,h,continuity,momentum\n")
        for pid, h, c, m in sorted(rows, key=lambda r: (r[0], -r[1])):
            fh.write(f"{pid},{fmt(h)},{fmt(c)},{fmt(m)}\n")
    return 0


# -- verify ----------------------------------------------------------------

def _random_grid(rng, n) -> grid.GridMeasure:
    w = rng.uniform(0.1, 1.0, n)
    return grid.GridMeasure(w / w.sum(), (np.arange(n) + 0.5) / n)


def _random_monotone(rng, n):
    return rng.normal() + np.cumsum(np.abs(rng.normal(size=n)))


def _random_data(rng, n):
    return np.sort(rng.standard_normal(n)), rng.standard_normal(n)


def suite_cone(rng, instances, n_max):
    """PAVA vs brute force, orthogonality/obtuseness, contraction, idempotence."""
    for n in range(2, min(n_max, 10) + 1):
        for _ in range(instances):
            g = _random_grid(rng, n)
            y = rng.standard_normal(n)
            p = cone.project(y, g)
            b = cone.project_bruteforce(y, g)
            inst = {"n": n, "y": y.tolist(), "weights": g.weights.tolist()}
            yield "cone_oracle", g.norm(p.map.values - b.map.values), inst
            yield "orthogonality", abs(g.inner(p.residual, p.map.values)) / (1 + g.inner(y, y)), inst
            z = max(g.inner(p.residual, _random_monotone(rng, n)) for _ in range(10))
            yield "obtuseness", max(z, 0.0), inst
            y2 = rng.standard_normal(n)
            lhs = g.norm(p.map.values - cone.project(y2, g).map.values)
            yield "contraction", max(lhs - g.norm(y - y2), 0.0), inst
            yield "idempotence", g.norm(cone.project(p.map.values, g).map.values - p.map.values), inst


def suite_sticky(rng, instances, n_max, t_samples):
    for _ in range(instances):
        n = int(rng.integers(1, n_max + 1))
        g = grid.uniform_grid(n)
        xbar, vbar = _random_data(rng, n)
        times = np.sort(rng.uniform(0, 5, t_samples))
        inst = {"n": n, "xbar": xbar.tolist(), "vbar": vbar.tolist(), "times": times.tolist()}
        sys_ = oracle.from_grid(xbar, vbar, g)
        traj = pressureless.trajectory(xbar, vbar, times, g)
        p0 = float(np.dot(g.weights, vbar))
        e_prev = 0.5 * g.inner(vbar, vbar)
        for t, s in zip(times, traj):
            sys_ = oracle.evolve(sys_, t)
            yield "sticky_oracle", oracle.compare(sys_, pressureless.to_eulerian(s)), inst
            vv = g.inner(vbar, vbar)
            yield "velocity_orth", abs(g.inner(vbar - s.v, s.v)) / (1 + vv), inst
            r = xbar + t * vbar - s.x.values
            yield "velocity_residual_orth", abs(g.inner(r, s.v)) / (1 + g.inner(r, r)), inst
            yield "momentum", abs(s.momentum() - p0), inst
            yield "energy_increase", max(s.energy() - e_prev, 0.0), inst
            e_prev = s.energy()


def suite_ep(rng, instances, n_max, t_samples):
    for _ in range(instances):
        n = int(rng.integers(1, min(n_max, 32) + 1))
        g = grid.uniform_grid(n)
        xbar, vbar = _random_data(rng, n)
        times = np.sort(rng.uniform(0, 5, t_samples))
        inst = {"n": n, "xbar": xbar.tolist(), "vbar": vbar.tolist(), "times": times.tolist()}
        F = euler_poisson.ep_force(g).f
        sys_ = oracle.from_grid(xbar, vbar, g, force=F)
        p0 = float(np.dot(g.weights, vbar))
        for t in times:
            s = euler_poisson.ep_solve_at(xbar, vbar, t, g)
            sys_ = oracle.evolve(sys_, t)
            yield "ep_oracle", oracle.compare(sys_, pressureless.to_eulerian(s)), inst
            yield "ep_momentum", abs(s.momentum() - p0), inst
            yield "ep_velocity_orth", abs(g.inner(s.y - s.v, s.v)) / (1 + g.inner(s.y, s.y)), inst


def suite_stability(rng, instances, n_max):
    for _ in range(instances):
        n = int(rng.integers(1, n_max + 1))
        g = grid.uniform_grid(n)
        d1, d2 = _random_data(rng, n), _random_data(rng, n)
        times = np.sort(rng.uniform(0, 5, 10))
        rep = diagnostics.stability_experiment(d1, d2, times, g)
        excess = max(lhs - rhs for _, lhs, rhs in rep.stability)
        inst = {"n": n, "data1": [a.tolist() for a in d1], "data2": [a.tolist() for a in d2],
                "times": times.tolist()}
        yield "stability", max(excess, 0.0), inst


TOLERANCES = {
    "cone_oracle": 1e-9, "orthogonality": 1e-9, "obtuseness": 1e-9, "contraction": 1e-9,
    "idempotence": 1e-9, "sticky_oracle": 1e-8, "velocity_orth": 1e-9, "velocity_residual_orth": 1e-9,
    "momentum": 1e-9, "energy_increase": 1e-9, "ep_oracle": 1e-8, "ep_momentum": 1e-9,
    "ep_velocity_orth": 1e-9, "stability": 1e-9,
}


def run_verify(instances=200, n_max=64, seed=0, t_samples=20):
    """Run all suites; returns ``{suite: (max discrepancy, worst instance)}``."""
    rng = np.random.default_rng(seed)
    gens = [
        suite_cone(rng, instances, n_max),
        suite_sticky(rng, instances, n_max, t_samples),
        suite_ep(rng, max(instances // 2, 1) if instances else 0, n_max, t_samples),
        suite_stability(rng, instances, n_max),
    ]
    results = {}
    for gen in gens:
        for name, err, inst in gen:
            if name not in results or not err <= results[name][0]:
                results[name] = (err, inst)
    return results


def cmd_verify(args) -> int:
    if args.instances <= 0:
        log.warning("instances=0: no suites run")
        return 0
    results = run_verify(args.instances, args.n_max, args.seed, args.t_samples)
    failed = {}
    for name in TOLERANCES:
        if name not in results:
            continue
        err, inst = results[name]
        ok = err <= TOLERANCES[name]
        print(f"{name:24s} max={err:.3e} tol={TOLERANCES[name]:.0e} {'PASS' if ok else 'FAIL'}")
        if not ok:
            failed[name] = {"suite": name, "discrepancy": err, "seed": args.seed, "instance": inst}
    if failed:
        payload = json.dumps(failed, indent=2, sort_keys=True, default=float)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "verify_failures.json").write_text(payload + "\n")
            print(f"failing instances written to {out / 'verify_failures.json'}")
        else:
            print(payload)
        return 1
    return 0


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stickygas", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve a scenario and write snapshots/report")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="randomized oracle and invariant suites")
    v.add_argument("--n-max", type=int, default=64)
    v.add_argument("--instances", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--t-samples", type=int, default=20)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("residuals", help="weak-residual refinement sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--refinements", type=int, default=2)
    s.set_defaults(func=cmd_residuals)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
