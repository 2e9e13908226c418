"""Do the computed atoms solve the PDEs in the weak sense?

Integrate against smooth compactly supported windows: space is exact (the
density is a finite sum of atoms), time uses the midpoint rule. The
residual should fall off with the time step h.
"""

import numpy as np

from stickygas import diagnostics, solve_at, uniform_grid

g = uniform_grid(2)
xbar, vbar = np.array([-1.0, 1.0]), np.array([1.0, -1.0])
phis = diagnostics.default_test_functions(xbar, vbar, 2.0)

print(f"{'window':>10s} {'h':>9s} {'continuity':>11s} {'momentum':>11s}")
for k in range(4):
    h = 1e-3 / 2 ** k
    traj = diagnostics.quadrature_trajectory(solve_at, xbar, vbar, g, h, 2.0)
    for pid, phi in phis.items():
        c = diagnostics.weak_residual_continuity(traj, phi, h)
        m = diagnostics.weak_residual_momentum(traj, phi, h)
        print(f"{pid:>10s} {h:9.2e} {c:11.3e} {m:11.3e}")

# The centred windows see a momentum residual of exactly zero: the data is
# odd under x -> -x, so the integrand cancels pairwise.
