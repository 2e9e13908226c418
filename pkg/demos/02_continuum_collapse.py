"""A uniform slab with converging velocity v0(x) = -x.

Every parcel reaches the origin at t = 1, so the whole slab collapses into
a single atom. Before that the density stays uniform on a shrinking
interval; the number of atoms is the number of cells until the very end.
"""

import numpy as np

from stickygas import ClosedForm, UniformInterval, initial_data, solve_at, to_eulerian, uniform_grid
from stickygas.diagnostics import cdf

n = 1000
g = uniform_grid(n)
xbar, vbar = initial_data(UniformInterval(-1.0, 1.0), ClosedForm(lambda x: -x), g)

# M is read just right of the origin so roundoff in a pooled position
# (which can land at +1e-17) does not flip it.
for t in (0.0, 0.5, 0.9, 1.0, 1.5):
    eul = to_eulerian(solve_at(xbar, vbar, t, g))
    lo, hi = eul.positions[0], eul.positions[-1]
    print(f"t={t:3.1f}  atoms={len(eul):5d}  support=[{lo:+.4f}, {hi:+.4f}]  M(0+)={cdf(eul, 1e-9):.3f}")

# A velocity with a kink: only the left half converges, so only part of the
# slab pools, into one atom that keeps moving right.
xbar, vbar = initial_data(UniformInterval(-1.0, 1.0), ClosedForm(lambda x: np.where(x < 0, -x, 0.0)), g)
eul = to_eulerian(solve_at(xbar, vbar, 3.0, g))
heavy = np.argmax(eul.masses)
print(f"half collapse at t=3: {len(eul)} atoms, heaviest m={eul.masses[heavy]:.3f} "
      f"at x={eul.positions[heavy]:+.4f} moving at v={eul.velocities[heavy]:.4f}")
