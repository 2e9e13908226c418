"""Two equal atoms flying at each other.

Two half-unit masses start at -1 and +1 with velocities +1 and -1. They
meet at the origin at t = 1, stick, and sit still afterwards: momentum is
zero throughout while the kinetic energy drops from 1/2 to 0.
"""

import numpy as np

from stickygas import Atoms, ClosedForm, initial_data, solve_at, to_eulerian, uniform_grid

g = uniform_grid(2)
rho = Atoms(((-1.0, 0.5), (1.0, 0.5)))
xbar, vbar = initial_data(rho, ClosedForm(lambda x: -x), g)
print("quantile positions:", xbar, "velocities:", vbar)

for t in (0.0, 0.5, 0.999, 1.0, 2.0, 10.0):
    s = solve_at(xbar, vbar, t, g)
    atoms = to_eulerian(s).atoms
    print(f"t={t:6.3f}  atoms={atoms}  momentum={s.momentum():+.1f}  energy={s.energy():.3f}")

# The projection does all the work: before the collision free flight is
# already monotone, afterwards PAVA pools the two cells.
print("free flight at t=2:", xbar + 2 * vbar, "-> projected:", solve_at(xbar, vbar, 2.0, g).x.values)
