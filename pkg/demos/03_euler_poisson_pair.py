"""Self-gravitating pair: two atoms at rest attract each other.

With the attractive force the modified velocity grows linearly,
y = t F, and the pair follows x = -1 + t^2/8 and x = 1 - t^2/8. They
meet at t = 2 sqrt(2) and stay together, momentum still zero.
"""

import math

import numpy as np

from stickygas import ep_force, ep_solve_at, to_eulerian, uniform_grid

g = uniform_grid(2)
xbar, vbar = np.array([-1.0, 1.0]), np.zeros(2)
print("cell forces:", ep_force(g).f)

t_hit = 2 * math.sqrt(2)
for t in (0.0, 1.0, 2.0, t_hit - 1e-6, t_hit, 4.0, 8.0):
    s = ep_solve_at(xbar, vbar, t, g)
    print(f"t={t:8.5f}  x={s.x.values}  v={s.v}  atoms={len(to_eulerian(s))}  p={s.momentum():+.1e}")

# A larger uniform cloud at rest: gravity pulls everything to the centre.
n = 400
g = uniform_grid(n)
xbar = g.midpoints - 0.5
for t in (0.5, 1.0, 1.5):
    eul = to_eulerian(ep_solve_at(xbar, np.zeros(n), t, g))
    print(f"cloud t={t}: {len(eul)} atoms, spread {eul.positions[-1] - eul.positions[0]:.4f}")
