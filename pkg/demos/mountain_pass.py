"""Finding the lowest ridge between two minima on SO(3) x SO(3) x (0, inf).

The toy surface below has two minima at L = 4 related by a half-turn of the
first molecule. Its mountain-pass level is the lowest energy a connecting path
must climb to. We compute it with the min-max string method and compare with
a brute-force grid estimate on the two-dimensional slice where the optimal
path lives.

Run with ``python3 demos/mountain_pass.py``.
"""

import numpy as np

from dispersia.density import Configuration
from dispersia.energy import FunctionSurface
from dispersia.pathopt import minmax_optimize, negativity_at_pseudomin, sublevel_connectivity
from dispersia.rotations import rotation_about


def energy(L, U, V):
    L = np.asarray(L)
    return 0.5 * (L - 4) ** 2 + (1 - U[..., 0, 0] ** 2) * (1 + 0.5 * (L - 4))


surface = FunctionSurface(energy, L_min=0.5, vectorized=True)
tau0 = Configuration(4.0)
tau1 = Configuration(4.0, rotation_about([0, 0, 1], np.pi))
res = minmax_optimize(surface, tau0, tau1, nodes=16)
print(f"min-max level {res.level:.6f} after {res.iterations} iterations (converged: {res.converged})")

# Any path from theta = 0 to theta = pi inside the slice crosses every column
# of fixed theta, so it climbs at least max_theta min_L E. Following the
# valley floor L*(theta) attains that value, so it is the slice's pass level.
theta = np.linspace(0, np.pi, 2001)
L = np.linspace(2, 6, 2001)
vals = 0.5 * (L[:, None] - 4) ** 2 + np.sin(theta)[None, :] ** 2 * (1 + 0.5 * (L[:, None] - 4))
hi = vals.min(axis=0).max()
print(f"grid estimate      {hi:.6f}")

print("\nmultipolar sublevel sets, delta = 0.1:")
rep = negativity_at_pseudomin(1, 1, delta=0.1, trials=10)
print(f"  dipole-dipole pseudo-minima all below -delta: {rep['passed']}")
print(f"  components of {{F < -delta}} from 2000 samples: {sublevel_connectivity(1, 1, 0.1, grid_n=2000)['components']}")
