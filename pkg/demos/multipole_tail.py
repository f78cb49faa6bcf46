"""How fast does the truncated multipole series approach the exact Coulomb energy?

Two rigid neutral point-charge clouds sit a distance L apart along the first
axis. We compare the exact pairwise Coulomb sum with the multipole series cut
after total order K and watch the remainder shrink like L^-(K+1).

Run with ``python3 demos/multipole_tail.py``.
"""

import numpy as np

from dispersia.coulomb import verify_expansion_order
from dispersia.density import dipole_pair, random_neutral_density
from dispersia.multipole import interaction_coefficient
from dispersia.rotations import sample_so3_pairs

rng = np.random.default_rng(7)
rho1 = random_neutral_density(8, rng, label="cloud A")
rho2 = random_neutral_density(8, rng, label="cloud B")
(U, V), = sample_so3_pairs(1, 7)

print("remainder decay for two random neutral clouds")
for K in (3, 4, 5, 6):
    # at K = 6 the remainder at L = 320 is rounding noise, so that run uses closer separations
    L_values = [40.0, 80.0, 160.0, 320.0] if K < 6 else [16.0, 32.0, 64.0, 128.0]
    rep = verify_expansion_order(rho1, rho2, U, V, K, L_values)
    print(f"  K = {K}: fitted slope {rep.fitted_slope:7.3f}  (expected {-(K + 1)})")

# The leading dipole-dipole coefficient has a closed form.
d1, d2 = np.array([0.6, 0.8, 0.0]), np.array([0.0, 0.6, 0.8])
F = interaction_coefficient(1, 1, dipole_pair(d1), dipole_pair(d2))
print(f"\ndipole-dipole coefficient {F:.15f}")
print(f"closed form d1.d2 - 3 d1x d2x = {d1 @ d2 - 3 * d1[0] * d2[0]:.15f}")
