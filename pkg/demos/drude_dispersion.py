"""The London dispersion coefficient of two Drude oscillators, three ways.

Each molecule is an isotropic harmonic oscillator of frequency 1 carrying a
unit charge. Second-order perturbation theory predicts an attraction
-C / L^6 with C = 3/4 for every relative orientation. We recover the number
from the resolvent formula, from exact diagonalization of the coupled pair at
large L, and check the Feshbach fixed point on a random matrix.

Run with ``python3 demos/drude_dispersion.py``.
"""

import numpy as np

from dispersia.energy import (
    drude_oscillator,
    ground_state_energy_fixed_point,
    random_hermitian,
    vdw_by_diagonalization,
    vdw_coefficient,
)
from dispersia.rotations import sample_so3_pairs

mol = drude_oscillator(omega=1.0, levels=2)
print("C from the resolvent at random orientations:")
for U, V in sample_so3_pairs(4, 1):
    print(f"  {vdw_coefficient(mol, mol, U, V)[0]:.15f}")

eye = np.eye(3)
for L, C in zip((20.0, 40.0, 80.0), vdw_by_diagonalization(mol, mol, eye, eye, [20.0, 40.0, 80.0])):
    print(f"-(E0(L) - E_inf) L^6 at L = {L:4.0f}: {C:.8f}")

# The Feshbach fixed point reproduces the lowest eigenvalue exactly.
rng = np.random.default_rng(3)
H = random_hermitian(8, rng)
P = np.diag([1.0, 1.0] + [0.0] * 6)
E = ground_state_energy_fixed_point(H, P)
print(f"\nFeshbach fixed point {E:.14f}  vs  dense eigenvalue {np.linalg.eigvalsh(H)[0]:.14f}")
