import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dispersia.density import Configuration, dipole_pair, linear_quadrupole
from dispersia.energy import (
    BracketError,
    DegenerateThresholdError,
    EnergySurface,
    ToyMolecule,
    dipole_interaction_operator,
    drude_oscillator,
    feshbach_map,
    ground_state_energy_fixed_point,
    random_hermitian,
    random_toy_molecule,
    vdw_by_diagonalization,
    vdw_coefficient,
)
from dispersia.rotations import rotation_about, sample_so3_pairs


def test_surface_without_low_moments_is_pure_dispersion():
    q = linear_quadrupole(0.2)
    surf = EnergySurface(q, q, E_infinity=-3.0, vdw=0.75, orders=[(1, 1)], L_min=1.0)
    for U, V in sample_so3_pairs(3, 0):
        assert surf(Configuration(10.0, U, V)) == pytest.approx(-3.0 - 0.75e-6, abs=1e-15)


def test_surface_aligned_dipoles():
    d = dipole_pair()
    surf = EnergySurface(d, d, E_infinity=1.0, vdw=0.0, orders=[(1, 1)])
    for L in (5.0, 20.0):
        assert surf(Configuration(L)) - 1.0 == pytest.approx(-2.0 / L**3, rel=1e-12)


def test_surface_batch_matches_scalar():
    d = dipole_pair((0.3, 0.1, 0.0))
    surf = EnergySurface(d, d, vdw=0.5, orders=[(1, 1), (1, 2), (2, 2)], L_min=2.0)
    pairs = sample_so3_pairs(5, 1)
    L = np.linspace(2.0, 6.0, 5)
    batch = surf.energy_batch(L, np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))
    for l, (U, V), b in zip(L, pairs, batch):
        assert b == pytest.approx(surf.energy(l, U, V), abs=1e-14)


def test_dipole_operator_moves_minus_three_weight():
    mol = drude_oscillator()
    U = rotation_about([0, 0, 1], np.pi / 2)  # e1 -> e2
    f = dipole_interaction_operator(mol, mol, U, U)
    D = mol.dipole_ops
    # rotated dipole components: (U D)_1 = -D_y, (U D)_2 = D_x, (U D)_3 = D_z
    expected = (-2.0 * np.kron(D[1], D[1]) + np.kron(D[0], D[0]) + np.kron(D[2], D[2]))
    np.testing.assert_allclose(f, expected, atol=1e-14)


@pytest.mark.parametrize("omega", [1.0, 2.0, 0.5])
def test_drude_pair_london_formula(omega):
    mol = drude_oscillator(omega)
    C, phi = vdw_coefficient(mol, mol, np.eye(3), np.eye(3))
    assert C == pytest.approx(3.0 / (4.0 * omega**3), abs=1e-10)
    assert np.linalg.norm(phi) == pytest.approx(1.0)


def test_drude_orientation_independent_and_diagonalization_agrees():
    mol = drude_oscillator()
    vals = [vdw_coefficient(mol, mol, U, V)[0] for U, V in sample_so3_pairs(10, 4)]
    assert max(vals) - min(vals) < 1e-10
    fit = vdw_by_diagonalization(mol, mol, np.eye(3), np.eye(3), [80.0])[0]
    assert fit == pytest.approx(0.75, rel=0.01)


def test_degenerate_threshold_detected():
    H = np.diag([0.0, 0.0, 1.0])
    D = np.zeros((3, 3, 3))
    mol = ToyMolecule.from_hamiltonian(H, D)
    # zero dipole operators: nothing leaves the ground space
    assert vdw_coefficient(mol, mol, np.eye(3), np.eye(3))[0] == 0.0
    # a ground projector missing part of the ground eigenspace leaves no gap
    tight = ToyMolecule(H, np.ones((3, 3, 3)), 0.0, np.diag([1.0, 0.0, 0.0]))
    with pytest.raises(DegenerateThresholdError):
        vdw_coefficient(tight, tight, np.eye(3), np.eye(3))


@given(st.integers(0, 2**31), st.integers(2, 5), st.integers(1, 2))
def test_vdw_positive_for_random_toys(seed, dim, deg):
    rng = np.random.default_rng(seed)
    m1, m2 = random_toy_molecule(dim, rng, deg), random_toy_molecule(dim, rng)
    U, V = sample_so3_pairs(1, seed)[0]
    assert vdw_coefficient(m1, m2, U, V)[0] > 1e-12


def test_feshbach_full_projector_is_compression(rng):
    H = random_hermitian(5, rng)
    np.testing.assert_allclose(np.linalg.eigvalsh(feshbach_map(H, np.eye(5), -3.0)), np.linalg.eigvalsh(H),
                               atol=1e-12)


@given(st.integers(0, 2**31))
def test_feshbach_fixed_point_matches_dense(seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(8, rng)
    w, v = np.linalg.eigh(H)
    idx = np.sort(np.argsort(-np.abs(v[:, 0]))[:2])
    P = np.zeros((8, 8))
    P[idx, idx] = 1.0
    try:
        E = ground_state_energy_fixed_point(H, P)
    except BracketError:
        return
    assert E == pytest.approx(w[0], abs=1e-8)
    # E is an eigenvalue of F_P(E)
    assert np.min(np.abs(np.linalg.eigvalsh(feshbach_map(H, P, E)) - E)) < 1e-8


def test_feshbach_rejects_non_projector(rng):
    with pytest.raises(ValueError):
        feshbach_map(random_hermitian(3, rng), np.diag([1.0, 0.5, 0.0]), 0.0)
