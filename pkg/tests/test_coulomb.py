import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dispersia.coulomb import (
    PreconditionError,
    coulomb_interaction,
    expansion_value,
    verify_expansion_order,
)
from dispersia.density import ChargeDensity, Configuration, dipole_pair, random_neutral_density
from dispersia.rotations import sample_rotations


def brute_force(rho1, rho2, tau):
    """Plain double loop, independent of the vectorized implementation."""
    total = 0.0
    for x, wx in zip(rho1.points, rho1.weights):
        for y, wy in zip(rho2.points, rho2.weights):
            total += wx * wy / np.linalg.norm(tau.L * np.array([1.0, 0, 0]) + tau.V @ y - tau.U @ x)
    return total


def test_aligned_dipoles_at_L100():
    d = dipole_pair()
    value = coulomb_interaction(d, d, Configuration(100.0))
    assert value == pytest.approx(-2.0 / 100**3, rel=0.02)


def test_neutral_interaction_decays_like_L3(rng):
    rho1, rho2 = random_neutral_density(6, rng, 0.5), random_neutral_density(6, rng, 0.5)
    Ls = [50.0, 100.0, 200.0]
    vals = [abs(coulomb_interaction(rho1, rho2, Configuration(L))) for L in Ls]
    C = vals[0] * Ls[0] ** 3
    assert all(v <= 1.5 * C / L**3 for v, L in zip(vals, Ls))


def test_support_precondition():
    with pytest.raises(PreconditionError):
        coulomb_interaction(dipole_pair((4, 0, 0)), dipole_pair(), Configuration(10.0))


def test_expansion_K3_is_dipole_term():
    d = dipole_pair()
    assert expansion_value(d, d, Configuration(50.0), 3) == pytest.approx(-2.0 / 50**3, rel=1e-12)


def test_aligned_dipole_order():
    d = dipole_pair()
    report = verify_expansion_order(d, d, np.eye(3), np.eye(3), 4, [40, 80, 160, 320])
    assert report.success
    assert report.fitted_slope <= -4.7


def test_random_neutral_order_K3(rng):
    rho1, rho2 = random_neutral_density(8, rng, 0.5), random_neutral_density(8, rng, 0.5)
    U, V = sample_rotations(2, rng)
    report = verify_expansion_order(rho1, rho2, U, V, 3, [40, 80, 160, 320])
    assert report.fitted_slope <= -3.7


def test_charged_input_is_flagged():
    q = ChargeDensity([[0.1, 0, 0]], [1.0])
    report = verify_expansion_order(q, q, np.eye(3), np.eye(3), 3, [40, 80, 160, 320])
    assert report.fitted_slope == pytest.approx(-1.0, abs=0.05)
    assert any("not neutral" in f for f in report.flags)
    assert not report.success


@given(st.integers(0, 2**31), st.floats(8.0, 50.0))
def test_matches_brute_force_and_thread_count(seed, L):
    rng = np.random.default_rng(seed)
    rho1, rho2 = random_neutral_density(5, rng, 0.5), random_neutral_density(7, rng, 0.5)
    U, V = sample_rotations(2, rng)
    tau = Configuration(L, U, V)
    one = coulomb_interaction(rho1, rho2, tau, threads=1)
    four = coulomb_interaction(rho1, rho2, tau, threads=4)
    assert one == four
    assert one == pytest.approx(brute_force(rho1, rho2, tau), rel=1e-9, abs=1e-15)


@given(st.integers(0, 2**31))
def test_swap_symmetry(seed):
    # exchanging the molecules and turning the frame by a half turn about e3 gives the same energy
    rng = np.random.default_rng(seed)
    rho1, rho2 = random_neutral_density(4, rng, 0.5), random_neutral_density(4, rng, 0.5)
    U, V = sample_rotations(2, rng)
    R = np.diag([-1.0, -1.0, 1.0])
    a = coulomb_interaction(rho1, rho2, Configuration(10.0, U, V))
    b = coulomb_interaction(rho2, rho1, Configuration(10.0, R @ V, R @ U))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-16)
