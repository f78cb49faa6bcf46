import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dispersia.density import (
    ChargeDensity,
    DomainError,
    cube_octupole,
    dipole_pair,
    linear_quadrupole,
    random_neutral_density,
    rotate_density,
)
from dispersia.multipole import (
    MultipolarInteraction,
    SingularityError,
    coulomb_derivatives,
    first_nonvanishing_order,
    interaction_coefficient,
    multipole_moment,
    rotate_tensor,
)
from dispersia.rotations import sample_rotations


def fd_derivative(index, h=1e-4):
    """Central finite differences of 1/|x| at e1, one Richardson step."""
    def f(x):
        return 1.0 / np.linalg.norm(x)

    def central(step):
        total = 0.0
        for signs in itertools.product((1, -1), repeat=len(index)):
            x = np.array([1.0, 0.0, 0.0])
            for s, i in zip(signs, index):
                x[i] += s * step
            total += np.prod(signs) * f(x)
        return total / (2 * step) ** len(index)

    return (4 * central(h / 2) - central(h)) / 3


def test_coulomb_derivatives_against_finite_differences():
    D2 = coulomb_derivatives(2)
    assert D2.entries[(0, 0)] == 2
    assert D2.entries[(1, 1)] == -1
    assert D2.entries[(0, 1)] == 0
    assert coulomb_derivatives(3).entries[(0, 0, 0)] == -6
    for idx in [(0, 0), (1, 1), (0, 1), (2, 2)]:
        assert D2.entries[idx] == pytest.approx(fd_derivative(idx), abs=1e-5)
    assert coulomb_derivatives(3).entries[(0, 0, 0)] == pytest.approx(fd_derivative((0, 0, 0), 1e-3), abs=1e-3)


def test_coulomb_derivatives_trace_free():
    for order in range(2, 6):
        T = coulomb_derivatives(order).full()
        assert np.abs(np.einsum("ii...->...", T)).max() < 1e-12


def test_dipole_moment_is_sum_wx():
    rho = ChargeDensity([[0.3, -0.2, 0.1], [0.0, 0.4, -0.5], [0.2, 0.2, 0.2]], [1.0, -0.5, -0.5])
    M1 = multipole_moment(rho, 1).full()
    np.testing.assert_allclose(M1, (rho.weights[:, None] * rho.points).sum(axis=0), atol=1e-15)


def test_linear_quadrupole_direct_summation():
    rho = ChargeDensity([[0, 0, 1.0], [0, 0, -1.0], [0, 0, 0.5], [0, 0, -0.5]], [1.0, 1.0, -1.0, -1.0])
    assert multipole_moment(rho, 1).max_norm() == 0.0
    x = rho.points
    expected = 0.5 * np.sum(rho.weights * (3 * x[:, 2] ** 2 - np.sum(x**2, axis=1)))
    assert multipole_moment(rho, 2)((0, 0, 1), (0, 0, 1)) == pytest.approx(expected, abs=1e-14)


def test_quadrupole_matches_traceless_formula(rng):
    rho = random_neutral_density(6, rng)
    x, w = rho.points, rho.weights
    Q = 0.5 * np.einsum("n,ni,nj->ij", w, 3 * x, x) - 0.5 * np.eye(3) * np.sum(w * np.sum(x * x, axis=1))
    np.testing.assert_allclose(multipole_moment(rho, 2).full(), Q, atol=1e-13)


def test_point_at_origin_is_singular():
    with pytest.raises(SingularityError):
        multipole_moment(ChargeDensity([[0, 0, 0], [1, 0, 0]], [1.0, -1.0]), 2)


@pytest.mark.parametrize("d1,d2,expected", [((1, 0, 0), (1, 0, 0), -2.0), ((0, 1, 0), (0, 1, 0), 1.0),
                                            ((0, 0, 1), (0, 1, 0), 0.0)])
def test_dipole_dipole_closed_form(d1, d2, expected):
    assert interaction_coefficient(1, 1, dipole_pair(d1), dipole_pair(d2)) == pytest.approx(expected, abs=1e-14)


def test_first_nonvanishing_order():
    assert first_nonvanishing_order(dipole_pair()) == 1
    assert first_nonvanishing_order(linear_quadrupole()) == 2
    assert first_nonvanishing_order(cube_octupole()) == 3
    # alternating tetrahedron: the charges sit on the vertices of a cube, so M1 = M2 = 0
    tet = ChargeDensity([[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1],
                         [-1, -1, -1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]],
                        [1, 1, 1, 1, -1, -1, -1, -1])
    assert multipole_moment(tet, 1).max_norm() < 1e-12
    assert multipole_moment(tet, 2).max_norm() < 1e-12
    assert first_nonvanishing_order(tet) == 3
    with pytest.raises(DomainError):
        first_nonvanishing_order(ChargeDensity([[1, 0, 0]], [1.0]))


@given(st.integers(0, 2**31), st.integers(1, 4))
def test_moments_rotate_covariantly(seed, n):
    rng = np.random.default_rng(seed)
    rho = random_neutral_density(5, rng)
    U = sample_rotations(1, rng)[0]
    lhs = multipole_moment(rotate_density(U, rho), n).full()
    rhs = rotate_tensor(multipole_moment(rho, n).full(), U)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * max(1.0, np.abs(rhs).max()))


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 2))
def test_interaction_is_rotation_consistent(seed, n, m):
    rng = np.random.default_rng(seed)
    rho1, rho2 = random_neutral_density(4, rng), random_neutral_density(4, rng)
    U, V = sample_rotations(2, rng)
    F = MultipolarInteraction(rho1, rho2, n, m)
    direct = interaction_coefficient(n, m, rotate_density(U, rho1), rotate_density(V, rho2))
    assert F(U, V) == pytest.approx(direct, abs=1e-11)
    batch = F(np.array([U, V]), np.array([V, U]))
    assert batch[0] == pytest.approx(direct, abs=1e-11)


@given(st.integers(0, 2**31))
def test_moment_scaling_homogeneity(seed):
    rng = np.random.default_rng(seed)
    rho = random_neutral_density(4, rng)
    for n in range(1, 5):
        scaled = ChargeDensity(2.0 * rho.points, rho.weights)
        np.testing.assert_allclose(multipole_moment(scaled, n).full(), 2.0**n * multipole_moment(rho, n).full(),
                                   atol=1e-11)
