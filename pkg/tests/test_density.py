import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dispersia.density import (
    ChargeDensity,
    Configuration,
    DomainError,
    dipole_pair,
    place_pair,
    rotate_density,
    total_charge,
)
from dispersia.rotations import RotationError, rotation_about, sample_rotations

coords = st.floats(-10, 10, allow_nan=False)
weights = st.floats(-5, 5, allow_nan=False)


@st.composite
def densities(draw, max_points=8):
    n = draw(st.integers(1, max_points))
    pts = draw(st.lists(st.tuples(coords, coords, coords), min_size=n, max_size=n))
    w = draw(st.lists(weights, min_size=n, max_size=n))
    return ChargeDensity(pts, w)


def test_total_charge_examples():
    assert total_charge(dipole_pair()) == 0.0
    rho = ChargeDensity([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [1.0, 1.0, 1.0])
    assert total_charge(rho) == 3.0


def test_total_charge_is_exactly_rounded():
    # 1e16 + 1 - 1e16 loses the 1 in naive left-to-right addition
    rho = ChargeDensity(np.zeros((3, 3)) + [[1, 0, 0]], [1e16, 1.0, -1e16])
    assert total_charge(rho) == 1.0


def test_length_mismatch_rejected():
    with pytest.raises(ValueError, match="length mismatch"):
        ChargeDensity([[0, 0, 0], [1, 0, 0]], [1.0])


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        ChargeDensity([[np.nan, 0, 0]], [1.0])


def test_rotate_density_quarter_turn():
    rho = ChargeDensity([[1, 0, 0]], [2.0])
    out = rotate_density(rotation_about([0, 0, 1], np.pi / 2), rho)
    np.testing.assert_allclose(out.points, [[0, 1, 0]], atol=1e-15)
    assert out.weights.tolist() == [2.0]


def test_rotate_density_rejects_reflection():
    with pytest.raises(RotationError):
        rotate_density(np.diag([1.0, 1.0, -1.0]), dipole_pair())


def test_place_pair_translates_second_molecule():
    rho = ChargeDensity([[0.1, 0.2, 0.3]], [1.0])
    Y = place_pair(rho, rho, Configuration(5.0))
    np.testing.assert_allclose(Y.points, [[0.1, 0.2, 0.3], [5.1, 0.2, 0.3]])
    assert len(Y) == 2


def test_configuration_domain():
    with pytest.raises(DomainError):
        Configuration(0.0)
    with pytest.raises(DomainError):
        Configuration(-1.0)


@given(densities(), st.integers(0, 2**32 - 1))
def test_rotation_preserves_charge_and_radii(rho, seed):
    U = sample_rotations(1, np.random.default_rng(seed))[0]
    out = rotate_density(U, rho)
    assert total_charge(out) == pytest.approx(total_charge(rho), abs=1e-12)
    np.testing.assert_allclose(np.linalg.norm(out.points, axis=1), np.linalg.norm(rho.points, axis=1),
                               atol=1e-12)


@given(densities(), densities(), st.floats(0.5, 100))
def test_place_pair_charge_is_additive(rho1, rho2, L):
    Y = place_pair(rho1, rho2, Configuration(L))
    assert total_charge(Y) == pytest.approx(total_charge(rho1) + total_charge(rho2), abs=1e-12)
