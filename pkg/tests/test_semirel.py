import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dispersia.density import DomainError
from dispersia.semirel import (
    ConvergenceWarning,
    CutoffFunction,
    PartitionOfUnity,
    RadialGrid,
    SpectralGrid,
    SupportOverlapError,
    bessel_k2,
    bessel_k2_integral,
    chi,
    commutator_norm,
    decay_rate,
    fourier_commutator_bound,
    ground_state,
    ims_error,
    kernel_form,
    kinetic_symbol,
    off_diagonal_kernel,
    shell_profile,
    smooth_bump,
    smoothed_coulomb,
    zhislin_trial_bound,
)


def dense_T(grid):
    """Matrix of T on a 1D grid, column by column."""
    eye = np.eye(grid.n)
    return np.column_stack([grid.apply_T(e) for e in eye])


# --- symbol and transforms ---------------------------------------------------

def test_symbol_on_plane_waves():
    for d, n in ((1, 64), (3, 16)):
        grid = SpectralGrid(d, n, 5.0)
        for k in [(0, 0, 0), (1, 2, 0), (3, -1, 7), (-8, 0, 2)]:
            wave, p2 = grid.plane_wave(k[:d])
            out = grid.apply_T(wave)
            np.testing.assert_allclose(out, (np.sqrt(1 + p2) - 1) * wave, atol=1e-12)


@given(st.floats(0, 1e12))
def test_symbol_below_half_laplacian(q):
    assert kinetic_symbol(q) <= q / 2
    assert kinetic_symbol(q) >= 0


@given(st.integers(0, 2**31))
@settings(max_examples=20)
def test_parseval_and_self_adjointness(seed):
    grid = SpectralGrid(3, 16, 4.0)
    rng = np.random.default_rng(seed)
    f, g = rng.standard_normal((2,) + grid.shape)
    assert abs(np.linalg.norm(grid.fft(f)) - np.linalg.norm(f)) <= 1e-12 * np.linalg.norm(f)
    assert grid.inner(f, grid.apply_T(g)) == pytest.approx(grid.inner(grid.apply_T(f), g), rel=1e-12)
    assert grid.inner(f, grid.apply_T(f)).real >= 0


def test_constant_mode_is_annihilated():
    grid = SpectralGrid(3, 16, 4.0)
    assert np.abs(grid.apply_T(np.ones(grid.shape))).max() < 1e-14


def test_grid_validation():
    with pytest.raises(ValueError):
        SpectralGrid(2, 16, 1.0)
    with pytest.raises(ValueError):
        SpectralGrid(1, 48, 1.0)


# --- Bessel kernel -------------------------------------------------------------

def test_k2_against_integral_representation():
    xs = np.geomspace(0.05, 30.0, 20)
    for x in xs:
        assert bessel_k2(x) == pytest.approx(bessel_k2_integral(x), rel=1e-10)


def test_k2_small_argument_asymptote():
    assert bessel_k2(1e-4) * 1e-8 == pytest.approx(2.0, rel=1e-6)


def test_kernel_form_against_double_sum():
    grid = SpectralGrid(3, 8, 4.0)
    rng = np.random.default_rng(1)
    f = np.zeros(grid.shape)
    g = np.zeros(grid.shape)
    f[:2, :3, 1:4] = rng.standard_normal((2, 3, 3))
    g[5:8, 2:5, 0:2] = rng.standard_normal((3, 3, 2))
    pts = np.stack([c.ravel() for c in grid.coordinates()], axis=1)
    fi, gi = np.nonzero(f.ravel())[0], np.nonzero(g.ravel())[0]
    r = np.linalg.norm(pts[fi][:, None] - pts[gi][None], axis=-1)
    expected = f.ravel()[fi] @ off_diagonal_kernel(r) @ g.ravel()[gi] * grid.cell_volume**2
    assert kernel_form(grid, f, g, R=1.0).real == pytest.approx(expected, rel=1e-12)


def test_kernel_form_rejects_overlap():
    grid = SpectralGrid(3, 16, 4.0)
    f = smooth_bump(grid, (0, 0, 0), 1.5)
    g = smooth_bump(grid, (2.0, 0, 0), 1.5)
    with pytest.raises(SupportOverlapError):
        kernel_form(grid, f, g, R=1.0)


# --- cutoffs and commutators ----------------------------------------------------

def test_chi_profile():
    assert chi(0.0) == 1.0 and chi(0.1) == 1.0
    assert chi(0.125) == 0.0 and chi(3.0) == 0.0
    r = np.linspace(0.1, 0.125, 101)
    assert np.all(np.diff(chi(r)) <= 0)


@given(st.floats(2.0, 50.0))
@settings(max_examples=15)
def test_partition_squares_sum_to_one(R):
    grid = SpectralGrid(1, 512, 2.0 * R)
    J = PartitionOfUnity(R).functions(grid)
    np.testing.assert_allclose(sum(j**2 for j in J), 1.0, atol=1e-14)


def test_commutator_norm_against_dense_matrix():
    grid = SpectralGrid(1, 128, 12.8)
    zeta = chi(np.abs(grid.axis) / 16.0)
    T = dense_T(grid)
    C = T @ np.diag(zeta) - np.diag(zeta) @ T
    exact = np.linalg.norm(C, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        est = commutator_norm(grid, zeta, iterations=400)
    assert est == pytest.approx(exact, rel=1e-5)
    assert est <= fourier_commutator_bound(grid, zeta)


def test_commutator_of_constant_is_zero():
    grid = SpectralGrid(1, 64, 5.0)
    assert commutator_norm(grid, np.ones(grid.n)) == 0.0


def test_commutator_resolution_guard():
    grid = SpectralGrid(1, 64, 51.2)
    with pytest.raises(DomainError):
        commutator_norm(grid, CutoffFunction(8.0))


def test_ims_error_identity():
    # T - sum J T J = 1/2 sum [J, [J, T]] when sum J^2 = 1
    grid = SpectralGrid(1, 512, 12.8)
    part = PartitionOfUnity(16.0)
    psi = np.exp(-((grid.axis - 1.8) ** 2) / 0.5)
    T = dense_T(grid)
    total = 0.0
    for J in part.functions(grid):
        D = np.diag(J)
        double = D @ (D @ T - T @ D) - (D @ T - T @ D) @ D
        total += 0.5 * psi @ double @ psi * grid.dx
    assert ims_error(grid, part, psi).real == pytest.approx(total, rel=1e-8, abs=1e-14)


def test_ims_error_vanishes_in_flat_region():
    grid = SpectralGrid(1, 1024, 12.8)
    psi = smooth_bump(grid, (0.0,), 0.9)
    # J_1 = 1 on the support, J_0 = J_2 = 0 there: all pieces agree exactly
    assert abs(ims_error(grid, PartitionOfUnity(10.0), psi)) < 1e-12


# --- eigenvalues and decay --------------------------------------------------------

def gaussian_trial_energy(Z=1.0, a=0.5):
    """Best Gaussian variational energy of T - Z / sqrt(r^2 + a^2), by radial quadrature."""
    best = np.inf
    for s in np.linspace(0.5, 4.0, 36):
        w = lambda p: p * p * np.exp(-s * s * p * p)
        kin = quad(lambda p: w(p) * (np.sqrt(1 + p * p) - 1), 0, np.inf)[0] / quad(w, 0, np.inf)[0]
        v = lambda r: r * r * np.exp(-r * r / (s * s))
        pot = quad(lambda r: v(r) * (-Z / np.sqrt(r * r + a * a)), 0, np.inf)[0] / quad(v, 0, np.inf)[0]
        best = min(best, kin + pot)
    return best


def test_zero_potential_has_constant_ground_state():
    grid = SpectralGrid(3, 8, 2.0)
    E, vecs = ground_state(grid, np.zeros(grid.shape), k=2)
    assert abs(E[0]) < 1e-10
    assert grid.norm(vecs[0]) == pytest.approx(1.0)
    fit = decay_rate(grid, vecs[0], 0.5)
    assert not fit.applicable and not fit.decaying


def test_smoothed_well_binds_below_gaussian_bound():
    grid = SpectralGrid(3, 32, 12.0)
    E, vecs = ground_state(grid, smoothed_coulomb(grid, 1.0, a=0.5), k=3)
    trial = gaussian_trial_energy()
    assert trial < 0
    assert E[0] <= trial + 1e-3
    assert np.all(np.diff(E) >= 0)
    fit = decay_rate(grid, vecs[0], 2.0)
    assert fit.decaying


def test_ground_state_rejects_singular_potential():
    grid = SpectralGrid(3, 8, 2.0)
    V = np.zeros(grid.shape)
    V[0, 0, 0] = -np.inf
    with pytest.raises(DomainError):
        ground_state(grid, V)


# --- shell trial functions ---------------------------------------------------------

def test_zhislin_terms_against_quadrature():
    grid = RadialGrid(4096, 256.0)
    R_values = [16.0, 32.0, 64.0]
    rep = zhislin_trial_bound(R_values, Z=1.0, a=1e-12, grid=grid, matrix_R=())
    gaps = []
    for R, kin, pot in zip(R_values, rep.kinetic, rep.potential):
        norm = quad(lambda r: shell_profile(r / R) ** 2 * r * r, 1.25 * R, 1.75 * R)[0]
        expected = -quad(lambda r: shell_profile(r / R) ** 2 * r, 1.25 * R, 1.75 * R)[0] / norm
        assert pot == pytest.approx(expected, rel=1e-6)
        # T <= -Laplacian / 2
        h = 1e-6
        u = lambda r: r * shell_profile(r / R)
        du = lambda r: (u(r + h) - u(r - h)) / (2 * h)
        grad = 0.5 * quad(lambda r: du(r) ** 2, 1.25 * R, 1.75 * R, limit=200)[0] / norm
        assert kin <= grad * (1 + 1e-6)
        gaps.append(1.0 - kin / grad)
    # the relativistic reduction shrinks as the trial momenta ~ 1/R go to zero
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.03


def test_zhislin_free_slope_and_binding():
    rep0 = zhislin_trial_bound([2.0**k for k in range(5, 10)], Z=0.0, matrix_R=())
    assert rep0.loglog_slope == pytest.approx(-2.0, abs=0.05)
    assert all(v > 0 for v in rep0.values)
    rep1 = zhislin_trial_bound([2.0**k for k in range(10)], Z=1.0)
    assert rep1.below_floor
    assert max(rep1.matrix_eigenvalues) < 0
    assert rep1.matrix_overlap_max < 1e-12


def test_radial_reduction_matches_3d_grid():
    R = 6.0
    grid3 = SpectralGrid(3, 64, 12.0)
    r = grid3.radius()
    f = shell_profile(r / R)
    f /= grid3.norm(f)
    kin3 = grid3.inner(f, grid3.apply_T(f)).real
    radial = RadialGrid(4096, 256.0)
    kin1 = radial.kinetic(radial.trial(R))
    assert kin1 == pytest.approx(kin3, rel=0.01)


def test_zhislin_domain_error():
    with pytest.raises(DomainError):
        RadialGrid(1024, 64.0).trial(40.0)
