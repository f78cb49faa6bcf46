"""
Smooth cutoffs, the three-piece partition of unity, commutator norms and the
IMS localization error of the semirelativistic kinetic operator.
"""

import warnings

import numpy as np

from ..density import DomainError

INNER = 1.0 / 10.0
OUTER = 1.0 / 8.0
MIN_TRANSITION_POINTS = 8


def check_resolution(grid, R):
    """Require ``R > 1`` and at least 8 grid points across the transition shell ``[R/10, R/8]``."""
    if not R > 1:
        raise DomainError("cutoff scale must exceed 1")
    pts = (OUTER - INNER) * R / grid.dx
    if pts < MIN_TRANSITION_POINTS * (1.0 - 1e-9):
        raise DomainError(f"transition shell resolved by {pts:.2f} grid points, need {MIN_TRANSITION_POINTS}")


class ConvergenceWarning(RuntimeWarning):
    pass


def _flat(x):
    """``exp(-1/x)`` for ``x > 0`` and 0 otherwise: smooth with all derivatives vanishing at 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(u):
    """C-infinity step: 1 for ``u <= 0``, 0 for ``u >= 1``, monotone in between."""
    u = np.asarray(u, dtype=float)
    a, b = _flat(1.0 - u), _flat(u)
    return a / (a + b)


def chi(r):
    """Radial cutoff profile: 1 on ``[0, 1/10]``, 0 on ``[1/8, inf)``."""
    return smooth_step((np.asarray(r, dtype=float) - INNER) / (OUTER - INNER))


class CutoffFunction:
    """``x -> chi(|x - center| / R)``: equal to 1 within ``R/10`` and 0 beyond ``R/8``."""

    def __init__(self, R, center=None):
        if not R > 0:
            raise ValueError("R must be positive")
        self.R = float(R)
        self.center = center

    def __call__(self, grid):
        coords = grid.coordinates()
        c = np.zeros(grid.d) if self.center is None else np.broadcast_to(np.asarray(self.center, float), (grid.d,))
        r = np.sqrt(sum((x - ci) ** 2 for x, ci in zip(coords, c)))
        return chi(r / self.R)

    def transition_points(self, grid):
        """Grid points across the transition shell, along one axis."""
        return (OUTER - INNER) * self.R / grid.dx


class PartitionOfUnity:
    """Functions ``J_0, J_1, J_2`` at scale ``R`` with ``sum J_i^2 = 1``.

    ``v1`` is the unit cutoff at the origin, ``v2`` the same cutoff moved by
    ``separation`` (a unit vector in units of ``R``), ``v0 = 1 - v1 - v2``, and
    each ``J_i = v_i / sqrt(v0^2 + v1^2 + v2^2)`` evaluated at ``x / R``.
    """

    def __init__(self, R, separation=None):
        self.R = float(R)
        self.separation = separation

    def functions(self, grid):
        coords = [x / self.R for x in grid.coordinates()]
        e = np.zeros(grid.d)
        e[0] = 1.0
        sep = e if self.separation is None else np.broadcast_to(np.asarray(self.separation, float), (grid.d,))
        v1 = chi(np.sqrt(sum(x**2 for x in coords)))
        v2 = chi(np.sqrt(sum((x - s) ** 2 for x, s in zip(coords, sep))))
        v0 = 1.0 - v1 - v2
        V = np.sqrt(v0**2 + v1**2 + v2**2)
        return v0 / V, v1 / V, v2 / V


def commutator(grid, zeta, psi):
    """``[T, zeta] psi = T(zeta psi) - zeta T psi``."""
    return grid.apply_T(zeta * psi) - zeta * grid.apply_T(psi)


def commutator_norm(grid, zeta, iterations=50, seed=0, rtol=1e-3):
    """Power-iteration estimate of the operator norm of ``[T, zeta]``.

    ``[T, zeta]`` is anti-self-adjoint, so ``C^* C = -C^2``; the square root
    of the Rayleigh quotient after ``iterations`` steps is returned. A
    :class:`ConvergenceWarning` is issued when the last step still moved the
    estimate by more than ``rtol``.
    """
    if isinstance(zeta, CutoffFunction):
        check_resolution(grid, zeta.R)
        zeta = zeta(grid)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(grid.shape)
    v /= np.linalg.norm(v)
    lam, prev = 0.0, 0.0
    for _ in range(iterations):
        w = -commutator(grid, zeta, commutator(grid, zeta, v))
        prev, lam = lam, float(np.vdot(v, w).real)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    if lam > 0 and abs(lam - prev) > rtol * lam:
        warnings.warn(f"power iteration not settled: last relative change {abs(lam - prev) / lam:.2e}",
                      ConvergenceWarning, stacklevel=2)
    return float(np.sqrt(max(lam, 0.0)))


def fourier_commutator_bound(grid, zeta):
    """``(2 pi)^(-d/2) || |q| F(zeta) ||_L1`` with the unitary continuum transform, on the grid."""
    if isinstance(zeta, CutoffFunction):
        zeta = zeta(grid)
    d = grid.d
    # F(zeta)(q) = (2 pi)^(-d/2) sum_x exp(-i q.x) zeta(x) dV, up to a phase
    zhat = np.abs(np.fft.fftn(zeta)) * grid.cell_volume / (2.0 * np.pi) ** (d / 2)
    dq = (2.0 * np.pi / (2.0 * grid.half_width)) ** d
    return float(np.sum(np.sqrt(grid.p2) * zhat) * dq / (2.0 * np.pi) ** (d / 2))


def ims_error(grid, partition, psi):
    """``<psi, T psi> - sum_i <J_i psi, T J_i psi>`` (real up to rounding)."""
    check_resolution(grid, partition.R)
    total = grid.inner(psi, grid.apply_T(psi))
    for J in partition.functions(grid):
        phi = J * psi
        total -= grid.inner(phi, grid.apply_T(phi))
    return total
