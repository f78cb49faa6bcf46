"""
Scaled shell trial functions and the energy bound that certifies binding.

For a radial function ``f(x) = u(|x|) / |x|`` in three dimensions the
Laplacian acts on ``u`` as the second derivative on the half line with a
Dirichlet condition at 0. Extending ``u`` oddly to the whole line makes this
the free one-dimensional Laplacian, so any Fourier multiplier of ``-Laplacian``
(in particular ``T``) can be evaluated on a one-dimensional grid:

    <f, T f>_3D = 4 pi int_0^inf u T u dr = 2 pi int_R u_odd T u_odd dr.

Trial functions at scale ``R`` live on the shell ``5R/4 <= |x| <= 7R/4``,
so a one-dimensional grid reaches ``R`` in the hundreds.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from ..density import DomainError
from .grid import SpectralGrid

SHELL = (1.25, 1.75)


def shell_profile(r):
    """Smooth radial bump supported on ``[5/4, 7/4]`` (not normalized)."""
    r = np.asarray(r, dtype=float)
    mid, half = 0.5 * (SHELL[0] + SHELL[1]), 0.5 * (SHELL[1] - SHELL[0])
    u = (r - mid) / half
    out = np.zeros_like(r)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


class RadialGrid:
    """One-dimensional spectral grid carrying odd extensions ``u(r) = r f(r)`` of radial functions."""

    def __init__(self, n=16384, half_width=1024.0):
        self.line = SpectralGrid(1, n, half_width)
        self.r = self.line.axis

    @property
    def dx(self):
        return self.line.dx

    def trial(self, R):
        """Odd extension of ``r f_R(r)`` for the unit-norm shell function at scale ``R``."""
        if SHELL[1] * R >= self.line.half_width - 4 * self.dx:
            raise DomainError(f"grid half-width {self.line.half_width:g} cannot hold the shell at R = {R:g}")
        u = self.r * shell_profile(np.abs(self.r) / R)
        return u / np.sqrt(self.inner(u, u))

    def inner(self, u, w):
        """3D inner product of the radial functions behind two odd extensions."""
        return 2.0 * np.pi * float(np.sum(u * w) * self.dx)

    def kinetic(self, u, w=None):
        """``<f, T g>`` in 3D from the odd extensions of ``r f`` and ``r g``."""
        w = u if w is None else w
        return self.inner(u, self.line.apply_T(w))

    def potential(self, u, V, w=None):
        """``<f, V g>`` for a radial potential given as a function of ``r``."""
        w = u if w is None else w
        return self.inner(u, V(np.abs(self.r)) * w)


@dataclass
class ZhislinReport:
    Z: float
    a: float
    R_values: list
    kinetic: list
    potential: list
    values: list
    fit_c: float | None
    fit_d: float | None
    loglog_slope: float | None
    min_value: float
    min_R: float
    below_floor: bool
    floor: float = 0.0
    matrix_R: list = field(default_factory=list)
    matrix_eigenvalues: list = field(default_factory=list)
    matrix_overlap_max: float = 0.0

    def to_json(self):
        return dict(self.__dict__)


def zhislin_trial_bound(R_values, Z=1.0, a=None, grid=None, matrix_R=(64, 128, 256, 512), fit_min_R=32.0):
    """``<f_R, (T + V) f_R>`` over scales ``R`` for ``V = -Z / sqrt(r^2 + a^2)``.

    Parameters
    ----------
    R_values : sequence of float
    Z : float
        Nuclear charge (0 gives the kinetic term alone).
    a : float, optional
        Smoothing length, two grid spacings by default.
    grid : RadialGrid, optional
    matrix_R : sequence of float
        Scales of the trial functions whose 4x4 (or general) matrix of
        ``T + V`` is also diagonalized. Their shells are pairwise disjoint
        when consecutive scales differ by a factor of 2.
    fit_min_R : float
        Only scales at least this large enter the fits. For smaller ``R`` the
        trial momenta are of order 1 and ``T`` is not yet close to
        ``-Laplacian / 2``.

    Returns
    -------
    ZhislinReport
        Per-scale values, the least-squares fit ``-c/R + d/R^2``, the log-log
        slope of the values (meaningful for ``Z = 0``), whether the minimum
        drops below the essential floor 0, and the eigenvalues of the trial
        matrix.
    """
    grid = RadialGrid() if grid is None else grid
    a = 2.0 * grid.dx if a is None else float(a)
    V = lambda r: -Z / np.sqrt(r * r + a * a)
    R_values = [float(R) for R in R_values]
    kin, pot = [], []
    for R in R_values:
        u = grid.trial(R)
        kin.append(grid.kinetic(u))
        pot.append(grid.potential(u, V) if Z != 0 else 0.0)
    vals = np.array(kin) + np.array(pot)
    Rs = np.array(R_values)
    sel = Rs >= fit_min_R
    c = d = slope = None
    if sel.sum() >= 2:
        A = np.stack([-1.0 / Rs[sel], 1.0 / Rs[sel] ** 2], axis=1)
        (c, d), *_ = np.linalg.lstsq(A, vals[sel], rcond=None)
        c, d = float(c), float(d)
        if np.all(vals[sel] > 0):
            slope = float(linregress(np.log(Rs[sel]), np.log(vals[sel])).slope)
    i = int(np.argmin(vals))

    eig, overlap = [], 0.0
    if matrix_R:
        us = [grid.trial(R) for R in matrix_R]
        m = len(us)
        H = np.array([[grid.kinetic(us[p], us[q]) + (grid.potential(us[p], V, us[q]) if Z != 0 else 0.0)
                       for q in range(m)] for p in range(m)])
        S = np.array([[grid.inner(us[p], us[q]) for q in range(m)] for p in range(m)])
        overlap = float(np.max(np.abs(S - np.eye(m))))
        eig = np.linalg.eigvalsh(0.5 * (H + H.T)).tolist()

    return ZhislinReport(
        Z=float(Z), a=a, R_values=R_values, kinetic=[float(k) for k in kin], potential=[float(p) for p in pot],
        values=vals.tolist(), fit_c=c, fit_d=d, loglog_slope=slope,
        min_value=float(vals[i]), min_R=R_values[i], below_floor=bool(vals[i] < 0.0),
        matrix_R=[float(R) for R in matrix_R], matrix_eigenvalues=eig, matrix_overlap_max=overlap,
    )
