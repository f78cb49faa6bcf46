"""
Position-space kernel of the semirelativistic kinetic operator.

Away from the diagonal ``sqrt(1 - Laplacian)`` in three dimensions acts by
the kernel ``-K_2(r) / (2 pi^2 r^2)``. For functions with disjoint supports
the quadratic form of ``T`` is therefore a plain double sum, with no
wrap-around and no ultraviolet issue.
"""

import numpy as np
from scipy.integrate import quad
from scipy.spatial import cKDTree
from scipy.special import kv

from ..density import DomainError


class SupportOverlapError(ValueError):
    """The two grid functions are closer than the required separation."""


def bessel_k2(x):
    """Modified Bessel function of the second kind, order 2."""
    return kv(2, x)


def bessel_k2_integral(x):
    """``K_2(x) = int_0^inf exp(-x cosh t) cosh(2 t) dt`` by adaptive quadrature (slow, for checks)."""
    x = float(x)
    if x <= 0:
        raise DomainError("K_2 integral representation needs x > 0")
    # the integrand is below 1e-300 once x cosh t > 700
    upper = np.arccosh(max(700.0 / x, 1.0)) + 1.0
    val, _ = quad(lambda t: np.exp(-x * np.cosh(t)) * np.cosh(2.0 * t), 0.0, upper,
                  epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def off_diagonal_kernel(r):
    """``-K_2(r) / (2 pi^2 r^2)`` for ``r > 0``."""
    r = np.asarray(r, dtype=float)
    return -bessel_k2(r) / (2.0 * np.pi**2 * r**2)


def _support(grid, f):
    mask = np.asarray(f) != 0
    pts = np.stack([c[mask] for c in grid.coordinates()], axis=-1)
    return pts, np.asarray(f)[mask]


def support_distance(grid, f, g):
    """Smallest Euclidean distance between the supports of ``f`` and ``g`` (infinite if either is zero)."""
    pf, _ = _support(grid, f)
    pg, _ = _support(grid, g)
    if len(pf) == 0 or len(pg) == 0:
        return np.inf
    dist, _ = cKDTree(pg).query(pf, k=1)
    return float(dist.min())


def kernel_form(grid, f, g, R=1.0):
    """``<f, T g>`` for separated supports, computed from the Bessel kernel.

    Parameters
    ----------
    grid : SpectralGrid
        Three-dimensional grid carrying ``f`` and ``g``.
    f, g : ndarray
        Grid functions. Their supports (nonzero entries) must be at least
        ``R`` apart.
    R : float
        Required separation, at least 1.

    Returns
    -------
    complex
        ``sum_x sum_y conj(f(x)) k(|x - y|) g(y) dV^2`` with the kernel
        ``k = -K_2(r) / (2 pi^2 r^2)``. The diagonal part of ``T`` does not
        contribute because the supports are disjoint.

    Notes
    -----
    The inner sum over ``y`` is a linear (non-periodic) convolution, done
    exactly with FFTs on a grid padded to twice the size. Offsets shorter
    than the support distance never pair a point of ``f`` with a point of
    ``g``, so the kernel is set to zero there.
    """
    if grid.d != 3:
        raise DomainError("the Bessel kernel form is three-dimensional")
    if R < 1:
        raise DomainError("separation must be at least 1")
    f, g = np.asarray(f), np.asarray(g)
    if not f.any() or not g.any():
        return 0j
    dist = support_distance(grid, f, g)
    if dist < R:
        raise SupportOverlapError(f"supports are {dist:.4g} apart, less than the required {R:g}")
    n = grid.n
    offsets = grid.dx * np.fft.fftfreq(2 * n, d=1.0 / (2 * n))
    ox, oy, oz = np.meshgrid(offsets, offsets, offsets, indexing="ij")
    r = np.sqrt(ox**2 + oy**2 + oz**2)
    k = np.zeros_like(r)
    far = r >= dist * (1.0 - 1e-12)
    k[far] = off_diagonal_kernel(r[far])
    padded = np.zeros((2 * n,) * 3, dtype=np.result_type(g, float))
    padded[:n, :n, :n] = g
    conv = np.fft.ifftn(np.fft.fftn(k) * np.fft.fftn(padded))[:n, :n, :n]
    if np.isrealobj(g):
        conv = conv.real
    return complex(np.vdot(f, conv) * grid.cell_volume**2)


def smooth_bump(grid, center, radius):
    """Compactly supported ``exp(1 - 1 / (1 - (r/radius)^2))`` inside the ball, 0 outside."""
    r2 = sum((c - x0) ** 2 for c, x0 in zip(grid.coordinates(), center)) / radius**2
    out = np.zeros(grid.shape)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out
