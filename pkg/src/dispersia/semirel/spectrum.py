"""
Lowest eigenpairs of ``T + V`` on a grid and exponential-decay fits of eigenfunctions.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh
from scipy.stats import linregress

from ..density import DomainError

RESIDUAL_TOL = 1e-8


class EigenConvergenceError(RuntimeError):
    pass


def smoothed_coulomb(grid, Z=1.0, a=None, center=None):
    """``-Z / sqrt(|x - center|^2 + a^2)`` with ``a`` defaulting to two grid spacings."""
    a = 2.0 * grid.dx if a is None else float(a)
    c = np.zeros(grid.d) if center is None else np.asarray(center, float)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coordinates(), c))
    return -Z / np.sqrt(r2 + a * a)


def ground_state(grid, potential, k=1, tol=RESIDUAL_TOL, maxiter=20_000, seed=0):
    """Lowest ``k`` eigenpairs of ``T + potential``.

    The operator is applied matrix-free (FFT for ``T``, pointwise for the
    potential) and handed to ARPACK's implicitly restarted Lanczos method
    for the smallest algebraic eigenvalues.

    Returns
    -------
    eigenvalues : ndarray, shape (k,)
        Nondecreasing.
    eigenvectors : ndarray, shape (k, *grid.shape)
        Normalized so that ``grid.norm(v) == 1``.

    Raises
    ------
    DomainError
        If the potential is not finite (and hence not bounded below).
    EigenConvergenceError
        If ARPACK does not converge or a residual ``||(H - E) v||`` of a unit
        grid vector exceeds ``tol``.
    """
    potential = np.asarray(potential, dtype=float)
    if potential.shape != grid.shape:
        raise ValueError(f"potential must have shape {grid.shape}")
    if not np.all(np.isfinite(potential)):
        raise DomainError("potential must be finite, so that T + V is bounded below")
    size = potential.size

    def matvec(v):
        v = v.reshape(grid.shape)
        return (grid.apply_T(v) + potential * v).ravel()

    H = LinearOperator((size, size), matvec=matvec, dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(size)
    try:
        vals, vecs = eigsh(H, k=k, which="SA", tol=0.0, maxiter=maxiter, v0=v0)
    except ArpackNoConvergence as exc:
        raise EigenConvergenceError(f"Lanczos iteration did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    for j in range(k):
        res = np.linalg.norm(H.matvec(vecs[:, j]) - vals[j] * vecs[:, j])
        if res > tol:
            raise EigenConvergenceError(f"residual {res:.2e} of eigenpair {j} exceeds {tol:.0e}")
    vecs = vecs.T.reshape((k,) + grid.shape) / np.sqrt(grid.cell_volume)
    return vals, vecs


@dataclass
class DecayFit:
    rate: float
    r_squared: float
    window: tuple
    applicable: bool
    note: str = ""

    @property
    def decaying(self):
        return self.applicable and self.rate < 0 and self.r_squared >= 0.95

    def to_json(self):
        return {"rate": self.rate, "r_squared": self.r_squared, "window": list(self.window),
                "applicable": self.applicable, "decaying": self.decaying, "note": self.note}


def shell_averages(grid, psi, center=None):
    """Mean of ``|psi|`` over radial shells of width ``dx``, up to the inscribed radius."""
    c = np.zeros(grid.d) if center is None else np.asarray(center, float)
    r = np.sqrt(sum((x - ci) ** 2 for x, ci in zip(grid.coordinates(), c)))
    edges = np.arange(0.0, grid.half_width + grid.dx / 2, grid.dx)
    idx = np.digitize(r.ravel(), edges) - 1
    keep = idx < len(edges) - 1
    sums = np.bincount(idx[keep], weights=np.abs(psi).ravel()[keep], minlength=len(edges) - 1)
    counts = np.bincount(idx[keep], minlength=len(edges) - 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    ok = counts > 0
    return mids[ok], sums[ok] / counts[ok]


def decay_rate(grid, psi, threshold_radius, outer_fraction=0.75, floor=1e-14):
    """Slope of ``log`` (shell-averaged ``|psi|``) against the radius.

    The fit window runs from ``threshold_radius`` to ``outer_fraction`` of
    the box half-width (beyond that periodic images flatten the profile) and
    is cut where the averages fall below ``floor``. A profile that does not
    change over the window by more than a factor ``1 + 1e-6`` is reported as
    not applicable.
    """
    r, a = shell_averages(grid, psi)
    sel = (r >= threshold_radius) & (r <= outer_fraction * grid.half_width)
    r, a = r[sel], a[sel]
    note = ""
    below = np.nonzero(a < floor)[0]
    if len(below):
        r, a = r[: below[0]], a[: below[0]]
        note = "fit window truncated at the underflow floor"
    if len(r) < 3:
        return DecayFit(float("nan"), float("nan"), (float(threshold_radius), float(threshold_radius)), False,
                        "fewer than three shells in the fit window")
    if a.max() <= a.min() * (1.0 + 1e-6):
        return DecayFit(0.0, 0.0, (float(r[0]), float(r[-1])), False, "profile is flat: not decaying")
    fit = linregress(r, np.log(a))
    return DecayFit(float(fit.slope), float(fit.rvalue**2), (float(r[0]), float(r[-1])), True, note)
