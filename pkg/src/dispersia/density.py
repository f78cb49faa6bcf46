"""
Rigid charge distributions as finite signed point measures.

A molecule is a list of points (atomic units) carrying signed charges.
Continuous electron clouds enter through a quadrature the caller performs,
so every integral against the density becomes a finite weighted sum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rotations import check_rotation

E1 = np.array([1.0, 0.0, 0.0])


class DomainError(ValueError):
    """Input outside the domain of an operation (e.g. non-positive separation)."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChargeDensity:
    """Finite signed point measure on R^3.

    Attributes
    ----------
    points : (n, 3) array
    weights : (n,) array
        Signed charges in elementary-charge units.
    label : str
    """

    points: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.ndim == 1 and points.size == 3:
            points = points.reshape(1, 3)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {points.shape}")
        if weights.ndim != 1 or len(weights) != len(points):
            raise ValueError(
                f"length mismatch: {len(points)} points but {weights.size} weights"
            )
        if len(points) == 0:
            raise ValueError("a density needs at least one point")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(weights)):
            raise ValueError("points and weights must be finite")
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "weights", _frozen(weights))

    def __len__(self):
        return len(self.weights)

    @property
    def radius(self):
        """Largest distance of a support point from the origin."""
        return float(np.max(np.linalg.norm(self.points, axis=1)))


@dataclass(frozen=True, eq=False)
class Configuration:
    """Relative placement ``tau = (L, U, V)`` of two rigid molecules.

    Molecule 1 is rotated by ``U`` about the origin; molecule 2 is rotated by
    ``V`` and translated to ``L * e1``.
    """

    L: float
    U: np.ndarray = field(default_factory=lambda: np.eye(3))
    V: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        L = float(self.L)
        if not (L > 0.0) or not math.isfinite(L):
            raise DomainError(f"separation must be positive and finite, got {self.L!r}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "U", _frozen(check_rotation(self.U)))
        object.__setattr__(self, "V", _frozen(check_rotation(self.V)))

    def with_L(self, L):
        return Configuration(L, self.U, self.V)


def total_charge(rho):
    """Sum of the weights, correctly rounded (order independent)."""
    return math.fsum(rho.weights)


def rotate_density(U, rho):
    """Push-forward of ``rho`` under the rotation ``U``."""
    U = check_rotation(U)
    return ChargeDensity(rho.points @ U.T, rho.weights, rho.label)


def place_pair(rho1, rho2, tau):
    """Union of ``U rho1`` and ``V rho2 + L e1``: the point set of ``Y(tau)``."""
    if not isinstance(tau, Configuration):
        raise TypeError("tau must be a Configuration")
    p1 = rho1.points @ tau.U.T
    p2 = rho2.points @ tau.V.T + tau.L * E1
    return ChargeDensity(
        np.vstack([p1, p2]),
        np.concatenate([rho1.weights, rho2.weights]),
        f"{rho1.label}+{rho2.label}",
    )


# --- ready-made fixtures -----------------------------------------------------

def dipole_pair(moment=(1.0, 0.0, 0.0), label="dipole"):
    """Charges +1 at m/2 and -1 at -m/2, so the dipole moment is ``m``."""
    m = np.asarray(moment, dtype=float)
    return ChargeDensity([0.5 * m, -0.5 * m], [1.0, -1.0], label)


def linear_quadrupole(a=1.0, label="linear-quadrupole"):
    """+1 at +-a e3 and -1 at +-a/2 e3: neutral and dipole-free."""
    e3 = np.array([0.0, 0.0, 1.0])
    return ChargeDensity(
        [a * e3, -a * e3, 0.5 * a * e3, -0.5 * a * e3], [1.0, 1.0, -1.0, -1.0], label
    )


def cube_octupole(a=1.0, label="cube-octupole"):
    """Cube corners with charge sign(xyz); first non-vanishing moment is the octupole."""
    corners = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], float)
    return ChargeDensity(a * corners, np.prod(corners, axis=1), label)


def hexagon_octupole(a=1.0, label="hexagon-octupole"):
    """Alternating charges on a planar hexagon.

    The octupole is proportional to Re (x + iy)^3, which has no z dependence,
    so its contraction with e3 vanishes identically.
    """
    phi = np.arange(6) * np.pi / 3.0
    pts = a * np.column_stack([np.cos(phi), np.sin(phi), np.zeros(6)])
    return ChargeDensity(pts, (-1.0) ** np.arange(6), label)


def random_neutral_density(n_points, rng, scale=1.0, label="random"):
    """Random neutral density: weights are centred so they sum to zero."""
    pts = rng.uniform(-scale, scale, size=(n_points, 3))
    w = rng.standard_normal(n_points)
    w -= w.mean()
    return ChargeDensity(pts, w, label)


def random_quadrupolar_density(n_pairs, rng, scale=1.0, label="random-quadrupole"):
    """Inversion-symmetric neutral density: generic quadrupole, no dipole."""
    x = rng.uniform(-scale, scale, size=(n_pairs, 3))
    w = rng.standard_normal(n_pairs)
    w -= w.mean()
    return ChargeDensity(np.vstack([x, -x]), np.concatenate([w, w]), label)


def random_octupolar_density(rng, n_pairs=4, scale=1.0, label="random-octupole"):
    """Odd-parity density with the dipole projected out: generic octupole."""
    x = rng.uniform(-scale, scale, size=(n_pairs, 3))
    # weights in the null space of the dipole map w -> sum_i 2 w_i x_i
    _, _, vt = np.linalg.svd(x.T)
    w = vt[-1] * n_pairs
    return ChargeDensity(np.vstack([x, -x]), np.concatenate([w, -w]), label)
