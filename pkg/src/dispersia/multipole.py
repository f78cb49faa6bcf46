"""
Cartesian multipole tensors and multipolar interaction coefficients.

Derivatives of the Coulomb kernel are carried symbolically: every
``d/dx_j`` of ``P(x) / |x|^k`` produces ``(dP/dx_j) / |x|^k - k x_j P / |x|^(k+2)``,
with integer coefficients throughout. Multiplying the order-n result by
``|x|^(2n+1)`` gives the polynomial that defines the moment tensor, and
evaluating at ``e1`` gives exact Coulomb derivative tensors.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .density import DomainError, total_charge

MAX_ORDER = 4
MAX_DERIVATIVE_ORDER = 8
DEFAULT_TOL = 1e-9


class SingularityError(ValueError):
    """A Coulomb derivative was requested at the origin."""


@lru_cache(maxsize=None)
def _kernel_derivative(index):
    """Terms ``{(k, exponents): coeff}`` of d^index (1/|x|) = sum coeff x^e / |x|^k."""
    terms = {(1, (0, 0, 0)): 1}
    for j in index:
        new = {}
        for (k, e), c in terms.items():
            if e[j]:
                e_down = e[:j] + (e[j] - 1,) + e[j + 1:]
                key = (k, e_down)
                new[key] = new.get(key, 0) + c * e[j]
            e_up = e[:j] + (e[j] + 1,) + e[j + 1:]
            key = (k + 2, e_up)
            new[key] = new.get(key, 0) - c * k
        terms = {key: c for key, c in new.items() if c != 0}
    return tuple(sorted(terms.items()))


def sorted_indices(order):
    """Sorted multi-indices ``i1 <= ... <= in`` with entries in {0, 1, 2}."""
    return list(itertools.combinations_with_replacement(range(3), order))


def index_key(index):
    """JSON key of a multi-index, 1-based: (0, 0, 2) -> "113"."""
    return "".join(str(i + 1) for i in index)


@dataclass(frozen=True)
class MultipoleTensor:
    """Symmetric Cartesian tensor stored on sorted multi-indices (0-based)."""

    order: int
    entries: dict

    def full(self):
        """Dense ``(3,)*order`` array."""
        T = np.empty((3,) * self.order)
        for idx in itertools.product(range(3), repeat=self.order):
            T[idx] = self.entries[tuple(sorted(idx))]
        return T

    def __call__(self, *vectors):
        """Multilinear evaluation ``M(h1, ..., hn)``."""
        if len(vectors) != self.order:
            raise ValueError(f"expected {self.order} vectors")
        T = self.full()
        for h in vectors:
            T = np.tensordot(np.asarray(h, float), T, axes=(0, 0))
        return float(T)

    def max_norm(self):
        return max(abs(v) for v in self.entries.values())

    def to_json(self):
        return {
            "order": self.order,
            "entries": {index_key(i): float(v) for i, v in sorted(self.entries.items())},
        }


CoulombDerivativeTensor = MultipoleTensor


def _moment_polynomial(index, points):
    """``|x|^(2n+1) d^index (1/|x|)`` evaluated at each point."""
    n = len(index)
    r2 = np.einsum("ij,ij->i", points, points)
    vals = np.zeros(len(points))
    for (k, e), c in _kernel_derivative(tuple(index)):
        # 2n+1-k is even and non-negative for every term
        power = (2 * n + 1 - k) // 2
        mono = points[:, 0] ** e[0] * points[:, 1] ** e[1] * points[:, 2] ** e[2]
        vals += c * mono * r2**power
    return vals


def multipole_moment(rho, n):
    """Order-n moment tensor ``M^(n)`` of a point density.

    ``M^(n)(h1..hn) = (-1)^n / n! * sum_x w |x|^(2n+1) [(h1.grad)..(hn.grad) 1/|x|](x)``.
    """
    if not 0 <= n <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}")
    if n == 0:
        return MultipoleTensor(0, {(): total_charge(rho)})
    at_origin = np.all(rho.points == 0.0, axis=1) & (rho.weights != 0.0)
    if np.any(at_origin):
        raise SingularityError("charge at the origin: Coulomb derivatives undefined there")
    prefactor = (-1) ** n / math.factorial(n)
    entries = {}
    for idx in sorted_indices(n):
        vals = _moment_polynomial(idx, rho.points)
        entries[idx] = prefactor * math.fsum(rho.weights * vals)
    return MultipoleTensor(n, entries)


def coulomb_derivatives(order):
    """Exact partial derivatives of ``1/|x|`` at ``x = e1`` (|e1| = 1 so only monomials x1^a survive)."""
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"order must be in 0..{MAX_DERIVATIVE_ORDER}")
    entries = {}
    for idx in sorted_indices(order):
        entries[idx] = float(sum(c for (k, e), c in _kernel_derivative(idx) if e[1] == 0 and e[2] == 0))
    return MultipoleTensor(order, entries)


def _double_factorial_odd(n):
    """prod_{i=1}^n (2i - 1)."""
    return math.prod(2 * i - 1 for i in range(1, n + 1))


def interaction_prefactor(n, m):
    """Scalar in front of the tensor contraction of ``F^(n,m)``.

    The sign follows the order of the first (origin) molecule, which is what the
    Taylor expansion of ``1/|L e1 + Vy - Ux|`` produces.
    """
    return (-1) ** n / (_double_factorial_odd(n) * _double_factorial_odd(m))


@lru_cache(maxsize=None)
def _coulomb_matrix(n, m):
    D = coulomb_derivatives(n + m).full() if n + m else np.ones(())
    return D.reshape(3**n, 3**m)


def interaction_from_tensors(T1, T2, n, m):
    """``F^(n,m)`` from dense moment tensors of the two (already rotated) densities."""
    D = _coulomb_matrix(n, m)
    a = np.asarray(T1, float).reshape(3**n)
    b = np.asarray(T2, float).reshape(3**m)
    return interaction_prefactor(n, m) * float(a @ D @ b)


def interaction_coefficient(n, m, rho1, rho2):
    """Multipolar interaction ``F^(n,m)(rho1, rho2)``."""
    if n < 0 or m < 0 or n + m > 5:
        raise ValueError("need n, m >= 0 and n + m <= 5")
    T1 = multipole_moment(rho1, n).full()
    T2 = multipole_moment(rho2, m).full()
    return interaction_from_tensors(T1, T2, n, m)


def rotate_tensor(T, R):
    """Tensor of the rotated density: every index transformed by ``R``.

    ``R`` may be a single ``(3, 3)`` matrix or a batch ``(N, 3, 3)``; the
    batch axis is then prepended to the result.
    """
    T = np.asarray(T, float)
    R = np.asarray(R, float)
    n = T.ndim
    if R.ndim == 2:
        for axis in range(n):
            T = np.moveaxis(np.tensordot(R, T, axes=(1, axis)), 0, axis)
        return T
    N = len(R)
    out = np.broadcast_to(T.reshape(1, -1, 3) if n else T.reshape(1, 1, 1), (N, 3 ** max(n - 1, 0), 3 if n else 1))
    Rt = R.transpose(0, 2, 1)
    for _ in range(n):
        # rotate the last index and move it to the front: after n passes
        # every index is rotated and the original order is restored
        out = np.ascontiguousarray((out @ Rt).transpose(0, 2, 1)).reshape(N, -1, 3)
    return out.reshape((N,) + T.shape)


class MultipolarInteraction:
    """``(U, V) -> F^(n,m)(U rho1, V rho2)`` with the moment tensors computed once.

    Also accepts batches ``U, V`` of shape ``(N, 3, 3)``.
    """

    supports_batch = True

    def __init__(self, rho1, rho2, n, m):
        if n < 0 or m < 0 or n + m > 5:
            raise ValueError("need n, m >= 0 and n + m <= 5")
        self.n, self.m = n, m
        self.T1 = multipole_moment(rho1, n).full()
        self.T2 = multipole_moment(rho2, m).full()
        self.scale = float(np.linalg.norm(self.T1) * np.linalg.norm(self.T2))
        self._D = _coulomb_matrix(n, m) * interaction_prefactor(n, m)

    def __call__(self, U, V):
        U = np.asarray(U, float)
        a = rotate_tensor(self.T1, U)
        b = rotate_tensor(self.T2, V)
        if U.ndim == 2:
            return float(a.reshape(-1) @ self._D @ b.reshape(-1))
        N = len(U)
        return np.einsum("ni,ij,nj->n", a.reshape(N, -1), self._D, b.reshape(N, -1))


def first_nonvanishing_order(rho, tol=DEFAULT_TOL):
    """Smallest ``n`` in 1..4 with a non-negligible ``M^(n)``, or ``None``.

    Vanishing is judged against ``tol * sum|w| * radius^n`` so the test does
    not depend on units of length or charge.
    """
    mass = math.fsum(np.abs(rho.weights))
    if abs(total_charge(rho)) > tol * mass:
        raise DomainError("first non-vanishing order is defined for neutral densities only")
    scale = rho.radius
    for n in range(1, MAX_ORDER + 1):
        if multipole_moment(rho, n).max_norm() > tol * mass * scale**n:
            return n
    return None


def octupole_nondegeneracy(T3):
    """Smallest singular value of ``v -> M^(3)(v, ., .)`` relative to the largest."""
    s = np.linalg.svd(np.asarray(T3, float).reshape(3, 9).T, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def moment_norm(rho, n):
    """Frobenius norm of the dense order-n tensor."""
    return float(np.linalg.norm(multipole_moment(rho, n).full()))


