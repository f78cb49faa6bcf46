"""
Asymptotic interaction energy surface and finite-dimensional quantum toy models.

The surface is the leading-order model

    E(L, U, V) = E_inf + sum_{(n,m)} F^(n,m)(U rho1, V rho2) / L^(n+m+1) - C_vdW(U, V) / L^6

and the dispersion coefficient ``C_vdW`` is the second-order resolvent form of
the dipole-dipole coupling evaluated on the ground space of two toy molecules.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .density import DomainError
from .multipole import MultipolarInteraction
from .rotations import check_rotation

HERMITIAN_TOL = 1e-12
GAP_TOL = 1e-10

# dipole-dipole coupling tensor delta_ij - 3 delta_i1 delta_j1
COUPLING = np.diag([-2.0, 1.0, 1.0])


class DegenerateThresholdError(ValueError):
    """No spectral gap between the ground space and the rest of the spectrum."""


class ConditioningError(ValueError):
    """``H_perp - E`` is numerically singular."""


class BracketError(ValueError):
    """No fixed point of the Feshbach equation in the admissible bracket."""


def _hermitian(H, name="matrix"):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"{name} must be square")
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError(f"{name} is not Hermitian")
    return H


def range_basis(P, tol=0.5):
    """Orthonormal bases ``(Q, Q_perp)`` of the range and kernel of a projector."""
    P = _hermitian(P, "projector")
    w, vecs = np.linalg.eigh(P)
    if np.max(np.abs(w * (1.0 - w))) > 1e-8:
        raise ValueError("P is not an orthogonal projector")
    return vecs[:, w > tol], vecs[:, w <= tol]


@dataclass(frozen=True, eq=False)
class ToyMolecule:
    """A molecule reduced to a Hermitian matrix and three dipole operators.

    Attributes
    ----------
    hamiltonian : (d, d) array
    dipole_ops : (3, d, d) array
        Instantaneous dipole components ``D_x, D_y, D_z``.
    ground_energy : float
    ground_projector : (d, d) array
        Projector on the eigenspace of the lowest eigenvalue.
    """

    hamiltonian: np.ndarray
    dipole_ops: np.ndarray
    ground_energy: float
    ground_projector: np.ndarray

    @classmethod
    def from_hamiltonian(cls, H, dipole_ops, degeneracy_tol=1e-9):
        H = _hermitian(H, "hamiltonian")
        D = np.asarray(dipole_ops)
        if D.shape != (3,) + H.shape:
            raise ValueError(f"dipole_ops must have shape {(3,) + H.shape}")
        for k in range(3):
            _hermitian(D[k], "dipole operator")
        w, vecs = np.linalg.eigh(H)
        ground = vecs[:, w <= w[0] + degeneracy_tol]
        return cls(H, D, float(w[0]), ground @ ground.conj().T)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def rotated_dipoles(self, U):
        """``(U D)_i = sum_j U_ij D_j``."""
        return np.einsum("ij,jab->iab", check_rotation(U), self.dipole_ops)

    def to_json(self):
        def enc(M):
            M = np.asarray(M, complex)
            return [[[float(z.real), float(z.imag)] for z in row] for row in M]

        return {
            "H": enc(self.hamiltonian),
            "Dx": enc(self.dipole_ops[0]),
            "Dy": enc(self.dipole_ops[1]),
            "Dz": enc(self.dipole_ops[2]),
        }


def drude_oscillator(omega=1.0, levels=2):
    """Isotropic 3D harmonic oscillator truncated to ``levels`` per axis.

    A unit charge on a unit mass: position operator ``(a + a^dagger)/sqrt(2 omega)``
    on each axis, Hamiltonian ``omega (n + 1/2)`` per axis.
    """
    n = np.arange(levels)
    h1 = np.diag(omega * (n + 0.5))
    a = np.diag(np.sqrt(n[1:]), 1)
    x1 = (a + a.T) / np.sqrt(2.0 * omega)
    eye = np.eye(levels)
    H = (np.kron(np.kron(h1, eye), eye) + np.kron(np.kron(eye, h1), eye)
         + np.kron(np.kron(eye, eye), h1))
    D = np.array([
        np.kron(np.kron(x1, eye), eye),
        np.kron(np.kron(eye, x1), eye),
        np.kron(np.kron(eye, eye), x1),
    ])
    return ToyMolecule.from_hamiltonian(H, D)


def random_hermitian(dim, rng, complex_entries=True):
    A = rng.standard_normal((dim, dim))
    if complex_entries:
        A = A + 1j * rng.standard_normal((dim, dim))
    return (A + A.conj().T) / 2.0


def random_toy_molecule(dim, rng, ground_degeneracy=1):
    """Random Hermitian toy model with a prescribed ground degeneracy and a gap >= 0.5."""
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    levels = np.concatenate([
        np.zeros(ground_degeneracy),
        0.5 + np.sort(rng.uniform(0.0, 2.0, dim - ground_degeneracy)),
    ])
    H = (Q * levels) @ Q.conj().T
    H = (H + H.conj().T) / 2.0
    D = np.array([random_hermitian(dim, rng) for _ in range(3)])
    return ToyMolecule.from_hamiltonian(H, D)


def dipole_interaction_operator(mol1, mol2, U, V):
    """``f_(U,V) = sum_ij (delta_ij - 3 delta_i1 delta_j1) (U D1)_i (x) (V D2)_j``."""
    A = mol1.rotated_dipoles(U)
    B = mol2.rotated_dipoles(V)
    f = np.zeros((mol1.dim * mol2.dim,) * 2, dtype=np.result_type(A, B))
    for i in range(3):
        f = f + COUPLING[i, i] * np.kron(A[i], B[i])
    return f


def _pair_spaces(mol1, mol2):
    d1, d2 = mol1.dim, mol2.dim
    H_inf = np.kron(mol1.hamiltonian, np.eye(d2)) + np.kron(np.eye(d1), mol2.hamiltonian)
    Pi = np.kron(mol1.ground_projector, mol2.ground_projector)
    Qg, Qp = range_basis(Pi)
    return H_inf, Qg, Qp, mol1.ground_energy + mol2.ground_energy


def vdw_coefficient(mol1, mol2, U, V):
    """Van der Waals coefficient and a maximizing normalized ground state.

    The resolvent ``(H_perp - E1 - E2)^-1`` is applied by a dense solve in an
    orthonormal basis of the orthogonal complement of the product ground space.

    Returns
    -------
    C : float
    phi : (d1*d2,) array
    """
    H_inf, Qg, Qp, E0 = _pair_spaces(mol1, mol2)
    if Qp.shape[1] == 0:
        # no excited states: the resolvent acts on the zero space
        return 0.0, Qg[:, 0]
    Hp = Qp.conj().T @ H_inf @ Qp
    gap = np.linalg.eigvalsh(Hp)[0] - E0
    if gap <= GAP_TOL:
        raise DegenerateThresholdError(f"spectral gap {gap:.3e} above the ground space is not positive")
    f = dipole_interaction_operator(mol1, mol2, U, V)
    X = Qp.conj().T @ f @ Qg
    Y = np.linalg.solve(Hp - E0 * np.eye(len(Hp)), X)
    form = X.conj().T @ Y
    form = (form + form.conj().T) / 2.0
    w, c = np.linalg.eigh(form)
    return float(w[-1]), Qg @ c[:, -1]


def vdw_by_diagonalization(mol1, mol2, U, V, L_values):
    """Dispersion coefficients read off exact ground-energy shifts.

    For each ``L`` diagonalizes ``H_inf + f/L^3`` and returns
    ``-(E_0(L) - E1 - E2) L^6``. Only meaningful when the first-order shift
    vanishes, as for the Drude pair.
    """
    H_inf, _, _, E0 = _pair_spaces(mol1, mol2)
    f = dipole_interaction_operator(mol1, mol2, U, V)
    shifted = H_inf - E0 * np.eye(len(H_inf))
    out = []
    for L in L_values:
        e0 = np.linalg.eigvalsh(shifted + f / L**3)[0]
        out.append(-e0 * L**6)
    return np.array(out)


# --- Feshbach map -------------------------------------------------------------

def feshbach_map(H, P, E):
    """``F_P(E) = PHP - PHP_perp (H_perp - E)^-1 P_perp H P`` in a basis of ran P."""
    H = _hermitian(H)
    Q, Qp = range_basis(P)
    return _feshbach(H, Q, Qp, E)


def _feshbach(H, Q, Qp, E):
    A = Q.conj().T @ H @ Q
    if Qp.shape[1] == 0:
        return A
    B = Q.conj().T @ H @ Qp
    Hp = Qp.conj().T @ H @ Qp - E * np.eye(Qp.shape[1])
    smin = np.linalg.svd(Hp, compute_uv=False)[-1]
    if smin <= GAP_TOL:
        raise ConditioningError(f"H_perp - E is near singular (smallest singular value {smin:.3e})")
    F = A - B @ np.linalg.solve(Hp, B.conj().T)
    return (F + F.conj().T) / 2.0


def ground_state_energy_fixed_point(H, P, xtol=1e-14):
    """Solve ``E = min spec F_P(E)`` below ``min spec H_perp``.

    ``E -> min spec F_P(E) - E`` is strictly decreasing on that half line and
    positive far below the spectrum, so a root exists iff it is negative just
    below the threshold.
    """
    H = _hermitian(H)
    Q, Qp = range_basis(P)
    if Q.shape[1] == 0:
        raise ValueError("P must be nonzero")
    upper = np.linalg.eigvalsh(Qp.conj().T @ H @ Qp)[0] if Qp.shape[1] else np.inf
    lower = -np.linalg.norm(H, 2) - 1.0

    def g(E):
        return np.linalg.eigvalsh(_feshbach(H, Q, Qp, E))[0] - E

    if not np.isfinite(upper):
        return float(np.linalg.eigvalsh(Q.conj().T @ H @ Q)[0])
    hi = upper - 10 * GAP_TOL * max(1.0, abs(upper))
    if hi <= lower or g(hi) > 0.0:
        raise BracketError("no fixed point below the spectrum of H_perp")
    return float(brentq(g, lower, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))


# --- energy surfaces ----------------------------------------------------------

@dataclass(eq=False)
class EnergySurface:
    """Surrogate interaction energy over configurations ``(L, U, V)``.

    Parameters
    ----------
    rho1, rho2 : ChargeDensity
    E_infinity : float
    vdw : float or (ToyMolecule, ToyMolecule)
        Constant dispersion coefficient, or a toy pair evaluated per (U, V).
    orders : iterable of (n, m)
        Multipolar terms kept, each with ``2 <= n + m <= 5``.
    L_min : float
    """

    rho1: object
    rho2: object
    E_infinity: float = 0.0
    vdw: object = 0.0
    orders: tuple = ((1, 1),)
    L_min: float = 1.0
    _terms: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.orders = tuple(sorted(tuple(int(k) for k in nm) for nm in self.orders))
        for n, m in self.orders:
            if not 2 <= n + m <= 5:
                raise ValueError(f"order {(n, m)} outside 2 <= n+m <= 5")
        if not self.L_min > 0:
            raise DomainError("L_min must be positive")
        self._terms = {nm: MultipolarInteraction(self.rho1, self.rho2, *nm) for nm in self.orders}

    def multipolar(self, n, m):
        """The interaction function ``(U, V) -> F^(n,m)`` of this surface."""
        return self._terms.get((n, m)) or MultipolarInteraction(self.rho1, self.rho2, n, m)

    def C_vdw(self, U, V):
        if isinstance(self.vdw, (tuple, list)):
            return vdw_coefficient(self.vdw[0], self.vdw[1], U, V)[0]
        return float(self.vdw)

    def energy(self, L, U, V):
        L = float(L)
        if not L >= self.L_min:
            raise DomainError(f"L = {L!r} below L_min = {self.L_min!r}")
        vals = [self._terms[nm](U, V) / L ** (sum(nm) + 1) for nm in self.orders]
        vals.append(-self.C_vdw(U, V) / L**6)
        return self.E_infinity + math.fsum(vals)

    def energy_batch(self, L, U, V):
        """Vectorized :meth:`energy` over arrays ``L (N,)``, ``U, V (N, 3, 3)``."""
        L = np.asarray(L, dtype=float)
        if np.any(~(L >= self.L_min)):
            raise DomainError(f"L below L_min = {self.L_min!r}")
        total = np.full(L.shape, float(self.E_infinity))
        for nm in self.orders:
            total += self._terms[nm](U, V) / L ** (sum(nm) + 1)
        if isinstance(self.vdw, (tuple, list)):
            C = np.array([self.C_vdw(u, v) for u, v in zip(U, V)])
        else:
            C = float(self.vdw)
        return total - C / L**6

    def __call__(self, tau):
        return self.energy(tau.L, tau.U, tau.V)

    def at_L(self, L):
        """Restriction to fixed separation, a function on SO(3) x SO(3)."""
        return FixedSeparation(self, L)

    def leading_order(self):
        """Smallest ``n + m`` among kept terms with nonzero moments, or None."""
        live = [sum(nm) for nm in self.orders if self._terms[nm].scale > 0.0]
        return min(live) if live else None

    def leading_interaction(self):
        """Sum of the kept terms of leading total order, as a function of ``(U, V)``."""
        k = self.leading_order()
        if k is None:
            return None
        return InteractionSum([self._terms[nm] for nm in self.orders
                               if sum(nm) == k and self._terms[nm].scale > 0.0])

    def term_bounds(self):
        """``{(n, m): bound}`` with ``|F^(n,m)(U, V)| <= bound`` for all rotations."""
        return {nm: float(np.linalg.norm(t._D, 2) * t.scale) for nm, t in self._terms.items()}


def surface_energy(surface, tau):
    return surface(tau)


class FunctionSurface:
    """Surface given by an arbitrary callable ``energy(L, U, V)``.

    Used for toy landscapes with a known min-max level.
    """

    def __init__(self, func, L_min=0.0, E_infinity=0.0, vectorized=False):
        self.func = func
        self.L_min = L_min
        self.E_infinity = E_infinity
        self.vectorized = vectorized

    def energy(self, L, U, V):
        if not L >= self.L_min:
            raise DomainError(f"L = {L!r} below L_min = {self.L_min!r}")
        return float(self.func(L, U, V))

    def energy_batch(self, L, U, V):
        L = np.asarray(L, dtype=float)
        if np.any(~(L >= self.L_min)):
            raise DomainError(f"L below L_min = {self.L_min!r}")
        if self.vectorized:
            return np.asarray(self.func(L, U, V), dtype=float)
        return np.array([self.func(*args) for args in zip(L, U, V)], dtype=float)

    def __call__(self, tau):
        return self.energy(tau.L, tau.U, tau.V)

    def at_L(self, L):
        return FixedSeparation(self, L)

    def leading_order(self):
        return None

    def leading_interaction(self):
        return None


class FixedSeparation:
    """``(U, V) -> E(L, U, V)`` at a frozen ``L``; accepts single pairs or stacks."""

    supports_batch = True

    def __init__(self, surface, L):
        self.surface = surface
        self.L = float(L)

    def __call__(self, U, V):
        U = np.asarray(U, dtype=float)
        if U.ndim == 2:
            return self.surface.energy(self.L, U, V)
        return self.surface.energy_batch(np.full(len(U), self.L), U, V)


class InteractionSum:
    """Pointwise sum of multipolar interaction functions."""

    supports_batch = True

    def __init__(self, terms):
        self.terms = list(terms)
        self.scale = float(sum(t.scale for t in self.terms))

    def __call__(self, U, V):
        return sum(t(U, V) for t in self.terms)
