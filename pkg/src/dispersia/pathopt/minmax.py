"""
String-of-nodes relaxation of the maximal energy along a path between two minima.
"""

from dataclasses import dataclass, field

import numpy as np

from ..density import Configuration
from ..rotations import exp_map, generator_basis, geodesic_batch
from .descent import pseudo_min_criterion
from .path import ANGLE_LIMIT, PathOnConfigSpace, energies, path_max


class PreconditionError(ValueError):
    pass


@dataclass
class MinMaxResult:
    level: float
    argmax_t: float
    path: PathOnConfigSpace
    iterations: int
    converged: bool
    history: list = field(default_factory=list)

    def to_json(self):
        return {
            "level": self.level,
            "argmax_t": self.argmax_t,
            "iterations": self.iterations,
            "converged": self.converged,
            "history": [float(h) for h in self.history],
            "path": self.path.to_json(),
        }


def _L_derivatives(surface, tau, h=1e-4):
    E = lambda L: surface.energy(L, tau.U, tau.V)
    if tau.L - 2 * h >= surface.L_min:
        d1 = (E(tau.L - 2 * h) - 8 * E(tau.L - h) + 8 * E(tau.L + h) - E(tau.L + 2 * h)) / (12 * h)
        d2 = (E(tau.L + h) - 2 * E(tau.L) + E(tau.L - h)) / h**2
        return d1, d2, False
    # at the lower boundary only the one-sided slope matters
    d1 = (-3 * E(tau.L) + 4 * E(tau.L + h) - E(tau.L + 2 * h)) / (2 * h)
    return d1, None, True


def check_local_minimum(surface, tau, delta=1e-6, seed=0, h=1e-4):
    """Certify ``tau`` as a local minimum: rotational pseudo-min criterion plus the L direction.

    A point on the boundary ``L = L_min`` qualifies when the energy does not
    decrease towards larger ``L``. The finite-difference step is smaller than
    the default so that the error estimate resolves ``delta = 1e-6``.
    """
    report = pseudo_min_criterion(surface.at_L(tau.L), tau.U, tau.V, delta, seed=seed, h=h)
    d1, d2, boundary = _L_derivatives(surface, tau)
    if boundary:
        ok_L = d1 >= -delta
    else:
        ok_L = abs(d1) <= delta and d2 >= -delta
    if not (report.passed and ok_L):
        raise PreconditionError(
            f"endpoint is not a local minimum (|grad| {report.first_derivative_max:.2e}, "
            f"min curvature {report.second_derivative_min:.2e}, dE/dL {d1:.2e})"
        )
    return report


_STEP_CACHE = {}


def _step_rotations(step):
    """``exp(+-step E_k)`` for the three axis generators, ordered (axis 0 +, axis 0 -, axis 1 +, ...)."""
    if step not in _STEP_CACHE:
        mats = []
        for A, _ in generator_basis()[:3]:
            for sgn in (1.0, -1.0):
                mats.append(exp_map(A, sgn * step))
        _STEP_CACHE[step] = np.array(mats)
    return _STEP_CACHE[step]


def _candidates(L, U, V, step, L_scale, L_min):
    """Moved copies of one node as arrays.

    Order: +- each generator acting on ``U``, then on ``V``, then +- ``L``;
    a move in ``L`` below ``L_min`` is dropped.
    """
    G = _step_rotations(step)
    Ls = [np.full(12, L)]
    Us = [G @ U, np.broadcast_to(U, (6, 3, 3))]
    Vs = [np.broadcast_to(V, (6, 3, 3)), G @ V]
    for sgn in (1.0, -1.0):
        L_new = L + sgn * step * L_scale
        if L_new >= L_min:
            Ls.append([L_new]), Us.append(U[None]), Vs.append(V[None])
    return np.concatenate(Ls), np.concatenate(Us), np.concatenate(Vs)


def _angles(R0, R1):
    tr = np.einsum("...ij,...ij->...", R0, R1)
    return np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))


class _String:
    """Node arrays of a piecewise geodesic path and the sampled maximum on each segment."""

    def __init__(self, surface, nodes, samples):
        self.surface = surface
        self.L = np.array([n.L for n in nodes])
        self.U = np.array([n.U for n in nodes])
        self.V = np.array([n.V for n in nodes])
        self.s = np.linspace(0.0, 1.0, samples + 1)
        self.seg_max = self._seg_max(self.L[:-1], self.L[1:], self.U[:-1], self.U[1:], self.V[:-1], self.V[1:])

    def _seg_max(self, L0, L1, U0, U1, V0, V1):
        """Sampled maximum of each of a stack of segments."""
        K, S = len(L0), len(self.s)
        L = (L0[:, None] + self.s[None, :] * (L1 - L0)[:, None]).ravel()
        U = geodesic_batch(U0, U1, self.s).reshape(K * S, 3, 3)
        V = geodesic_batch(V0, V1, self.s).reshape(K * S, 3, 3)
        return energies(self.surface, L, U, V).reshape(K, S).max(axis=1)

    def batch_local_max(self, i, L, U, V):
        """For candidate replacements of node ``i``, the max over both adjacent segments."""
        K = len(L)
        rep = lambda a, j: np.broadcast_to(a[j], (K,) + a.shape[1:])
        left = self._seg_max(rep(self.L, i - 1), L, rep(self.U, i - 1), U, rep(self.V, i - 1), V)
        right = self._seg_max(L, rep(self.L, i + 1), U, rep(self.U, i + 1), V, rep(self.V, i + 1))
        return np.maximum(left, right)

    def joinable(self, i, U, V):
        ok = np.ones(len(U), dtype=bool)
        for j in (i - 1, i + 1):
            ok &= (_angles(self.U[j], U) < ANGLE_LIMIT) & (_angles(self.V[j], V) < ANGLE_LIMIT)
        return ok

    @property
    def level(self):
        return float(np.max(self.seg_max))

    def replace(self, i, L, U, V):
        self.L[i], self.U[i], self.V[i] = L, U, V
        sl = slice(i - 1, i + 2)
        self.seg_max[i - 1:i + 1] = self._seg_max(self.L[sl][:-1], self.L[sl][1:], self.U[sl][:-1],
                                                  self.U[sl][1:], self.V[sl][:-1], self.V[sl][1:])

    def nodes(self):
        return [Configuration(L, U, V) for L, U, V in zip(self.L, self.U, self.V)]


def minmax_optimize(surface, tau0, tau1, nodes=32, seed=0, samples_per_segment=8, step0=0.1,
                    min_step=1e-5, L_scale=1.0, max_moves=100_000, initial_path=None,
                    check_endpoints=True, endpoint_delta=1e-6):
    """Lower the maximal energy of a path from ``tau0`` to ``tau1`` by moving nodes.

    Each move targets the segment carrying the current maximum and tries, for
    each of its movable end nodes, the 14 candidate moves (six generator
    directions and ``L``, both signs) at that node's current step. The
    candidate with the smallest new local maximum is taken if it is strictly
    below the old one; otherwise the node's step is halved. A sweep ends after
    one attempt per interior node, after which nodes are redistributed to equal
    arclength if that does not raise the level. The level is therefore
    nonincreasing from sweep to sweep. Relaxation stops when neither node of
    the maximal segment has a step of at least ``min_step`` left and a restart
    of all steps brings no further decrease.

    ``seed`` only feeds the endpoint certification; the relaxation itself is
    deterministic.
    """
    if check_endpoints:
        for tau in (tau0, tau1):
            check_local_minimum(surface, tau, endpoint_delta, seed=seed)
    path = initial_path if initial_path is not None else PathOnConfigSpace.geodesic(tau0, tau1, nodes)
    string = _String(surface, path.nodes, samples_per_segment)
    N = len(string.L)
    steps = np.full(N, float(step0))
    history = [string.level]
    moves, converged = 0, False
    level_at_reset = np.inf
    while moves < max_moves and not converged:
        for _ in range(max(N - 2, 1)):
            j = int(np.argmax(string.seg_max))
            movable = [i for i in (j, j + 1) if 0 < i < N - 1 and steps[i] >= min_step]
            if not movable:
                # steps shrink while neighbours still move; restart the ladder until a
                # full round brings no progress
                if string.level < level_at_reset:
                    level_at_reset = string.level
                    steps[:] = step0
                    continue
                converged = True
                break
            i = movable[0]
            local_old = max(string.seg_max[i - 1], string.seg_max[i])
            cL, cU, cV = _candidates(string.L[i], string.U[i], string.V[i], steps[i], L_scale, surface.L_min)
            keep = string.joinable(i, cU, cV)
            cL, cU, cV = cL[keep], cU[keep], cV[keep]
            vals = string.batch_local_max(i, cL, cU, cV) if len(cL) else np.array([])
            best = int(np.argmin(vals)) if len(vals) else None
            if best is not None and vals[best] < local_old:
                string.replace(i, cL[best], cU[best], cV[best])
                steps[i] = min(2.0 * steps[i], step0)
                moves += 1
            else:
                steps[i] /= 2.0
            if moves >= max_moves:
                break
        trial = _String(surface, PathOnConfigSpace(string.nodes()).reparametrized(L_scale).nodes, samples_per_segment)
        if trial.level <= string.level:
            string = trial
        if string.level > history[-1]:
            raise AssertionError("path maximum increased during a sweep")
        history.append(string.level)
    final = PathOnConfigSpace(string.nodes())
    level, t = path_max(surface, final, samples_per_segment=2 * samples_per_segment)
    return MinMaxResult(level, t, final, moves, converged, history)
