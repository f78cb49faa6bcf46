"""
Replacing the far part of a path by a detour at bounded separation.

Where a path leaves the ball ``L <= L_cut``, both crossing configurations are
pushed down to local pseudo-minima at fixed ``L_cut``, and the two
pseudo-minima are joined through the sublevel set of the leading multipolar
interaction, where the energy sits below its value at infinity.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..density import Configuration, DomainError
from ..rotations import geodesic, geodesic_batch, relative_angle, sample_so3_pairs
from .descent import descend_to_pseudo_minimum
from .minmax import PreconditionError
from .path import ANGLE_LIMIT, PathOnConfigSpace, path_max
from .sublevel import SublevelGraph, connection_radius

SMOOTHING_CHECKS_PER_RADIAN = 16


class SpliceError(RuntimeError):
    """The two pseudo-minima could not be joined inside the sublevel set."""


@dataclass
class BoundedPathResult:
    path: PathOnConfigSpace
    input_max: float
    output_max: float
    L_cut: float
    status: str
    delta: float | None = None
    message: str = ""
    pseudo_min_values: list = field(default_factory=list)

    def to_json(self):
        return {
            "status": self.status,
            "message": self.message,
            "L_cut": self.L_cut,
            "delta": self.delta,
            "input_max": self.input_max,
            "output_max": self.output_max,
            "output_max_L": float(self.path.max_L()),
            "pseudo_min_values": [float(v) for v in self.pseudo_min_values],
            "path": self.path.to_json(),
        }


def choose_L_cut(surface, delta):
    """Smallest ``L >= L_min`` where the leading term at ``F = -delta`` beats twice the rest.

    The remaining multipolar terms are bounded through their moment norms;
    the dispersion term is negative and is ignored.
    """
    k = surface.leading_order()
    if k is None:
        return float(surface.L_min)
    bounds = [(sum(nm) + 1, b) for nm, b in surface.term_bounds().items() if sum(nm) > k and b > 0]
    if not bounds:
        return float(surface.L_min)

    def excess(L):
        return 2.0 * sum(b * L ** (k + 1 - p) for p, b in bounds) - delta

    lo = float(surface.L_min)
    if excess(lo) <= 0:
        return lo
    hi = 2.0 * lo
    while excess(hi) > 0:
        hi *= 2.0
    return float(brentq(excess, lo, hi, xtol=1e-12 * hi))


def _crossings(path, L_cut):
    """Segment indices and configurations of the first upward and last downward crossing."""
    Ls = [n.L for n in path.nodes]
    j0 = next(j for j in range(len(Ls) - 1) if Ls[j] <= L_cut < Ls[j + 1])
    j1 = next(j for j in range(len(Ls) - 2, -1, -1) if Ls[j] > L_cut >= Ls[j + 1])

    def at(j, frac):
        L, U, V = path.segment(j).at(frac)
        return Configuration(L_cut, U[0], V[0])

    a = at(j0, (L_cut - Ls[j0]) / (Ls[j0 + 1] - Ls[j0]))
    b = at(j1, (Ls[j1] - L_cut) / (Ls[j1] - Ls[j1 + 1]))
    return j0, a, j1, b


def _subdivided(a, b):
    """Nodes of a geodesic from ``a`` to ``b`` fine enough that each step is below a half turn."""
    angle = max(relative_angle(a.U, b.U), relative_angle(a.V, b.V))
    pieces = max(1, math.ceil(angle / (np.pi / 2)))
    out = []
    for s in np.linspace(0.0, 1.0, pieces + 1)[1:]:
        out.append(Configuration(a.L, geodesic(a.U, b.U, s), geodesic(a.V, b.V, s)))
    return out


def _clear(F, delta, U0, V0, U1, V1):
    """True if ``F < -delta`` at check points along the geodesic between two pairs."""
    aU, aV = relative_angle(U0, U1), relative_angle(V0, V1)
    if max(aU, aV) >= ANGLE_LIMIT:
        return False
    n = max(2, math.ceil(SMOOTHING_CHECKS_PER_RADIAN * math.hypot(aU, aV)))
    s = np.arange(1, n) / n
    Us = geodesic_batch(U0[None], U1[None], s)[0]
    Vs = geodesic_batch(V0[None], V1[None], s)[0]
    return bool(np.all(np.asarray(F(Us, Vs)) < -delta))


def _shortcut(F, delta, Us, Vs):
    """Greedy geodesic smoothing: from each kept node jump to the farthest clear node."""
    keep = [0]
    while keep[-1] < len(Us) - 1:
        i = keep[-1]
        nxt = i + 1
        for j in range(len(Us) - 1, i + 1, -1):
            if _clear(F, delta, Us[i], Vs[i], Us[j], Vs[j]):
                nxt = j
                break
        keep.append(nxt)
    return keep


def bounded_minmax_path(surface, path, L_cut, seed=0, grid_n=2000, delta=None, samples_per_segment=16):
    """Replace the excursion of ``path`` beyond ``L_cut`` by a detour at ``L = L_cut``.

    The detour consists of the two monotone descent traces at fixed ``L_cut``
    from the crossing configurations and a bridge between the resulting
    pseudo-minima found by shortest-path search on the sampled sublevel graph
    of the leading interaction (then greedily shortcut along clear geodesics).
    With no multipolar term left the bridge is a plain geodesic.

    Returns
    -------
    BoundedPathResult
        ``output_max`` should not exceed ``max(E_infinity, input_max)``.
    """
    if L_cut < surface.L_min:
        raise DomainError("L_cut must be at least L_min")
    if not (path.nodes[0].L < L_cut and path.nodes[-1].L < L_cut):
        raise PreconditionError("path endpoints must lie below L_cut")
    input_max, _ = path_max(surface, path, samples_per_segment)
    if path.max_L() <= L_cut:
        return BoundedPathResult(path, input_max, input_max, float(L_cut), "unchanged",
                                 message="path already bounded")
    j0, a, j1, b = _crossings(path, L_cut)
    input_max = max(input_max, surface(a), surface(b))
    head = list(path.nodes[: j0 + 1]) + [a]
    tail = [b] + list(path.nodes[j1 + 1:])

    F = surface.leading_interaction()
    if F is None:
        bridge = _subdivided(a, b)[:-1]
        nodes = head + bridge + tail
        new = PathOnConfigSpace(nodes)
        out_max, _ = path_max(surface, new, samples_per_segment)
        return BoundedPathResult(new, input_max, out_max, float(L_cut), "vdw-dominated",
                                 message="van der Waals dominated: any rotation path admissible, joined by a geodesic")

    f = surface.at_L(L_cut)
    seeds = np.random.SeedSequence(seed).spawn(3)
    da = descend_to_pseudo_minimum(f, a.U, a.V, seed=seeds[0])
    db = descend_to_pseudo_minimum(f, b.U, b.V, seed=seeds[1])
    Fa, Fb = float(F(da.U, da.V)), float(F(db.U, db.V))
    if max(Fa, Fb) >= 0.0:
        raise SpliceError(f"leading interaction not negative at the pseudo-minima ({Fa:.3e}, {Fb:.3e})")
    if delta is None:
        delta = 0.5 * min(abs(Fa), abs(Fb))

    pairs = sample_so3_pairs(grid_n, seeds[2])
    U = np.array([p[0] for p in pairs] + [da.U, db.U])
    V = np.array([p[1] for p in pairs] + [da.V, db.V])
    graph = SublevelGraph(F, U, V, delta, connection_radius(grid_n))
    ia, ib = len(graph.values) - 2, len(graph.values) - 1
    route = graph.shortest_path(ia, ib)
    if route is None:
        raise SpliceError(f"pseudo-minima lie in different components of the sublevel set at delta = {delta:.3e}")
    Us, Vs = graph.U[route], graph.V[route]
    keep = _shortcut(F, delta, Us, Vs)
    bridge = [Configuration(L_cut, Us[k], Vs[k]) for k in keep]

    down_a = [Configuration(L_cut, u, v) for u, v, _ in da.trace]
    down_b = [Configuration(L_cut, u, v) for u, v, _ in db.trace][::-1]
    nodes = head + down_a + bridge + down_b + tail
    new = PathOnConfigSpace(nodes)
    out_max, _ = path_max(surface, new, samples_per_segment)
    return BoundedPathResult(new, input_max, out_max, float(L_cut), "spliced", float(delta),
                             pseudo_min_values=[Fa, Fb])
