"""
Connectivity of strict sublevel sets ``{F < -delta}`` in SO(3) x SO(3) from Haar samples.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from ..multipole import MultipolarInteraction
from ..rotations import geodesic_batch, pairwise_angles, sample_so3_pairs
from .descent import check_octupole, unit_fixture

EMPTY_PROBABILITY = 1e-3
EDGE_CHECKS = 8


def ball_fraction(r):
    """Haar probability of a small product-metric ball of radius ``r`` in SO(3) x SO(3).

    The bi-invariant metric with distance equal to the rotation angle gives
    SO(3) volume ``8 pi^2``; a 6-ball has volume ``pi^3 r^6 / 6``.
    """
    return r**6 / (384.0 * np.pi)


def connection_radius(n_samples, p_empty=EMPTY_PROBABILITY):
    """Smallest ``r`` such that a fixed ball of radius ``r/2`` misses all samples with probability < p_empty."""
    # (1 - p)^n < p_empty  <=>  p > 1 - p_empty^(1/n)
    target = 1.0 - p_empty ** (1.0 / n_samples)
    return 2.0 * (384.0 * np.pi * target) ** (1.0 / 6.0)


class SublevelGraph:
    """Samples of ``{F < -delta}`` joined when their product distance is below ``radius``.

    With ``validate=True`` an edge is kept only if ``F < -delta`` also holds at
    ``EDGE_CHECKS`` interior points of the joining geodesic, so components of
    the graph are unions of genuinely connected pieces.
    """

    def __init__(self, F, U, V, delta, radius, validate=True):
        self.F, self.delta, self.radius = F, float(delta), float(radius)
        U, V = np.asarray(U), np.asarray(V)
        vals = np.asarray(F(U, V), dtype=float)
        keep = vals < -self.delta
        self.U, self.V, self.values = U[keep], V[keep], vals[keep]
        n = len(self.values)
        if n == 0:
            self.n_components, self.labels = 0, np.zeros(0, int)
            self.adjacency = coo_matrix((0, 0)).tocsr()
            return
        aU, aV = pairwise_angles(self.U), pairwise_angles(self.V)
        dist = np.hypot(aU, aV)
        ii, jj = np.nonzero(np.triu(dist < self.radius, k=1))
        # both component angles must be below pi for the geodesic to be unique
        ok = (aU[ii, jj] < np.pi - 1e-9) & (aV[ii, jj] < np.pi - 1e-9)
        ii, jj = ii[ok], jj[ok]
        if validate and len(ii):
            good = self._validate(ii, jj)
            ii, jj = ii[good], jj[good]
        w = dist[ii, jj]
        self.adjacency = coo_matrix((np.concatenate([w, w]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
                                    shape=(n, n)).tocsr()
        self.n_components, self.labels = connected_components(self.adjacency, directed=False)

    def _validate(self, ii, jj, chunk=4096):
        s = np.arange(1, EDGE_CHECKS + 1) / (EDGE_CHECKS + 1)
        good = np.empty(len(ii), dtype=bool)
        for a in range(0, len(ii), chunk):
            i, j = ii[a:a + chunk], jj[a:a + chunk]
            Us = geodesic_batch(self.U[i], self.U[j], s)
            Vs = geodesic_batch(self.V[i], self.V[j], s)
            vals = np.asarray(self.F(Us.reshape(-1, 3, 3), Vs.reshape(-1, 3, 3))).reshape(len(i), len(s))
            good[a:a + chunk] = np.all(vals < -self.delta, axis=1)
        return good

    def shortest_path(self, i, j):
        """Node indices of the shortest graph path from ``i`` to ``j``, or None."""
        dist, pred = dijkstra(self.adjacency, indices=i, return_predecessors=True)
        if not np.isfinite(dist[j]):
            return None
        path = [j]
        while path[-1] != i:
            path.append(int(pred[path[-1]]))
        return path[::-1]


def sublevel_connectivity(n, m, delta, grid_n=5000, seed=0, rho1=None, rho2=None, validate=True):
    """Count components of the sampled sublevel set ``{F^(n,m) < -delta}``.

    ``delta`` is relative to the product of the moment norms.
    """
    if n + m not in (2, 3, 4) or n < 1 or m < 1:
        raise ValueError("need n, m >= 1 and n + m in {2, 3, 4}")
    rho1 = rho1 if rho1 is not None else unit_fixture(n, seed)
    rho2 = rho2 if rho2 is not None else unit_fixture(m, seed + 1)
    check_octupole(rho1, n)
    check_octupole(rho2, m)
    F = MultipolarInteraction(rho1, rho2, n, m)
    pairs = sample_so3_pairs(grid_n, [seed, n, m, 13])
    U = np.array([p[0] for p in pairs])
    V = np.array([p[1] for p in pairs])
    radius = connection_radius(grid_n)
    graph = SublevelGraph(F, U, V, delta * F.scale, radius, validate=validate)
    n_sub = len(graph.values)
    sizes = np.bincount(graph.labels).tolist() if n_sub else []
    return {
        "n": n,
        "m": m,
        "delta": float(delta),
        "grid_n": int(grid_n),
        "radius": float(radius),
        "sublevel_samples": int(n_sub),
        "components": int(graph.n_components),
        "component_sizes": sorted(sizes, reverse=True),
        "empty": n_sub == 0,
        "passed": bool(graph.n_components == 1),
    }
