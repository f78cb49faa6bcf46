"""
Brute-force Coulomb interaction between two placed densities, and checks of
the order of accuracy of the truncated multipole expansion.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .density import E1, Configuration, total_charge
from .multipole import MultipolarInteraction

SUPPORT_FRACTION = 1.0 / 8.0
MACHINE_REMAINDER = 1e-14
SLOPE_MARGIN = 0.3


class PreconditionError(ValueError):
    """Supports too large for the requested separation."""


class CoincidentPointsError(ValueError):
    pass


def _threads():
    try:
        return max(1, int(os.environ.get("DISPERSIA_THREADS", "1")))
    except ValueError:
        return 1


def check_supports(rho1, rho2, L):
    limit = SUPPORT_FRACTION * L
    for k, rho in enumerate((rho1, rho2), start=1):
        if rho.radius > limit:
            raise PreconditionError(
                f"density {k} has support radius {rho.radius:.6g} > L/8 = {limit:.6g}"
            )


def _pair_terms(x, w1, y, w2):
    diff = y[None, :, :] - x[:, None, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if np.any(dist == 0.0):
        raise CoincidentPointsError("a point of molecule 1 coincides with a point of molecule 2")
    return (w1[:, None] * w2[None, :] / dist).ravel()


def coulomb_interaction(rho1, rho2, tau, threads=None):
    """``sum_{x, y} w_x w_y / |L e1 + V y - U x|`` by direct double sum.

    The outer index is split into chunks (optionally evaluated on a thread
    pool); all terms are then added with a correctly rounded sum, so the
    result does not depend on the chunking.
    """
    if not isinstance(tau, Configuration):
        raise TypeError("tau must be a Configuration")
    check_supports(rho1, rho2, tau.L)
    x = rho1.points @ tau.U.T
    y = rho2.points @ tau.V.T + tau.L * E1
    threads = threads or _threads()
    bounds = np.linspace(0, len(x), min(threads, len(x)) + 1).astype(int)
    chunks = [(x[a:b], rho1.weights[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _pair_terms(c[0], c[1], y, rho2.weights), chunks))
    else:
        parts = [_pair_terms(c[0], c[1], y, rho2.weights) for c in chunks]
    return math.fsum(np.concatenate(parts))


def expansion_terms(rho1, rho2, K):
    """Interaction functions for every ``(n, m)`` with ``2 <= n + m <= K - 1``."""
    if not 2 <= K <= 6:
        raise ValueError("K must be in 2..6")
    return {
        (n, s - n): MultipolarInteraction(rho1, rho2, n, s - n)
        for s in range(2, K)
        for n in range(0, s + 1)
        if n <= 4 and s - n <= 4
    }


def expansion_value(rho1, rho2, tau, K, terms=None):
    """Truncated expansion ``sum_{2<=n+m<=K-1} F^(n,m)(U rho1, V rho2) / L^(n+m+1)``."""
    terms = terms if terms is not None else expansion_terms(rho1, rho2, K)
    vals = [f(tau.U, tau.V) / tau.L ** (n + m + 1) for (n, m), f in sorted(terms.items())]
    return math.fsum(vals)


@dataclass
class ExpansionReport:
    L_values: list
    exact: list
    truncated: list
    K: int
    fitted_slope: float | None
    success: bool
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.L_values) == len(self.exact) == len(self.truncated) >= 3):
            raise ValueError("report lists must have equal length >= 3")
        if np.any(np.diff(self.L_values) <= 0):
            raise ValueError("L_values must be strictly increasing")

    @property
    def remainders(self):
        return [abs(e - t) for e, t in zip(self.exact, self.truncated)]

    def to_json(self):
        return {
            "K": self.K,
            "L_values": [float(v) for v in self.L_values],
            "exact": [float(v) for v in self.exact],
            "truncated": [float(v) for v in self.truncated],
            "remainder": [float(v) for v in self.remainders],
            "fitted_slope": None if self.fitted_slope is None else float(self.fitted_slope),
            "expected_slope": -(self.K + 1),
            "success": bool(self.success),
            "flags": list(self.flags),
        }


def loglog_slope(xs, ys):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def verify_expansion_order(rho1, rho2, U, V, K, L_values):
    """Fit the decay exponent of ``|exact - truncated|`` over ``L_values``.

    Success means the slope is at most ``-(K+1) + 0.3``. Non-neutral inputs are
    evaluated anyway and flagged, since the expansion assumes neutral molecules.
    """
    L_values = [float(L) for L in L_values]
    flags = []
    tol = 1e-12
    for k, rho in enumerate((rho1, rho2), start=1):
        mass = math.fsum(np.abs(rho.weights))
        if abs(total_charge(rho)) > tol * mass:
            flags.append(f"hypothesis violation: density {k} is not neutral")
    terms = expansion_terms(rho1, rho2, K)
    exact, truncated = [], []
    for L in L_values:
        tau = Configuration(L, U, V)
        exact.append(coulomb_interaction(rho1, rho2, tau))
        truncated.append(expansion_value(rho1, rho2, tau, K, terms))
    remainders = [abs(e - t) for e, t in zip(exact, truncated)]
    if min(remainders) < MACHINE_REMAINDER:
        flags.append("remainder at machine precision")
        return ExpansionReport(L_values, exact, truncated, K, None, False, flags)
    slope = loglog_slope(L_values, remainders)
    success = slope <= -(K + 1) + SLOPE_MARGIN and not any(f.startswith("hypothesis") for f in flags)
    return ExpansionReport(L_values, exact, truncated, K, slope, success, flags)


