"""
Monotone descent on SO(3) x SO(3) to local pseudo-minima, and the derivative
criterion certifying them.
"""

from dataclasses import dataclass, field

import numpy as np

from ..density import dipole_pair, random_octupolar_density, random_quadrupolar_density, ChargeDensity
from ..multipole import MultipolarInteraction, multipole_moment, octupole_nondegeneracy
from ..rotations import (
    directional_derivatives,
    exp_map,
    generator_basis,
    random_generator_pairs,
    sample_so3_pairs,
)

STEP_LADDER = tuple(10.0 ** -np.arange(1, 7))
N_RANDOM_DIRECTIONS = 10
INTERIOR_CHECKS = 4
OCTUPOLE_TOL = 1e-6


class ResolutionError(ValueError):
    """Finite-difference error estimate too large for the requested delta."""


class HypothesisError(ValueError):
    """Input violates a hypothesis of the statement being tested (e.g. degenerate octupole)."""


def search_directions(seed, k=N_RANDOM_DIRECTIONS):
    """The six basis generator pairs followed by ``k`` seeded random pairs from the box."""
    rng = np.random.default_rng(seed)
    return generator_basis() + random_generator_pairs(k, rng)


def _evaluate(f, Us, Vs):
    if getattr(f, "supports_batch", False):
        return np.asarray(f(np.asarray(Us), np.asarray(Vs)), dtype=float)
    return np.array([f(u, v) for u, v in zip(Us, Vs)], dtype=float)


@dataclass
class DescentResult:
    U: np.ndarray
    V: np.ndarray
    value: float
    trace: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.U, self.V, self.trace))


def descend_to_pseudo_minimum(f, U0, V0, seed=0, k=N_RANDOM_DIRECTIONS, ladder=STEP_LADDER,
                              max_steps=100_000):
    """Monotone descent of ``f`` from ``(U0, V0)`` along geodesic steps.

    Each iteration scans every search direction with both signs, starting at
    the largest step of ``ladder`` (or one rung above the last accepted step),
    and takes the lowest strictly decreasing candidate whose interior points
    along the step also stay at or below the current value. Ties go to the
    first candidate. The iteration stops when no rung yields a decrease.

    Returns
    -------
    DescentResult
        Final point, its value and the trace of accepted ``(U, V, value)``.
        Trace values are strictly decreasing.
    """
    dirs = search_directions(seed, k)
    signed = [(s * A, s * B) for A, B in dirs for s in (1.0, -1.0)]
    fractions = np.concatenate([[1.0], np.arange(1, INTERIOR_CHECKS + 1) / (INTERIOR_CHECKS + 1)])
    # steps[r][c] stacks exp(s h A) for the full step followed by the interior fractions
    steps = [
        (np.array([[exp_map(A, h * s) for s in fractions] for A, _ in signed]),
         np.array([[exp_map(B, h * s) for s in fractions] for _, B in signed]))
        for h in ladder
    ]
    U, V = np.asarray(U0, float), np.asarray(V0, float)
    value = float(f(U, V))
    trace = []
    rung = 0
    while len(trace) < max_steps:
        moved = False
        for r in range(rung, len(ladder)):
            SA, SB = steps[r]
            Us = SA[:, 0] @ U
            Vs = SB[:, 0] @ V
            vals = _evaluate(f, Us, Vs)
            for c in np.argsort(vals, kind="stable"):
                if not vals[c] < value:
                    break
                if np.all(_evaluate(f, SA[c, 1:] @ U, SB[c, 1:] @ V) <= value):
                    U, V, value = Us[c], Vs[c], float(vals[c])
                    trace.append((U, V, value))
                    rung, moved = max(r - 1, 0), True
                    break
            if moved:
                break
        if not moved:
            break
    return DescentResult(U, V, value, trace)


@dataclass
class PseudoMinReport:
    point: tuple
    first_derivative_max: float
    second_derivative_min: float
    F_value: float
    delta: float
    passed: bool
    n_directions: int
    max_error: float

    def to_json(self):
        return {
            "first_derivative_max": self.first_derivative_max,
            "second_derivative_min": self.second_derivative_min,
            "F_value": self.F_value,
            "delta": self.delta,
            "passed": self.passed,
            "n_directions": self.n_directions,
            "max_error": self.max_error,
            "note": "criterion checked on a finite generator sample, not on all of the generator box",
        }


def pseudo_min_criterion(F, U, V, delta, seed=0, k=N_RANDOM_DIRECTIONS, h=1e-3):
    """Check ``|d/dt F| <= delta`` and ``d^2/dt^2 F >= -delta`` along all search directions.

    Raises
    ------
    ResolutionError
        If any finite-difference error estimate exceeds ``delta / 10``.
    """
    d1, d2, err = [], [], 0.0
    for A, B in search_directions(seed, k):
        v1, e1 = directional_derivatives(F, U, V, A, B, order=1, h=h)
        v2, e2 = directional_derivatives(F, U, V, A, B, order=2, h=h)
        d1.append(abs(v1))
        d2.append(v2)
        err = max(err, e1, e2)
    if err > delta / 10.0:
        raise ResolutionError(f"derivative error estimate {err:.2e} exceeds delta/10 = {delta / 10:.2e}")
    first, second = float(max(d1)), float(min(d2))
    passed = first <= delta and second >= -delta
    return PseudoMinReport((U, V), first, second, float(F(U, V)), float(delta), bool(passed), len(d1), float(err))


def _normalized(rho, n):
    norm = float(np.linalg.norm(multipole_moment(rho, n).full()))
    return ChargeDensity(rho.points, rho.weights / norm, rho.label)


def unit_fixture(order, seed=0):
    """Reference density whose first non-vanishing moment has order ``order`` and unit norm.

    Order 1 is the dipole pair along ``e1``; orders 2 and 3 are seeded
    generic inversion-symmetric and inversion-odd clouds.
    """
    rng = np.random.default_rng([order, seed])
    if order == 1:
        rho = dipole_pair((1.0, 0.0, 0.0))
    elif order == 2:
        rho = random_quadrupolar_density(3, rng)
    elif order == 3:
        rho = random_octupolar_density(rng)
    else:
        raise ValueError("fixtures exist for orders 1, 2 and 3")
    return _normalized(rho, order)


def check_octupole(rho, order, tol=OCTUPOLE_TOL):
    if order != 3:
        return
    ratio = octupole_nondegeneracy(multipole_moment(rho, 3).full())
    if ratio <= tol:
        raise HypothesisError(f"octupole is degenerate (relative smallest singular value {ratio:.2e})")


def negativity_at_pseudomin(n, m, delta=0.1, trials=50, seed=0, rho1=None, rho2=None):
    """Descend on ``F^(n,m)`` from ``trials`` Haar starts and record endpoint values.

    ``delta`` is relative to the product of the two moment norms. Passes iff
    every endpoint is at most ``-delta`` times that scale.
    """
    if n + m not in (2, 3, 4) or n < 1 or m < 1:
        raise ValueError("need n, m >= 1 and n + m in {2, 3, 4}")
    rho1 = rho1 if rho1 is not None else unit_fixture(n, seed)
    rho2 = rho2 if rho2 is not None else unit_fixture(m, seed + 1)
    check_octupole(rho1, n)
    check_octupole(rho2, m)
    F = MultipolarInteraction(rho1, rho2, n, m)
    starts = sample_so3_pairs(trials, [seed, n, m])
    seeds = np.random.SeedSequence([seed, n, m]).spawn(trials)
    values = []
    for (U, V), ss in zip(starts, seeds):
        res = descend_to_pseudo_minimum(F, U, V, seed=ss)
        values.append(res.value)
    values = np.array(values)
    threshold = -delta * F.scale
    return {
        "n": n,
        "m": m,
        "delta": float(delta),
        "scale": F.scale,
        "trials": int(trials),
        "min_value": float(values.min()),
        "max_value": float(values.max()),
        "values": [float(v) for v in values],
        "passed": bool(np.all(values <= threshold)),
    }
