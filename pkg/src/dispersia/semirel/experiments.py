"""
Reproducible numerical experiments on the semirelativistic kinetic operator.

Each function returns a JSON-ready dictionary of measurements together with
the pass/fail verdict of the property it probes. Grid sizes default to the
values used by the acceptance suite; ``n`` and ``half_width`` override them.
"""

import numpy as np
from scipy.stats import linregress

from .grid import SpectralGrid, kinetic_symbol
from .kernel import kernel_form, smooth_bump, support_distance
from .localization import (
    CutoffFunction,
    PartitionOfUnity,
    commutator_norm,
    fourier_commutator_bound,
    ims_error,
    smooth_step,
)
from .spectrum import decay_rate, ground_state, smoothed_coulomb
from .zhislin import SHELL, RadialGrid, zhislin_trial_bound

KERNEL_SIGMA = 0.75
KERNEL_CUT = 5.0


def cut_gaussian(grid, center, sigma, cut=KERNEL_CUT):
    """Gaussian of width ``sigma`` smoothly switched off between ``0.8 cut sigma`` and ``cut sigma``.

    The result has compact support while its spectrum stays essentially
    Gaussian, so grid quadrature of ``T`` is accurate at modest resolution.
    """
    rc = cut * sigma
    r = np.sqrt(sum((x - c) ** 2 for x, c in zip(grid.coordinates(), center)))
    return np.exp(-(r**2) / (2 * sigma**2)) * smooth_step((r - 0.8 * rc) / (0.2 * rc))


def _pair(grid, R, sigma=KERNEL_SIGMA, cut=KERNEL_CUT):
    off = R / 2 + cut * sigma
    return cut_gaussian(grid, (-off, 0.0, 0.0), sigma, cut), cut_gaussian(grid, (off, 0.0, 0.0), sigma, cut)


def symbol_experiment(n=64, half_width=16.0, seed=0):
    """Pointwise symbol facts and Parseval on a 3D grid."""
    grid = SpectralGrid(3, n, half_width)
    q = grid.p2
    one_sided = bool(np.all(grid.symbol <= q / 2))
    wave, p2 = grid.plane_wave((3, 0, 0))
    plane_err = float(np.max(np.abs(grid.apply_T(wave) - kinetic_symbol(p2) * wave)))
    psi = np.random.default_rng(seed).standard_normal(grid.shape)
    parseval = abs(np.linalg.norm(grid.fft(psi)) - np.linalg.norm(psi)) / np.linalg.norm(psi)
    constant = float(np.max(np.abs(grid.apply_T(np.ones(grid.shape)))))
    return {
        "experiment": "symbol",
        "grid": {"d": 3, "n": n, "half_width": half_width},
        "symbol_below_half_q": one_sided,
        "plane_wave_error": plane_err,
        "parseval_relative_error": float(parseval),
        "constant_mode_image": constant,
        "passed": one_sided and plane_err <= 1e-12 and parseval < 1e-12 and constant < 1e-12,
    }


def kernel_experiment(R=5.0, decay_R=(4.0, 6.0, 8.0, 10.0), n=64, half_width=16.0, rtol=0.01, min_rate=0.9):
    """Bessel-kernel form against the Fourier-side form, and the decay rate in the separation."""
    grid = SpectralGrid(3, n, half_width)
    f, g = _pair(grid, R)
    kern = kernel_form(grid, f, g, R=R).real
    four = grid.inner(f, grid.apply_T(g)).real
    rel = abs(kern / four - 1.0)
    norms, forms = [], []
    for Rk in decay_R:
        fk, gk = _pair(grid, Rk)
        forms.append(kernel_form(grid, fk, gk, R=Rk).real)
        norms.append(grid.norm(fk) * grid.norm(gk))
    ratio = np.abs(forms) / np.array(norms)
    rate = float(-linregress(np.asarray(decay_R, float), np.log(ratio)).slope)
    return {
        "experiment": "kernel",
        "grid": {"d": 3, "n": n, "half_width": half_width},
        "separation": R,
        "support_distance": support_distance(grid, f, g),
        "kernel_form": kern,
        "fourier_form": four,
        "relative_difference": rel,
        "decay_R": list(decay_R),
        "decay_forms": forms,
        "decay_normalized": ratio.tolist(),
        "decay_rate": rate,
        "passed": bool(rel <= rtol and rate >= min_rate),
    }


def commutator_experiment(R_values=(8.0, 16.0, 32.0, 64.0), n=4096, half_width=51.2, seed=0, max_ratio=0.6):
    """Norms of ``[T, zeta_R]`` in 1D, their doubling ratios and the Fourier-side bound."""
    grid = SpectralGrid(1, n, half_width)
    norms, bounds = [], []
    for R in R_values:
        z = CutoffFunction(R)
        norms.append(commutator_norm(grid, z, seed=seed))
        bounds.append(fourier_commutator_bound(grid, z))
    ratios = [b / a for a, b in zip(norms[:-1], norms[1:])]
    return {
        "experiment": "commutator",
        "grid": {"d": 1, "n": n, "half_width": half_width},
        "R_values": list(R_values),
        "norms": norms,
        "fourier_bounds": bounds,
        "ratios": ratios,
        "max_norm_times_R": max(c * R for c, R in zip(norms, R_values)),
        "passed": bool(max(ratios) <= max_ratio and all(c <= b for c, b in zip(norms, bounds))),
    }


def ims_experiment(R_values=(8.0, 16.0, 32.0), n=8192, half_width=102.4, max_ratio=0.7):
    """IMS error for a Gaussian straddling the transition of ``J_1``, and for a state inside the flat region.

    The Gaussian is centred in the middle of the transition shell at
    ``0.1125 R`` and its width ``R / 40`` equals the shell width, so it
    straddles the transition at every scale.
    """
    grid = SpectralGrid(1, n, half_width)
    x = grid.axis
    errors, imag = [], []
    for R in R_values:
        psi = np.exp(-((x - 0.1125 * R) ** 2) / (2 * (R / 40) ** 2))
        psi /= grid.norm(psi)
        e = ims_error(grid, PartitionOfUnity(R), psi)
        errors.append(abs(e.real))
        imag.append(abs(e.imag))
    ratios = [b / a for a, b in zip(errors[:-1], errors[1:])]
    R0 = R_values[0]
    flat = smooth_bump(grid, (0.0,), 0.09 * R0)
    flat /= grid.norm(flat)
    flat_err = abs(ims_error(grid, PartitionOfUnity(R0), flat))
    return {
        "experiment": "ims",
        "grid": {"d": 1, "n": n, "half_width": half_width},
        "R_values": list(R_values),
        "errors": errors,
        "ratios": ratios,
        "max_imaginary_part": max(imag),
        "flat_region_error": flat_err,
        "passed": bool(max(ratios) <= max_ratio and flat_err <= 1e-8 and max(imag) <= 1e-12),
    }


def decay_experiment(Z_values=(1.0, 2.0), n=64, half_width=16.0, threshold_radius=2.0, seed=0):
    """Ground states of smoothed Coulomb wells: energies, decay fits and monotonicity in ``Z``."""
    grid = SpectralGrid(3, n, half_width)
    runs = []
    for Z in Z_values:
        E, vecs = ground_state(grid, smoothed_coulomb(grid, Z), k=1, seed=seed)
        fit = decay_rate(grid, vecs[0], threshold_radius)
        runs.append({"Z": Z, "energy": float(E[0]), "fit": fit.to_json()})
    rates = [r["fit"]["rate"] for r in runs]
    ok = all(r["energy"] < 0 and r["fit"]["decaying"] for r in runs)
    monotone = all(b < a for a, b in zip(rates[:-1], rates[1:]))
    return {
        "experiment": "decay",
        "grid": {"d": 3, "n": n, "half_width": half_width},
        "smoothing": 2.0 * grid.dx,
        "runs": runs,
        "rates_decrease_with_Z": monotone,
        "passed": bool(ok and monotone),
    }


def zhislin_experiment(R_values=tuple(2.0**k for k in range(10)), Z=1.0, matrix_R=(64.0, 128.0, 256.0, 512.0),
                       n=16384, half_width=1024.0):
    """Shell trial energies over ``R`` for charge ``Z`` and the kinetic-only reference at ``Z = 0``.

    ``n`` and ``half_width`` describe the radial line grid. Scales whose
    shell does not fit on it are dropped.
    """
    grid = RadialGrid(n, half_width)
    fits = lambda R: SHELL[1] * R < half_width - 4 * grid.dx
    R_values = [R for R in R_values if fits(R)]
    matrix_R = [R for R in matrix_R if fits(R)]
    bound = zhislin_trial_bound(R_values, Z=Z, grid=grid, matrix_R=matrix_R)
    free = zhislin_trial_bound(R_values, Z=0.0, grid=grid, matrix_R=())
    eig = bound.matrix_eigenvalues
    return {
        "experiment": "zhislin",
        "grid": {"d": 1, "n": n, "half_width": half_width},
        "bound": bound.to_json(),
        "free": free.to_json(),
        "trial_count_below_floor": int(sum(e < 0 for e in eig)),
        "passed": bool(bound.below_floor and len(eig) > 0 and max(eig) < 0),
    }


EXPERIMENTS = {
    "symbol": symbol_experiment,
    "kernel": kernel_experiment,
    "commutator": commutator_experiment,
    "ims": ims_experiment,
    "decay": decay_experiment,
    "zhislin": zhislin_experiment,
}
