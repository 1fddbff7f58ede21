"""Synthetic surrogate for the unpublished commissioning dataset.

Gaussian copula: draw correlated standard normals, push each margin
through its probability integral, then map onto the published five-point
quantile profile (min/q25/q50/q75/max) by piecewise-linear interpolation.

Because the margin maps are nonlinear (several have flat quartiles), a
latent normal correlation rho does not survive as the same Pearson
correlation after mapping -- the strongly attenuated pairs would land
well outside the reference matrix.  The latent matrix is therefore
calibrated: each margin map is expanded in (probabilists') Hermite
polynomials, which turns the output covariance into an explicit power
series sum_k a_ik a_jk k! rho^k, and the monotone map rho -> corr_out is
inverted by bisection per pair.  The calibrated matrix is repaired to the
nearest positive semidefinite correlation matrix (eigenvalue clipping +
diagonal renormalisation, iterated) before sampling.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss, hermeval
from scipy.special import ndtr

from .dataset import Dataset, DatasetError
from .tables import REFERENCE_CORRELATION, REFERENCE_STATS, VARIABLES

_QUANTILE_PROBS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
_HERMITE_ORDER = 40
_QUAD_POINTS = 200


def quantile_profile(name: str) -> np.ndarray:
    """The five reference quantile anchors of one margin."""
    s = REFERENCE_STATS[name]
    return np.array([s[2], s[3], s[4], s[5], s[6]])


def margin_transform(u: np.ndarray, name: str) -> np.ndarray:
    """Map uniforms onto the margin's piecewise-linear quantile profile."""
    return np.interp(u, _QUANTILE_PROBS, quantile_profile(name))


@lru_cache(maxsize=None)
def _hermite_coefficients(name: str) -> tuple[np.ndarray, np.ndarray]:
    """(coefficients a_k, factorials k!) of the margin map g(z) =
    margin_transform(Phi(z)) in the He_k basis."""
    nodes, weights = hermegauss(_QUAD_POINTS)
    wnorm = weights / math.sqrt(2.0 * math.pi)
    g = margin_transform(ndtr(nodes), name)
    factorials = np.array([math.factorial(k) for k in range(_HERMITE_ORDER + 1)],
                          dtype=float)
    coefs = np.empty(_HERMITE_ORDER + 1)
    for k in range(_HERMITE_ORDER + 1):
        basis = np.zeros(k + 1)
        basis[k] = 1.0
        coefs[k] = float(np.sum(wnorm * g * hermeval(nodes, basis))) / factorials[k]
    return coefs, factorials


def output_correlation(name_i: str, name_j: str, rho: float) -> float:
    """Pearson correlation of the two mapped margins at latent
    correlation rho."""
    ai, fact = _hermite_coefficients(name_i)
    aj, _ = _hermite_coefficients(name_j)
    ks = np.arange(1, _HERMITE_ORDER + 1)
    cov = float(np.sum(ai[1:] * aj[1:] * fact[1:] * rho**ks))
    si = math.sqrt(float(np.sum(ai[1:] ** 2 * fact[1:])))
    sj = math.sqrt(float(np.sum(aj[1:] ** 2 * fact[1:])))
    return cov / (si * sj)


def latent_correlation(name_i: str, name_j: str, target: float) -> float:
    """Invert rho -> corr_out by bisection (the map is nondecreasing for
    monotone margin transforms)."""
    lo, hi = -0.9999, 0.9999
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if output_correlation(name_i, name_j, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=1)
def calibrated_latent_matrix() -> np.ndarray:
    lat = np.eye(len(VARIABLES))
    for i in range(len(VARIABLES)):
        for j in range(i + 1, len(VARIABLES)):
            rho = latent_correlation(VARIABLES[i], VARIABLES[j],
                                     float(REFERENCE_CORRELATION[i, j]))
            lat[i, j] = lat[j, i] = rho
    return nearest_correlation_matrix(lat)


def nearest_correlation_matrix(c: np.ndarray, max_iter: int = 100,
                               tol: float = 1e-10) -> np.ndarray:
    """Repair a symmetric matrix to a positive semidefinite correlation
    matrix by alternating eigenvalue clipping with diagonal
    renormalisation.  Raises on non-convergence."""
    c = 0.5 * (np.asarray(c, dtype=float) + np.asarray(c, dtype=float).T)
    for _ in range(max_iter):
        eigvals, eigvecs = np.linalg.eigh(c)
        if eigvals.min() >= -tol and np.allclose(np.diag(c), 1.0, atol=tol):
            np.fill_diagonal(c, 1.0)
            return c
        clipped = np.clip(eigvals, 1e-12, None)
        c = eigvecs @ np.diag(clipped) @ eigvecs.T
        d = np.sqrt(np.diag(c))
        c = c / np.outer(d, d)
        c = 0.5 * (c + c.T)
    raise DatasetError("correlation matrix repair did not converge")


def synthesize_dataset(n: int, seed: int) -> Dataset:
    """Draw n synthetic records matching the reference quantile profiles
    and correlation structure.  Deterministic under the seed."""
    if n < 10:
        raise DatasetError("synthesis needs n >= 10")
    lat = calibrated_latent_matrix()
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(lat + 1e-12 * np.eye(len(VARIABLES)))
    z = rng.standard_normal((n, len(VARIABLES))) @ chol.T
    u = ndtr(z)
    columns = [margin_transform(u[:, i], name) for i, name in enumerate(VARIABLES)]
    return Dataset.from_matrix(np.column_stack(columns), provenance="synthetic")
