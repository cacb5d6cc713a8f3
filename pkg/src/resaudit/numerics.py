"""Deterministic numeric kernel.

Everything downstream that needs randomness, smoothing, least squares or a
small eigendecomposition goes through this module so the behaviour is pinned
in one place:

* randomness: PCG64 (numpy's default bit generator) seeded through
  ``SeedSequence``; split streams come from ``SeedSequence.spawn`` so
  parallel work stays reproducible,
* least squares: Householder QR, never normal equations,
* smoother: LOWESS, local linear, tricube weights, no robustness passes,
* density: Gaussian kernel with Silverman's rule-of-thumb bandwidth,
* eigendecomposition: cyclic Jacobi (the matrices here are k x k with k =
  number of models, always tiny).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DegenerateError, ValidationError

_U_CLIP = 2.0 ** -53


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator: PCG64 seeded via SeedSequence(seed)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Split ``seed`` into ``n`` independent child sequences (deterministic)."""
    return np.random.SeedSequence(int(seed)).spawn(n)


def normal_quantile(u: float) -> float:
    """Standard normal inverse CDF, accurate to well below 1e-8."""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValidationError(f"normal_quantile requires 0 < u < 1, got {u}")
    return float(ndtri(u))


def normal_sample(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` standard normal variates by inverse CDF on PRNG uniforms."""
    u = np.clip(rng.random(int(n)), _U_CLIP, 1.0 - _U_CLIP)
    return ndtri(u)


@dataclass(frozen=True)
class LinearModelFit:
    """Ordinary least squares fit with leverages.

    ``coefficients`` has the intercept first, then one entry per predictor.
    ``sigma2`` is the residual mean square RSS / (n - p - 1).
    """

    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    leverages: np.ndarray
    sigma2: float
    p: int
    n: int


def ols_fit(X: np.ndarray, y: np.ndarray,
            column_names: list[str] | None = None) -> LinearModelFit:
    """Least squares of ``y`` on ``X`` plus an intercept, via Householder QR.

    Raises a singularity error naming the offending column when the
    intercept-augmented design is rank deficient.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValidationError("X must be a 2-d matrix")
    n, p = X.shape
    if y.shape != (n,):
        raise ValidationError(f"y has shape {y.shape}, expected ({n},)")
    if n <= p + 1:
        raise ValidationError(f"need n > p + 1 observations (n={n}, p={p})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("X and y must be finite")

    names = ["intercept"] + (
        list(column_names) if column_names is not None
        else [f"x{j + 1}" for j in range(p)])
    if len(names) != p + 1:
        raise ValidationError("column_names must have one entry per predictor")

    design = np.column_stack([np.ones(n), X])
    q, r_mat = np.linalg.qr(design)
    diag = np.abs(np.diag(r_mat))
    tol = max(n, p + 1) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    deficient = np.flatnonzero(diag <= tol)
    if deficient.size:
        j = int(deficient[0])
        raise ValidationError(
            f"design matrix is singular: column {names[j]!r} is collinear "
            "with the preceding columns")

    from scipy.linalg import solve_triangular
    beta = solve_triangular(r_mat, q.T @ y, lower=False)
    fitted = design @ beta
    residuals = y - fitted
    leverages = np.sum(q * q, axis=1)
    sigma2 = float(residuals @ residuals) / (n - p - 1)
    return LinearModelFit(coefficients=beta, fitted=fitted, residuals=residuals,
                          leverages=leverages, sigma2=sigma2, p=p, n=n)


@dataclass(frozen=True)
class Ecdf:
    """Step-function representation of an empirical CDF.

    ``values`` are the sorted unique sample values, ``fractions`` the
    cumulative fractions at each; the function is right-continuous.
    """

    values: np.ndarray
    fractions: np.ndarray

    def __call__(self, t) -> np.ndarray | float:
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.values, t_arr, side="right")
        out = np.where(idx == 0, 0.0, self.fractions[np.maximum(idx - 1, 0)])
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def ecdf(values) -> Ecdf:
    """F_n(t) = (1/n) * #{x_i <= t}."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationError("ecdf requires a non-empty sample")
    sorted_vals = np.sort(arr)
    uniq, counts = np.unique(sorted_vals, return_counts=True)
    fractions = np.cumsum(counts) / arr.size
    return Ecdf(values=uniq, fractions=fractions)


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5); falls back to sd when IQR is zero."""
    arr = np.asarray(values, dtype=float)
    sd = float(np.std(arr, ddof=1))
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    iqr_scale = (q3 - q1) / 1.34
    candidates = [s for s in (sd, iqr_scale) if s > 0.0]
    if not candidates:
        raise DegenerateError("all values identical: bandwidth degenerates to zero")
    return 0.9 * min(candidates) * arr.size ** (-1.0 / 5.0)


def kde_gaussian(values, grid) -> np.ndarray:
    """Gaussian-kernel density estimate on ``grid`` with Silverman bandwidth."""
    arr = np.asarray(values, dtype=float)
    if np.unique(arr).size < 2:
        raise DegenerateError("kde requires at least 2 distinct values")
    grid = np.asarray(grid, dtype=float)
    bw = silverman_bandwidth(arr)
    z = (grid[:, None] - arr[None, :]) / bw
    return np.exp(-0.5 * z * z).sum(axis=1) / (arr.size * bw * math.sqrt(2 * math.pi))


def lowess(x, y, span: float = 2.0 / 3.0) -> np.ndarray:
    """LOWESS smoothed values of ``y`` evaluated at each ``x``.

    Local linear fit with tricube weights over the ceil(span*n) nearest
    neighbours of each point; no robustness iterations, so the output is a
    deterministic function of the input.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3:
        raise ValidationError("lowess requires n >= 3")
    if not 0.0 < span <= 1.0:
        raise ValidationError(f"span must be in (0, 1], got {span}")
    k = min(n, int(math.ceil(span * n)))
    out = np.empty(n)
    for i in range(n):
        d = np.abs(x - x[i])
        h = np.sort(d)[k - 1]
        if h <= 0.0:
            # all k nearest neighbours coincide with x[i]
            out[i] = float(np.mean(y[d == 0.0]))
            continue
        w = np.clip(d / h, 0.0, 1.0)
        w = (1.0 - w ** 3) ** 3
        sw = w.sum()
        xm = (w @ x) / sw
        ym = (w @ y) / sw
        dx = x - xm
        sxx = w @ (dx * dx)
        if sxx <= 1e-12 * sw * max(1.0, xm * xm):
            out[i] = ym
        else:
            slope = (w @ (dx * (y - ym))) / sxx
            out[i] = ym + slope * (x[i] - xm)
    return out


def sym_eigen_full(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic-Jacobi eigendecomposition of a small symmetric matrix.

    Returns (eigenvalues, eigenvectors as columns) sorted by descending
    eigenvalue. Intended for k x k with small k; convergence is quadratic.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValidationError("matrix must be square")
    k = S.shape[0]
    if k < 2:
        raise ValidationError("matrix must be at least 2 x 2")
    if np.max(np.abs(S - S.T)) > 1e-10 * max(1.0, np.max(np.abs(S))):
        raise ValidationError("matrix is not symmetric within 1e-10")

    a = 0.5 * (S + S.T)
    v = np.eye(k)
    scale = np.linalg.norm(a)
    tol = 1e-14 * max(scale, 1e-300)
    for _ in range(100):
        off = math.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if abs(apq) <= tol / (k * k):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot_p, rot_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p, rot_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
                rot_p, rot_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * rot_p - s * rot_q
                v[:, q] = s * rot_p + c * rot_q

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    # sign convention: largest-magnitude component of each vector is positive
    for j in range(k):
        col = vectors[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            vectors[:, j] = -col
    return eigenvalues, vectors


def sym_eigen_2pc(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two largest (eigenvalue, eigenvector) pairs of a symmetric matrix."""
    eigenvalues, vectors = sym_eigen_full(S)
    return eigenvalues[:2], vectors[:, :2]
