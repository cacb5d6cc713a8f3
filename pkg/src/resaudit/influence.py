"""Observation influence and simulation-envelope goodness of fit.

Cook's distance has two routes: the leverage shortcut for the built-in
least-squares model, and the literal leave-one-out recomputation for any
handle with fit+predict. For least squares the two agree (that equivalence
is the main regression test of this module).

The half-normal diagnostic simulates responses from the fitted model,
refits on each simulated response, and compares the ordered absolute
residuals of the data against the per-rank distribution of the simulated
ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdapterError, ValidationError
from .frame import ScoreResult
from .models import (CAP_FIT, CAP_PREDICT, CAP_SIMULATE, BuiltinOls)
from .numerics import normal_quantile, ols_fit

MIN_HALFNORMAL_SIMULATIONS = 20
ENVELOPE_PERCENTILES = (2.5, 97.5)


@dataclass(frozen=True)
class CooksResult:
    """Cook's distances for every observation."""

    D: np.ndarray
    method: str  # "hat-matrix" or "loo-refit"
    p: int
    s2: float
    top_k: tuple[int, ...]
    warnings: tuple[str, ...] = ()


def _require(handle, caps: set[str]):
    missing = caps - set(handle.capabilities)
    if missing:
        raise ValidationError(
            f"model {handle.name!r} lacks capabilities {sorted(missing)}")


def _top_k_indices(d: np.ndarray, k: int) -> tuple[int, ...]:
    order = np.argsort(-d, kind="stable")
    return tuple(int(i) for i in order[:k])


def cooks_distance(handle, X, y, method: str = "auto", p: int | None = None,
                   top_k: int = 3, s2_mode: str = "unbiased",
                   column_names: list[str] | None = None) -> CooksResult:
    """Cook's distance of every observation under ``handle``.

    ``method`` is "auto" (hat-matrix for built-in least squares, otherwise
    leave-one-out), "hat-matrix" or "loo-refit". ``p`` overrides the
    predictor count used in the normalization; by default it is the number
    of design columns. The scale is p * s2; by default s2 is the residual
    sum of squares over n - p - 1 so the leave-one-out path agrees with the
    hat-matrix path for least squares regardless of the handle behind it,
    ``s2_mode="mean"`` uses the plain mean squared residual instead.
    """
    _require(handle, {CAP_FIT, CAP_PREDICT})
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = y.size
    if method == "auto":
        method = "hat-matrix" if isinstance(handle, BuiltinOls) else "loo-refit"
    if method not in ("hat-matrix", "loo-refit"):
        raise ValidationError(f"unknown cooks method {method!r}")
    if method == "hat-matrix" and not isinstance(handle, BuiltinOls):
        raise ValidationError("hat-matrix path requires the built-in OLS model")
    if s2_mode not in ("unbiased", "mean"):
        raise ValidationError(f"unknown s2 mode {s2_mode!r}")

    warnings: list[str] = []
    p_used = int(p) if p is not None else X.shape[1]
    p_eff = max(p_used, 1)
    if n <= p_used + 2:
        raise ValidationError(f"cooks distance needs n > p + 2 (n={n}, p={p_used})")

    def scale_s2(residuals: np.ndarray) -> float:
        rss = float(residuals @ residuals)
        return rss / (n - p_used - 1) if s2_mode == "unbiased" else rss / n

    if method == "hat-matrix":
        fit = ols_fit(X, y, column_names=column_names)
        s2 = scale_s2(fit.residuals)
        h = fit.leverages
        r = fit.residuals
        d = np.empty(n)
        for i in range(n):
            if h[i] >= 1.0:
                d[i] = np.inf
                warnings.append(
                    f"observation {i} has leverage 1; Cook's distance reported "
                    "as +inf")
            else:
                d[i] = (r[i] ** 2 / (p_eff * s2)) * (h[i] / (1.0 - h[i]) ** 2)
    else:
        token = handle.fit(X, y)
        y_hat = token.predict(X)
        r = y - y_hat
        s2 = scale_s2(r)
        if s2 <= 0.0:
            raise ValidationError("cooks distance undefined for a perfect fit")
        keep = np.ones(n, dtype=bool)
        d = np.empty(n)
        for i in range(n):
            keep[i] = False
            token_i = handle.fit(X[keep], y[keep])
            y_hat_i = token_i.predict(X)
            keep[i] = True
            d[i] = float(np.sum((y_hat - y_hat_i) ** 2)) / (p_eff * s2)

    if top_k > n:
        warnings.append(f"top_k={top_k} clamped to n={n}")
        top_k = n
    return CooksResult(D=d, method=method, p=p_used, s2=s2,
                       top_k=_top_k_indices(d, top_k),
                       warnings=tuple(warnings))


@dataclass(frozen=True)
class HalfNormalResult:
    """Simulation envelope over ordered absolute diagnostics."""

    label: str
    m: int
    seed: int
    sorted_abs_diag: np.ndarray
    theoretical_q: np.ndarray
    env_lo: np.ndarray
    env_hi: np.ndarray
    S: np.ndarray
    hn_score: float
    deterministic: bool = True

    @property
    def n(self) -> int:
        return self.sorted_abs_diag.size

    def inside_fraction(self) -> float:
        inside = (self.sorted_abs_diag >= self.env_lo) & \
                 (self.sorted_abs_diag <= self.env_hi)
        return float(np.mean(inside))


def half_normal_quantiles(n: int) -> np.ndarray:
    """Expected half-normal order statistics for ranks 1..n."""
    i = np.arange(1, n + 1)
    return np.asarray([normal_quantile(u) for u in (i + n - 0.125) / (2 * n + 0.5)])


def _abs_diagnostic(residuals: np.ndarray, standardized: bool,
                    sigma2: float | None, leverages: np.ndarray | None) -> np.ndarray:
    if not standardized:
        return np.abs(residuals)
    scale = math.sqrt(sigma2) * np.sqrt(1.0 - leverages)
    return np.abs(residuals) / scale


def halfnormal(handle, X, y, m: int, seed: int,
               diagnostic: str = "raw") -> HalfNormalResult:
    """Half-normal envelope of |residuals| from ``m`` simulated refits.

    ``diagnostic`` is "raw" (absolute residuals; works with any handle) or
    "standardized" (leverage-corrected; built-in OLS only). The envelope is
    the per-rank 2.5/97.5 percentile band of the sorted simulated values.
    """
    _require(handle, {CAP_FIT, CAP_PREDICT, CAP_SIMULATE})
    if m < MIN_HALFNORMAL_SIMULATIONS:
        raise ValidationError(
            f"halfnormal needs at least {MIN_HALFNORMAL_SIMULATIONS} simulations")
    if diagnostic not in ("raw", "standardized"):
        raise ValidationError(f"unknown diagnostic {diagnostic!r}")
    if diagnostic == "standardized" and not isinstance(handle, BuiltinOls):
        raise ValidationError("standardized diagnostic requires built-in OLS")

    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = y.size
    standardized = diagnostic == "standardized"

    def fit_diag(y_vec: np.ndarray) -> np.ndarray:
        token = handle.fit(X, y_vec)
        residuals = y_vec - token.predict(X)
        if standardized:
            fit = token.fit_result
            return np.sort(_abs_diagnostic(residuals, True, fit.sigma2,
                                           fit.leverages))
        return np.sort(np.abs(residuals))

    token = handle.fit(X, y)
    fitted = token.predict(X)
    if standardized:
        fit = token.fit_result
        obs = np.sort(_abs_diagnostic(y - fitted, True, fit.sigma2, fit.leverages))
    else:
        obs = np.sort(np.abs(y - fitted))
    y_sim = token.simulate(m, seed)
    if y_sim.shape != (m, n):
        raise AdapterError(f"simulate returned shape {y_sim.shape}, "
                           f"expected {(m, n)}")
    sims = np.empty((m, n))
    for j in range(m):
        sims[j] = fit_diag(y_sim[j])

    env_lo = np.percentile(sims, ENVELOPE_PERCENTILES[0], axis=0)
    env_hi = np.percentile(sims, ENVELOPE_PERCENTILES[1], axis=0)
    s_counts = np.sum(sims >= obs[None, :], axis=0)
    hn = float(np.sum(np.abs(s_counts - m / 2.0)))
    return HalfNormalResult(
        label=getattr(handle, "name", "model"), m=m, seed=int(seed),
        sorted_abs_diag=obs, theoretical_q=half_normal_quantiles(n),
        env_lo=env_lo, env_hi=env_hi, S=s_counts, hn_score=hn,
        deterministic=bool(getattr(handle, "deterministic_simulation", True)))


def score_halfnormal(result: HalfNormalResult) -> ScoreResult:
    """Wrap the half-normal score; lower means better fit."""
    return ScoreResult("halfnormal", result.label, result.hn_score,
                       components={"m": result.m, "n": result.n,
                                   "max": result.n * result.m / 2.0})
