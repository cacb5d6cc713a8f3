"""Cross-model comparison: residual PCA, prediction correlations, ranking."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .frame import AuditFrame, CurveSeries, ResidualFrame
from .numerics import kde_gaussian, silverman_bandwidth, sym_eigen_full

DEFAULT_RANKING_SCORES = ("mae", "mse", "rec", "rroc")


@dataclass(frozen=True)
class PcaBiplot:
    """Observation scores and model arrows in the first two components."""

    labels: tuple[str, ...]
    scores: np.ndarray        # n x 2
    loadings: np.ndarray      # k x 2, eigenvectors scaled by sqrt(eigenvalue)
    explained: tuple[float, float]


def model_pca(frames: Sequence[ResidualFrame]) -> PcaBiplot:
    """PCA biplot of the n x k residual matrix (columns centered, not scaled)."""
    if len(frames) < 2:
        raise ValidationError("model pca requires at least 2 models")
    n = frames[0].n
    for rf in frames:
        if rf.n != n:
            raise ValidationError("all residual frames must share one length")
    matrix = np.column_stack([rf.r for rf in frames])
    variances = matrix.var(axis=0, ddof=1)
    for rf, var in zip(frames, variances):
        if var <= 0.0:
            raise ValidationError(f"residuals of {rf.label!r} have zero variance")
    centered = matrix - matrix.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    eigenvalues, vectors = sym_eigen_full(cov)
    top = np.clip(eigenvalues[:2], 0.0, None)
    v2 = vectors[:, :2]
    total = float(np.trace(cov))
    return PcaBiplot(labels=tuple(rf.label for rf in frames),
                     scores=centered @ v2,
                     loadings=v2 * np.sqrt(top)[None, :],
                     explained=(float(top[0] / total), float(top[1] / total)))


def pca_series(biplot: PcaBiplot) -> list[CurveSeries]:
    """Serialize a biplot: one observation-cloud series plus one arrow per model."""
    n = biplot.scores.shape[0]
    series = [CurveSeries(kind="pca", label="observations",
                          xs=biplot.scores[:, 0], ys=biplot.scores[:, 1],
                          aux={"part": ("points",) * n})]
    for j, label in enumerate(biplot.labels):
        series.append(CurveSeries(
            kind="pca", label=label,
            xs=np.asarray([0.0, biplot.loadings[j, 0]]),
            ys=np.asarray([0.0, biplot.loadings[j, 1]]),
            aux={"part": ("arrow", "arrow")}))
    return series


@dataclass(frozen=True)
class CorrelationResult:
    """Pairwise Pearson correlations over observed response and predictions."""

    columns: tuple[str, ...]
    matrix: np.ndarray
    series: tuple[CurveSeries, ...]


def model_correlation(frame: AuditFrame) -> CorrelationResult:
    """Pairs-plot data: correlation matrix, per-column densities, pair scatters."""
    if not frame.models:
        raise ValidationError("model correlation requires at least 1 model")
    columns = [("_y_", frame.y)] + [(lbl, yh) for lbl, yh in frame.models]
    for name, vec in columns:
        if np.var(vec) <= 0.0:
            raise ValidationError(f"column {name!r} has zero variance")
    data = np.column_stack([vec for _, vec in columns])
    matrix = np.corrcoef(data, rowvar=False)

    series: list[CurveSeries] = []
    for name, vec in columns:
        bw = silverman_bandwidth(vec)
        grid = np.linspace(vec.min() - 3 * bw, vec.max() + 3 * bw, 256)
        series.append(CurveSeries(kind="correlation", label=name,
                                  xs=grid, ys=kde_gaussian(vec, grid),
                                  aux={"part": ("density",) * grid.size}))
    for i in range(len(columns)):
        for j in range(i):
            xi, vi = columns[j]
            yi, vj = columns[i]
            series.append(CurveSeries(
                kind="correlation", label=f"{yi} vs {xi}", xs=vi, ys=vj,
                aux={"part": ("scatter",) * vi.size}))
    return CorrelationResult(columns=tuple(name for name, _ in columns),
                             matrix=matrix, series=tuple(series))


@dataclass(frozen=True)
class RankingEntry:
    label: str
    score_name: str
    raw: float
    invscore: float
    scaled: float


@dataclass(frozen=True)
class RankingTable:
    """Inverted and scaled scores for the radar/ranking display."""

    entries: tuple[RankingEntry, ...]
    reference_label: str


def ranking(raw_scores: Mapping[str, Mapping[str, float]],
            reference: str | None = None) -> RankingTable:
    """Normalize raw scores: invscore = min/score, scaled = score(ref)/score.

    Raw scores must be positive and finite (lower is better). The model
    attaining the minimum of a score gets invscore 1 for it.
    """
    if not raw_scores:
        raise ValidationError("ranking requires at least one score")
    labels: list[str] = []
    for per_model in raw_scores.values():
        for label in per_model:
            if label not in labels:
                labels.append(label)
    if reference is None:
        reference = labels[0]
    if not any(reference in per_model for per_model in raw_scores.values()):
        raise ValidationError(f"reference model {reference!r} has no scores")

    entries: list[RankingEntry] = []
    for score_name, per_model in raw_scores.items():
        values = dict(per_model)
        for label, value in values.items():
            if not (np.isfinite(value) and value > 0.0):
                raise ValidationError(
                    f"score {score_name!r} of {label!r} must be positive and "
                    f"finite to rank, got {value}")
        best = min(values.values())
        ref_value = values.get(reference)
        for label, value in values.items():
            entries.append(RankingEntry(
                label=label, score_name=score_name, raw=float(value),
                invscore=best / value,
                scaled=(ref_value / value) if ref_value is not None else float("nan")))
    return RankingTable(entries=tuple(entries), reference_label=reference)


def ranking_series(table: RankingTable) -> list[CurveSeries]:
    """Radar coordinates: per model, invscore against score-axis index."""
    score_names: list[str] = []
    for entry in table.entries:
        if entry.score_name not in score_names:
            score_names.append(entry.score_name)
    by_label: dict[str, dict[str, RankingEntry]] = {}
    for entry in table.entries:
        by_label.setdefault(entry.label, {})[entry.score_name] = entry
    series = []
    for label, per_score in by_label.items():
        axes = [name for name in score_names if name in per_score]
        series.append(CurveSeries(
            kind="radar", label=label,
            xs=np.asarray([score_names.index(a) for a in axes], dtype=float),
            ys=np.asarray([per_score[a].invscore for a in axes]),
            aux={"score": tuple(axes),
                 "raw": tuple(per_score[a].raw for a in axes),
                 "scaled": tuple(per_score[a].scaled for a in axes)}))
    return series
