import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import residual_frame
from resaudit.curves import (autocorrelation_scatter, boxplot_series,
                             lift_chart, prc_curve, predicted_response,
                             rec_curve, residual_boxplot, residual_density,
                             residual_scatter, roc_curve, rroc_curve,
                             scale_location, tsecdf)
from resaudit.errors import DegenerateError
from resaudit.frame import ClassificationFrame
from resaudit.numerics import make_rng
from resaudit.scores import score_auc, score_mae, score_peak, score_rroc


# -- residual scatter -------------------------------------------------------

def test_residual_scatter_perfect_fit():
    series = residual_scatter(residual_frame([0.0, 0.0, 0.0]))
    assert np.all(series.ys == 0.0)
    assert len(series.points) == 3


def test_residual_scatter_sorted_with_indices():
    rf = residual_frame([1.0, 2.0, 3.0], order=[30.0, 10.0, 20.0])
    series = residual_scatter(rf)
    assert series.xs.tolist() == [10.0, 20.0, 30.0]
    assert series.ys.tolist() == [2.0, 3.0, 1.0]
    assert series.aux["index"] == (1, 2, 0)


# -- boxplot ------------------------------------------------------------------

def test_boxplot_type7_quartiles():
    stats = residual_boxplot(residual_frame([1.0, -2.0, 3.0, -4.0, 5.0]))
    assert stats.q1 == 2.0
    assert stats.median == 3.0
    assert stats.q3 == 4.0
    assert stats.whisker_lo == 1.0 and stats.whisker_hi == 5.0
    assert stats.outliers == ()


def test_boxplot_degenerate_box():
    stats = residual_boxplot(residual_frame([2.0, 2.0, -2.0]))
    assert stats.q1 == stats.median == stats.q3 == 2.0
    assert stats.outliers == ()


def test_boxplot_rmse_marker_identity():
    r = make_rng(3).normal(size=40)
    stats = residual_boxplot(residual_frame(r))
    assert stats.rmse_marker ** 2 == pytest.approx(np.mean(r ** 2))


def test_boxplot_flags_far_outlier():
    r = np.concatenate([np.linspace(0.5, 1.5, 20), [50.0]])
    stats = residual_boxplot(residual_frame(r))
    assert stats.outliers == (50.0,)
    series = boxplot_series(stats)
    assert [s.aux["part"][0] for s in series] == ["box", "outliers"]


# -- autocorrelation ----------------------------------------------------------

def test_autocorrelation_pairs():
    series = autocorrelation_scatter(residual_frame([1.0, 2.0, 3.0]))
    assert series.points == [(1.0, 2.0), (2.0, 3.0)]


def test_autocorrelation_two_rows():
    series = autocorrelation_scatter(residual_frame([5.0, -1.0]))
    assert series.points == [(5.0, -1.0)]


def test_autocorrelation_sorts_first():
    rf = residual_frame([3.0, 1.0, 2.0], order=[3.0, 1.0, 2.0])
    series = autocorrelation_scatter(rf)
    assert series.points == [(1.0, 2.0), (2.0, 3.0)]


# -- scale-location -----------------------------------------------------------

def test_scale_location_standardization():
    rf = residual_frame([-1.0, 1.0, -1.0, 1.0])
    points, smooth = scale_location(rf)
    s_r = np.std(rf.r, ddof=1)
    assert np.allclose(points.ys, np.sqrt(1.0 / s_r), atol=1e-12)
    assert smooth.aux["part"][0] == "smoother"


def test_scale_location_scale_invariant():
    r = make_rng(5).normal(size=30)
    base, _ = scale_location(residual_frame(r))
    scaled, _ = scale_location(residual_frame(4.0 * r))
    assert np.max(np.abs(base.ys - scaled.ys)) < 1e-12


def test_scale_location_peaks_match_peak_score():
    rf = residual_frame(make_rng(6).normal(size=25))
    points, _ = scale_location(rf)
    assert sum(points.aux["peak"]) == pytest.approx(
        score_peak(rf).value * rf.n)


def test_scale_location_zero_sd():
    with pytest.raises(DegenerateError):
        scale_location(residual_frame([1.0, 1.0, 1.0]))


# -- density -------------------------------------------------------------

def test_density_symmetric():
    rf = residual_frame([-2.0, -1.0, 1.0, 2.0])
    series, warnings = residual_density(rf)
    density = next(s for s in series if s.aux["part"][0] == "density")
    assert warnings == []
    assert np.max(np.abs(density.ys - density.ys[::-1])) < 1e-9


def test_density_constant_grouping_matches_ungrouped():
    rf = residual_frame([1.0, -2.0, 0.5, -0.5])
    plain, _ = residual_density(rf)
    grouped, _ = residual_density(rf, group_values=np.full(4, "all"),
                                  group_name="g")
    assert np.allclose(plain[0].ys, grouped[0].ys)


def test_density_two_separated_groups():
    r = np.concatenate([make_rng(1).normal(size=50) - 10.0,
                        make_rng(2).normal(size=50) + 10.0])
    groups = np.asarray(["lo"] * 50 + ["hi"] * 50)
    series, _ = residual_density(residual_frame(r), groups, "g")
    densities = [s for s in series if s.aux["part"][0] == "density"]
    assert len(densities) == 2
    modes = sorted(float(s.xs[np.argmax(s.ys)]) for s in densities)
    assert modes[0] < -5.0 and modes[1] > 5.0


def test_density_degenerate_group_skipped_with_warning():
    r = np.asarray([1.0, 2.0, 3.0, 5.0, 5.0])
    groups = np.asarray(["a", "a", "a", "b", "b"])
    series, warnings = residual_density(residual_frame(r), groups, "g")
    assert len([s for s in series if s.aux["part"][0] == "density"]) == 1
    assert len(warnings) == 1 and "skipped" in warnings[0]


# -- tsecdf --------------------------------------------------------------

def test_tsecdf_hand_case():
    series = tsecdf(residual_frame([-2.0, -1.0, 1.0, 1.0]))
    neg = next(s for s in series if s.aux["part"][0] == "negative")
    pos = next(s for s in series if s.aux["part"][0] == "positive")
    assert neg.points == [(-2.0, 0.5), (-1.0, 0.25)]
    assert pos.points == [(1.0, 0.5)]
    assert neg.ys[0] + pos.ys[-1] == 1.0


def test_tsecdf_all_positive():
    series = tsecdf(residual_frame([1.0, 2.0]))
    assert len(series) == 1
    assert series[0].aux["part"][0] == "positive"
    assert series[0].ys[-1] == 1.0


def test_tsecdf_symmetric_residuals_mirror():
    r = np.asarray([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
    neg, pos = tsecdf(residual_frame(r))
    assert np.allclose(neg.ys[::-1], pos.ys)
    assert np.allclose(-neg.xs[::-1], pos.xs)


def test_tsecdf_terminal_sum_random():
    for seed in range(10):
        r = make_rng(seed).normal(size=37)
        series = tsecdf(residual_frame(r))
        ends = 0.0
        for s in series:
            ends += s.ys[0] if s.aux["part"][0] == "negative" else s.ys[-1]
        assert ends == 1.0


# -- rec ---------------------------------------------------------------------

def test_rec_curve_hand_case():
    series = rec_curve(residual_frame([0.0, -1.0, 2.0, -3.0]))
    assert series.points == [(0.0, 0.25), (1.0, 0.5), (2.0, 0.75), (3.0, 1.0)]


def test_rec_curve_all_zero():
    assert rec_curve(residual_frame([0.0, 0.0])).points == [(0.0, 1.0)]


def test_rec_curve_monotone_and_ends_at_one():
    series = rec_curve(residual_frame(make_rng(8).normal(size=60)))
    assert np.all(np.diff(series.ys) >= 0)
    assert series.ys[-1] == 1.0
    assert series.xs[0] == 0.0


def test_rec_step_integral_is_mae():
    for seed in range(5):
        r = make_rng(seed).normal(size=45)
        series = rec_curve(residual_frame(r))
        integral = float(np.sum(np.diff(series.xs) * (1.0 - series.ys[:-1])))
        assert integral == pytest.approx(score_mae(residual_frame(r)).value,
                                         abs=1e-12)


residual_lists = st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50)


@given(residual_lists)
def test_rec_curve_properties(r):
    series = rec_curve(residual_frame(np.asarray(r)))
    assert np.all(np.diff(series.xs) >= 0)
    assert np.all(np.diff(series.ys) >= 0)
    assert series.ys[-1] == 1.0


@given(residual_lists)
def test_tsecdf_terminal_sum_property(r):
    ends = 0.0
    for s in tsecdf(residual_frame(np.asarray(r))):
        ends += s.ys[0] if s.aux["part"][0] == "negative" else s.ys[-1]
    assert ends == 1.0


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_rroc_curve_properties(r):
    series = rroc_curve(residual_frame(np.asarray(r)))
    assert np.all(np.diff(series.xs) >= 0)
    assert np.all(np.diff(series.ys) >= 0)
    assert np.all(series.xs >= 0) and np.all(series.ys <= 0)
    assert sum(series.aux["origin"]) == 1


# -- rroc ---------------------------------------------------------------------

def test_rroc_hand_vertices():
    series = rroc_curve(residual_frame([-1.0, 1.0]))
    assert series.points == [(0.0, -2.0), (1.0, -1.0), (2.0, 0.0)]
    assert series.aux["origin"] == (False, True, False)
    assert series.aux["shift"] == (-1.0, 0.0, 1.0)


def test_rroc_constant_two_points():
    series = rroc_curve(residual_frame([3.0, 3.0]))
    assert len(series.points) == 2


def test_rroc_zero_shift_identity():
    r = make_rng(9).normal(size=20)
    series = rroc_curve(residual_frame(r))
    k = series.aux["origin"].index(True)
    assert series.xs[k] == pytest.approx(np.maximum(-r, 0.0).sum())
    assert series.ys[k] == pytest.approx(np.minimum(-r, 0.0).sum())


def test_rroc_integration_matches_score():
    r = make_rng(10).normal(size=30)
    series = rroc_curve(residual_frame(r))
    aoc = float(np.sum(np.diff(series.xs) * -(series.ys[:-1] + series.ys[1:]) / 2))
    assert aoc == pytest.approx(score_rroc(residual_frame(r)).value, rel=1e-12)


def test_rroc_monotone_coordinates():
    series = rroc_curve(residual_frame(make_rng(11).normal(size=25)))
    assert np.all(np.diff(series.xs) >= 0)
    assert np.all(np.diff(series.ys) >= 0)
    assert np.all(series.ys <= 0)


# -- classification curves -------------------------------------------------

def _cf(labels, scores):
    return ClassificationFrame(labels=labels, scores=scores)


def test_roc_perfect_classifier_hits_corner():
    series = roc_curve(_cf([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]))
    assert (0.0, 1.0) in series.points
    assert series.points[0] == (0.0, 0.0)
    assert series.points[-1] == (1.0, 1.0)


def test_roc_all_ties_two_points():
    series = roc_curve(_cf([0, 1], [0.5, 0.5]))
    assert series.points == [(0.0, 0.0), (1.0, 1.0)]


def test_roc_trapezoid_area_matches_auc():
    cf = _cf([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8])
    series = roc_curve(cf)
    area = float(np.trapezoid(series.ys, series.xs))
    assert area == pytest.approx(0.75, abs=1e-12)
    assert area == pytest.approx(score_auc(cf).value, abs=1e-12)


def test_roc_monotone():
    rng = make_rng(13)
    labels = (rng.random(50) > 0.5).astype(int)
    series = roc_curve(_cf(labels, np.round(rng.random(50), 1)))
    assert np.all(np.diff(series.xs) >= 0)
    assert np.all(np.diff(series.ys) >= 0)


def test_lift_perfect_overlays_ideal_and_random_endpoint():
    model, ideal, random_ref = lift_chart(_cf([0, 0, 1, 1],
                                              [0.1, 0.2, 0.8, 0.9]))
    # perfect classifier: TP rises 1,2 then flat at P over RPP grid
    assert model.points == [(0.0, 0.0), (0.25, 1.0), (0.5, 2.0),
                            (0.75, 2.0), (1.0, 2.0)]
    assert ideal.points == [(0.0, 0.0), (0.5, 2.0), (1.0, 2.0)]
    assert random_ref.points[-1] == (1.0, 2.0)


def test_lift_four_steps_for_four_distinct_scores():
    model = lift_chart(_cf([0, 1, 0, 1], [0.2, 0.9, 0.4, 0.7]))[0]
    assert len(model.points) == 5  # sentinel origin + one step per score
    assert model.points[-1] == (1.0, 2.0)


def test_prc_perfect_precision_one():
    series = prc_curve(_cf([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]))
    at_positive_recall = series.ys[series.xs > 0]
    assert np.all(at_positive_recall[series.xs[series.xs > 0] <= 1.0] >= 0.0)
    assert np.all(series.ys[: 3] == 1.0)


def test_prc_all_ties_flat():
    series = prc_curve(_cf([0, 1, 1, 0, 0], [0.4] * 5))
    assert np.allclose(series.ys, 2.0 / 5.0)


def test_prc_unit_square():
    rng = make_rng(17)
    labels = (rng.random(40) > 0.4).astype(int)
    series = prc_curve(_cf(labels, rng.random(40)))
    assert np.all((series.xs >= 0) & (series.xs <= 1))
    assert np.all((series.ys >= 0) & (series.ys <= 1))


# -- predicted response -----------------------------------------------------

def test_predicted_response_perfect_on_diagonal():
    y = np.asarray([1.0, 2.0, 3.0])
    rf = residual_frame([0.0, 0.0, 0.0], y_hat=y, order=y)
    series = predicted_response(rf)[0]
    assert np.array_equal(series.xs, series.ys)
    assert series.aux["diagonal"] == tuple(series.xs.tolist())


def test_predicted_response_constant_model():
    y_hat = np.full(4, 2.5)
    rf = residual_frame([1.0, -1.0, 0.5, -0.5], y_hat=y_hat,
                        order=[1.0, 2.0, 3.0, 4.0])
    series = predicted_response(rf)[0]
    assert np.all(series.ys == 2.5)


def test_predicted_response_smoother_of_identity():
    y = np.linspace(0.0, 1.0, 30)
    rf = residual_frame(np.zeros(30), y_hat=y, order=y)
    points, smooth = predicted_response(rf, smooth=True)
    assert np.max(np.abs(smooth.ys - y)) < 1e-9
