import numpy as np
import pytest
from hypothesis import given, strategies as st

from resaudit.errors import ValidationError
from resaudit.frame import (AuditFrame, ClassificationFrame, CurveSeries,
                            ScoreResult, make_residual_frame, sort_by_order)


def test_residuals_are_exact_differences(two_model_frame):
    rf = make_residual_frame(two_model_frame, "good")
    assert np.max(np.abs(two_model_frame.y - rf.y_hat - rf.r)) == 0.0


def test_perfect_fit_residuals_zero():
    frame = AuditFrame(y=[1.0, 2.0], models=(("m", [1.0, 2.0]),))
    rf = make_residual_frame(frame, "m")
    assert rf.r.tolist() == [0.0, 0.0]


def test_direct_subtraction():
    frame = AuditFrame(y=[3.0, 1.0], models=(("m", [1.0, 2.0]),))
    rf = make_residual_frame(frame, "m")
    assert rf.r.tolist() == [2.0, -1.0]


def test_order_key_yhat_uses_predictions(two_model_frame):
    rf = make_residual_frame(two_model_frame, "bad", order_key="_y_hat_")
    assert np.array_equal(rf.order_values, two_model_frame.prediction("bad"))


def test_order_key_variants(two_model_frame):
    assert np.array_equal(
        make_residual_frame(two_model_frame, "good", "_y_").order_values,
        two_model_frame.y)
    assert np.array_equal(
        make_residual_frame(two_model_frame, "good", "_index_").order_values,
        np.arange(5.0))
    assert np.array_equal(
        make_residual_frame(two_model_frame, "good", "X1").order_values,
        two_model_frame.variables["X1"])


def test_unknown_label_rejected(two_model_frame):
    with pytest.raises(ValidationError, match="unknown model label"):
        make_residual_frame(two_model_frame, "nope")


def test_categorical_order_key_rejected(two_model_frame):
    with pytest.raises(ValidationError, match="categorical"):
        make_residual_frame(two_model_frame, "good", order_key="cat")


def test_unknown_order_key_rejected(two_model_frame):
    with pytest.raises(ValidationError, match="unknown order key"):
        make_residual_frame(two_model_frame, "good", order_key="X9")


def test_nan_rejected_at_ingestion():
    with pytest.raises(ValidationError, match="non-finite"):
        AuditFrame(y=[1.0, float("nan")], models=())
    with pytest.raises(ValidationError, match="non-finite"):
        AuditFrame(y=[1.0, 2.0], models=(("m", [1.0, float("inf")]),))


def test_duplicate_and_empty_labels_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        AuditFrame(y=[1.0], models=(("m", [1.0]), ("m", [2.0])))
    with pytest.raises(ValidationError, match="non-empty"):
        AuditFrame(y=[1.0], models=(("", [1.0]),))


def test_sort_permutation_example():
    rf = _rf_with_order([10.0, 20.0, 30.0], [3.0, 1.0, 2.0])
    out = sort_by_order(rf)
    assert out.r.tolist() == [20.0, 30.0, 10.0]
    assert out.order_values.tolist() == [1.0, 2.0, 3.0]


def test_sort_all_ties_is_identity():
    rf = _rf_with_order([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])
    assert sort_by_order(rf).r.tolist() == [1.0, 2.0, 3.0]


def test_sort_sorted_input_is_identity():
    rf = _rf_with_order([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert sort_by_order(rf).r.tolist() == [1.0, 2.0, 3.0]


def _rf_with_order(r, order):
    from conftest import residual_frame
    return residual_frame(r, order=order)


@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)),
                min_size=1, max_size=60))
def test_sort_is_idempotent_permutation(pairs):
    r = np.asarray([p[0] for p in pairs])
    order = np.asarray([p[1] for p in pairs])
    rf = _rf_with_order(r, order)
    once = sort_by_order(rf)
    twice = sort_by_order(once)
    rows = sorted(zip(rf.r, rf.order_values))
    assert sorted(zip(once.r, once.order_values)) == rows
    assert np.array_equal(once.r, twice.r)
    assert np.all(np.diff(once.order_values) >= 0)


def test_classification_frame_counts():
    cf = ClassificationFrame(labels=[0, 1, 1, 0, 1], scores=[0.1] * 5)
    assert (cf.positives, cf.negatives, cf.n) == (3, 2, 5)


def test_classification_frame_rejects_nonbinary():
    with pytest.raises(ValidationError, match="only 0 and 1"):
        ClassificationFrame(labels=[0, 2], scores=[0.1, 0.2])


def test_curve_series_validation():
    with pytest.raises(ValidationError, match="non-decreasing"):
        CurveSeries(kind="rec", label="m", xs=[1.0, 0.5], ys=[0.1, 0.2])
    with pytest.raises(ValidationError, match="unknown plot kind"):
        CurveSeries(kind="bogus", label="m", xs=[0.0], ys=[0.0])
    with pytest.raises(ValidationError):
        CurveSeries(kind="residual", label="m", xs=[], ys=[])
    series = CurveSeries(kind="residual", label="m", xs=[1.0, 2.0],
                         ys=[3.0, 4.0], aux={"index": (0, 1)})
    assert series.points == [(1.0, 3.0), (2.0, 4.0)]


def test_score_result_requires_finite():
    with pytest.raises(ValidationError, match="non-finite"):
        ScoreResult("mae", "m", float("nan"))


def test_frames_are_immutable(two_model_frame):
    with pytest.raises(ValueError):
        two_model_frame.y[0] = 99.0
