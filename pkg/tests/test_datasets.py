import numpy as np
import pytest

from resaudit.datasets import (N_BASE, generate_auditor_data, response_surface)


def test_shape_and_columns():
    table = generate_auditor_data(seed=1)
    assert list(table) == ["y", "X1", "X2", "X3", "X4"]
    assert all(col.shape == (2000,) for col in table.values())


def test_planted_outlier_rows():
    table = generate_auditor_data(seed=7)
    row_1999 = tuple(table[c][1998] for c in ("y", "X1", "X2", "X3", "X4"))
    row_2000 = tuple(table[c][1999] for c in ("y", "X1", "X2", "X3", "X4"))
    assert row_1999 == (92.0, 0.32, 0.21, 0.1, 0.0)
    assert row_2000 == (98.0, 0.86, 0.82, 0.85, 0.0)


def test_same_seed_identical_tables():
    a = generate_auditor_data(seed=11)
    b = generate_auditor_data(seed=11)
    for name in a:
        assert np.array_equal(a[name], b[name])
    c = generate_auditor_data(seed=12)
    assert not np.array_equal(a["y"], c["y"])


def test_discrete_variable_probabilities():
    table = generate_auditor_data(seed=1994)
    x4 = table["X4"][:N_BASE]
    assert set(np.unique(x4)) <= {0.0, 1.0, 4.0}
    assert np.mean(x4 == 0.0) == pytest.approx(0.50, abs=0.03)
    assert np.mean(x4 == 1.0) == pytest.approx(0.35, abs=0.03)
    assert np.mean(x4 == 4.0) == pytest.approx(0.15, abs=0.03)


def test_uniform_variables_in_unit_interval():
    table = generate_auditor_data(seed=2)
    for name in ("X1", "X2", "X3"):
        col = table[name][:N_BASE]
        assert col.min() >= 0.0 and col.max() <= 1.0
        assert abs(col.mean() - 0.5) < 0.03


def test_noise_variance_near_half():
    table = generate_auditor_data(seed=3)
    deterministic = response_surface(table["X1"][:N_BASE],
                                     table["X2"][:N_BASE],
                                     table["X3"][:N_BASE],
                                     table["X4"][:N_BASE])
    noise = table["y"][:N_BASE] - deterministic
    assert np.var(noise, ddof=1) == pytest.approx(0.5, abs=0.05)
    assert abs(noise.mean()) < 0.05
