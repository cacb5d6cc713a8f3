import sys
from pathlib import Path

import numpy as np
import pytest

from resaudit.frame import AuditFrame, ResidualFrame

FIXTURES = Path(__file__).parent / "fixtures"

#: command line for the stdlib test-double adapter
TOY_ADAPTER = [sys.executable, str(FIXTURES / "toy_adapter.py")]


def residual_frame(r, order=None, label="m", y_hat=None):
    """Build a ResidualFrame with prescribed residuals (and optional ordering)."""
    r = np.asarray(r, dtype=float)
    y_hat = np.zeros_like(r) if y_hat is None else np.asarray(y_hat, dtype=float)
    order_values = np.arange(r.size, dtype=float) if order is None \
        else np.asarray(order, dtype=float)
    return ResidualFrame(label=label, y=y_hat + r, y_hat=y_hat, r=r,
                         order_key="_index_" if order is None else "custom",
                         order_values=order_values)


@pytest.fixture
def two_model_frame():
    y = np.asarray([1.0, 2.0, 3.0, 4.0, 5.0])
    return AuditFrame(
        y=y,
        models=(("good", y + np.asarray([0.1, -0.1, 0.2, -0.2, 0.0])),
                ("bad", y + np.asarray([1.0, -2.0, 1.5, -0.5, 2.0]))),
        variables={"X1": np.asarray([0.5, 0.1, 0.9, 0.3, 0.7]),
                   "cat": np.asarray(["a", "b", "a", "b", "a"])})
