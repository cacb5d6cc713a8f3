"""Synthetic demo dataset with planted outliers.

2000 rows: the first 1998 are drawn from a nonlinear response surface over
three uniform variables and one discrete variable, the last two rows are
fixed outliers appended verbatim. Same seed, same bytes.
"""
from __future__ import annotations

import numpy as np

from .frame import AuditFrame
from .numerics import make_rng, normal_sample

DEFAULT_SEED = 1994
N_BASE = 1998
NOISE_VARIANCE = 0.5  # noise is N(0, variance); sd = sqrt(0.5)

X4_LEVELS = (0.0, 1.0, 4.0)
X4_PROBS = (0.5, 0.35, 0.15)

OUTLIER_ROWS = (
    # (y, X1, X2, X3, X4)
    (92.0, 0.32, 0.21, 0.1, 0.0),
    (98.0, 0.86, 0.82, 0.85, 0.0),
)

COLUMNS = ("y", "X1", "X2", "X3", "X4")


def response_surface(x1, x2, x3, x4) -> np.ndarray:
    """Noise-free response underlying the generated data."""
    x1, x2, x3, x4 = (np.asarray(v, dtype=float) for v in (x1, x2, x3, x4))
    return (20.0 * (x1 - 1.0) ** 2
            + 2.0 * (x2 - 0.25) * (x2 - 0.5) * (x2 - 1.0)
            + 22.0 * x3 - 1.0
            + 5.0 * x4 * x1)


def generate_auditor_data(seed: int = DEFAULT_SEED) -> dict[str, np.ndarray]:
    """Generate the 2000-row demo table as named columns (y, X1..X4)."""
    rng = make_rng(seed)
    x1 = rng.random(N_BASE)
    x2 = rng.random(N_BASE)
    x3 = rng.random(N_BASE)
    x4 = rng.choice(np.asarray(X4_LEVELS), size=N_BASE, p=X4_PROBS)
    eps = np.sqrt(NOISE_VARIANCE) * normal_sample(rng, N_BASE)
    y = response_surface(x1, x2, x3, x4) + eps

    outliers = np.asarray(OUTLIER_ROWS)
    return {
        "y": np.concatenate([y, outliers[:, 0]]),
        "X1": np.concatenate([x1, outliers[:, 1]]),
        "X2": np.concatenate([x2, outliers[:, 2]]),
        "X3": np.concatenate([x3, outliers[:, 3]]),
        "X4": np.concatenate([x4, outliers[:, 4]]),
    }


def auditor_data_frame(seed: int = DEFAULT_SEED) -> AuditFrame:
    """The generated table as an AuditFrame (no model predictions yet)."""
    table = generate_auditor_data(seed)
    return AuditFrame(y=table["y"], models=(),
                      variables={k: v for k, v in table.items() if k != "y"})
