"""Reference statistics of the thirty commissioning experiments.

These numbers anchor the synthetic-data generator, the input-envelope
warnings and the reference reporting in the CLI.  Variable order is fixed
and doubles as the dataset CSV column order.
"""

from __future__ import annotations

import numpy as np

VARIABLES = ("T_TS", "T_w", "T_a", "T_n", "v_TS", "LWC", "MVD", "Q_a", "Q_w")

UNITS = {
    "T_TS": "degC", "T_w": "degC", "T_a": "degC", "T_n": "degC",
    "v_TS": "m/s", "LWC": "g/m3", "MVD": "um", "Q_a": "L/min", "Q_w": "L/h",
}

# per-variable (mean, std, min, q25, q50, q75, max)
REFERENCE_STATS = {
    "T_TS": (-6.5, 2.9, -15.0, -7.6, -6.0, -5.0, -1.2),
    "T_w": (70.4, 1.0, 67.0, 70.0, 70.1, 71.0, 73.0),
    "T_a": (70.7, 1.8, 68.0, 70.0, 70.0, 70.0, 74.0),
    "T_n": (38.7, 10.1, 24.0, 31.6, 37.8, 42.0, 70.0),
    "v_TS": (34.2, 12.3, 25.0, 25.0, 25.0, 50.0, 50.0),
    "LWC": (1.4, 0.9, 0.3, 0.6, 1.0, 2.5, 2.5),
    "MVD": (32.7, 9.7, 16.9, 25.4, 30.9, 42.8, 48.8),
    "Q_a": (23.7, 17.6, 10.0, 10.0, 15.0, 30.0, 55.0),
    "Q_w": (9.0, 2.8, 4.5, 8.1, 8.1, 11.2, 13.5),
}

STAT_NAMES = ("mean", "std", "min", "q25", "q50", "q75", "max")

# Pearson correlation between the nine variables, VARIABLES order
REFERENCE_CORRELATION = np.array([
    [1.00, -0.18, -0.05, 0.36, -0.16, 0.39, -0.11, 0.19, 0.25],
    [-0.18, 1.00, 0.24, 0.23, -0.04, 0.20, 0.08, -0.20, 0.09],
    [-0.05, 0.24, 1.00, -0.25, 0.23, 0.03, 0.24, -0.33, 0.03],
    [0.36, 0.23, -0.25, 1.00, -0.01, 0.48, 0.08, -0.07, 0.47],
    [-0.16, -0.04, 0.23, -0.01, 1.00, -0.06, -0.16, 0.18, 0.35],
    [0.39, 0.20, 0.03, 0.48, -0.06, 1.00, -0.10, -0.01, 0.75],
    [-0.11, 0.08, 0.24, 0.08, -0.16, -0.10, 1.00, -0.83, -0.03],
    [0.19, -0.20, -0.33, -0.07, 0.18, -0.01, -0.83, 1.00, 0.02],
    [0.25, 0.09, 0.03, 0.47, 0.35, 0.75, -0.03, 0.02, 1.00],
])

# reported model errors on the commissioning data (reference context only,
# never asserted: the training data is not published)
REFERENCE_MODEL_ERRORS = {
    "T_n": {
        "polynomial": {"mse": 66.70, "mae": 6.20},
        "tree": {"mse": 10.68, "mae": 2.03},
        "mlp": {"mse": 9.57, "mae": 1.97},
    },
    "MVD": {
        "polynomial_qa_factored": {"mse": 20.70, "mae": 3.71},
        "polynomial_products_4": {"mse": 17.47, "mae": 2.84},
        "tree": {"mse": 16.50, "mae": 3.10},
        "mlp": {"mse": 16.79, "mae": 3.11},
    },
}


def variable_range(name: str) -> tuple[float, float]:
    s = REFERENCE_STATS[name]
    return s[2], s[6]


def envelope_warnings(values: dict[str, float]) -> list[str]:
    """Warnings for inputs outside the commissioning-data envelope.

    Boundary values are inside: the envelope is the closed [min, max]
    interval of each variable.
    """
    out = []
    for name, value in values.items():
        lo, hi = variable_range(name)
        if value < lo or value > hi:
            out.append(
                f"{name}={value:.4g} {UNITS[name]} outside data envelope "
                f"[{lo:.4g}, {hi:.4g}]")
    return out
