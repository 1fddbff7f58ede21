"""Descriptive statistics and the correlation matrix of a dataset."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, DatasetError
from .tables import VARIABLES


def describe(ds: Dataset) -> dict[str, dict[str, float]]:
    """Per-variable mean, std (n-1 denominator), min, quartiles and max.

    Quantiles use linear interpolation.  Needs at least two records.
    """
    if len(ds) < 2:
        raise DatasetError("describe needs at least 2 records")
    x = ds.to_matrix()
    out = {}
    for i, name in enumerate(VARIABLES):
        col = x[:, i]
        q25, q50, q75 = np.quantile(col, [0.25, 0.5, 0.75])
        out[name] = {
            "mean": float(np.mean(col)),
            "std": float(np.std(col, ddof=1)),
            "min": float(np.min(col)),
            "q25": float(q25),
            "q50": float(q50),
            "q75": float(q75),
            "max": float(np.max(col)),
        }
    return out


def correlation_matrix(ds: Dataset) -> np.ndarray:
    """9x9 Pearson correlation matrix in VARIABLES order.

    A zero-variance column is an error naming the column: correlation is
    undefined there.
    """
    if len(ds) < 2:
        raise DatasetError("correlation needs at least 2 records")
    x = ds.to_matrix()
    variances = np.var(x, axis=0)
    dead = [VARIABLES[i] for i in np.nonzero(variances == 0.0)[0]]
    if dead:
        raise DatasetError(f"zero-variance column(s): {', '.join(dead)}")
    c = np.corrcoef(x, rowvar=False)
    # enforce exact symmetry and a unit diagonal against rounding noise
    c = 0.5 * (c + c.T)
    np.fill_diagonal(c, 1.0)
    return c
