"""Deterministic k-fold cross-validation.

Fold assignment starts from a content-keyed canonical order (lexicographic
sort of the rows) followed by a seeded shuffle, so permuting the input
rows changes nothing and the same seed always yields the same folds.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .metrics import metrics


def fold_indices(x: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Split row indices of ``x`` into k folds, deterministically.

    Raises ValueError when k exceeds the number of rows.
    """
    n = len(x)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available records")
    canonical = np.lexsort(np.asarray(x, dtype=float).T[::-1])
    rng = np.random.default_rng(seed)
    shuffled = canonical[rng.permutation(n)]
    return [np.sort(part) for part in np.array_split(shuffled, k)]


def cross_validate(x: np.ndarray, y: np.ndarray,
                   fit_predict: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
                   k: int = 5, seed: int = 0) -> tuple[list[float], float]:
    """Held-out MSE per fold plus the mean.

    ``fit_predict(x_train, y_train, x_test)`` must return predictions for
    ``x_test``; each fold is held out exactly once.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    folds = fold_indices(np.column_stack([x, y]), k, seed)
    scores = []
    for test_idx in folds:
        mask = np.ones(len(x), dtype=bool)
        mask[test_idx] = False
        pred = fit_predict(x[mask], y[mask], x[test_idx])
        scores.append(metrics(pred, y[test_idx])["mse"])
    return scores, float(np.mean(scores))
