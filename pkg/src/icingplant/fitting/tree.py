"""CART regression trees, grown greedily from scratch.

Each binary split minimises the summed squared error of the two children;
candidate thresholds are midpoints between consecutive distinct sorted
values.  Ties are broken deterministically: lowest feature index first,
then lowest threshold.  Leaves predict the mean of their training
records.  Growth stops at max_depth, when a node holds fewer than
2*min_leaf records, or when no split reduces the error.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .crossval import cross_validate
from .dataset import Dataset, DatasetError
from .metrics import FitReport, metrics
from .predictor import TreePredictor


def _sse(y: np.ndarray) -> float:
    return float(np.sum((y - y.mean()) ** 2)) if len(y) else 0.0


def best_split(x: np.ndarray, y: np.ndarray, min_leaf: int
               ) -> tuple[int, float, float] | None:
    """(feature, threshold, child SSE sum) of the best admissible split,
    or None when no split keeps both children at min_leaf records."""
    n, d = x.shape
    best: tuple[int, float, float] | None = None
    for j in range(d):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        ys = y[order]
        # prefix sums give each left/right SSE in O(1)
        csum = np.cumsum(ys)
        csq = np.cumsum(ys**2)
        total_sum = csum[-1]
        total_sq = csq[-1]
        for i in range(min_leaf, n - min_leaf + 1):
            if i < 1 or i > n - 1 or xs[i - 1] == xs[i]:
                continue
            left_sum, left_sq = csum[i - 1], csq[i - 1]
            sse_l = left_sq - left_sum**2 / i
            right_sum = total_sum - left_sum
            sse_r = (total_sq - left_sq) - right_sum**2 / (n - i)
            score = sse_l + sse_r
            threshold = 0.5 * (xs[i - 1] + xs[i])
            if best is None or score < best[2] - 1e-12 or (
                    abs(score - best[2]) <= 1e-12
                    and (j, threshold) < (best[0], best[1])):
                best = (j, threshold, score)
    return best


def _grow(x: np.ndarray, y: np.ndarray, depth: int, max_depth: int,
          min_leaf: int, names: Sequence[str]) -> dict:
    if depth >= max_depth or len(y) < 2 * min_leaf or _sse(y) == 0.0:
        return {"value": float(y.mean()), "n": int(len(y))}
    split = best_split(x, y, min_leaf)
    if split is None or split[2] >= _sse(y) - 1e-12:
        return {"value": float(y.mean()), "n": int(len(y))}
    j, threshold, _ = split
    mask = x[:, j] <= threshold
    return {
        "var": names[j],
        "threshold": float(threshold),
        "left": _grow(x[mask], y[mask], depth + 1, max_depth, min_leaf, names),
        "right": _grow(x[~mask], y[~mask], depth + 1, max_depth, min_leaf, names),
    }


def fit_tree(ds: Dataset, target: str, input_names: Sequence[str],
             max_depth: int = 4, min_leaf: int = 2,
             cv_folds: int = 5, seed: int = 0) -> tuple[TreePredictor, FitReport]:
    """Grow a CART regression tree for the target."""
    if len(ds) < 2 * min_leaf:
        raise DatasetError(f"need at least {2 * min_leaf} records, have {len(ds)}")
    x = np.column_stack([ds.column(v) for v in input_names])
    y = ds.column(target)

    root = _grow(x, y, 0, max_depth, min_leaf, list(input_names))
    predictor = TreePredictor(
        input_names=tuple(input_names), output_name=target, root=root,
        meta={"max_depth": max_depth, "min_leaf": min_leaf, "seed": seed},
    )

    def fit_predict(x_tr, y_tr, x_te):
        sub_root = _grow(x_tr, y_tr, 0, max_depth, min_leaf, list(input_names))
        sub = TreePredictor(tuple(input_names), target, sub_root)
        return sub.predict(x_te)

    cv_scores: list[float] = []
    if cv_folds and len(ds) >= cv_folds:
        cv_scores, _ = cross_validate(x, y, fit_predict, k=cv_folds, seed=seed)

    in_sample = metrics(predictor.predict(x), y)
    report = FitReport(
        model_kind="tree", target=target,
        mse=in_sample["mse"], mae=in_sample["mae"],
        cv_scores=cv_scores,
        hyperparams={"max_depth": max_depth, "min_leaf": min_leaf},
        seed=seed,
    )
    return predictor, report
