"""Error metrics and the fit report carried by every fitted model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def metrics(predictions: Sequence[float], truths: Sequence[float]) -> dict[str, float]:
    """Mean squared and mean absolute error.

    Raises ValueError on empty or length-mismatched inputs.
    """
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truths, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("metrics need at least one prediction")
    err = p - t
    return {"mse": float(np.mean(err**2)), "mae": float(np.mean(np.abs(err)))}


@dataclass
class FitReport:
    """Scores and provenance of one fitted model.

    Holds both the in-sample errors and the cross-validation fold scores;
    which of the two a published table reports is ambiguous, so both are
    always available.  MAE <= RMSE holds for any error vector (Jensen)
    and is checked on construction.
    """

    model_kind: str
    target: str
    mse: float
    mae: float
    cv_scores: list[float] = field(default_factory=list)
    hyperparams: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.mse < 0 or self.mae < 0:
            raise ValueError("error metrics must be >= 0")
        rmse = math.sqrt(self.mse)
        if self.mae > rmse + 1e-12 * max(1.0, rmse):
            raise ValueError(f"MAE {self.mae} exceeds RMSE {rmse}; inconsistent errors")

    @property
    def rmse(self) -> float:
        return math.sqrt(self.mse)

    @property
    def cv_mean(self) -> float | None:
        return float(np.mean(self.cv_scores)) if self.cv_scores else None

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind, "target": self.target,
            "mse": self.mse, "mae": self.mae,
            "cv_scores": list(self.cv_scores), "cv_mean": self.cv_mean,
            "hyperparams": self.hyperparams, "seed": self.seed,
        }

    def summary(self) -> str:
        lines = [
            f"model:      {self.model_kind}",
            f"target:     {self.target}",
            f"MSE:        {self.mse:.6g}   (in-sample)",
            f"MAE:        {self.mae:.6g}   (in-sample)",
        ]
        if self.cv_scores:
            folds = ", ".join(f"{s:.4g}" for s in self.cv_scores)
            lines.append(f"CV MSE:     {self.cv_mean:.6g}   folds [{folds}]")
        if self.hyperparams:
            lines.append(f"params:     {self.hyperparams}")
        if self.seed is not None:
            lines.append(f"seed:       {self.seed}")
        return "\n".join(lines)
