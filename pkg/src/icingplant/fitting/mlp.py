"""Feed-forward networks trained by full-batch gradient descent, and the
grid search over the architecture space (1-3 hidden layers, 2-10 neurons
each, sigmoid/tanh/relu).

Backpropagation is implemented directly so the analytic gradients can be
checked against central finite differences.  Training standardises both
inputs and target; the scaling constants end up inside the returned
MLPPredictor so evaluation takes raw plant-unit values.  Every candidate
is trained from a seed derived from (base seed, candidate index), which
makes the search deterministic and lets candidates be scored in any
order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .crossval import cross_validate
from .dataset import Dataset, DatasetError
from .metrics import FitReport, metrics
from .predictor import ACTIVATIONS, MLPPredictor

logger = logging.getLogger(__name__)


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if name == "tanh":
        return np.tanh(z)
    return np.maximum(z, 0.0)


def _dact_from_out(name: str, a: np.ndarray) -> np.ndarray:
    # derivative expressed through the activation output
    if name == "sigmoid":
        return a * (1.0 - a)
    if name == "tanh":
        return 1.0 - a * a
    return (a > 0).astype(float)


class MLPNet:
    """Bare network on standardised data: weights, forward, backprop."""

    def __init__(self, layer_sizes: Sequence[int], activation: str, seed: int):
        if activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        rng = np.random.default_rng(seed)
        self.layer_sizes = tuple(layer_sizes)
        self.activation = activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
            # small nonzero bias keeps relu pre-activations off exact zero
            self.biases.append(rng.uniform(-0.1, 0.1, fan_out))

    def forward(self, x: np.ndarray) -> list[np.ndarray]:
        """Layer outputs, input first, linear output last."""
        a = np.asarray(x, dtype=float)
        outs = [a]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = _act(self.activation, a @ w + b)
            outs.append(a)
        outs.append(a @ self.weights[-1] + self.biases[-1])
        return outs

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[-1][:, 0]

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean((self.predict(x) - y) ** 2))

    def gradients(self, x: np.ndarray, y: np.ndarray
                  ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Analytic gradient of the MSE loss w.r.t. weights and biases."""
        outs = self.forward(x)
        n = len(x)
        delta = 2.0 * (outs[-1] - np.asarray(y, dtype=float)[:, None]) / n
        grads_w: list[np.ndarray] = [np.empty(0)] * len(self.weights)
        grads_b: list[np.ndarray] = [np.empty(0)] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = outs[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * _dact_from_out(
                    self.activation, outs[i])
        return grads_w, grads_b

    def train(self, x: np.ndarray, y: np.ndarray, learning_rate: float,
              epochs: int) -> float:
        """Plain full-batch gradient descent; returns the final loss."""
        for _ in range(epochs):
            gw, gb = self.gradients(x, y)
            for i in range(len(self.weights)):
                self.weights[i] -= learning_rate * gw[i]
                self.biases[i] -= learning_rate * gb[i]
        return self.loss(x, y)

    def min_abs_preactivation(self, x: np.ndarray) -> float:
        """Smallest |pre-activation| over hidden layers; finite-difference
        gradient checks are only meaningful away from relu kinks."""
        a = np.asarray(x, dtype=float)
        smallest = np.inf
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ w + b
            smallest = min(smallest, float(np.min(np.abs(z))))
            a = _act(self.activation, z)
        return smallest


@dataclass
class TrainingProtocol:
    """Pinned training hyperparameters; recorded in every FitReport."""

    learning_rate: float = 0.05
    epochs: int = 3000

    def as_dict(self) -> dict:
        return {"learning_rate": self.learning_rate, "epochs": self.epochs}


@dataclass
class SearchSpace:
    """Architecture lattice for the grid search."""

    hidden_layers: tuple[int, ...] = (1, 2, 3)
    neurons: tuple[int, ...] = tuple(range(2, 11))
    activations: tuple[str, ...] = ACTIVATIONS

    def candidates(self) -> list[tuple[tuple[int, ...], str]]:
        out = []
        for depth in self.hidden_layers:
            for sizes in product(self.neurons, repeat=depth):
                for act in self.activations:
                    out.append((sizes, act))
        return out


def small_search_space() -> SearchSpace:
    """Reduced lattice for interactive use; the full space is the
    default-constructed SearchSpace."""
    return SearchSpace(hidden_layers=(1, 2), neurons=(2, 4, 7, 10))


def _standardise(v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = v.mean(axis=0)
    scale = v.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return (v - mean) / scale, mean, scale


def train_candidate(x: np.ndarray, y: np.ndarray, sizes: tuple[int, ...],
                    activation: str, protocol: TrainingProtocol, seed: int
                    ) -> tuple[MLPNet, tuple]:
    x_std, x_mean, x_scale = _standardise(x)
    y_std, y_mean, y_scale = _standardise(y[:, None])
    net = MLPNet((x.shape[1], *sizes, 1), activation, seed)
    net.train(x_std, y_std[:, 0], protocol.learning_rate, protocol.epochs)
    return net, (x_mean, x_scale, float(y_mean[0]), float(y_scale[0]))


def fit_mlp(ds: Dataset, target: str, input_names: Sequence[str],
            space: SearchSpace | None = None,
            protocol: TrainingProtocol | None = None,
            cv_folds: int = 5, seed: int = 0) -> tuple[MLPPredictor, FitReport]:
    """Grid search by mean k-fold CV MSE; the winner is retrained on all
    records.  Candidates whose training produces a non-finite loss are
    rejected and logged.
    """
    if len(ds) < 10:
        raise DatasetError("mlp fitting needs at least 10 records")
    space = space or SearchSpace()
    protocol = protocol or TrainingProtocol()
    x = np.column_stack([ds.column(v) for v in input_names])
    y = ds.column(target)

    results: list[tuple[float, int, tuple[int, ...], str, list[float]]] = []
    for ci, (sizes, act) in enumerate(space.candidates()):
        cand_seed = seed * 100003 + ci

        def fit_predict(x_tr, y_tr, x_te, _sizes=sizes, _act=act, _seed=cand_seed):
            net, (xm, xs, ym, ys) = train_candidate(
                x_tr, y_tr, _sizes, _act, protocol, _seed)
            return net.predict((x_te - xm) / xs) * ys + ym

        try:
            scores, mean_score = cross_validate(x, y, fit_predict, k=cv_folds, seed=seed)
        except FloatingPointError:
            logger.warning("candidate %s/%s rejected: non-finite loss", sizes, act)
            continue
        if not np.isfinite(mean_score):
            logger.warning("candidate %s/%s rejected: non-finite CV score", sizes, act)
            continue
        results.append((mean_score, ci, sizes, act, scores))

    if not results:
        raise DatasetError("every MLP candidate diverged")
    results.sort(key=lambda r: (r[0], r[1]))
    _, ci, sizes, act, cv_scores = results[0]

    net, (xm, xs, ym, ys) = train_candidate(x, y, sizes, act, protocol,
                                            seed * 100003 + ci)
    predictor = MLPPredictor(
        input_names=tuple(input_names), output_name=target,
        layer_sizes=net.layer_sizes,
        weights=[w.copy() for w in net.weights],
        biases=[b.copy() for b in net.biases],
        activation=act, x_mean=xm, x_scale=xs, y_mean=ym, y_scale=ys,
        meta={"seed": seed, "candidate": ci, **protocol.as_dict()},
    )
    in_sample = metrics(predictor.predict(x), y)
    report = FitReport(
        model_kind="mlp", target=target,
        mse=in_sample["mse"], mae=in_sample["mae"],
        cv_scores=cv_scores,
        hyperparams={"hidden": list(sizes), "activation": act,
                     **protocol.as_dict()},
        seed=seed,
    )
    return predictor, report


def tn_mlp_structure() -> tuple[tuple[int, ...], str]:
    """Selected nozzle-temperature network: two hidden layers of 10 and
    4 neurons, sigmoid."""
    return (10, 4), "sigmoid"


def mvd_mlp_structure() -> tuple[tuple[int, ...], str]:
    """Selected droplet-diameter network: two hidden layers of 2 and 7
    neurons, relu."""
    return (2, 7), "relu"
