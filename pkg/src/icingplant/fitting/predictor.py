"""Fitted-model artifacts with a uniform evaluation contract.

Three variants exist: polynomial (sparse product terms), regression tree
(binary splits, leaf means) and MLP (dense layers, standardised inputs).
All expose ``evaluate(values: Mapping[str, float]) -> float`` and a
vectorised ``predict(X)`` over rows ordered like ``input_names``, and all
round-trip through JSON bit-exactly (floats survive json via repr).

The production models for the nozzle temperature and the droplet median
diameter are built from their published coefficients by
:func:`t_n_polynomial`, :func:`mvd_qa_factored` and
:func:`mvd_products_4`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

ACTIVATIONS = ("sigmoid", "tanh", "relu")


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    raise ValueError(f"unknown activation: {name!r}")


@dataclass
class PolynomialPredictor:
    """Sum of coefficient * product-of-powers terms.

    ``terms`` is a list of (coefficient, ((variable, power), ...)); an
    empty power tuple is the constant term.
    """

    input_names: tuple[str, ...]
    output_name: str
    terms: list[tuple[float, tuple[tuple[str, int], ...]]]
    meta: dict = field(default_factory=dict)
    kind = "polynomial"

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for coef, powers in self.terms:
            term = coef
            for var, p in powers:
                term *= values[var] ** p
            total += term
        return total

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = {name: i for i, name in enumerate(self.input_names)}
        out = np.zeros(len(x))
        for coef, powers in self.terms:
            term = np.full(len(x), coef)
            for var, p in powers:
                term *= x[:, idx[var]] ** p
            out += term
        return out

    def to_dict(self) -> dict:
        return {
            "variant": "polynomial",
            "input_names": list(self.input_names),
            "output_name": self.output_name,
            "terms": [[c, [[v, p] for v, p in powers]] for c, powers in self.terms],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolynomialPredictor":
        terms = [(float(c), tuple((v, int(p)) for v, p in powers))
                 for c, powers in d["terms"]]
        return cls(tuple(d["input_names"]), d["output_name"], terms,
                   d.get("meta", {}))


@dataclass
class TreePredictor:
    """CART regression tree: internal nodes {var, threshold, left, right},
    leaves {value}.  A sample goes left when value <= threshold."""

    input_names: tuple[str, ...]
    output_name: str
    root: dict
    meta: dict = field(default_factory=dict)
    kind = "tree"

    def evaluate(self, values: Mapping[str, float]) -> float:
        node = self.root
        while "value" not in node:
            node = node["left"] if values[node["var"]] <= node["threshold"] else node["right"]
        return node["value"]

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        names = self.input_names
        return np.array([
            self.evaluate({n: row[i] for i, n in enumerate(names)}) for row in x
        ])

    def depth(self) -> int:
        def d(node):
            if "value" in node:
                return 0
            return 1 + max(d(node["left"]), d(node["right"]))
        return d(self.root)

    def n_leaves(self) -> int:
        def c(node):
            if "value" in node:
                return 1
            return c(node["left"]) + c(node["right"])
        return c(self.root)

    def path_thresholds_consistent(self) -> bool:
        """Thresholds are ordered along every root-leaf path per variable:
        a left branch tightens the upper bound, a right branch the lower."""
        def walk(node, lo, hi):
            if "value" in node:
                return True
            var, thr = node["var"], node["threshold"]
            if not (lo.get(var, -np.inf) < thr < hi.get(var, np.inf)):
                return False
            hi_l = dict(hi); hi_l[var] = thr
            lo_r = dict(lo); lo_r[var] = thr
            return walk(node["left"], lo, hi_l) and walk(node["right"], lo_r, hi)
        return walk(self.root, {}, {})

    def to_dict(self) -> dict:
        return {
            "variant": "tree",
            "input_names": list(self.input_names),
            "output_name": self.output_name,
            "root": self.root,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreePredictor":
        return cls(tuple(d["input_names"]), d["output_name"], d["root"],
                   d.get("meta", {}))


@dataclass
class MLPPredictor:
    """Feed-forward network with a linear output layer.

    Inputs and target are standardised at fit time; the scaling constants
    travel with the artifact so evaluation takes raw plant-unit values.
    """

    input_names: tuple[str, ...]
    output_name: str
    layer_sizes: tuple[int, ...]          # input, hidden..., output(=1)
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float = 0.0
    y_scale: float = 1.0
    meta: dict = field(default_factory=dict)
    kind = "mlp"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        for i, w in enumerate(self.weights):
            if w.shape != (self.layer_sizes[i], self.layer_sizes[i + 1]):
                raise ValueError("weight shapes do not chain with layer_sizes")

    def raw_forward(self, x_std: np.ndarray) -> np.ndarray:
        """Network output on already-standardised inputs (no de-scaling)."""
        a = np.asarray(x_std, dtype=float)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = _act(self.activation, a @ w + b)
        return (a @ self.weights[-1] + self.biases[-1])[:, 0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x_std = (x - self.x_mean) / self.x_scale
        return self.raw_forward(x_std) * self.y_scale + self.y_mean

    def evaluate(self, values: Mapping[str, float]) -> float:
        row = np.array([[values[n] for n in self.input_names]])
        return float(self.predict(row)[0])

    def to_dict(self) -> dict:
        return {
            "variant": "mlp",
            "input_names": list(self.input_names),
            "output_name": self.output_name,
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "activation": self.activation,
            "x_mean": self.x_mean.tolist(),
            "x_scale": self.x_scale.tolist(),
            "y_mean": self.y_mean,
            "y_scale": self.y_scale,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLPPredictor":
        return cls(
            tuple(d["input_names"]), d["output_name"], tuple(d["layer_sizes"]),
            [np.array(w, dtype=float) for w in d["weights"]],
            [np.array(b, dtype=float) for b in d["biases"]],
            d["activation"],
            np.array(d["x_mean"], dtype=float), np.array(d["x_scale"], dtype=float),
            float(d["y_mean"]), float(d["y_scale"]), d.get("meta", {}),
        )


Predictor = PolynomialPredictor | TreePredictor | MLPPredictor

_VARIANTS = {"polynomial": PolynomialPredictor, "tree": TreePredictor,
             "mlp": MLPPredictor}


def predictor_from_dict(d: dict) -> Predictor:
    try:
        cls = _VARIANTS[d["variant"]]
    except KeyError:
        raise ValueError(f"unknown predictor variant: {d.get('variant')!r}") from None
    return cls.from_dict(d)


def save_predictor(pred: Predictor, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pred.to_dict(), fh, indent=2)
        fh.write("\n")


def load_predictor(path: str) -> Predictor:
    with open(path, encoding="utf-8") as fh:
        return predictor_from_dict(json.load(fh))


def _linear_terms(constant: Optional[float],
                  coeffs: Sequence[tuple[float, tuple[str, ...]]]):
    terms = []
    if constant is not None:
        terms.append((constant, ()))
    for coef, variables in coeffs:
        terms.append((coef, tuple((v, 1) for v in variables)))
    return terms


def t_n_polynomial() -> PolynomialPredictor:
    """Nozzle mix temperature model (degC in, degC out)."""
    return PolynomialPredictor(
        input_names=("T_TS", "T_w", "T_a"),
        output_name="T_n",
        terms=_linear_terms(-79.5664, [
            (1.4220, ("T_TS",)),
            (3.6303, ("T_w",)),
            (-1.8113, ("T_a",)),
        ]),
        meta={"source": "builtin"},
    )


def mvd_qa_factored() -> PolynomialPredictor:
    """Median-diameter model where the air flow multiplies every
    non-constant term (the simpler of the two published forms)."""
    return PolynomialPredictor(
        input_names=("Q_a", "LWC", "T_TS", "v_TS"),
        output_name="MVD",
        terms=_linear_terms(44.3881, [
            (-0.6299, ("Q_a",)),
            (0.0178, ("Q_a", "v_TS")),
            (0.0257, ("Q_a", "T_TS")),
            (-0.1530, ("Q_a", "LWC")),
            (0.0012, ("Q_a", "v_TS", "T_TS")),
            (-0.0035, ("Q_a", "v_TS", "LWC")),
            (-0.0546, ("Q_a", "T_TS", "LWC")),
            (0.0003, ("Q_a", "v_TS", "T_TS", "LWC")),
        ]),
        meta={"source": "builtin"},
    )


def mvd_products_4() -> PolynomialPredictor:
    """Median-diameter model over all products of 1 to 4 distinct
    variables among Q_a, LWC, T_TS, v_TS (15 terms, no intercept).  The
    production default."""
    return PolynomialPredictor(
        input_names=("Q_a", "LWC", "T_TS", "v_TS"),
        output_name="MVD",
        terms=_linear_terms(None, [
            (-7.6323, ("T_TS",)),
            (0.8825, ("v_TS",)),
            (8.8270, ("LWC",)),
            (4.4380, ("Q_a",)),
            (0.1419, ("v_TS", "T_TS")),
            (0.4914, ("T_TS", "LWC")),
            (-0.1066, ("v_TS", "LWC")),
            (0.8393, ("Q_a", "T_TS")),
            (-0.0812, ("Q_a", "v_TS")),
            (-0.9817, ("Q_a", "LWC")),
            (0.0189, ("v_TS", "T_TS", "LWC")),
            (-0.0141, ("Q_a", "T_TS", "v_TS")),
            (-0.111, ("Q_a", "T_TS", "LWC")),
            (-0.0037, ("Q_a", "v_TS", "LWC")),
            (-0.0023, ("Q_a", "T_TS", "v_TS", "LWC")),
        ]),
        meta={"source": "builtin"},
    )
