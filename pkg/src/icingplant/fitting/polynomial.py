"""Polynomial least-squares fitting over sparse product-term structures.

The two production term structures mirror the production model forms: the
nozzle-temperature model is an intercept plus one linear term per
temperature, and the droplet-diameter models are either "air flow times
every combination of up to three of the remaining variables" or "every
product of one to four distinct variables, no intercept".  Fitting is
ordinary least squares through an orthogonal decomposition (SVD), never
the normal equations.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .crossval import cross_validate
from .dataset import Dataset, DatasetError
from .metrics import FitReport, metrics
from .predictor import PolynomialPredictor

# a term is a tuple of variable names multiplied together; () is the constant
TermStructure = tuple[tuple[str, ...], ...]


def tn_linear_structure() -> TermStructure:
    """Intercept plus the three temperatures, to the power one."""
    return ((), ("T_TS",), ("T_w",), ("T_a",))


def mvd_qa_factored_structure() -> TermStructure:
    """Constant plus Q_a times all combinations of 0..3 of LWC, T_TS, v_TS."""
    others = ("v_TS", "T_TS", "LWC")
    terms: list[tuple[str, ...]] = [()]
    for r in range(0, 4):
        for combo in combinations(others, r):
            terms.append(("Q_a",) + combo)
    return tuple(terms)


def mvd_products_structure() -> TermStructure:
    """All products of 1 to 4 distinct variables among Q_a, LWC, T_TS,
    v_TS; no standalone constant (15 terms)."""
    variables = ("Q_a", "LWC", "T_TS", "v_TS")
    terms: list[tuple[str, ...]] = []
    for r in range(1, 5):
        terms.extend(combinations(variables, r))
    return tuple(terms)


STRUCTURES = {
    "tn_linear": tn_linear_structure,
    "mvd_qa_factored": mvd_qa_factored_structure,
    "mvd_products_4": mvd_products_structure,
}


def design_matrix(x: np.ndarray, input_names: Sequence[str],
                  structure: TermStructure) -> np.ndarray:
    idx = {name: i for i, name in enumerate(input_names)}
    cols = []
    for term in structure:
        col = np.ones(len(x))
        for var in term:
            col = col * x[:, idx[var]]
        cols.append(col)
    return np.column_stack(cols)


def _dependent_terms(a: np.ndarray, structure: TermStructure) -> list[str]:
    """Name the columns that do not add rank (greedy scan)."""
    dependent = []
    kept: list[int] = []
    for j in range(a.shape[1]):
        candidate = a[:, kept + [j]]
        if np.linalg.matrix_rank(candidate) == len(kept) + 1:
            kept.append(j)
        else:
            dependent.append("*".join(structure[j]) or "1")
    return dependent


def fit_polynomial(ds: Dataset, target: str, structure: TermStructure,
                   input_names: Sequence[str] | None = None,
                   cv_folds: int = 5, seed: int = 0,
                   ) -> tuple[PolynomialPredictor, FitReport]:
    """Least-squares fit of the term structure to the target.

    Needs at least as many records as terms; a rank-deficient design
    matrix is an error that names the dependent terms.
    """
    if input_names is None:
        input_names = sorted({v for term in structure for v in term})
    n_terms = len(structure)
    if len(ds) < n_terms:
        raise DatasetError(
            f"need at least {n_terms} records for {n_terms} terms, have {len(ds)}")
    x = np.column_stack([ds.column(v) for v in input_names])
    y = ds.column(target)

    a = design_matrix(x, input_names, structure)
    coefs, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    if rank < n_terms:
        bad = _dependent_terms(a, structure)
        raise DatasetError(
            f"design matrix is rank deficient ({rank} < {n_terms}); "
            f"dependent terms: {', '.join(bad)}")

    def fit_predict(x_tr, y_tr, x_te):
        a_tr = design_matrix(x_tr, input_names, structure)
        c, _, _, _ = np.linalg.lstsq(a_tr, y_tr, rcond=None)
        return design_matrix(x_te, input_names, structure) @ c

    cv_scores: list[float] = []
    if cv_folds and len(ds) >= cv_folds:
        cv_scores, _ = cross_validate(x, y, fit_predict, k=cv_folds, seed=seed)

    in_sample = metrics(a @ coefs, y)
    predictor = PolynomialPredictor(
        input_names=tuple(input_names),
        output_name=target,
        terms=[(float(c), tuple((v, 1) for v in term))
               for c, term in zip(coefs, structure)],
        meta={"fitted": True, "structure_size": n_terms, "seed": seed},
    )
    report = FitReport(
        model_kind="polynomial", target=target,
        mse=in_sample["mse"], mae=in_sample["mae"],
        cv_scores=cv_scores,
        hyperparams={"terms": ["*".join(t) or "1" for t in structure]},
        seed=seed,
    )
    return predictor, report
