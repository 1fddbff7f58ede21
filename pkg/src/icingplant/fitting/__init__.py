"""Data-driven modelling pipeline: dataset handling, statistics, feature
ranking, polynomial/tree/MLP fitting, cross-validation and the synthetic
dataset generator."""

from .dataset import Dataset, DatasetError, ExperimentRecord
from .metrics import FitReport, metrics
from .predictor import (
    MLPPredictor,
    PolynomialPredictor,
    Predictor,
    TreePredictor,
    load_predictor,
    mvd_products_4,
    mvd_qa_factored,
    predictor_from_dict,
    save_predictor,
    t_n_polynomial,
)
from .stats import correlation_matrix, describe
from .ranking import f_score, mutual_information_gain
from .polynomial import STRUCTURES, fit_polynomial
from .tree import fit_tree
from .mlp import MLPNet, SearchSpace, TrainingProtocol, fit_mlp, small_search_space
from .crossval import cross_validate, fold_indices
from .synth import synthesize_dataset
from .tables import (
    REFERENCE_CORRELATION,
    REFERENCE_MODEL_ERRORS,
    REFERENCE_STATS,
    VARIABLES,
)

__all__ = [
    "Dataset", "DatasetError", "ExperimentRecord",
    "FitReport", "metrics",
    "Predictor", "PolynomialPredictor", "TreePredictor", "MLPPredictor",
    "load_predictor", "save_predictor", "predictor_from_dict",
    "t_n_polynomial", "mvd_qa_factored", "mvd_products_4",
    "describe", "correlation_matrix",
    "mutual_information_gain", "f_score",
    "fit_polynomial", "STRUCTURES", "fit_tree",
    "fit_mlp", "MLPNet", "SearchSpace", "TrainingProtocol", "small_search_space",
    "cross_validate", "fold_indices",
    "synthesize_dataset",
    "VARIABLES", "REFERENCE_STATS", "REFERENCE_CORRELATION",
    "REFERENCE_MODEL_ERRORS",
]
