"""Python bindings for the PADDLE transductive few-shot solver."""

from ._core import (
    ConfigError,
    DivergenceError,
    Error,
    FeatureBank,
    InvariantError,
    ParseError,
    Task,
    class_proportions,
    entropy,
    generate_task,
    inductive_baseline,
    kmeans_partial,
    label_cost,
    load_feature_bank,
    objective,
    pgd_solve,
    predict_labels,
    regularized_objective,
    relaxation_curve,
    save_feature_bank,
    simplex_project,
    solve,
    synth_gaussian_bank,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "Error",
    "FeatureBank",
    "InvariantError",
    "ParseError",
    "Task",
    "class_proportions",
    "entropy",
    "generate_task",
    "inductive_baseline",
    "kmeans_partial",
    "label_cost",
    "load_feature_bank",
    "objective",
    "pgd_solve",
    "predict_labels",
    "regularized_objective",
    "relaxation_curve",
    "save_feature_bank",
    "simplex_project",
    "solve",
    "synth_gaussian_bank",
]
