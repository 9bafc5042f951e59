"""
elasticts — Elastic linear classifiers, elastic means and DTW for time series.

Linear classifiers whose inner product is taken along the best warping path
between a series and a weight matrix, trained by stochastic subgradient
descent with perceptron, margin-perceptron, logistic and hinge losses. The
same machinery gives a DTW mean of a set of series (a matrix of ``m``
columns) and the prototype-based nearest-neighbour baselines.

Quick start::

    import numpy as np
    from elasticts import ElasticParams, Hyperparams, LossKind, load_dataset, train, error_rate

    train_set = load_dataset("Coffee_TRAIN.tsv")
    test_set = load_dataset("Coffee_TEST.tsv", label_codes=train_set.label_codes)
    theta0 = ElasticParams.initialize(train_set.max_length, 3, np.random.default_rng(0))
    hyper = Hyperparams(learning_rate=1e-3, regularization=1e-4)
    theta, report = train(theta0, train_set, LossKind.LINEAR_SVM, hyper)
    print(error_rate(theta, test_set))

Benchmark protocol (grid search + trials)::

    import asyncio
    from elasticts import ExperimentConfig, run_experiment

    report = asyncio.run(run_experiment(ExperimentConfig("Coffee_TRAIN.tsv", "Coffee_TEST.tsv")))
    print(report.mean, report.std)

Elastic mean::

    from elasticts import compute_mean
    state = compute_mean(series)  # state.Y has shape (n, m)

See README.md for full documentation.
"""

from __future__ import annotations

__version__ = "2026.10.0"
__license__ = "MIT"

from ._codec import load_model, load_prototypes, save_model, save_prototypes
from .centroid import (
    ahc_prototypes,
    compute_mean,
    kme_prototypes,
    kmeans,
    medoid,
    nn_classify,
)
from .datasets import load_dataset, make_folds, read_series, write_dataset, z_normalize
from .error_reporting import init_error_reporting
from .exceptions import (
    ElasticBandError,
    ElasticConfigError,
    ElasticDataError,
    ElasticDivergenceError,
    ElasticError,
    ElasticFormatError,
    ElasticLengthError,
    ElasticNonSmoothError,
    ElasticNumericalError,
    ElasticOracleLimitError,
    ElasticPathError,
)
from .experiment import (
    elasticity_sweep,
    grid_search,
    nn_experiment,
    resolve_elasticity,
    run_experiment,
)
from .learn import error_rate, predict, predict_proba, subgradient, train
from .maps import (
    elastic_euclidean,
    elastic_euclidean_cost,
    elastic_inner_product,
    elastic_inner_product_with_path,
    elastic_linear,
    embed,
    identical_row_matrix,
)
from .models import (
    AlignmentResult,
    ClassifierModel,
    Dataset,
    ElasticParams,
    ErrorReport,
    ExperimentConfig,
    GridDims,
    Hyperparams,
    LossKind,
    MeanConfig,
    MeanState,
    NNMode,
    PrototypeSet,
    Schedule,
    SweepReport,
    TrainReport,
    WarpingPath,
)
from .warping import (
    count_warping_paths,
    dtw_alignment,
    dtw_distance,
    enumerate_warping_paths,
    pairwise_dtw,
)

__all__ = [  # noqa: RUF022 (grouped by category, alphabetical within each)
    # Version
    "__version__",
    # Error reporting
    "init_error_reporting",
    # Warping paths and DTW
    "count_warping_paths",
    "dtw_alignment",
    "dtw_distance",
    "enumerate_warping_paths",
    "pairwise_dtw",
    # Elastic maps
    "elastic_euclidean",
    "elastic_euclidean_cost",
    "elastic_inner_product",
    "elastic_inner_product_with_path",
    "elastic_linear",
    "embed",
    "identical_row_matrix",
    # Learning
    "error_rate",
    "predict",
    "predict_proba",
    "subgradient",
    "train",
    # Means and prototypes
    "ahc_prototypes",
    "compute_mean",
    "kme_prototypes",
    "kmeans",
    "medoid",
    "nn_classify",
    # Datasets and containers
    "load_dataset",
    "load_model",
    "load_prototypes",
    "make_folds",
    "read_series",
    "save_model",
    "save_prototypes",
    "write_dataset",
    "z_normalize",
    # Experiments
    "elasticity_sweep",
    "grid_search",
    "nn_experiment",
    "resolve_elasticity",
    "run_experiment",
    # Models (alphabetical)
    "AlignmentResult",
    "ClassifierModel",
    "Dataset",
    "ElasticParams",
    "ErrorReport",
    "ExperimentConfig",
    "GridDims",
    "Hyperparams",
    "LossKind",
    "MeanConfig",
    "MeanState",
    "NNMode",
    "PrototypeSet",
    "Schedule",
    "SweepReport",
    "TrainReport",
    "WarpingPath",
    # Exceptions (alphabetical)
    "ElasticBandError",
    "ElasticConfigError",
    "ElasticDataError",
    "ElasticDivergenceError",
    "ElasticError",
    "ElasticFormatError",
    "ElasticLengthError",
    "ElasticNonSmoothError",
    "ElasticNumericalError",
    "ElasticOracleLimitError",
    "ElasticPathError",
]
