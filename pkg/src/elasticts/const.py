"""
elasticts.const — Defaults, hyperparameter grids and format constants.

Grid values follow the published experimental protocol for elastic linear
classifiers on the two-class UCR problems:

+---------------------------+----------------------------------------+
| Grid                      | Values                                 |
+===========================+========================================+
| learning rate (CV)        | 2^-10, 2^-9, ..., 2^0                  |
| margin xi (CV)            | 10^-7, 10^-6, ..., 10^1                |
| regularisation lambda (CV)| 2^-10, 2^-9, ..., 2^-1                 |
| elasticity ratio sweep    | 0, 0.05, 0.1, 0.2, ..., 1.0, 2.0, 3.0  |
| learning rate sweep       | 1.0, 0.7, 0.3, ..., 0.001              |
+---------------------------+----------------------------------------+
"""

from __future__ import annotations

# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------

#: Version tag embedded in every model container and report.
FORMAT_VERSION = "1"

#: Container kinds written by ``elasticts._codec``.
CONTAINER_CLASSIFIER = "classifier"
CONTAINER_PROTOTYPES = "prototypes"

# ---------------------------------------------------------------------------
# Warping-path oracle
# ---------------------------------------------------------------------------

#: Largest rows + cols accepted by the brute-force path enumerator.
ORACLE_MAX_GRID_SPAN = 22

# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

#: Half-width of the uniform initialisation interval for W and b.
INIT_SCALE = 0.01

#: Frobenius-norm radius above which training is declared divergent.
DIVERGENCE_RADIUS = 1e6

#: Default number of passes over the training set.
DEFAULT_MAX_EPOCHS = 50

#: Default elasticity as a fraction of the longest training series.
DEFAULT_ELASTICITY_RATIO = 0.1

# ---------------------------------------------------------------------------
# Model selection
# ---------------------------------------------------------------------------

#: Learning rates tried by cross-validation.
ETA_GRID: tuple[float, ...] = tuple(2.0**e for e in range(-10, 1))

#: Margins tried for the elastic margin perceptron.
MARGIN_GRID: tuple[float, ...] = tuple(10.0**e for e in range(-7, 2))

#: Regularisation strengths tried for the elastic linear SVM.
LAMBDA_GRID: tuple[float, ...] = tuple(2.0**e for e in range(-10, 0))

#: Stratified k-fold CV is used above this training-set size, leave-one-out otherwise.
LOO_MAX_SIZE = 30

#: Number of folds when the training set is larger than ``LOO_MAX_SIZE``.
CV_FOLDS = 10

# ---------------------------------------------------------------------------
# Elasticity sweep
# ---------------------------------------------------------------------------

#: Ratios w = m / n explored by the sweep (w = 0 means m = 1).
SWEEP_RATIOS: tuple[float, ...] = (0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 2.0, 3.0)

#: Learning rates the sweep picks from by training error.
SWEEP_ETAS: tuple[float, ...] = (1.0, 0.7, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001)

# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

#: Trials per experiment for quick runs.
DEFAULT_TRIALS = 10

#: Trials per experiment under the published protocol.
FULL_PROTOCOL_TRIALS = 100

#: Repeats per sweep point under the published protocol.
SWEEP_REPEATS = 30

#: Concurrent work units (threads) used by the experiment orchestrator.
DEFAULT_JOBS = 4

# ---------------------------------------------------------------------------
# Means and clustering
# ---------------------------------------------------------------------------

#: Iteration cap for the mean procedure.
MEAN_MAX_ITER = 50

#: Relative variation change below which the mean procedure stops.
MEAN_TOL = 1e-9

#: Lloyd iteration cap for k-means.
KMEANS_MAX_ITER = 30

# ---------------------------------------------------------------------------
# CLI exit codes
# ---------------------------------------------------------------------------

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3
