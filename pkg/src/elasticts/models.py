"""
elasticts.models — Typed dataclasses and enums shared by every module.

Series are 1-D ``float64`` numpy arrays and parameter matrices are 2-D
``float64`` arrays; the helpers :func:`as_series` and :func:`as_matrix` turn
user input into those and enforce the finiteness contract. Configuration
objects validate themselves in ``__post_init__`` and provide ``from_dict`` /
``to_dict`` for the JSON config echo written into every report.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import enum
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import NDArray

from .const import (
    DEFAULT_JOBS,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_TRIALS,
    DIVERGENCE_RADIUS,
    ETA_GRID,
    INIT_SCALE,
    LAMBDA_GRID,
    MARGIN_GRID,
    MEAN_MAX_ITER,
    MEAN_TOL,
)
from .exceptions import ElasticConfigError, ElasticDataError

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

Series = NDArray[np.float64]
Matrix = NDArray[np.float64]


def as_series(values: Any) -> Series:
    """Return ``values`` as a finite, non-empty 1-D float64 array (copying only when needed)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ElasticDataError(f"time series must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ElasticDataError("time series must contain at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ElasticDataError("time series contains NaN or infinite samples")
    return np.ascontiguousarray(arr)


def as_matrix(values: Any) -> Matrix:
    """Return ``values`` as a finite 2-D float64 array with at least one row and column."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ElasticDataError(f"matrix must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ElasticDataError(f"matrix must be at least 1x1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ElasticDataError("matrix contains NaN or infinite entries")
    return np.ascontiguousarray(arr)


# ---------------------------------------------------------------------------
# Warping paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridDims:
    """Alignment grid ``[rows] x [cols]``."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ElasticDataError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")


@dataclass(frozen=True)
class WarpingPath:
    """
    Ordered warping path through an alignment grid.

    Points are 1-based ``(i, j)`` pairs. Construction does not validate the
    path; use :func:`elasticts.warping.validate_path` for that.
    """

    points: tuple[tuple[int, int], ...]

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, int]]) -> WarpingPath:
        return cls(tuple((int(i), int(j)) for i, j in points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.points)

    @property
    def row_index(self) -> NDArray[np.intp]:
        """0-based row indices, ready for numpy fancy indexing."""
        return np.fromiter((i - 1 for i, _ in self.points), dtype=np.intp, count=len(self.points))

    @property
    def col_index(self) -> NDArray[np.intp]:
        """0-based column indices, ready for numpy fancy indexing."""
        return np.fromiter((j - 1 for _, j in self.points), dtype=np.intp, count=len(self.points))


@dataclass(frozen=True)
class AlignmentResult:
    """Optimal alignment of two series: summed squared cost and the path attaining it."""

    cost: float
    path: WarpingPath

    @property
    def distance(self) -> float:
        """DTW distance, the square root of :attr:`cost`."""
        return math.sqrt(self.cost)


# ---------------------------------------------------------------------------
# Elastic maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddedMatrix:
    """
    A series written into a base matrix along a warping path.

    ``entries`` equals the base matrix except on ``source_path``, where cell
    ``(i, j)`` holds sample ``x_i``. Rows below ``source_length`` are untouched.
    """

    entries: Matrix
    source_path: WarpingPath
    source_length: int


@dataclass(frozen=True)
class ScoreMatrix:
    """
    Dynamic-programming partial sums over a ``k x m`` grid.

    ``maximize`` is True for the elastic inner product and False for the
    cost-minimising programs (elastic Euclidean distance, DTW).
    """

    scores: Matrix
    maximize: bool

    @property
    def value(self) -> float:
        return float(self.scores[-1, -1])


# ---------------------------------------------------------------------------
# Classifiers
# ---------------------------------------------------------------------------


class LossKind(enum.StrEnum):
    """Elastic linear classifiers, named after their loss."""

    PERCEPTRON = "perceptron"
    """Elastic perceptron, ``max(0, -y f)``."""

    MARGIN_PERCEPTRON = "margin_perceptron"
    """Elastic margin perceptron, ``max(0, xi - y f)``."""

    LOGISTIC = "logistic"
    """Elastic logistic regression, cross-entropy of ``sigmoid(f)``."""

    LINEAR_SVM = "linear_svm"
    """Elastic linear SVM, ``lambda ||W||^2 + max(0, 1 - y f)``."""

    @property
    def abbreviation(self) -> str:
        """Short name used in result tables (``ePERC``, ``eMARG``, ``eLOGR``, ``eLSVM``)."""
        return _LOSS_ABBREVIATIONS[self]

    @property
    def is_perceptron_family(self) -> bool:
        """True for losses whose training stops after an epoch without updates."""
        return self in (LossKind.PERCEPTRON, LossKind.MARGIN_PERCEPTRON)

    @classmethod
    def parse(cls, text: str) -> LossKind:
        """Accept enum values, ``marginPerceptron``-style names and table abbreviations."""
        key = text.strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.value.replace("_", ""), kind.abbreviation.lower()):
                return kind
        raise ElasticConfigError(f"unknown loss kind {text!r}")


_LOSS_ABBREVIATIONS: dict[LossKind, str] = {
    LossKind.PERCEPTRON: "ePERC",
    LossKind.MARGIN_PERCEPTRON: "eMARG",
    LossKind.LOGISTIC: "eLOGR",
    LossKind.LINEAR_SVM: "eLSVM",
}


class Schedule(enum.StrEnum):
    """Learning-rate schedules."""

    CONSTANT = "constant"
    """``eta_t = eta`` for every step."""

    INVERSE_T = "inverse_t"
    """``eta_t = eta / (1 + t / T)``; square-summable but not summable."""


@dataclass
class ElasticParams:
    """
    Classifier parameter ``theta = (W, b)``.

    ``W`` has ``n`` rows (longest admissible series) and ``m`` columns
    (elasticity).
    """

    W: Matrix
    b: float = 0.0

    def __post_init__(self) -> None:
        self.W = as_matrix(self.W)
        self.b = float(self.b)
        if not math.isfinite(self.b):
            raise ElasticDataError("bias must be finite")

    @property
    def n(self) -> int:
        return int(self.W.shape[0])

    @property
    def m(self) -> int:
        return int(self.W.shape[1])

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.W))

    @classmethod
    def zeros(cls, n: int, m: int, b: float = 0.0) -> ElasticParams:
        return cls(np.zeros((n, m)), b)

    @classmethod
    def initialize(
        cls, n: int, m: int, rng: np.random.Generator, scale: float = INIT_SCALE
    ) -> ElasticParams:
        """Draw ``W`` and ``b`` i.i.d. from ``U[-scale, +scale]``."""
        W = rng.uniform(-scale, scale, size=(n, m))
        b = float(rng.uniform(-scale, scale))
        return cls(W, b)

    def copy(self) -> ElasticParams:
        return ElasticParams(self.W.copy(), self.b)

    def scaled(self, factor: float) -> ElasticParams:
        return ElasticParams(self.W * factor, self.b * factor)


@dataclass
class ClassifierModel:
    """A trained classifier as stored on disk."""

    theta: ElasticParams
    loss: LossKind
    label_codes: tuple[str, str] | None = None
    """Raw dataset labels for ``(-1, +1)``, needed to score a test file."""

    def __post_init__(self) -> None:
        self.loss = LossKind(self.loss)
        if self.label_codes is not None:
            self.label_codes = (str(self.label_codes[0]), str(self.label_codes[1]))


@dataclass(frozen=True)
class Hyperparams:
    """
    Training hyperparameters.

    ``margin`` is only read by the margin perceptron and ``regularization``
    only by the linear SVM. ``decay_horizon`` is the ``T`` of the inverse-t
    schedule; ``None`` uses the training-set size.
    """

    learning_rate: float
    margin: float = 0.0
    regularization: float = 0.0
    max_epochs: int = DEFAULT_MAX_EPOCHS
    schedule: Schedule = Schedule.CONSTANT
    shuffle_seed: int = 0
    decay_horizon: int | None = None
    divergence_radius: float = DIVERGENCE_RADIUS

    def __post_init__(self) -> None:
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ElasticConfigError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.margin < 0:
            raise ElasticConfigError(f"margin must be >= 0, got {self.margin}")
        if self.regularization < 0:
            raise ElasticConfigError(f"regularization must be >= 0, got {self.regularization}")
        if self.max_epochs < 1:
            raise ElasticConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.decay_horizon is not None and self.decay_horizon < 1:
            raise ElasticConfigError("decay_horizon must be >= 1")
        if self.divergence_radius <= 0:
            raise ElasticConfigError("divergence_radius must be > 0")
        object.__setattr__(self, "schedule", Schedule(self.schedule))

    def rate_at(self, step: int, n_examples: int) -> float:
        """Learning rate for global step ``step`` (0-based)."""
        if self.schedule is Schedule.CONSTANT:
            return self.learning_rate
        horizon = self.decay_horizon or n_examples
        return self.learning_rate / (1.0 + step / horizon)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["schedule"] = self.schedule.value
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Hyperparams:
        return cls(
            learning_rate=float(d["learning_rate"]),
            margin=float(d.get("margin", 0.0)),
            regularization=float(d.get("regularization", 0.0)),
            max_epochs=int(d.get("max_epochs", DEFAULT_MAX_EPOCHS)),
            schedule=Schedule(d.get("schedule", Schedule.CONSTANT)),
            shuffle_seed=int(d.get("shuffle_seed", 0)),
            decay_horizon=d.get("decay_horizon"),
            divergence_radius=float(d.get("divergence_radius", DIVERGENCE_RADIUS)),
        )


@dataclass
class TrainReport:
    """Summary of one training run."""

    epochs_run: int = 0
    updates_applied: int = 0
    final_train_error_rate: float = 0.0
    loss_trace: list[float] = field(default_factory=list)
    """Mean training loss after each epoch; one entry per epoch run."""


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """
    Labelled univariate series with labels in ``{+1, -1}``.

    ``label_codes`` keeps the raw file labels as ``(code for -1, code for +1)``
    so a test split can be mapped exactly like its training split.
    """

    labels: NDArray[np.int64]
    series: list[Series]
    name: str = ""
    label_codes: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.series = [as_series(s) for s in self.series]
        if self.labels.ndim != 1 or len(self.labels) != len(self.series):
            raise ElasticDataError("labels and series must have the same length")
        if len(self.series) == 0:
            raise ElasticDataError("dataset is empty")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise ElasticDataError("labels must be +1 or -1")

    def __len__(self) -> int:
        return len(self.series)

    def __iter__(self) -> Iterator[tuple[Series, int]]:
        for x, y in zip(self.series, self.labels, strict=True):
            yield x, int(y)

    @property
    def max_length(self) -> int:
        """Length ``n`` of the longest series."""
        return max(len(s) for s in self.series)

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted({int(y) for y in self.labels}))

    def subset(self, indices: Sequence[int] | NDArray[np.intp]) -> Dataset:
        idx = [int(i) for i in indices]
        return Dataset(
            labels=self.labels[idx],
            series=[self.series[i] for i in idx],
            name=self.name,
            label_codes=self.label_codes,
        )

    def of_class(self, label: int) -> list[Series]:
        return [x for x, y in self if y == label]


# ---------------------------------------------------------------------------
# Means and prototypes
# ---------------------------------------------------------------------------


class NNMode(enum.StrEnum):
    """Nearest-neighbour baselines."""

    ALL = "all"
    """Every training series is a prototype; distance is DTW."""

    KME = "kme"
    """One prototype per class from k-means; distance is elastic Euclidean."""

    AHC = "ahc"
    """One prototype per class from Ward agglomerative clustering."""


@dataclass(frozen=True)
class MeanConfig:
    """
    Settings of the mean procedure.

    ``eta=None`` selects the constant rate ``1/N``; ``elasticity=None`` uses
    the length of the longest series as column count.
    """

    eta: float | None = None
    max_iter: int = MEAN_MAX_ITER
    tol: float = MEAN_TOL
    elasticity: int | None = None

    def __post_init__(self) -> None:
        if self.eta is not None and self.eta <= 0:
            raise ElasticConfigError(f"eta must be > 0, got {self.eta}")
        if self.max_iter < 1:
            raise ElasticConfigError("max_iter must be >= 1")
        if self.tol < 0:
            raise ElasticConfigError("tol must be >= 0")
        if self.elasticity is not None and self.elasticity < 1:
            raise ElasticConfigError("elasticity must be >= 1")


@dataclass
class MeanState:
    """Result of the mean procedure: matrix ``Y`` and its variation on the data."""

    Y: Matrix
    variation: float
    iterations: int = 0
    variation_trace: list[float] = field(default_factory=list)
    """Variation of the initial matrix followed by one entry per iteration."""


@dataclass
class PrototypeSet:
    """One prototype matrix per class label, in stored order."""

    mode: NNMode
    labels: list[int]
    prototypes: list[Matrix]

    def __post_init__(self) -> None:
        self.mode = NNMode(self.mode)
        if len(self.labels) != len(self.prototypes):
            raise ElasticDataError("one prototype per label is required")
        self.prototypes = [as_matrix(p) for p in self.prototypes]

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class ClusterAssignment:
    """Partition of a dataset into clusters."""

    assignments: NDArray[np.int64]
    members: list[list[int]]
    objective_trace: list[float] = field(default_factory=list)
    """Total within-cluster variation after each Lloyd iteration."""


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything an experiment needs; echoed verbatim into its report.

    Elasticity: an explicit ``elasticity`` wins over ``elasticity_ratio``;
    with neither, ``m = ceil(n / 10)``.
    """

    train_path: str
    test_path: str
    classifier: LossKind = LossKind.LINEAR_SVM
    elasticity_ratio: float | None = None
    elasticity: int | None = None
    eta_grid: tuple[float, ...] = ETA_GRID
    margin_grid: tuple[float, ...] = MARGIN_GRID
    lambda_grid: tuple[float, ...] = LAMBDA_GRID
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    max_epochs: int = DEFAULT_MAX_EPOCHS
    schedule: Schedule = Schedule.CONSTANT
    z_normalize: bool = False
    jobs: int = DEFAULT_JOBS
    band: int | None = None
    nn_mode: NNMode = NNMode.ALL

    def __post_init__(self) -> None:
        object.__setattr__(self, "classifier", LossKind(self.classifier))
        object.__setattr__(self, "schedule", Schedule(self.schedule))
        object.__setattr__(self, "nn_mode", NNMode(self.nn_mode))
        for name in ("eta_grid", "margin_grid", "lambda_grid"):
            grid = tuple(float(v) for v in getattr(self, name))
            if not grid:
                raise ElasticConfigError(f"{name} must not be empty")
            object.__setattr__(self, name, grid)
        if self.trials < 1:
            raise ElasticConfigError(f"trials must be >= 1, got {self.trials}")
        if self.max_epochs < 1:
            raise ElasticConfigError("max_epochs must be >= 1")
        if self.jobs < 1:
            raise ElasticConfigError("jobs must be >= 1")
        if self.elasticity is not None and self.elasticity < 1:
            raise ElasticConfigError("elasticity must be >= 1")
        if self.elasticity_ratio is not None and self.elasticity_ratio < 0:
            raise ElasticConfigError("elasticity ratio must be >= 0")
        if self.band is not None and self.band < 0:
            raise ElasticConfigError("band must be >= 0")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["classifier"] = self.classifier.value
        d["schedule"] = self.schedule.value
        d["nn_mode"] = self.nn_mode.value
        for name in ("eta_grid", "margin_grid", "lambda_grid"):
            d[name] = list(d[name])
        # jobs only affects scheduling, never the numbers.
        d.pop("jobs")
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        return cls(
            train_path=d["train_path"],
            test_path=d["test_path"],
            classifier=LossKind.parse(d.get("classifier", LossKind.LINEAR_SVM.value)),
            elasticity_ratio=d.get("elasticity_ratio"),
            elasticity=d.get("elasticity"),
            eta_grid=tuple(d.get("eta_grid", ETA_GRID)),
            margin_grid=tuple(d.get("margin_grid", MARGIN_GRID)),
            lambda_grid=tuple(d.get("lambda_grid", LAMBDA_GRID)),
            trials=int(d.get("trials", DEFAULT_TRIALS)),
            master_seed=int(d.get("master_seed", 0)),
            max_epochs=int(d.get("max_epochs", DEFAULT_MAX_EPOCHS)),
            schedule=Schedule(d.get("schedule", Schedule.CONSTANT)),
            z_normalize=bool(d.get("z_normalize", False)),
            jobs=int(d.get("jobs", DEFAULT_JOBS)),
            band=d.get("band"),
            nn_mode=NNMode(d.get("nn_mode", NNMode.ALL)),
        )


@dataclass
class GridSearchResult:
    """Selected hyperparameters and the CV score of every grid point."""

    best: Hyperparams
    scores: list[tuple[dict[str, float], float]] = field(default_factory=list)
    """``(point, mean validation error)``; divergent points score ``inf``."""


@dataclass
class ErrorReport:
    """Test error rates of one experiment (fractions in ``[0, 1]``)."""

    dataset: str
    classifier: str
    error_rates: list[float]
    mean: float
    std: float
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    config: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    """Wall-clock seconds per stage; excluded from determinism checks."""

    @classmethod
    def from_rates(
        cls, dataset: str, classifier: str, error_rates: Sequence[float], **kwargs: Any
    ) -> ErrorReport:
        rates = [float(r) for r in error_rates]
        mean, std = summarize(rates)
        return cls(dataset, classifier, rates, mean, std, **kwargs)


@dataclass(frozen=True)
class SweepRow:
    """One elasticity-sweep point."""

    w: float
    m: int
    eta: float
    mean_error: float
    std_error: float


@dataclass
class SweepReport:
    """Elasticity sweep, rows sorted by ``w`` ascending."""

    dataset: str
    rows: list[SweepRow]
    seed: int = 0
    config: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)


def summarize(rates: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    arr = np.asarray(rates, dtype=np.float64)
    if arr.size == 0:
        raise ElasticDataError("no error rates to summarize")
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(np.mean(arr)), std
