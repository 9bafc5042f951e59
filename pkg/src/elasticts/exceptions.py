"""
elasticts.exceptions — Custom exception hierarchy for the python-elasticts library.

All exceptions raised by the library are subclasses of ``ElasticError``,
making it easy to catch them with a single ``except ElasticError`` clause.

Hierarchy::

    ElasticError
    ├── ElasticDataError            # Malformed series or dataset
    │   ├── ElasticFormatError      # Unparseable dataset row or model container
    │   └── ElasticLengthError      # Series longer than the matrix row count
    ├── ElasticPathError            # Warping path invalid for the grid
    │   └── ElasticBandError        # Sakoe-Chiba band admits no path
    ├── ElasticOracleLimitError     # Brute-force enumeration too large
    ├── ElasticNonSmoothError       # Finite differences taken at a kink
    ├── ElasticConfigError          # Invalid hyperparameters or experiment config
    └── ElasticNumericalError       # Numerical failure during optimisation
        └── ElasticDivergenceError  # Weight norm left the divergence radius
"""

from __future__ import annotations


class ElasticError(Exception):
    """Base class for all python-elasticts exceptions."""


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


class ElasticDataError(ElasticError):
    """
    A time series or dataset violates the library's input contract.

    Raised for empty series, non-finite samples, wrong array ranks and
    datasets that do not fit the requested run (e.g. three classes for a
    two-class experiment).
    """


class ElasticFormatError(ElasticDataError):
    """
    A dataset file or model container could not be parsed.

    Attributes:
        row: 1-based line number of the offending dataset row (0 if unknown).
    """

    def __init__(self, message: str, row: int = 0) -> None:
        super().__init__(message)
        self.row = row

    def __str__(self) -> str:
        if self.row:
            return f"ElasticFormatError(row={self.row}): {self.args[0]}"
        return f"ElasticFormatError: {self.args[0]}"


class ElasticLengthError(ElasticDataError):
    """
    A series is longer than the row count ``n`` of the parameter matrix.

    Series are never truncated to fit; retrain with a larger ``n`` instead.
    """


# ---------------------------------------------------------------------------
# Warping paths
# ---------------------------------------------------------------------------


class ElasticPathError(ElasticError):
    """A warping path violates the boundary or step conditions of its grid."""


class ElasticBandError(ElasticPathError):
    """
    The Sakoe-Chiba band leaves no feasible warping path.

    A band of radius ``r`` needs ``|len(x) - len(y)| <= r``.
    """


class ElasticOracleLimitError(ElasticError):
    """The exhaustive path enumerator refused a grid above its size guard."""


class ElasticNonSmoothError(ElasticError):
    """
    A finite-difference check was requested at a non-smooth point.

    Raised when the active warping path or the active branch of the loss
    changes under the probing perturbation.
    """


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class ElasticConfigError(ElasticError):
    """Hyperparameters, grids or experiment settings are invalid."""


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------


class ElasticNumericalError(ElasticError):
    """Optimisation produced non-finite or unusable parameters."""


class ElasticDivergenceError(ElasticNumericalError):
    """
    The Frobenius norm of the weight matrix exceeded the divergence radius.

    Attributes:
        norm:   Norm observed when the guard tripped.
        radius: Configured divergence radius.
    """

    def __init__(self, message: str, norm: float = float("nan"), radius: float = 0.0) -> None:
        super().__init__(message)
        self.norm = norm
        self.radius = radius
