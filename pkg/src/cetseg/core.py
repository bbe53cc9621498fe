"""Core types for annual-series changepoint segmentation.

Indexing convention used throughout the package: observations of a
series of length ``N`` carry time indices ``t = 1..N``, mapped to
calendar years through the series' first year.  A changepoint ``tau``
is the time index of the *last* observation of the outgoing regime, so
regime ``i`` (zero-based) covers indices ``tau_i + 1 .. tau_{i+1}``
with the implicit boundaries ``tau_0 = 0`` and ``tau_{m+1} = N``.  In
reports a changepoint is rendered as the first calendar year of the
incoming regime, i.e. ``first_year + tau``.

All types here are immutable after construction and safe to share
across threads read-only.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "CetsegError",
    "DataError",
    "DomainError",
    "DegenerateFitError",
    "InfeasibleModelError",
    "TimeSeries",
    "ChangepointConfiguration",
    "EMPTY_CONFIGURATION",
    "regime_index",
    "MeanStructure",
    "ErrorModel",
    "Penalty",
    "ModelSpec",
    "FitResult",
]


class CetsegError(Exception):
    """Base class for package errors."""


class DataError(CetsegError):
    """Raised when input data cannot be parsed or fails validation."""


class DomainError(CetsegError, ValueError):
    """Raised when an argument or configuration violates a contract."""


class DegenerateFitError(CetsegError):
    """Raised when a fit yields a zero innovation variance.

    A configuration that interpolates the data exactly has an undefined
    Gaussian likelihood and must be rejected rather than scored.
    """


class InfeasibleModelError(CetsegError):
    """Raised when a series is too short for a model's segment constraints."""


def _as_readonly_float64(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"expected a 1-d array of values, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An annual series: consecutive calendar years with one value each.

    Parameters
    ----------
    first_year : int
        Calendar year of the first observation.
    values : array_like
        Observed values, one per consecutive year.  Must be finite;
        missing values are rejected at ingestion, not here represented.
    """

    first_year: int
    values: np.ndarray

    def __post_init__(self):
        arr = _as_readonly_float64(self.values)
        if arr.size == 0:
            raise DomainError("series must contain at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DomainError("series values must be finite")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "first_year", int(self.first_year))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def last_year(self) -> int:
        return self.first_year + self.n - 1

    def year_of(self, t: int) -> int:
        """Calendar year of time index ``t`` (1-based)."""
        if not 1 <= t <= self.n:
            raise DomainError(f"time index {t} outside 1..{self.n}")
        return self.first_year + t - 1

    def index_of(self, year: int) -> int:
        """Time index (1-based) of a calendar year."""
        if not self.first_year <= year <= self.last_year:
            raise DomainError(
                f"year {year} outside {self.first_year}..{self.last_year}"
            )
        return year - self.first_year + 1

    def restrict(self, from_year: int | None = None, to_year: int | None = None) -> "TimeSeries":
        """Return the sub-series covering ``from_year..to_year`` inclusive."""
        lo = self.first_year if from_year is None else int(from_year)
        hi = self.last_year if to_year is None else int(to_year)
        if lo > hi:
            raise DomainError(f"empty year range {lo}..{hi}")
        if lo < self.first_year or hi > self.last_year:
            raise DomainError(
                f"range {lo}..{hi} outside available {self.first_year}..{self.last_year}"
            )
        return TimeSeries(lo, self.values[lo - self.first_year : hi - self.first_year + 1])

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.first_year == other.first_year and np.array_equal(
            self.values, other.values
        )

    def __repr__(self):
        return f"TimeSeries(first_year={self.first_year}, n={self.n})"


@dataclass(frozen=True)
class ChangepointConfiguration:
    """A set of interior regime boundaries.

    ``taus`` are strictly increasing time indices; each marks the last
    observation of the regime it closes.  ``m = len(taus)`` regimes
    changes split the series into ``m + 1`` regimes.
    """

    taus: tuple[int, ...] = ()

    def __post_init__(self):
        taus = tuple(int(tau) for tau in self.taus)
        if any(tau < 1 for tau in taus):
            raise DomainError(f"changepoints must be >= 1, got {taus}")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise DomainError(f"changepoints must be strictly increasing, got {taus}")
        object.__setattr__(self, "taus", taus)

    @property
    def m(self) -> int:
        return len(self.taus)

    def boundaries(self, n: int) -> tuple[int, ...]:
        """Boundary indices including the implicit 0 and ``n``."""
        self._check_n(n)
        return (0, *self.taus, n)

    def regime_lengths(self, n: int) -> tuple[int, ...]:
        b = self.boundaries(n)
        return tuple(b[i + 1] - b[i] for i in range(len(b) - 1))

    def slices(self, n: int) -> tuple[slice, ...]:
        """Zero-based array slices, one per regime, covering 0..n."""
        b = self.boundaries(n)
        return tuple(slice(b[i], b[i + 1]) for i in range(len(b) - 1))

    def validate_for(self, n: int, min_segment_length: int = 1) -> None:
        """Raise :class:`DomainError` unless every regime has the required length."""
        if min_segment_length < 1:
            raise DomainError("min_segment_length must be >= 1")
        lengths = self.regime_lengths(n)
        if min(lengths) < min_segment_length:
            raise DomainError(
                f"configuration {self.taus} has a regime shorter than "
                f"{min_segment_length} in a series of length {n}"
            )

    def _check_n(self, n: int) -> None:
        if self.taus and self.taus[-1] >= n:
            raise DomainError(
                f"changepoint {self.taus[-1]} not interior to a series of length {n}"
            )

    def __str__(self):
        return "()" if not self.taus else str(self.taus)


EMPTY_CONFIGURATION = ChangepointConfiguration()


def regime_index(t: int, config: ChangepointConfiguration, n: int) -> int:
    """Zero-based regime id of time index ``t`` in a series of length ``n``.

    The result is the unique ``i`` with ``tau_i < t <= tau_{i+1}``
    under the implicit boundaries ``tau_0 = 0`` and ``tau_{m+1} = n``.
    """
    if not 1 <= t <= n:
        raise DomainError(f"time index {t} outside 1..{n}")
    config._check_n(n)
    return bisect_left(config.taus, t)


class MeanStructure(str, Enum):
    """What part of the observation model shifts between regimes."""

    MEAN_SHIFT = "mean-shift"
    TREND_SHIFT = "trend-shift"
    FIXED_SLOPE = "fixed-slope"
    VARIANCE_SHIFT = "variance-shift"
    JOINPIN = "joinpin"
    LONG_MEMORY = "long-memory"


class ErrorModel(str, Enum):
    WHITE_NOISE = "wn"
    AR1 = "ar1"


class Penalty(str, Enum):
    BIC = "bic"
    MDL = "mdl"


_ALLOWED_ERRORS = {
    MeanStructure.MEAN_SHIFT: {ErrorModel.AR1},
    MeanStructure.TREND_SHIFT: {ErrorModel.AR1, ErrorModel.WHITE_NOISE},
    MeanStructure.FIXED_SLOPE: {ErrorModel.AR1},
    MeanStructure.VARIANCE_SHIFT: {ErrorModel.WHITE_NOISE},
    MeanStructure.JOINPIN: {ErrorModel.WHITE_NOISE},
    MeanStructure.LONG_MEMORY: {ErrorModel.WHITE_NOISE, ErrorModel.AR1},
}

# Families scored outside the shared BIC/MDL penalty tables carry their
# own single scoring rule and reject a penalty choice other than BIC.
_BIC_ONLY = {MeanStructure.JOINPIN, MeanStructure.LONG_MEMORY}


@dataclass(frozen=True)
class ModelSpec:
    """A supported (mean structure, error model, penalty) combination.

    Construction rejects combinations the scoring tables do not define,
    e.g. mean shifts with white-noise errors or joinpin under MDL.
    """

    mean_structure: MeanStructure
    error_model: ErrorModel
    penalty: Penalty = Penalty.BIC

    def __post_init__(self):
        ms = MeanStructure(self.mean_structure)
        em = ErrorModel(self.error_model)
        pen = Penalty(self.penalty)
        object.__setattr__(self, "mean_structure", ms)
        object.__setattr__(self, "error_model", em)
        object.__setattr__(self, "penalty", pen)
        if em not in _ALLOWED_ERRORS[ms]:
            raise DomainError(
                f"no scoring rule for {ms.value} with {em.value} errors"
            )
        if ms in _BIC_ONLY and pen is not Penalty.BIC:
            raise DomainError(f"{ms.value} is scored under BIC only")

    def label(self) -> str:
        return f"{self.mean_structure.value}+{self.error_model.value}/{self.penalty.value}"


@dataclass(frozen=True)
class FitResult:
    """A scored fit of one model at one changepoint configuration.

    ``score`` is always ``neg2loglik + penalty_value``; it is computed
    here rather than accepted, so the identity holds exactly.

    ``means`` and ``slopes`` hold one entry per regime where the mean
    structure defines them (``slopes`` is ``None`` for pure mean
    shifts).  ``regime_variances`` is populated only for variance-shift
    fits, where it holds the per-regime error variances.
    """

    model: ModelSpec
    config: ChangepointConfiguration
    neg2loglik: float
    penalty_value: float
    means: tuple[float, ...] | None = None
    slopes: tuple[float, ...] | None = None
    regime_variances: tuple[float, ...] | None = None
    phi_hat: float | None = None
    sigma2_hat: float | None = None
    score: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.neg2loglik):
            raise DomainError("neg2loglik must be finite")
        if not math.isfinite(self.penalty_value):
            raise DomainError("penalty_value must be finite")
        object.__setattr__(self, "score", self.neg2loglik + self.penalty_value)

    @property
    def loglik(self) -> float:
        return -0.5 * self.neg2loglik

    def changepoint_years(self, series: TimeSeries) -> tuple[int, ...]:
        """Calendar years flagged: the first year of each new regime."""
        return tuple(series.first_year + tau for tau in self.config.taus)

    def sort_key(self) -> tuple:
        """Total order used for tie-breaking: score, then m, then boundary indices."""
        return (self.score, self.config.m, self.config.taus)
