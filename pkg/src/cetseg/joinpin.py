"""Continuity-constrained piecewise-linear regression ("joinpin").

The mean function is linear within regimes and continuous across
boundaries; continuity is imposed exactly by fitting in a hinge basis
(intercept, time, and one ramp ``max(0, t - tau)`` per boundary) with
a single global least squares.  The error variance is supplied by the
caller rather than re-estimated, and scoring is BIC-style with a
configurable per-changepoint charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ChangepointConfiguration,
    DegenerateFitError,
    DomainError,
    MeanStructure,
    TimeSeries,
)
from .estimation import LOG_2PI
from .search import GAParams, MIN_SEGMENT_LENGTH, _ga_engine, _Memo

__all__ = ["JoinpinFit", "fit_joinpin", "joinpin_search", "default_knot_penalty"]

_MIN_SEG = MIN_SEGMENT_LENGTH[MeanStructure.JOINPIN]


def default_knot_penalty(n: int) -> float:
    """Default per-changepoint score charge: one location plus two line
    parameters' worth of BIC."""
    return 3.0 * math.log(n)


@dataclass(frozen=True)
class JoinpinFit:
    """A continuous piecewise-linear fit at one knot configuration.

    ``knot_values`` are the fitted mean ordinates at the knots;
    ``fitted`` is the mean function evaluated at every ``t = 1..N``.
    The fitted function is continuous at every knot by construction.
    """

    config: ChangepointConfiguration
    knot_values: tuple[float, ...]
    fitted: np.ndarray
    rss: float
    neg2loglik: float
    bic_score: float
    sigma2_fixed: float
    knot_penalty: float
    coefficients: tuple[float, ...]

    def __post_init__(self):
        fitted = np.asarray(self.fitted, dtype=np.float64).copy()
        fitted.flags.writeable = False
        object.__setattr__(self, "fitted", fitted)

    def sort_key(self) -> tuple:
        return (self.bic_score, self.config.m, self.config.taus)

    def segment_lines(self) -> tuple[tuple[float, float], ...]:
        """Per-regime (intercept, slope) of the continuous fit on the
        global time axis.

        Each hinge coefficient adds to the slope past its knot; the
        intercept is adjusted so adjacent lines meet at the knot.
        """
        lines = []
        intercept, slope = self.coefficients[0], self.coefficients[1]
        lines.append((intercept, slope))
        for i, tau in enumerate(self.config.taus):
            gain = self.coefficients[2 + i]
            slope += gain
            intercept -= gain * tau
            lines.append((intercept, slope))
        return tuple(lines)


def _design(taus: tuple[int, ...], n: int) -> np.ndarray:
    t = np.arange(1.0, n + 1.0)
    cols = [np.ones(n), t]
    cols.extend(np.maximum(0.0, t - tau) for tau in taus)
    return np.column_stack(cols)


def fit_joinpin(
    series: TimeSeries,
    config: ChangepointConfiguration,
    sigma2_fixed: float,
    knot_penalty: float | None = None,
) -> JoinpinFit:
    """Least-squares continuous piecewise-linear fit with fixed knots.

    Parameters
    ----------
    sigma2_fixed : float
        Error variance plugged into the likelihood (not re-estimated),
        so scores are comparable across knot configurations.
    knot_penalty : float, optional
        Score charge per changepoint; defaults to
        :func:`default_knot_penalty`.

    Raises
    ------
    DomainError
        If a regime is shorter than 2, ``sigma2_fixed <= 0``, or the
        hinge design is singular.
    """
    n = series.n
    config.validate_for(n, _MIN_SEG)
    if not sigma2_fixed > 0.0:
        raise DomainError("sigma2_fixed must be positive")
    if knot_penalty is None:
        knot_penalty = default_knot_penalty(n)
    X = _design(config.taus, n)
    coef, _, rank, _ = np.linalg.lstsq(X, series.values, rcond=None)
    if rank < X.shape[1]:
        raise DomainError(f"singular hinge design for knots {config.taus}")
    fitted = X @ coef
    resid = series.values - fitted
    rss = float(np.dot(resid, resid))
    n2ll = rss / sigma2_fixed + n * math.log(sigma2_fixed) + n * LOG_2PI
    bic = n2ll + knot_penalty * config.m
    knot_values = tuple(
        float(coef[0] + coef[1] * tau + sum(coef[2 + j] * max(0, tau - tj)
                                            for j, tj in enumerate(config.taus)))
        for tau in config.taus
    )
    return JoinpinFit(
        config=config,
        knot_values=knot_values,
        fitted=fitted,
        rss=rss,
        neg2loglik=n2ll,
        bic_score=bic,
        sigma2_fixed=float(sigma2_fixed),
        knot_penalty=float(knot_penalty),
        coefficients=tuple(float(c) for c in coef),
    )


def joinpin_search(
    series: TimeSeries,
    sigma2_fixed: float,
    max_m: int | None = None,
    params: GAParams = GAParams(),
    knot_penalty: float | None = None,
) -> JoinpinFit:
    """GA search for the BIC-minimal knot configuration.

    Reuses the changepoint search engine with this model's fitness.  A
    singular hinge design (possible only transiently during search) is
    treated as an unscoreable configuration rather than an error.
    """
    if not sigma2_fixed > 0.0:
        raise DomainError("sigma2_fixed must be positive")

    def fitness(taus: tuple[int, ...]) -> JoinpinFit:
        try:
            return fit_joinpin(
                series, ChangepointConfiguration(taus), sigma2_fixed, knot_penalty
            )
        except DomainError as err:
            # Repair guarantees segment lengths, so only singularity lands here.
            raise DegenerateFitError(str(err)) from err

    memo = _Memo(fitness)
    best, _, _ = _ga_engine(series.n, _MIN_SEG, memo, params, max_m, ())
    return best
