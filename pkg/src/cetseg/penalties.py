"""BIC and MDL penalties for segmented Gaussian models.

Both penalties are added to -2 log likelihood; natural logs throughout.

BIC charges ``k log N`` where ``k`` counts every estimated parameter:
the per-regime mean parameters, the changepoint locations themselves,
plus the innovation variance and (for AR(1) errors) the lag-1
coefficient.

MDL charges a code length for the configuration: a cost per estimated
real parameter of ``log(length of the regime it lives in)`` (halved
units folded into the coefficients below), ``2 log m`` for the count,
``2 log tau_i`` for each boundary after the first, and ``log N`` terms
for globally estimated parameters.  The empty configuration has MDL 0
by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ChangepointConfiguration,
    DomainError,
    ErrorModel,
    MeanStructure,
    ModelSpec,
    Penalty,
)

__all__ = ["PenaltyContext", "penalty_value", "penalized_score"]


@dataclass(frozen=True)
class PenaltyContext:
    """Everything a penalty depends on: the model, N, and the configuration."""

    model: ModelSpec
    n: int
    config: ChangepointConfiguration

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("series length must be >= 1")
        self.config._check_n(self.n)


# BIC parameter count as a function of m, and the MDL coefficients
# (logn_coeff, seglen_coeff), keyed by (mean structure, error model).
_BIC_K = {
    (MeanStructure.MEAN_SHIFT, ErrorModel.AR1): lambda m: 2 * m + 3,
    (MeanStructure.TREND_SHIFT, ErrorModel.AR1): lambda m: 3 * m + 4,
    (MeanStructure.TREND_SHIFT, ErrorModel.WHITE_NOISE): lambda m: 3 * m + 3,
    (MeanStructure.FIXED_SLOPE, ErrorModel.AR1): lambda m: 2 * m + 4,
    (MeanStructure.VARIANCE_SHIFT, ErrorModel.WHITE_NOISE): lambda m: 2 * m + 1,
}

_MDL_COEFFS = {
    (MeanStructure.MEAN_SHIFT, ErrorModel.AR1): (2.0, 1.0),
    (MeanStructure.TREND_SHIFT, ErrorModel.AR1): (2.0, 2.0),
    (MeanStructure.TREND_SHIFT, ErrorModel.WHITE_NOISE): (1.0, 2.0),
    (MeanStructure.FIXED_SLOPE, ErrorModel.AR1): (3.0, 1.0),
    (MeanStructure.VARIANCE_SHIFT, ErrorModel.WHITE_NOISE): (0.0, 1.0),
}


def penalty_value(ctx: PenaltyContext) -> float:
    """Penalty charged for the model and configuration in ``ctx``.

    Raises
    ------
    DomainError
        For model families scored outside these tables (joinpin and
        long-memory carry their own scoring rules).
    """
    key = (ctx.model.mean_structure, ctx.model.error_model)
    config = ctx.config
    n = ctx.n
    m = config.m
    if ctx.model.penalty is Penalty.BIC:
        if key not in _BIC_K:
            raise DomainError(f"no BIC table entry for {ctx.model.label()}")
        return _BIC_K[key](m) * math.log(n)
    if key not in _MDL_COEFFS:
        raise DomainError(f"no MDL table entry for {ctx.model.label()}")
    if m == 0:
        return 0.0
    logn_coeff, seglen_coeff = _MDL_COEFFS[key]
    value = logn_coeff * math.log(n) + 2.0 * math.log(m)
    value += seglen_coeff * sum(math.log(length) for length in config.regime_lengths(n))
    value += 2.0 * sum(math.log(tau) for tau in config.taus[1:])
    return value


def penalized_score(neg2loglik: float, ctx: PenaltyContext) -> float:
    return neg2loglik + penalty_value(ctx)
