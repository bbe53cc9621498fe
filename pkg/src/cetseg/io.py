"""Data ingestion and result serialization.

Two input formats are supported: the Met Office annual layout (rows of
year, 12 monthly means, annual mean, with optional header lines and
missing values coded -99.9 / -99.99) and plain two-column CSV
(year,value with an optional single header line).  Both enforce
consecutive years and fail hard on malformed rows, naming the line.

Serialization keeps one JSON shape for every model family (schema
shipped in ``schemas/result.schema.json``); dumps are key-sorted so
identical results are byte-identical.
"""

from __future__ import annotations

import csv
import io as _io
import json
import warnings
from typing import Any

import numpy as np

from .core import (
    ChangepointConfiguration,
    DataError,
    DomainError,
    FitResult,
    TimeSeries,
)
from .estimation import fitted_mean
from .joinpin import JoinpinFit
from .longmemory import ArfimaFit
from .search import GAParams

__all__ = [
    "MISSING_CODES",
    "parse_hadcet",
    "parse_csv",
    "load_series",
    "series_to_csv",
    "decomposition_to_csv",
    "result_to_dict",
    "fitted_values_of",
    "dumps_json",
]

MISSING_CODES = (-99.9, -99.99)


def _is_missing(value: float) -> bool:
    return any(value == code for code in MISSING_CODES)


def _build_series(rows: list[tuple[int, float, int]], what: str) -> TimeSeries:
    """Assemble (year, value, lineno) rows into a series, enforcing
    consecutive years."""
    if not rows:
        raise DataError(f"no data rows found in {what} input")
    years = [r[0] for r in rows]
    for (y0, _, _), (y1, _, line) in zip(rows, rows[1:]):
        if y1 == y0:
            raise DataError(f"line {line}: duplicate year {y1}")
        if y1 != y0 + 1:
            raise DataError(f"line {line}: year {y1} does not follow {y0} (gap)")
    try:
        return TimeSeries(years[0], [r[1] for r in rows])
    except DomainError as err:
        raise DataError(str(err)) from err


def parse_hadcet(text: str) -> TimeSeries:
    """Parse the Met Office annual layout into a series of annual means.

    Header lines (anything before the first row of 14 numeric fields
    starting with a year) are skipped.  A missing annual mean is an
    error unless it is the final row, which is dropped with a warning
    as the in-progress year.
    """
    rows: list[tuple[int, float, int]] = []
    in_data = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        parsed = _try_hadcet_row(tokens)
        if parsed is None:
            if in_data:
                raise DataError(f"line {lineno}: malformed row {line.strip()!r}")
            continue
        in_data = True
        year, annual = parsed
        rows.append((year, annual, lineno))

    if rows and _is_missing(rows[-1][1]):
        warnings.warn(
            f"dropping year {rows[-1][0]}: annual mean not yet available",
            stacklevel=2,
        )
        rows.pop()
    for year, value, lineno in rows:
        if _is_missing(value):
            raise DataError(f"line {lineno}: missing annual mean for year {year}")
    return _build_series(rows, "annual-layout")


def _try_hadcet_row(tokens: list[str]) -> tuple[int, float] | None:
    if len(tokens) != 14:
        return None
    try:
        year = int(tokens[0])
        values = [float(tok) for tok in tokens[1:]]
    except ValueError:
        return None
    return year, values[-1]


def parse_csv(text: str) -> TimeSeries:
    """Parse two-column (year, value) CSV, optional single header line."""
    rows: list[tuple[int, float, int]] = []
    for lineno, record in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != 2:
            raise DataError(f"line {lineno}: expected 2 columns, got {len(record)}")
        try:
            year = int(record[0].strip())
            value = float(record[1].strip())
        except ValueError:
            if lineno == 1 and not rows:
                continue
            raise DataError(
                f"line {lineno}: non-numeric cell in {record!r}"
            ) from None
        rows.append((year, value, lineno))

    if rows and _is_missing(rows[-1][1]):
        warnings.warn(
            f"dropping year {rows[-1][0]}: value marked missing", stacklevel=2
        )
        rows.pop()
    for year, value, lineno in rows:
        if _is_missing(value):
            raise DataError(f"line {lineno}: missing value for year {year}")
    return _build_series(rows, "csv")


def load_series(path: str, fmt: str = "hadcet") -> TimeSeries:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    if fmt == "hadcet":
        return parse_hadcet(text)
    if fmt == "csv":
        return parse_csv(text)
    raise DataError(f"unknown input format {fmt!r}")


def series_to_csv(series: TimeSeries) -> str:
    out = ["year,value"]
    for t, value in enumerate(series.values, start=1):
        out.append(f"{series.year_of(t)},{float(value)!r}")
    return "\n".join(out) + "\n"


def decomposition_to_csv(series: TimeSeries, fitted) -> str:
    """CSV of (year, observed, fitted, residual), one row per year."""
    if len(fitted) != series.n:
        raise DomainError("fitted values must align with the series")
    out = ["year,observed,fitted,residual"]
    for t in range(series.n):
        obs = float(series.values[t])
        fit = float(fitted[t])
        out.append(f"{series.first_year + t},{obs!r},{fit!r},{obs - fit!r}")
    return "\n".join(out) + "\n"


def _ga_params_dict(params: GAParams | None) -> dict[str, Any] | None:
    if params is None:
        return None
    return {
        "population_size": params.population_size,
        "max_generations": params.max_generations,
        "stagnation_limit": params.stagnation_limit,
        "crossover_prob": params.crossover_prob,
        "mutation_rate": params.mutation_rate,
        "elite_fraction": params.elite_fraction,
    }


def _segments(series: TimeSeries, config: ChangepointConfiguration,
              lines: list[tuple[float | None, float | None]],
              variances: tuple[float, ...] | None = None) -> list[dict[str, Any]]:
    bounds = config.boundaries(series.n)
    segments = []
    for i in range(len(bounds) - 1):
        seg: dict[str, Any] = {
            "start_year": series.first_year + bounds[i],
            "end_year": series.first_year + bounds[i + 1] - 1,
            "intercept": lines[i][0],
            "slope": lines[i][1],
        }
        if variances is not None:
            seg["variance"] = variances[i]
        segments.append(seg)
    return segments


def result_to_dict(
    fit: FitResult | JoinpinFit | ArfimaFit,
    series: TimeSeries,
    seed: int | None,
    ga_params: GAParams | None,
) -> dict[str, Any]:
    """One JSON-ready dict per fitted model, same shape for every family."""
    base: dict[str, Any] = {
        "seed": seed,
        "ga_params": _ga_params_dict(ga_params),
        "input": {"first_year": series.first_year, "last_year": series.last_year,
                  "n": series.n},
    }
    if isinstance(fit, FitResult):
        config = fit.config
        if fit.means is not None:
            lines = [(fit.means[i], None if fit.slopes is None else fit.slopes[i])
                     for i in range(config.m + 1)]
        else:
            lines = [(None, None)] * (config.m + 1)
        base.update({
            "model": fit.model.mean_structure.value,
            "errors": fit.model.error_model.value,
            "penalty": fit.model.penalty.value,
            "changepoint_years": list(fit.changepoint_years(series)),
            "segments": _segments(series, config, lines, fit.regime_variances),
            "phi_hat": fit.phi_hat,
            "sigma2_hat": fit.sigma2_hat,
            "loglik": fit.loglik,
            "penalty_value": fit.penalty_value,
            "score": fit.score,
        })
    elif isinstance(fit, JoinpinFit):
        lines = list(fit.segment_lines())
        base.update({
            "model": "joinpin",
            "errors": "wn",
            "penalty": "bic",
            "changepoint_years": [series.first_year + tau for tau in fit.config.taus],
            "segments": _segments(series, fit.config, lines),
            "phi_hat": None,
            "sigma2_hat": None,
            "sigma2_fixed": fit.sigma2_fixed,
            "knot_penalty": fit.knot_penalty,
            "rss": fit.rss,
            "loglik": -0.5 * fit.neg2loglik,
            "penalty_value": fit.knot_penalty * fit.config.m,
            "score": fit.bic_score,
        })
    elif isinstance(fit, ArfimaFit):
        base.update({
            "model": "long-memory",
            "errors": "ar1" if fit.p == 1 else "wn",
            "penalty": "bic",
            "changepoint_years": [],
            "segments": [],
            "phi_hat": fit.phi,
            "sigma2_hat": fit.sigma2,
            "p": fit.p,
            "d": fit.d,
            "mu": fit.mu,
            "hit_boundary": fit.hit_boundary,
            "loglik": -0.5 * fit.neg2loglik,
            "penalty_value": fit.bic_score - fit.neg2loglik,
            "score": fit.bic_score,
        })
    else:
        raise DomainError(f"cannot serialize {type(fit).__name__}")
    return base


def fitted_values_of(fit: FitResult | JoinpinFit | ArfimaFit, series: TimeSeries):
    """Mean-function values at every t, for plots and decomposition CSV."""
    if isinstance(fit, JoinpinFit):
        return fit.fitted
    if isinstance(fit, ArfimaFit):
        return np.full(series.n, fit.mu)
    if fit.means is None:
        raise DomainError(f"{fit.model.label()} has no mean function")
    return fitted_mean(fit.config, fit.means, fit.slopes, series.n)


def dumps_json(obj: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
