"""Changepoint search: exact enumeration for tiny series, GA otherwise.

The genetic algorithm is deterministic for a given seed.  Every random
draw comes from a stream keyed by ``(seed, generation, slot)``, so the
values consumed for one individual never depend on how many draws an
earlier individual consumed, and results are independent of evaluation
order.

Ties are broken identically everywhere: lower score, then fewer
changepoints, then lexicographically smaller boundary indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from . import estimation
from .core import (
    ChangepointConfiguration,
    DegenerateFitError,
    DomainError,
    ErrorModel,
    FitResult,
    InfeasibleModelError,
    MeanStructure,
    ModelSpec,
    TimeSeries,
)
from .penalties import PenaltyContext, penalty_value

__all__ = [
    "MIN_SEGMENT_LENGTH",
    "min_segment_length",
    "evaluate",
    "GAParams",
    "SearchReport",
    "exhaustive_optimize",
    "ga_optimize",
    "EXHAUSTIVE_MAX_N",
]

# Shortest regime each mean structure can estimate its parameters on.
MIN_SEGMENT_LENGTH = {
    MeanStructure.MEAN_SHIFT: 1,
    MeanStructure.TREND_SHIFT: 3,
    MeanStructure.FIXED_SLOPE: 2,
    MeanStructure.VARIANCE_SHIFT: 2,
    MeanStructure.JOINPIN: 2,
}

# Enumeration over all subsets of boundary positions is exponential in
# N; keep the exact path as a small-N oracle only.
EXHAUSTIVE_MAX_N = 25


def min_segment_length(model: ModelSpec) -> int:
    try:
        return MIN_SEGMENT_LENGTH[model.mean_structure]
    except KeyError:
        raise DomainError(f"no segment constraint defined for {model.label()}") from None


def evaluate(series: TimeSeries, model: ModelSpec, config: ChangepointConfiguration) -> FitResult:
    """Fit ``model`` at ``config`` and return the penalized result.

    The configuration is validated against the model's minimum segment
    length and never silently repaired.  For variance-shift models the
    series values are treated as an already-detrended residual series.

    Raises
    ------
    DomainError
        If the configuration violates the model's segment constraints.
    DegenerateFitError
        If the fit leaves zero innovation variance.
    """
    n = series.n
    config.validate_for(n, min_segment_length(model))
    ms = model.mean_structure
    pen = penalty_value(PenaltyContext(model, n, config))

    if ms is MeanStructure.VARIANCE_SHIFT:
        vfit = estimation.fit_variance_shift(series.values, config)
        return FitResult(model, config, vfit.neg2loglik, pen, regime_variances=vfit.variances)

    if ms is MeanStructure.MEAN_SHIFT:
        means = estimation.fit_mean_shift(series, config)
        slopes = None
    elif ms is MeanStructure.TREND_SHIFT:
        means, slopes = estimation.fit_trend_shift(series, config)
    elif ms is MeanStructure.FIXED_SLOPE:
        means, beta = estimation.fit_fixed_slope(series, config)
        slopes = (beta,) * (config.m + 1)
    else:
        raise DomainError(f"{ms.value} is not fitted through this search")

    d = series.values - estimation.fitted_mean(config, means, slopes, n)
    if model.error_model is ErrorModel.AR1:
        phi = estimation.estimate_ar1(d)
    else:
        phi = None
    sigma2 = estimation.innovation_variance(d, phi or 0.0)
    n2ll = estimation.gaussian_neg2loglik(sigma2, n)
    return FitResult(
        model, config, n2ll, pen,
        means=means, slopes=slopes, phi_hat=phi, sigma2_hat=sigma2,
    )


@dataclass(frozen=True)
class GAParams:
    """Genetic-algorithm settings.

    ``mutation_rate`` is the expected number of flipped boundary
    positions per child, spread uniformly over all positions.
    """

    population_size: int = 200
    max_generations: int = 20000
    stagnation_limit: int = 1000
    crossover_prob: float = 0.8
    mutation_rate: float = 1.0
    elite_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if self.max_generations < 0 or self.stagnation_limit < 1:
            raise DomainError("max_generations must be >= 0 and stagnation_limit >= 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise DomainError("crossover_prob must lie in [0, 1]")
        if self.mutation_rate < 0.0:
            raise DomainError("mutation_rate must be >= 0")
        if not 0.0 <= self.elite_fraction <= 0.5:
            raise DomainError("elite_fraction must lie in [0, 0.5]")
        if self.seed < 0:
            raise DomainError("seed must be a non-negative integer")


@dataclass(frozen=True)
class SearchReport:
    """Outcome of a changepoint search.

    ``score_history`` holds the best score seen up to and including
    each generation (a single entry for exact enumeration), so it is
    non-increasing.  ``evaluations_count`` counts distinct
    configurations actually fitted; refits are memoized.
    """

    best: FitResult
    score_history: tuple[float, ...]
    generations_run: int
    evaluations_count: int
    seed: int | None


_INF = math.inf


class _Memo:
    """Fitness cache keyed by boundary tuple.

    ``fit`` maps a boundary tuple to a scored payload exposing
    ``sort_key()``; degenerate fits are cached as +inf entries so the
    search can traverse them without refitting.
    """

    def __init__(self, fit: Callable[[tuple[int, ...]], Any]):
        self.fit = fit
        self.cache: dict[tuple[int, ...], tuple[tuple, Any]] = {}
        self.evaluations = 0

    def score(self, taus: tuple[int, ...]) -> tuple[tuple, Any]:
        hit = self.cache.get(taus)
        if hit is not None:
            return hit
        self.evaluations += 1
        try:
            result = self.fit(taus)
            entry = (result.sort_key(), result)
        except DegenerateFitError:
            entry = ((_INF, len(taus), taus), None)
        self.cache[taus] = entry
        return entry


def _enumerate_configs(n: int, min_len: int, max_m: int) -> Iterator[tuple[int, ...]]:
    """All boundary tuples whose regimes each span >= min_len indices."""

    def extend(prefix: tuple[int, ...], last: int) -> Iterator[tuple[int, ...]]:
        if n - last >= min_len:
            yield prefix
        if len(prefix) < max_m:
            for tau in range(last + min_len, n - min_len + 1):
                yield from extend(prefix + (tau,), tau)

    yield from extend((), 0)


def exhaustive_optimize(
    series: TimeSeries, model: ModelSpec, max_m: int | None = None
) -> SearchReport:
    """Score every feasible configuration and return the best.

    Only defined for ``N <= EXHAUSTIVE_MAX_N``; meant as an exact
    oracle for validating the GA on short series.
    """
    n = series.n
    if n > EXHAUSTIVE_MAX_N:
        raise DomainError(
            f"exhaustive search is limited to N <= {EXHAUSTIVE_MAX_N}; use ga_optimize"
        )
    min_len = min_segment_length(model)
    if n < min_len:
        raise InfeasibleModelError(
            f"series of length {n} cannot hold one regime of length {min_len}"
        )
    if max_m is None:
        max_m = n - 1
    memo = _Memo(lambda taus: evaluate(series, model, ChangepointConfiguration(taus)))
    best_key = None
    best = None
    for taus in _enumerate_configs(n, min_len, max_m):
        key, result = memo.score(taus)
        if result is not None and (best_key is None or key < best_key):
            best_key, best = key, result
    if best is None:
        raise DegenerateFitError("every feasible configuration fits the data exactly")
    return SearchReport(
        best=best,
        score_history=(best.score,),
        generations_run=0,
        evaluations_count=memo.evaluations,
        seed=None,
    )


def _taus_to_bits(taus: Sequence[int], length: int) -> np.ndarray:
    bits = np.zeros(length, dtype=bool)
    for tau in taus:
        bits[tau - 1] = True
    return bits


def _repair(bits: np.ndarray, n: int, min_len: int, max_m: int) -> tuple[int, ...]:
    """Greedily drop boundaries until the configuration is feasible.

    Scans left to right keeping a boundary only if the regime it closes
    is long enough (earlier boundaries win), truncates to ``max_m``,
    then drops trailing boundaries that would leave a short final
    regime.
    """
    kept: list[int] = []
    prev = 0
    if max_m > 0:
        for pos in np.flatnonzero(bits):
            tau = int(pos) + 1
            if tau - prev >= min_len:
                kept.append(tau)
                prev = tau
                if len(kept) == max_m:
                    break
    while kept and n - kept[-1] < min_len:
        kept.pop()
    return tuple(kept)


def _ga_engine(
    n: int,
    min_len: int,
    memo: _Memo,
    params: GAParams,
    max_m: int | None,
    initial: Sequence[tuple[int, ...]],
) -> tuple[Any, tuple[float, ...], int]:
    """Shared GA loop over boundary bitvectors; returns (best, history, generations)."""
    if n < 2 * min_len:
        raise InfeasibleModelError(
            f"series of length {n} is too short to search (need >= {2 * min_len})"
        )
    length = n - 1
    cap = length if max_m is None else max_m
    if cap < 0:
        raise DomainError("max_m must be >= 0")
    pop_size = params.population_size

    include_prob = min(1.0, 3.0 / n)
    population: list[tuple[int, ...]] = [()]
    for taus in initial:
        population.append(_repair(_taus_to_bits(taus, length), n, min_len, cap))
    population = population[:pop_size]
    for slot in range(len(population), pop_size):
        rng = np.random.default_rng((params.seed, 0, slot))
        bits = rng.random(length) < include_prob
        population.append(_repair(bits, n, min_len, cap))

    def ranked(pop: list[tuple[int, ...]]) -> list[tuple[tuple, tuple[int, ...]]]:
        return sorted(((memo.score(taus)[0], taus) for taus in pop), key=lambda kv: kv[0])

    elite_count = max(1, round(params.elite_fraction * pop_size))
    current = ranked(population)
    best_key, best_taus = current[0]
    history = [best_key[0]]
    stagnation = 0
    generations = 0

    for gen in range(1, params.max_generations + 1):
        children: list[tuple[int, ...]] = []
        for slot in range(pop_size - elite_count):
            rng = np.random.default_rng((params.seed, gen, slot))
            picks = rng.integers(0, pop_size, size=6)
            p1 = current[int(picks[:3].min())][1]
            p2 = current[int(picks[3:].min())][1]
            bits = _taus_to_bits(p1, length)
            if rng.random() < params.crossover_prob:
                mask = rng.random(length) < 0.5
                bits = np.where(mask, bits, _taus_to_bits(p2, length))
            if params.mutation_rate > 0.0:
                bits = bits ^ (rng.random(length) < params.mutation_rate / length)
            children.append(_repair(bits, n, min_len, cap))
        population = [taus for _, taus in current[:elite_count]] + children
        current = ranked(population)
        generations = gen
        gen_key, _ = current[0]
        if gen_key[0] < best_key[0]:
            stagnation = 0
        else:
            stagnation += 1
        if gen_key < best_key:
            best_key, best_taus = gen_key, current[0][1]
        history.append(best_key[0])
        if stagnation >= params.stagnation_limit:
            break

    best = memo.score(best_taus)[1]
    if best is None:
        raise DegenerateFitError("every configuration encountered fits the data exactly")
    return best, tuple(history), generations


def ga_optimize(
    series: TimeSeries,
    model: ModelSpec,
    params: GAParams = GAParams(),
    *,
    max_m: int | None = None,
    initial: Sequence[ChangepointConfiguration] = (),
) -> SearchReport:
    """Minimize the penalized score over configurations with a GA.

    Individuals are inclusion bitvectors over candidate boundaries
    ``1..N-1``; infeasible children are repaired, never rejected.  Each
    generation keeps the elite unchanged and fills the rest with
    tournament-selected, uniformly crossed, mutated children.  The
    search stops after ``stagnation_limit`` generations without a
    strict improvement of the best score, or at ``max_generations``.

    ``initial`` seeds known-good configurations into the starting
    population (alongside the always-included empty configuration).

    Raises
    ------
    InfeasibleModelError
        If ``N < 2 * min_segment_length(model)``, i.e. no single
        changepoint is feasible and there is nothing to search.
    DegenerateFitError
        If every configuration encountered fits the data exactly.
    """
    n = series.n
    for config in initial:
        config._check_n(n)
    memo = _Memo(lambda taus: evaluate(series, model, ChangepointConfiguration(taus)))
    best, history, generations = _ga_engine(
        n, min_segment_length(model), memo, params, max_m,
        [config.taus for config in initial],
    )
    return SearchReport(
        best=best,
        score_history=history,
        generations_run=generations,
        evaluations_count=memo.evaluations,
        seed=params.seed,
    )
