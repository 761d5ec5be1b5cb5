"""
Haar-ensemble averages of outcome distributions.

For indistinguishable photons the average is uniform over occupation patterns
and is returned in exact rational arithmetic.  For distinguishable photons the
average is the Weingarten double sum over ``S_N x S_N``, evaluated once per
occupancy type and shared by all outcomes of that type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from photonic_demon.errors import InvalidDimensionError, NumericalConsistencyError, ProblemSizeError
from photonic_demon.haar import UnitaryMatrix
from photonic_demon.interference import (
    ModelLike,
    Outcome,
    OutcomeDistribution,
    batch_probabilities,
    enumerate_outcomes,
    output_multiset,
    sorted_type,
    statistics_label,
    symmetry_factor,
)
from photonic_demon.symmetric_group import all_permutations, cycle_type, inverse, weingarten_cache

MAX_DIST_PHOTONS = 6
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class HaarAveragedDistribution(OutcomeDistribution):
    """Haar-averaged outcome law; ``std_errors`` is set for finite-ensemble estimates."""

    statistics: str = "indistinguishable"
    std_errors: Optional[Mapping[Outcome, float]] = None
    n_unitaries: Optional[int] = None


def haar_average_indist(M: int, N: int) -> HaarAveragedDistribution:
    """Uniform law ``1 / C(M+N-1, N)`` over all occupation patterns, as exact fractions."""
    if M < 1 or N < 0:
        raise InvalidDimensionError(f"need M >= 1 and N >= 0, got M={M}, N={N}")
    outcomes = enumerate_outcomes(M, N)
    p = Fraction(1, math.comb(M + N - 1, N))
    return HaarAveragedDistribution(M, N, {s: p for s in outcomes}, statistics="indistinguishable")


def _dist_type_probability(s: Outcome, M: int, N: int) -> float:
    """
    ``(1/mu) sum_{pi, sigma} [prod_k delta(o_pi(k), o_pi(sigma(k)))] Wg_{M,N}(sigma^-1)``.
    """
    cache = weingarten_cache(M, N)
    o = output_multiset(s)
    perms = all_permutations(N)
    wg_inv = [cache(cycle_type(inverse(sigma))) for sigma in perms]
    total = 0.0
    for pi in perms:
        seq = [o[pi[k]] for k in range(N)]
        for sigma, w in zip(perms, wg_inv):
            if all(seq[k] == seq[sigma[k]] for k in range(N)):
                total += w
    return total / symmetry_factor(s)


def haar_average_dist(M: int, N: int) -> HaarAveragedDistribution:
    """Haar-averaged law for distinguishable photons entering ``N`` distinct modes."""
    if M < 1 or N < 0:
        raise InvalidDimensionError(f"need M >= 1 and N >= 0, got M={M}, N={N}")
    if N > MAX_DIST_PHOTONS:
        raise ProblemSizeError(f"the S_N x S_N sum is limited to N <= {MAX_DIST_PHOTONS}, got {N}")
    outcomes = enumerate_outcomes(M, N)
    if N == 0:
        return HaarAveragedDistribution(M, N, {outcomes[0]: 1.0}, statistics="distinguishable")
    by_type: dict[tuple[int, ...], float] = {}
    probs = {}
    for s in outcomes:
        key = sorted_type(s)
        if key not in by_type:
            by_type[key] = _dist_type_probability(s, M, N)
        probs[s] = by_type[key]
    total = sum(probs.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NumericalConsistencyError(f"Haar-averaged distinguishable law sums to {total!r}")
    return HaarAveragedDistribution(M, N, probs, statistics="distinguishable")


def haar_average(M: int, N: int, statistics: str) -> HaarAveragedDistribution:
    label = statistics_label(statistics)
    if label == "indistinguishable":
        return haar_average_indist(M, N)
    if label == "distinguishable":
        return haar_average_dist(M, N)
    raise ValueError("analytic Haar averages exist only for 'dist' and 'indist'")


def haar_average_empirical(
    ensemble: Sequence[UnitaryMatrix] | np.ndarray,
    input_modes: Sequence[int],
    model: ModelLike,
) -> HaarAveragedDistribution:
    """
    Mean of the exact per-unitary distributions over a finite ensemble.

    ``std_errors`` holds the standard error of each outcome's mean
    (sample standard deviation over the ensemble divided by ``sqrt(K)``).
    """
    if isinstance(ensemble, np.ndarray):
        stack = ensemble if ensemble.ndim == 3 else ensemble[None]
    else:
        if len(ensemble) == 0:
            raise ValueError("ensemble must not be empty")
        dims = {u.dim for u in ensemble}
        if len(dims) != 1:
            raise InvalidDimensionError(f"ensemble mixes dimensions {sorted(dims)}")
        stack = np.stack([u.entries for u in ensemble])
    if stack.shape[0] == 0:
        raise ValueError("ensemble must not be empty")
    outcomes, probs = batch_probabilities(stack, input_modes, model)
    K = probs.shape[0]
    mean = probs.mean(axis=0)
    se = probs.std(axis=0, ddof=1) / math.sqrt(K) if K > 1 else np.zeros_like(mean)
    return HaarAveragedDistribution(
        stack.shape[-1],
        len(input_modes),
        {s: float(p) for s, p in zip(outcomes, mean)},
        statistics=statistics_label(model),
        std_errors={s: float(e) for s, e in zip(outcomes, se)},
        n_unitaries=K,
    )


def total_variation(p: Mapping, q: Mapping) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0.0)) - float(q.get(k, 0.0))) for k in keys)
