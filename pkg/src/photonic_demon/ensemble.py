"""
Finite-ensemble Monte Carlo: Haar ensembles, sampled trials, detector miscalibration.

Unitary ``k`` of an ensemble is drawn from stream ``k`` of the seed, and trials
for that unitary come from sub-stream ``(k, 1)``, so results do not depend on
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from photonic_demon.demon import (
    DeltaNDistribution,
    DistributionStack,
    ModeConfiguration,
    delta_n_key,
)
from photonic_demon.errors import InvalidDimensionError
from photonic_demon.haar import RandomSeed, UnitaryMatrix, as_seed, sample_haar_ensemble
from photonic_demon.interference import (
    ModelLike,
    OutcomeDistribution,
    batch_probabilities,
)

TRIAL_SUBSTREAM = 1


@dataclass(frozen=True)
class DetectorModel:
    """Per-mode multiplicative count factors; all ones is an ideal detector bank."""

    factors: tuple[float, ...]

    def __post_init__(self) -> None:
        factors = tuple(float(f) for f in self.factors)
        if not factors:
            raise ValueError("detector model needs at least one mode")
        if any(not math.isfinite(f) or f <= 0 for f in factors):
            raise ValueError(f"detector factors must be positive and finite, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def ideal(cls, M: int) -> "DetectorModel":
        return cls((1.0,) * M)

    @property
    def n_modes(self) -> int:
        return len(self.factors)

    @property
    def is_ideal(self) -> bool:
        return all(f == 1.0 for f in self.factors)

    def apply(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts, dtype=float)
        if counts.shape[-1] != self.n_modes:
            raise InvalidDimensionError(f"expected {self.n_modes} modes, got {counts.shape[-1]}")
        return counts * np.asarray(self.factors)


@dataclass(frozen=True)
class TrialRecord:
    unitary_index: int
    counts: tuple


@dataclass(frozen=True)
class EnsembleStats:
    """Mean over unitaries with its standard error; ``trials_per_unitary=None`` means exact."""

    mean: float
    std_error: float
    K: int
    trials_per_unitary: Optional[int] = None

    @classmethod
    def from_values(cls, values: np.ndarray, trials_per_unitary: Optional[int] = None) -> "EnsembleStats":
        values = np.asarray(values, dtype=float)
        K = values.shape[0]
        se = float(values.std(ddof=1) / math.sqrt(K)) if K > 1 else 0.0
        return cls(float(values.mean()), se, K, trials_per_unitary)


def _rng_for(seed: RandomSeed | int | None, unitary_index: int) -> np.random.Generator:
    return as_seed(seed).with_stream(unitary_index).generator(TRIAL_SUBSTREAM)


def sample_outcome_indices(probs: np.ndarray, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Indices into ``probs`` drawn i.i.d.; renormalizes away float round-off."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    return rng.choice(p.shape[0], size=trials, p=p / p.sum())


def sample_trials(
    dist: OutcomeDistribution,
    trials: int,
    seed: RandomSeed | int | None = None,
    unitary_index: int = 0,
) -> list[TrialRecord]:
    """``trials`` i.i.d. outcomes of ``dist``; deterministic for a fixed seed and index."""
    outcomes = dist.outcomes()
    probs = np.array([float(dist.probs[s]) for s in outcomes])
    idx = sample_outcome_indices(probs, trials, _rng_for(seed, unitary_index))
    return [TrialRecord(unitary_index, outcomes[i]) for i in idx]


def apply_detector_bias(data, model: DetectorModel) -> np.ndarray:
    """
    Per-mode expected counts seen through ``model``.

    Accepts an outcome distribution, a sequence of trial records (averaged), or
    an array of ideal per-mode counts whose last axis is the mode.
    """
    if isinstance(data, OutcomeDistribution):
        return model.apply(data.mean_counts())
    if isinstance(data, np.ndarray):
        return model.apply(data)
    records = list(data)
    if records and isinstance(records[0], TrialRecord):
        return model.apply(np.array([r.counts for r in records], dtype=float).mean(axis=0))
    return model.apply(np.asarray(records, dtype=float))


def _ensemble_unitaries(
    K: int,
    M: int,
    seed: RandomSeed | int | None,
    unitaries: Optional[Sequence[UnitaryMatrix]],
) -> np.ndarray:
    if unitaries is not None:
        if len(unitaries) == 0:
            raise ValueError("unitary list is empty")
        if any(u.dim != M for u in unitaries):
            raise InvalidDimensionError(f"every unitary must have dimension {M}")
        return np.stack([u.entries for u in unitaries])
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    return np.stack([u.entries for u in sample_haar_ensemble(M, K, seed)])


def ensemble_distributions(
    K: int,
    statistics: ModelLike = "indist",
    seed: RandomSeed | int | None = None,
    M: int = 4,
    N: int = 3,
    input_modes: Optional[Sequence[int]] = None,
    unitaries: Optional[Sequence[UnitaryMatrix]] = None,
) -> DistributionStack:
    """Exact outcome laws for ``K`` Haar unitaries (or the given ones), photons in modes ``0..N-1``."""
    inputs = tuple(range(N)) if input_modes is None else tuple(input_modes)
    stack = _ensemble_unitaries(K, M, seed, unitaries)
    outcomes, probs = batch_probabilities(stack, inputs, statistics)
    return DistributionStack(M, len(inputs), outcomes, probs)


def _grouped(dvec: np.ndarray) -> tuple[list, np.ndarray]:
    keys = [delta_n_key(v) for v in dvec]
    unique = sorted(set(keys))
    column = {k: i for i, k in enumerate(unique)}
    onehot = np.zeros((len(keys), len(unique)))
    for row, k in enumerate(keys):
        onehot[row, column[k]] = 1.0
    return unique, onehot


def ensemble_delta_n(
    K: int,
    statistics: ModelLike = "indist",
    mode: str = "active",
    config: Optional[ModeConfiguration] = None,
    detector: Optional[DetectorModel] = None,
    trials_per_unitary: Optional[int] = None,
    seed: RandomSeed | int | None = None,
    M: int = 4,
    N: int = 3,
    input_modes: Optional[Sequence[int]] = None,
    unitaries: Optional[Sequence[UnitaryMatrix]] = None,
) -> tuple[EnsembleStats, DeltaNDistribution]:
    """
    Demon ``<dn>`` over an ensemble of Haar unitaries.

    Each unitary contributes its exact ``<dn>`` or, with ``trials_per_unitary``
    set, the sample mean of that many simulated trials.  The returned
    distribution is the ensemble-averaged law of ``dn`` and carries the same
    mean and standard error as the stats.
    """
    if mode not in ("passive", "active"):
        raise ValueError(f"mode must be 'passive' or 'active', got {mode!r}")
    if unitaries is None and K < 1:
        raise ValueError(f"K must be positive, got {K}")
    stack = ensemble_distributions(K, statistics, seed, M, N, input_modes, unitaries)
    config = ModeConfiguration.canonical(M) if config is None else config
    if detector is not None and detector.n_modes != M:
        raise InvalidDimensionError(f"detector model has {detector.n_modes} modes, expected {M}")
    dvec = stack.delta_n_vector(config, mode == "active", detector)
    keys, onehot = _grouped(dvec)
    if trials_per_unitary is None:
        per_unitary = stack.probs @ dvec
        per_key = stack.probs @ onehot
    else:
        per_unitary = np.empty(stack.K)
        per_key = np.empty((stack.K, len(keys)))
        for k in range(stack.K):
            idx = sample_outcome_indices(stack.probs[k], trials_per_unitary, _rng_for(seed, k))
            per_unitary[k] = dvec[idx].mean()
            per_key[k] = onehot[idx].mean(axis=0)
    stats = EnsembleStats.from_values(per_unitary, trials_per_unitary)
    probs = {key: float(p) for key, p in zip(keys, per_key.mean(axis=0))}
    return stats, DeltaNDistribution(probs, stats.mean, stats.std_error)


@dataclass(frozen=True)
class FluxHistogram:
    """Per-unitary mean photon numbers ``nbar_j`` and their per-mode histograms."""

    per_unitary: np.ndarray = field(repr=False)  # (K, M)
    bin_edges: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)  # (M, n_bins)
    means: np.ndarray
    std_errors: np.ndarray

    @property
    def K(self) -> int:
        return self.per_unitary.shape[0]

    def fraction_above(self, threshold: float = 1.0 + 1e-10) -> np.ndarray:
        """Per-mode fraction of unitaries with ``nbar_j > threshold``."""
        return (self.per_unitary > threshold).mean(axis=0)

    def rows(self) -> list[tuple[int, int, float]]:
        """``(unitary_index, mode, nbar)`` rows."""
        K, M = self.per_unitary.shape
        return [(k, j, float(self.per_unitary[k, j])) for k in range(K) for j in range(M)]


def mode_flux_histogram(
    K: int,
    statistics: ModelLike = "indist",
    detector: Optional[DetectorModel] = None,
    seed: RandomSeed | int | None = None,
    bins: Union[int, Sequence[float], None] = None,
    trials_per_unitary: Optional[int] = None,
    M: int = 4,
    N: int = 3,
    unitaries: Optional[Sequence[UnitaryMatrix]] = None,
) -> FluxHistogram:
    """
    Histogram of ``nbar_j`` across ``K`` unitaries, one histogram per mode.

    Exact ``nbar_j`` does not depend on the photon statistics; sampled trials do
    through their shot noise.  Default bins are 0.05 wide starting at 0.
    """
    inputs = list(range(N))
    if trials_per_unitary is None:
        U = _ensemble_unitaries(K, M, seed, unitaries)
        nbar = np.sum(np.abs(U[:, :, inputs]) ** 2, axis=2)
    else:
        stack = ensemble_distributions(K, statistics, seed, M, N, unitaries=unitaries)
        occ = np.array(stack.outcomes, dtype=float)
        nbar = np.empty((stack.K, M))
        for k in range(stack.K):
            idx = sample_outcome_indices(stack.probs[k], trials_per_unitary, _rng_for(seed, k))
            nbar[k] = occ[idx].mean(axis=0)
    if detector is not None:
        nbar = detector.apply(nbar)
    if bins is None or isinstance(bins, int):
        top = max(1.5, math.ceil(float(nbar.max()) * 20 + 1) / 20)
        n_bins = int(round(top / 0.05)) if bins is None else bins
        edges = np.round(np.linspace(0.0, top, n_bins + 1), 12)
    else:
        edges = np.asarray(bins, dtype=float)
    counts = np.stack([np.histogram(nbar[:, j], bins=edges)[0] for j in range(M)])
    Kn = nbar.shape[0]
    se = nbar.std(axis=0, ddof=1) / math.sqrt(Kn) if Kn > 1 else np.zeros(M)
    return FluxHistogram(nbar, edges, counts, nbar.mean(axis=0), se)
