"""
Passive and active Maxwell demons acting on photon-number outcomes.

The ``M`` output modes are split into two halves ``A`` and ``B`` and one mode of
each half is read out, giving ``dn = n_A - n_B``.  The passive demon only reads.
The active demon compares the subset totals first and relabels ``A <-> B``
(including the read-out modes) when ``A`` holds strictly fewer photons; equal
totals are left alone.

Detector miscalibration enters as per-mode multiplicative count factors
(see :class:`photonic_demon.ensemble.DetectorModel`); both the switching decision
and ``dn`` then use the rescaled counts, so ``dn`` becomes real-valued.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from photonic_demon.errors import InvalidDimensionError
from photonic_demon.haar import RandomSeed, UnitaryMatrix, as_seed, compose, embed_unitary, sample_haar
from photonic_demon.interference import (
    ModelLike,
    Outcome,
    OutcomeDistribution,
    full_distribution,
    marginal_mode_distribution,
)

PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K

DEFAULT_WAVELENGTH_NM = 1550.0
FIT_N_MAX = 20
FIT_M_MAX = 20
FIT_NORMALIZATION_TOL = 1e-6


def photon_energy(wavelength_nm: float = DEFAULT_WAVELENGTH_NM) -> float:
    """``E = h c / lambda`` in joules."""
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return PLANCK * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)


DEFAULT_PHOTON_ENERGY = photon_energy(DEFAULT_WAVELENGTH_NM)


# -- configurations --------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ModeConfiguration:
    """Partition of the output modes into ``A`` / ``B`` plus one read-out mode in each."""

    subset_a: tuple[int, ...]
    subset_b: tuple[int, ...]
    measured_a: int
    measured_b: int

    def __post_init__(self) -> None:
        a = tuple(sorted(int(j) for j in self.subset_a))
        b = tuple(sorted(int(j) for j in self.subset_b))
        object.__setattr__(self, "subset_a", a)
        object.__setattr__(self, "subset_b", b)
        if set(a) & set(b):
            raise ValueError(f"subsets overlap: {a} and {b}")
        if len(a) != len(b) or not a:
            raise ValueError(f"subsets must be non-empty and of equal size: {a} and {b}")
        if self.measured_a not in a or self.measured_b not in b:
            raise ValueError("each measured mode must belong to its own subset")

    @property
    def n_modes(self) -> int:
        return len(self.subset_a) + len(self.subset_b)

    def check(self, M: int) -> None:
        if M % 2:
            raise InvalidDimensionError(f"the demon needs an even number of modes, got M={M}")
        if set(self.subset_a) | set(self.subset_b) != set(range(M)):
            raise InvalidDimensionError(f"{self} does not partition modes 0..{M - 1}")

    @classmethod
    def canonical(cls, M: int = 4) -> "ModeConfiguration":
        """``A`` = top half, ``B`` = bottom half, each read out at its topmost mode."""
        if M < 2 or M % 2:
            raise InvalidDimensionError(f"the demon needs an even number of modes, got M={M}")
        half = M // 2
        return cls(tuple(range(half)), tuple(range(half, M)), 0, half)

    def swapped(self) -> "ModeConfiguration":
        return ModeConfiguration(self.subset_b, self.subset_a, self.measured_b, self.measured_a)

    @property
    def label(self) -> str:
        a = "".join(map(str, self.subset_a))
        b = "".join(map(str, self.subset_b))
        return f"A={a}|B={b}|a={self.measured_a}|b={self.measured_b}"

    @classmethod
    def from_label(cls, label: str) -> "ModeConfiguration":
        parts = dict(item.split("=") for item in label.split("|"))
        return cls(
            tuple(int(c) for c in parts["A"]),
            tuple(int(c) for c in parts["B"]),
            int(parts["a"]),
            int(parts["b"]),
        )


def all_configurations(M: int = 4) -> list[ModeConfiguration]:
    """Every ordered partition into halves times every choice of read-out modes."""
    if M < 2 or M % 2:
        raise InvalidDimensionError(f"the demon needs an even number of modes, got M={M}")
    out = []
    for a in itertools.combinations(range(M), M // 2):
        b = tuple(j for j in range(M) if j not in a)
        for ma in a:
            for mb in b:
                out.append(ModeConfiguration(a, b, ma, mb))
    return out


# -- delta-n distributions -----------------------------------------------------------


@dataclass(frozen=True)
class DeltaNDistribution:
    """Law of ``dn``; keys are integers for ideal counts and floats for rescaled counts."""

    probs: Mapping[Union[int, float], float]
    mean: float
    std_error: float = 0.0

    @classmethod
    def from_probs(cls, probs: Mapping, std_error: float = 0.0) -> "DeltaNDistribution":
        ordered = dict(sorted(probs.items()))
        mean = sum((k * p for k, p in ordered.items()), 0 * next(iter(ordered.values()), 0))
        return cls(ordered, mean, std_error)

    def __getitem__(self, dn) -> float:
        return self.probs.get(dn, 0.0)

    def total(self) -> float:
        return sum(self.probs.values())


def _counts(s: Sequence[int], factors: Optional[Sequence[float]]):
    if factors is None:
        return s
    return [f * x for f, x in zip(factors, s)]


def delta_n_value(
    s: Sequence[int],
    config: ModeConfiguration,
    active: bool,
    factors: Optional[Sequence[float]] = None,
):
    """``dn`` for one outcome, after the switching rule when ``active``."""
    c = _counts(s, factors)
    a, b = config.measured_a, config.measured_b
    if active and sum(c[j] for j in config.subset_a) < sum(c[j] for j in config.subset_b):
        a, b = b, a
    return c[a] - c[b]


def _factors(detector) -> Optional[tuple[float, ...]]:
    if detector is None:
        return None
    factors = getattr(detector, "factors", detector)
    return tuple(float(f) for f in factors)


def delta_n_key(value):
    if isinstance(value, (int, Fraction)):
        return value
    rounded = round(float(value), 12)
    return int(rounded) if rounded.is_integer() else rounded


def delta_n_distribution(
    dist: OutcomeDistribution,
    config: ModeConfiguration,
    active: bool,
    detector=None,
) -> DeltaNDistribution:
    config.check(dist.M)
    factors = _factors(detector)
    probs: dict = {}
    for s, p in dist.probs.items():
        key = delta_n_key(delta_n_value(s, config, active, factors))
        probs[key] = probs.get(key, 0) + p
    return DeltaNDistribution.from_probs(probs)


def delta_n_passive(dist: OutcomeDistribution, config: ModeConfiguration, detector=None) -> DeltaNDistribution:
    """Passive demon: ``dn = s[measured_a] - s[measured_b]``, probabilities summed per value."""
    return delta_n_distribution(dist, config, active=False, detector=detector)


def delta_n_active(dist: OutcomeDistribution, config: ModeConfiguration, detector=None) -> DeltaNDistribution:
    """Active demon: swap ``A <-> B`` when ``sum_A s < sum_B s``, then read ``dn``."""
    return delta_n_distribution(dist, config, active=True, detector=detector)


# -- stacks of per-unitary distributions ----------------------------------------------


@dataclass(frozen=True)
class DistributionStack:
    """``K`` outcome distributions over a shared outcome list, as a ``(K, n_outcomes)`` array."""

    M: int
    N: int
    outcomes: list[Outcome]
    probs: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, dists) -> "DistributionStack":
        if isinstance(dists, DistributionStack):
            return dists
        if isinstance(dists, OutcomeDistribution):
            dists = [dists]
        dists = list(dists)
        if not dists:
            raise ValueError("need at least one distribution")
        M, N = dists[0].M, dists[0].N
        if any((d.M, d.N) != (M, N) for d in dists):
            raise InvalidDimensionError("all distributions must share (M, N)")
        outcomes = sorted(set().union(*(d.probs for d in dists)))
        probs = np.array([[float(d[s]) for s in outcomes] for d in dists])
        return cls(M, N, outcomes, probs)

    @property
    def K(self) -> int:
        return self.probs.shape[0]

    def distributions(self) -> list[OutcomeDistribution]:
        return [OutcomeDistribution(self.M, self.N, dict(zip(self.outcomes, map(float, row)))) for row in self.probs]

    def delta_n_vector(self, config: ModeConfiguration, active: bool, detector=None) -> np.ndarray:
        config.check(self.M)
        factors = _factors(detector)
        return np.array([float(delta_n_value(s, config, active, factors)) for s in self.outcomes])

    def delta_n_means(self, config: ModeConfiguration, active: bool, detector=None) -> np.ndarray:
        """Per-distribution ``<dn>``, shape ``(K,)``."""
        return self.probs @ self.delta_n_vector(config, active, detector)


@dataclass(frozen=True)
class RandomizedEstimate:
    mean: float
    std: float
    rounds: int
    round_means: np.ndarray = field(repr=False)


def randomized_partition_estimate(
    per_unitary_dists,
    rounds: int,
    active: bool,
    seed: RandomSeed | int | None = None,
    detector=None,
) -> RandomizedEstimate:
    """
    Average ``<dn>`` with a fresh uniformly random configuration per unitary and round.

    A round draws, for every unitary independently, a random partition into
    halves and a random read-out mode in each half, evaluates that unitary's
    ``<dn>`` and averages over unitaries.  Returns the mean over rounds and the
    standard deviation of the round means.
    """
    if rounds < 1:
        raise ValueError("rounds must be positive")
    stack = DistributionStack.of(per_unitary_dists)
    configs = all_configurations(stack.M)
    table = np.stack([stack.delta_n_means(c, active, detector) for c in configs], axis=1)  # (K, n_configs)
    rng = as_seed(seed).generator()
    picks = rng.integers(0, len(configs), size=(rounds, stack.K))
    round_means = table[np.arange(stack.K)[None, :], picks].mean(axis=1)
    std = float(round_means.std(ddof=1)) if rounds > 1 else 0.0
    return RandomizedEstimate(float(round_means.mean()), std, rounds, round_means)


def configuration_sweep(per_unitary_dists, active: bool, detector=None) -> dict[ModeConfiguration, float]:
    """Ensemble-mean ``<dn>`` for every configuration (24 of them at ``M = 4``)."""
    stack = DistributionStack.of(per_unitary_dists)
    if stack.M % 2:
        raise InvalidDimensionError(f"the sweep needs an even number of modes, got M={stack.M}")
    return {c: float(stack.delta_n_means(c, active, detector).mean()) for c in all_configurations(stack.M)}


# -- temperatures -----------------------------------------------------------------


@dataclass(frozen=True)
class TemperatureReport:
    """Effective temperature of a mode with photon density ``N/M``; fit results when fitted."""

    photon_density: float
    temperature: float
    photon_energy: float
    n_photons: Optional[int] = None
    n_modes: Optional[int] = None
    tv_distance: Optional[float] = None


def effective_temperature(density: float, photon_energy: float = DEFAULT_PHOTON_ENERGY) -> TemperatureReport:
    """``T = (E / k_B) / ln(1 + 1/density)``, continued to ``T = 0`` at zero density."""
    density = float(density)
    if density < 0 or math.isnan(density):
        raise ValueError(f"photon density must be >= 0, got {density}")
    if photon_energy <= 0:
        raise ValueError(f"photon energy must be positive, got {photon_energy}")
    if density == 0:
        return TemperatureReport(0.0, 0.0, photon_energy)
    temperature = photon_energy / BOLTZMANN / math.log1p(1.0 / density)
    return TemperatureReport(density, temperature, photon_energy)


def fit_family(N: int, M: int) -> dict[int, float]:
    """Single-mode marginal of the uniform ``N``-photon, ``M``-mode law: ``P(n) = C(N-n+M-2, M-2) / C(N+M-1, N)``."""
    if M < 2 or N < 0:
        raise ValueError(f"need M >= 2 and N >= 0, got N={N}, M={M}")
    denom = math.comb(N + M - 1, N)
    return {n: math.comb(N - n + M - 2, M - 2) / denom for n in range(N + 1)}


def fit_temperature(
    observed: Mapping[int, float],
    photon_energy: float = DEFAULT_PHOTON_ENERGY,
    n_max: int = FIT_N_MAX,
    m_max: int = FIT_M_MAX,
) -> TemperatureReport:
    """
    Grid-search ``(N, M)`` minimizing the total-variation distance to ``observed``.

    Ties go to the smaller ``M``, then the smaller ``N``.  The best ``N / M`` is
    mapped through :func:`effective_temperature`.
    """
    total = sum(float(p) for p in observed.values())
    if abs(total - 1.0) > FIT_NORMALIZATION_TOL:
        raise ValueError(f"observed distribution is not normalized (sum = {total})")
    obs = {int(n): float(p) for n, p in observed.items()}
    best = None
    for M in range(2, m_max + 1):
        for N in range(1, n_max + 1):
            fam = fit_family(N, M)
            keys = set(obs) | set(fam)
            tv = 0.5 * sum(abs(obs.get(n, 0.0) - fam.get(n, 0.0)) for n in keys)
            if best is None or tv < best[0]:
                best = (tv, N, M)
    tv, N, M = best
    report = effective_temperature(N / M, photon_energy)
    return TemperatureReport(report.photon_density, report.temperature, photon_energy, N, M, tv)


def subset_temperatures(
    dist: OutcomeDistribution,
    config: ModeConfiguration,
    photon_energy: float = DEFAULT_PHOTON_ENERGY,
    active: bool = False,
    density: str = "subset",
) -> tuple[TemperatureReport, TemperatureReport]:
    """
    Temperatures of subsets ``A`` and ``B`` after the (optional) switching rule.

    ``density="subset"`` uses the subset's mean photon total divided by its number
    of modes; ``density="mode"`` uses the mean count of the read-out mode.
    """
    config.check(dist.M)
    if density not in ("subset", "mode"):
        raise ValueError(f"density must be 'subset' or 'mode', got {density!r}")
    sum_a = sum_b = 0.0
    for s, p in dist.probs.items():
        a_modes, b_modes = config.subset_a, config.subset_b
        ma, mb = config.measured_a, config.measured_b
        if active and sum(s[j] for j in a_modes) < sum(s[j] for j in b_modes):
            a_modes, b_modes, ma, mb = b_modes, a_modes, mb, ma
        if density == "subset":
            sum_a += float(p) * sum(s[j] for j in a_modes) / len(a_modes)
            sum_b += float(p) * sum(s[j] for j in b_modes) / len(b_modes)
        else:
            sum_a += float(p) * s[ma]
            sum_b += float(p) * s[mb]
    return effective_temperature(sum_a, photon_energy), effective_temperature(sum_b, photon_energy)


# -- equilibration ----------------------------------------------------------------------


def equilibration_pipeline(
    u3: UnitaryMatrix,
    u4: UnitaryMatrix,
    model: ModelLike,
    measured_mode: int = 0,
) -> tuple[dict[int, float], dict[int, float]]:
    """
    Mode-0 photon-number law after a 3-mode interferometer, then after a following 4-mode one.

    Three photons enter modes 0, 1, 2; the 4-mode stage adds a vacuum mode 3.
    """
    if u3.dim != 3 or u4.dim != 4:
        raise InvalidDimensionError(f"expected a 3-mode and a 4-mode unitary, got {u3.dim} and {u4.dim}")
    inputs = (0, 1, 2)
    first = marginal_mode_distribution(full_distribution(u3, inputs, model), measured_mode)
    combined = compose(embed_unitary(u3, 4, 0), u4)
    second = marginal_mode_distribution(full_distribution(combined, inputs, model), measured_mode)
    return first, second


@dataclass(frozen=True)
class EquilibrationResult:
    """Ensemble-mean mode-0 laws after each stage, with standard errors over unitaries."""

    first: dict[int, float]
    first_se: dict[int, float]
    second: dict[int, float]
    second_se: dict[int, float]
    K: int


def equilibration_ensemble(
    K: int,
    model: ModelLike = "indist",
    seed: RandomSeed | int | None = None,
    measured_mode: int = 0,
) -> EquilibrationResult:
    """Run :func:`equilibration_pipeline` on ``K`` pairs; pair ``k`` uses streams ``2k`` and ``2k + 1``."""
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    base = as_seed(seed)
    firsts, seconds = [], []
    for k in range(K):
        u3 = sample_haar(3, base.with_stream(2 * k))
        u4 = sample_haar(4, base.with_stream(2 * k + 1))
        p1, p2 = equilibration_pipeline(u3, u4, model, measured_mode)
        firsts.append([p1[n] for n in sorted(p1)])
        seconds.append([p2[n] for n in sorted(p2)])

    def reduce(rows):
        arr = np.asarray(rows, dtype=float)
        se = arr.std(axis=0, ddof=1) / math.sqrt(K) if K > 1 else np.zeros(arr.shape[1])
        return dict(enumerate(map(float, arr.mean(axis=0)))), dict(enumerate(map(float, se)))

    f, fse = reduce(firsts)
    s, sse = reduce(seconds)
    return EquilibrationResult(f, fse, s, sse, K)
