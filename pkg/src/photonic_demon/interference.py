"""
Exact outcome probabilities of ``N`` single photons through an ``M``-mode interferometer.

Conventions
-----------
- Modes are 0-indexed.  ``U[k, j]`` is the amplitude for input mode ``j`` to reach
  output mode ``k``.
- An outcome is an occupation vector ``s`` (tuple of ``M`` counts summing to ``N``).
  Its multiset form ``O`` lists mode ``j`` exactly ``s[j]`` times, ascending.
- Photon ``k`` enters input mode ``input_modes[k]`` and carries internal state
  ``psi_k``; ``gram[j, k] = <psi_j | psi_k>``.

Three routes are provided.  The general partial-distinguishability sum over
pairs of permutations is the reference; the two endpoint statistics also have
permanent formulas (``|perm A|^2`` and ``perm |A|^2``), and ``batch_probabilities``
evaluates whole ensembles of unitaries with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

from photonic_demon.errors import InvalidDimensionError, NumericalConsistencyError, ProblemSizeError
from photonic_demon.haar import UnitaryMatrix
from photonic_demon.permanent import permanent
from photonic_demon.symmetric_group import all_permutations, inverse

Outcome = tuple[int, ...]

# The (N!)^2 double sum is only evaluated up to this photon number.
MAX_GENERAL_PHOTONS = 6
IMAG_ERROR_TOL = 1e-8
NEGATIVE_CLAMP_TOL = 1e-12
GRAM_TOL = 1e-10
NORMALIZATION_ERROR_TOL = 1e-6

_INDIST_NAMES = {"indist", "indistinguishable", "bosonic"}
_DIST_NAMES = {"dist", "distinguishable", "classical"}


# -- outcomes -------------------------------------------------------------------


def enumerate_outcomes(M: int, N: int) -> list[Outcome]:
    """All weak compositions of ``N`` into ``M`` parts, ascending lexicographic order."""
    if M < 1 or N < 0:
        raise InvalidDimensionError(f"need M >= 1 and N >= 0, got M={M}, N={N}")
    return list(_compositions(M, N))


def _compositions(M: int, N: int) -> Iterator[Outcome]:
    if M == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in _compositions(M - 1, N - first):
            yield (first, *rest)


def symmetry_factor(s: Sequence[int]) -> int:
    """``mu(s) = prod_j s_j!``."""
    return math.prod(math.factorial(int(x)) for x in s)


def output_multiset(s: Sequence[int]) -> tuple[int, ...]:
    """Multiset form of an occupation vector: ``(1, 0, 2) -> (0, 2, 2)``."""
    return tuple(j for j, count in enumerate(s) for _ in range(int(count)))


def occupation_from_multiset(modes: Sequence[int], M: int) -> Outcome:
    counts = [0] * M
    for j in modes:
        counts[j] += 1
    return tuple(counts)


def sorted_type(s: Sequence[int]) -> tuple[int, ...]:
    """Occupancy type: the occupation vector with counts sorted in decreasing order."""
    return tuple(sorted((int(x) for x in s), reverse=True))


# -- inputs and distinguishability ------------------------------------------------


def validate_input(input_modes: Sequence[int], M: int) -> tuple[int, ...]:
    """Check an input configuration: distinct modes in ``[0, M)``; returned sorted."""
    modes = tuple(sorted(int(i) for i in input_modes))
    if len(set(modes)) != len(modes):
        raise InvalidDimensionError(f"input modes must be distinct, got {tuple(input_modes)}")
    if modes and not (0 <= modes[0] and modes[-1] < M):
        raise InvalidDimensionError(f"input modes {modes} out of range for M={M}")
    return modes


@dataclass(frozen=True, eq=False)
class DistinguishabilityModel:
    """Gram matrix of photon internal states, ``gram[j, k] = <psi_j | psi_k>``."""

    gram: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        g = np.array(self.gram, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidDimensionError(f"gram must be square, got shape {g.shape}")
        if g.size and np.max(np.abs(g - g.conj().T)) > GRAM_TOL:
            raise ValueError("gram matrix must be Hermitian")
        if g.size and np.max(np.abs(np.diag(g) - 1)) > GRAM_TOL:
            raise ValueError("gram matrix must have unit diagonal")
        if g.size and np.linalg.eigvalsh((g + g.conj().T) / 2).min() < -GRAM_TOL:
            raise ValueError("gram matrix must be positive semidefinite")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def n_photons(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def indistinguishable(cls, n: int) -> "DistinguishabilityModel":
        return cls(np.ones((n, n), dtype=complex))

    @classmethod
    def distinguishable(cls, n: int) -> "DistinguishabilityModel":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def uniform(cls, n: int, overlap: float) -> "DistinguishabilityModel":
        """Every pair of photons shares the same real overlap ``x`` in ``[0, 1]``."""
        g = np.full((n, n), overlap, dtype=complex)
        np.fill_diagonal(g, 1.0)
        return cls(g)

    @classmethod
    def from_states(cls, states: np.ndarray) -> "DistinguishabilityModel":
        """Gram matrix of the rows of ``states`` (each normalized first)."""
        v = np.asarray(states, dtype=complex)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        return cls(v.conj() @ v.T)

    @property
    def label(self) -> str:
        n = self.n_photons
        if np.allclose(self.gram, np.ones((n, n)), atol=GRAM_TOL, rtol=0):
            return "indistinguishable"
        if np.allclose(self.gram, np.eye(n), atol=GRAM_TOL, rtol=0):
            return "distinguishable"
        return "partial"


ModelLike = Union[str, DistinguishabilityModel]


def resolve_model(model: ModelLike, n: int) -> DistinguishabilityModel:
    if isinstance(model, DistinguishabilityModel):
        if model.n_photons != n:
            raise InvalidDimensionError(f"gram is {model.n_photons}x{model.n_photons} but there are {n} photons")
        return model
    name = str(model).lower()
    if name in _INDIST_NAMES:
        return DistinguishabilityModel.indistinguishable(n)
    if name in _DIST_NAMES:
        return DistinguishabilityModel.distinguishable(n)
    raise ValueError(f"unknown statistics {model!r}; expected 'dist', 'indist' or a DistinguishabilityModel")


def statistics_label(model: ModelLike) -> str:
    if isinstance(model, DistinguishabilityModel):
        return model.label
    name = str(model).lower()
    if name in _INDIST_NAMES:
        return "indistinguishable"
    if name in _DIST_NAMES:
        return "distinguishable"
    raise ValueError(f"unknown statistics {model!r}")


# -- distributions ------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of occupation vectors for ``N`` photons in ``M`` modes."""

    M: int
    N: int
    probs: Mapping[Outcome, float]

    def __getitem__(self, s: Sequence[int]) -> float:
        return self.probs.get(tuple(s), 0.0)

    def outcomes(self) -> list[Outcome]:
        return list(self.probs)

    def total(self) -> float:
        return sum(self.probs.values())

    def mean_counts(self) -> np.ndarray:
        mean = np.zeros(self.M)
        for s, p in self.probs.items():
            mean += float(p) * np.asarray(s, dtype=float)
        return mean

    def as_float(self) -> "OutcomeDistribution":
        return OutcomeDistribution(self.M, self.N, {s: float(p) for s, p in self.probs.items()})


def _check(U: UnitaryMatrix, input_modes: Sequence[int], s: Sequence[int]) -> tuple[tuple[int, ...], Outcome]:
    inp = validate_input(input_modes, U.dim)
    s = tuple(int(x) for x in s)
    if len(s) != U.dim:
        raise InvalidDimensionError(f"outcome has {len(s)} modes, unitary has {U.dim}")
    if any(x < 0 for x in s) or sum(s) != len(inp):
        raise InvalidDimensionError(f"outcome {s} does not hold {len(inp)} photons")
    return inp, s


def _finalize(value: complex) -> float:
    if abs(value.imag) > IMAG_ERROR_TOL:
        raise NumericalConsistencyError(f"probability has imaginary part {value.imag:.3e}")
    p = float(value.real)
    if p < 0:
        if p < -NEGATIVE_CLAMP_TOL:
            raise NumericalConsistencyError(f"negative probability {p:.3e}; is the Gram matrix valid?")
        p = 0.0
    return p


def pairing_weights(gram: np.ndarray) -> np.ndarray:
    """
    Internal-state overlap factor for every pair of permutations ``(pi', pi)``.

    Output slot ``l`` is reached by photon ``pi^-1(l)`` in the ket and by photon
    ``pi'^-1(l)`` in the bra, so the weight is ``prod_l gram[pi'^-1(l), pi^-1(l)]``.
    Row index is ``pi'``, column index ``pi``, both in ``all_permutations`` order.
    """
    n = gram.shape[0]
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    inv = np.array([inverse(p) for p in all_permutations(n)])
    w = np.ones((len(inv), len(inv)), dtype=complex)
    for slot in range(n):
        w *= gram[inv[:, slot][:, None], inv[:, slot][None, :]]
    return w


def _amplitude_products(U: np.ndarray, inp: Sequence[int], multiset: Sequence[int]) -> np.ndarray:
    """``prod_k U[o_{pi(k)}, i_k]`` for every ``pi``; works on a leading batch axis too."""
    n = len(inp)
    perms = all_permutations(n)
    out = np.empty(U.shape[:-2] + (len(perms),), dtype=complex)
    for a, pi in enumerate(perms):
        prod = np.ones(U.shape[:-2], dtype=complex)
        for k in range(n):
            prod = prod * U[..., multiset[pi[k]], inp[k]]
        out[..., a] = prod
    return out


def outcome_probability_general(
    U: UnitaryMatrix,
    input_modes: Sequence[int],
    s: Sequence[int],
    model: ModelLike,
    weights: np.ndarray | None = None,
) -> float:
    """
    Probability of outcome ``s`` for partially distinguishable photons.

    Evaluates ``(1/mu(s)) sum_{pi, pi'} [prod_k U[o_pi(k), i_k] conj(U[o_pi'(k), i_k])] W(pi', pi)``
    where ``W`` is the product of internal-state overlaps (see :func:`pairing_weights`).
    ``weights`` may be passed to reuse a precomputed pairing matrix.
    """
    inp, s = _check(U, input_modes, s)
    n = len(inp)
    if n > MAX_GENERAL_PHOTONS:
        raise ProblemSizeError(f"double permutation sum is limited to N <= {MAX_GENERAL_PHOTONS}, got {n}")
    if weights is None:
        weights = pairing_weights(resolve_model(model, n).gram)
    amps = _amplitude_products(U.entries, inp, output_multiset(s))
    value = np.conj(amps) @ weights @ amps
    return _finalize(complex(value) / symmetry_factor(s))


def transition_submatrix(U: UnitaryMatrix, input_modes: Sequence[int], s: Sequence[int]) -> np.ndarray:
    """``A[r, c] = U[o_r, i_c]``: rows follow the output multiset, columns the input modes."""
    inp, s = _check(U, input_modes, s)
    rows = list(output_multiset(s))
    return U.entries[np.ix_(rows, list(inp))]


def outcome_probability_indist(U: UnitaryMatrix, input_modes: Sequence[int], s: Sequence[int]) -> float:
    """Indistinguishable photons: ``|perm(A)|^2 / mu(s)``."""
    a = transition_submatrix(U, input_modes, s)
    return _finalize(complex(abs(permanent(a)) ** 2 / symmetry_factor(s)))


def outcome_probability_dist(U: UnitaryMatrix, input_modes: Sequence[int], s: Sequence[int]) -> float:
    """Distinguishable photons: ``perm(|A|^2) / mu(s)``."""
    a = transition_submatrix(U, input_modes, s)
    return _finalize(complex(permanent(np.abs(a) ** 2)) / symmetry_factor(s))


def full_distribution(U: UnitaryMatrix, input_modes: Sequence[int], model: ModelLike) -> OutcomeDistribution:
    """
    Probabilities of all ``C(M+N-1, N)`` outcomes.

    The string models ``"indist"`` / ``"dist"`` use the permanent formulas; a
    :class:`DistinguishabilityModel` uses the general double sum.  The sum of
    the returned probabilities is not renormalized; a deviation above 1e-6
    raises :class:`NumericalConsistencyError`.
    """
    inp = validate_input(input_modes, U.dim)
    n = len(inp)
    outcomes = enumerate_outcomes(U.dim, n)
    if isinstance(model, DistinguishabilityModel):
        weights = pairing_weights(resolve_model(model, n).gram)
        probs = {s: outcome_probability_general(U, inp, s, model, weights) for s in outcomes}
    elif statistics_label(model) == "indistinguishable":
        probs = {s: outcome_probability_indist(U, inp, s) for s in outcomes}
    else:
        probs = {s: outcome_probability_dist(U, inp, s) for s in outcomes}
    dist = OutcomeDistribution(U.dim, n, probs)
    total = dist.total()
    if abs(total - 1.0) > NORMALIZATION_ERROR_TOL:
        raise NumericalConsistencyError(f"outcome probabilities sum to {total!r}")
    return dist


def batch_probabilities(
    unitaries: np.ndarray,
    input_modes: Sequence[int],
    model: ModelLike,
) -> tuple[list[Outcome], np.ndarray]:
    """
    Outcome probabilities for a stack of unitaries, shape ``(K, n_outcomes)``.

    Uses the permutation expansion directly on the ``(K, M, M)`` array, which is
    much faster than per-matrix calls for the small ``N`` of interest.
    """
    U = np.asarray(unitaries, dtype=complex)
    if U.ndim == 2:
        U = U[None]
    M = U.shape[-1]
    inp = validate_input(input_modes, M)
    n = len(inp)
    if n > MAX_GENERAL_PHOTONS:
        raise ProblemSizeError(f"batched evaluation is limited to N <= {MAX_GENERAL_PHOTONS}, got {n}")
    outcomes = enumerate_outcomes(M, n)
    label = statistics_label(model)
    weights = None
    if label == "partial":
        weights = pairing_weights(resolve_model(model, n).gram)
    probs = np.empty((U.shape[0], len(outcomes)))
    for col, s in enumerate(outcomes):
        amps = _amplitude_products(U, inp, output_multiset(s))
        if label == "indistinguishable":
            value = np.abs(amps.sum(axis=-1)) ** 2
        elif label == "distinguishable":
            value = (np.abs(amps) ** 2).sum(axis=-1)
        else:
            quad = np.einsum("kp,pq,kq->k", np.conj(amps), weights, amps)
            if np.max(np.abs(quad.imag), initial=0.0) > IMAG_ERROR_TOL:
                raise NumericalConsistencyError("batched probability has a non-negligible imaginary part")
            value = quad.real
        probs[:, col] = value / symmetry_factor(s)
    if probs.min(initial=0.0) < -NEGATIVE_CLAMP_TOL:
        raise NumericalConsistencyError(f"negative probability {probs.min():.3e}")
    np.clip(probs, 0.0, None, out=probs)
    return outcomes, probs


# -- derived quantities -------------------------------------------------------------


def mean_photon_numbers(U: UnitaryMatrix, input_modes: Sequence[int]) -> np.ndarray:
    """``nbar_j = sum_{i in inputs} |U[j, i]|^2``, identical for every statistics model."""
    inp = validate_input(input_modes, U.dim)
    return np.sum(np.abs(U.entries[:, list(inp)]) ** 2, axis=1)


def marginal_mode_distribution(dist: OutcomeDistribution, mode: int) -> dict[int, float]:
    """``P(n)`` for the photon number in one mode, keys ``0..N``."""
    if not (0 <= mode < dist.M):
        raise InvalidDimensionError(f"mode {mode} out of range for M={dist.M}")
    zero = Fraction(0) if any(isinstance(p, Fraction) for p in dist.probs.values()) else 0.0
    marginal = {n: zero for n in range(dist.N + 1)}
    for s, p in dist.probs.items():
        marginal[s[mode]] += p
    return marginal


def hom_visibility_bound(visibility: float) -> float:
    """Lower bound ``sqrt(V)`` on the internal-state overlap implied by HOM visibility ``V``."""
    if not (0.0 <= visibility <= 1.0):
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    return math.sqrt(visibility)
