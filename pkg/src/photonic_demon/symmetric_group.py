"""
Partitions, permutations, symmetric-group characters and the unitary Weingarten function.

Characters are computed with the Murnaghan-Nakayama rule on beta-sets (bead
positions ``lambda_i + (len - 1 - i)``): removing a border strip of length ``r``
moves one bead down by ``r`` into an empty slot, with sign ``(-1)`` to the number
of beads jumped over.  Everything up to the final division in the Weingarten
sum is exact integer / rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from photonic_demon.errors import InvalidDimensionError, ProblemSizeError

# Largest degree for which the d! x d! double sum in ``haar_moment`` is evaluated.
MAX_MOMENT_DEGREE = 7


@dataclass(frozen=True, order=True)
class Partition:
    """Integer partition with weakly decreasing positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"partition parts must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @classmethod
    def from_unsorted(cls, parts: Sequence[int]) -> "Partition":
        return cls(tuple(sorted((p for p in parts if p > 0), reverse=True)))

    @property
    def d(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def boxes(self) -> Iterator[tuple[int, int]]:
        """Young-diagram boxes as 1-based ``(row, column)`` pairs."""
        for i, length in enumerate(self.parts, start=1):
            for j in range(1, length + 1):
                yield i, j

    def centralizer_size(self) -> int:
        """``z_lambda = prod_i i^{m_i} m_i!``, the order of the centralizer of this cycle type."""
        z = 1
        for length in set(self.parts):
            m = self.parts.count(length)
            z *= length**m * math.factorial(m)
        return z

    def class_size(self) -> int:
        """Number of permutations in ``S_d`` with this cycle type."""
        return math.factorial(self.d) // self.centralizer_size()


def enumerate_partitions(d: int) -> list[Partition]:
    """All partitions of ``d`` in reverse lexicographic order, e.g. ``(3), (2,1), (1,1,1)``."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return [Partition(p) for p in _partitions(d, d)]


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first, *rest))
    return tuple(out)


# -- permutations -------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{0, ..., d-1}`` in one-line notation: ``images[k]`` is the image of ``k``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition ``(self * other)(k) = self(other(k))``."""
        return Permutation(tuple(self.images[other.images[k]] for k in range(other.d)))

    def inverse(self) -> "Permutation":
        return Permutation(inverse(self.images))

    def cycle_type(self) -> Partition:
        return cycle_type(self.images)

    def sign(self) -> int:
        return (-1) ** (self.d - len(cycle_type(self.images)))


def inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for k, v in enumerate(perm):
        inv[v] = k
    return tuple(inv)


@lru_cache(maxsize=None)
def _cycle_type_cached(perm: tuple[int, ...]) -> Partition:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return Partition.from_unsorted(lengths)


def cycle_type(perm: Sequence[int] | Permutation) -> Partition:
    if isinstance(perm, Permutation):
        perm = perm.images
    return _cycle_type_cached(tuple(perm))


@lru_cache(maxsize=None)
def all_permutations(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(d)))


# -- characters ---------------------------------------------------------------


def character(lam: Partition, mu: Partition) -> int:
    """Irreducible character ``chi^lam`` of ``S_d`` evaluated on cycle type ``mu``."""
    if lam.d != mu.d:
        raise InvalidDimensionError(f"degree mismatch: |lambda| = {lam.d}, |mu| = {mu.d}")
    beta = _beta_set(lam.parts)
    return _mn(beta, mu.parts)


def _beta_set(parts: tuple[int, ...]) -> frozenset[int]:
    n = len(parts)
    return frozenset(p + (n - 1 - i) for i, p in enumerate(parts))


@lru_cache(maxsize=None)
def _mn(beta: frozenset[int], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in beta:
            continue
        jumped = sum(1 for x in beta if target < x < b)
        moved = (beta - {b}) | {target}
        total += (-1) ** jumped * _mn(moved, rest)
    return total


def dimension(lam: Partition) -> int:
    """``chi^lam(id)``, via the hook-length formula."""
    conj = [sum(1 for p in lam.parts if p >= j) for j in range(1, (lam.parts[0] if lam.parts else 0) + 1)]
    hooks = 1
    for i, j in lam.boxes():
        hooks *= (lam.parts[i - 1] - j) + (conj[j - 1] - i) + 1
    return math.factorial(lam.d) // hooks


def shifted_content_product(lam: Partition, R: int) -> int:
    """``C_lam(R) = prod over boxes (i, j) of (R + j - i)``; zero when ``R`` < number of rows."""
    prod = 1
    for i, j in lam.boxes():
        prod *= R + j - i
    return prod


# -- Weingarten function ------------------------------------------------------


@dataclass
class WeingartenCache:
    """
    Memoized ``Wg_{R,d}`` values keyed by cycle type.

    Values are stored as exact fractions.  Population is guarded by a lock, so
    the cache can be shared by concurrent readers.
    """

    R: int
    d: int
    values: dict[Partition, Fraction] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def exact(self, mu: Partition) -> Fraction:
        if mu.d != self.d:
            raise InvalidDimensionError(f"cycle type {mu} is not a partition of d = {self.d}")
        value = self.values.get(mu)
        if value is None:
            value = weingarten_character_sum(mu, self.R, self.d)
            with self._lock:
                self.values.setdefault(mu, value)
        return value

    def __call__(self, mu: Partition) -> float:
        return float(self.exact(mu))

    def populate(self) -> "WeingartenCache":
        for mu in enumerate_partitions(self.d):
            self.exact(mu)
        return self

    def table(self) -> dict[Partition, float]:
        self.populate()
        return {mu: float(v) for mu, v in sorted(self.values.items(), reverse=True)}


def weingarten_character_sum(mu: Partition, R: int, d: int) -> Fraction:
    """Exact ``(1/d!) sum_{lam |- d, C_lam(R) != 0} chi^lam(id) chi^lam(mu) / C_lam(R)``."""
    total = Fraction(0)
    for lam in enumerate_partitions(d):
        c = shifted_content_product(lam, R)
        if c == 0:
            continue
        total += Fraction(character(lam, Partition((1,) * d)) * character(lam, mu), c)
    return total / math.factorial(d)


_caches: dict[tuple[int, int], WeingartenCache] = {}
_caches_lock = threading.Lock()


def weingarten_cache(R: int, d: int) -> WeingartenCache:
    """Shared process-wide cache for ``(R, d)``."""
    if R < 1 or d < 1:
        raise ValueError(f"need R >= 1 and d >= 1, got R={R}, d={d}")
    with _caches_lock:
        cache = _caches.get((R, d))
        if cache is None:
            cache = _caches[(R, d)] = WeingartenCache(R, d)
    return cache


def weingarten(
    sigma_cycle_type: Partition | Sequence[int],
    R: int,
    d: int | None = None,
    cache: WeingartenCache | None = None,
) -> float:
    """
    Unitary Weingarten function ``Wg_{R,d}`` at a permutation with the given cycle type.

    ``sigma_cycle_type`` may also be a permutation in one-line notation (a plain
    sequence that is not a weakly decreasing partition is reduced to its cycle type).
    """
    mu = _as_cycle_type(sigma_cycle_type)
    d = mu.d if d is None else d
    if cache is None:
        cache = weingarten_cache(R, d)
    elif (cache.R, cache.d) != (R, d):
        raise ValueError(f"cache is for (R, d) = {(cache.R, cache.d)}, requested {(R, d)}")
    return cache(mu)


def _as_cycle_type(x: Partition | Permutation | Sequence[int]) -> Partition:
    if isinstance(x, Partition):
        return x
    if isinstance(x, Permutation):
        return x.cycle_type()
    seq = tuple(x)
    if sorted(seq) == list(range(len(seq))):
        return cycle_type(seq)
    return Partition(seq)


def weingarten_sum(R: int, d: int) -> Fraction:
    """Exact ``sum_{sigma in S_d} Wg_{R,d}(sigma)``, summing class sizes times class values."""
    cache = weingarten_cache(R, d)
    return sum((mu.class_size() * cache.exact(mu) for mu in enumerate_partitions(d)), Fraction(0))


def haar_moment(
    row_indices: tuple[Sequence[int], Sequence[int]],
    col_indices: tuple[Sequence[int], Sequence[int]],
    R: int,
) -> complex:
    """
    Haar integral ``E[U_{i1 j1} ... U_{id jd} conj(U_{i'1 j'1} ... U_{i'd j'd})]`` over ``U(R)``.

    Parameters
    ----------
    row_indices:
        ``(i, i')``: row indices of the plain and of the conjugated factors.
    col_indices:
        ``(j, j')``: column indices of the plain and of the conjugated factors.
    R:
        Dimension of the unitary group.

    Returns
    -------
    complex
        ``sum_{sigma, tau} prod_k delta(i_k, i'_{sigma(k)}) delta(j_k, j'_{tau(k)}) Wg(tau sigma^-1)``.
        The value is real; the complex type matches the general moment.
    """
    (i, ip), (j, jp) = row_indices, col_indices
    d = len(i)
    if not (len(ip) == len(j) == len(jp) == d):
        raise InvalidDimensionError("all four index sequences must share the same length")
    if any(not (0 <= x < R) for seq in (i, ip, j, jp) for x in seq):
        raise InvalidDimensionError(f"indices must lie in [0, {R})")
    if d == 0:
        return 1.0 + 0j
    if d > MAX_MOMENT_DEGREE:
        raise ProblemSizeError(f"degree {d} exceeds {MAX_MOMENT_DEGREE} for the double permutation sum")
    cache = weingarten_cache(R, d)
    perms = all_permutations(d)
    sigmas = [s for s in perms if all(i[k] == ip[s[k]] for k in range(d))]
    taus = [t for t in perms if all(j[k] == jp[t[k]] for k in range(d))]
    total = Fraction(0)
    for s in sigmas:
        s_inv = inverse(s)
        for t in taus:
            total += cache.exact(cycle_type(tuple(t[s_inv[k]] for k in range(d))))
    return complex(float(total), 0.0)
