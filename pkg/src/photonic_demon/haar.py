"""
Haar-random unitaries and small unitary-algebra utilities.

Unitaries are wrapped in :class:`UnitaryMatrix`, an immutable container that
checks ``U^dagger U = 1`` (max-entry norm, tolerance ``UNITARITY_TOL``) on
construction.  Randomness is driven by :class:`RandomSeed`, a ``(seed, stream)``
pair mapped onto numpy's ``SeedSequence`` spawn keys, so every Monte Carlo task
can own an independent, reproducible stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from photonic_demon.errors import InvalidDimensionError

UNITARITY_TOL = 1e-10

_U64 = 2**64


@dataclass(frozen=True)
class RandomSeed:
    """Reproducible RNG handle: identical ``(seed, stream)`` gives identical draws."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not (0 <= int(value) < _U64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self, *subkeys: int) -> np.random.Generator:
        """PCG64 generator; extra ``subkeys`` select further independent sub-streams."""
        key = (int(self.stream), *(int(k) for k in subkeys))
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def with_stream(self, stream: int) -> "RandomSeed":
        return RandomSeed(self.seed, stream)


def as_seed(seed: RandomSeed | int | None) -> RandomSeed:
    if seed is None:
        return RandomSeed()
    if isinstance(seed, RandomSeed):
        return seed
    return RandomSeed(int(seed))


def unitarity_error(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """An ``M x M`` unitary; ``entries[k, j]`` is the amplitude from input ``j`` to output ``k``."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
        err = unitarity_error(arr)
        if not err <= UNITARITY_TOL:
            raise InvalidDimensionError(f"matrix is not unitary: max |U^dag U - 1| = {err:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim})"

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T)

    def permute_rows(self, perm: Sequence[int]) -> "UnitaryMatrix":
        """Relabel output modes: row ``k`` of the result is row ``perm[k]`` of ``self``."""
        return UnitaryMatrix(self.entries[list(perm), :])

    @classmethod
    def identity(cls, dim: int) -> "UnitaryMatrix":
        if dim < 1:
            raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def beamsplitter(cls) -> "UnitaryMatrix":
        """Symmetric 50:50 beamsplitter ``[[1, 1], [1, -1]] / sqrt(2)``."""
        return cls(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "UnitaryMatrix":
        """Permutation matrix sending input mode ``j`` to output mode ``perm[j]``."""
        m = np.zeros((len(perm), len(perm)), dtype=complex)
        for j, k in enumerate(perm):
            m[k, j] = 1.0
        return cls(m)


def haar_matrices(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw ``count`` Haar-distributed unitaries as a ``(count, dim, dim)`` array.

    Complex Ginibre matrices are QR-factorized and each column of ``Q`` is
    multiplied by the phase ``R_jj / |R_jj|``; this makes the factorization
    unique (positive diagonal of ``R``) and the law of ``Q`` exactly Haar.
    """
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    z = (rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def sample_haar(dim: int, seed: RandomSeed | int | None = None) -> UnitaryMatrix:
    """Sample one Haar-random ``dim x dim`` unitary; bit-identical for a fixed seed."""
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    rng = as_seed(seed).generator()
    return UnitaryMatrix(haar_matrices(dim, 1, rng)[0])


def sample_haar_ensemble(dim: int, count: int, seed: RandomSeed | int | None = None) -> list[UnitaryMatrix]:
    """``count`` unitaries; unitary ``k`` is drawn from stream ``k`` of the given seed."""
    base = as_seed(seed)
    return [sample_haar(dim, base.with_stream(k)) for k in range(count)]


def sample_haar_batch(dim: int, count: int, seed: RandomSeed | int | None = None, chunk: int = 100_000) -> np.ndarray:
    """Raw ``(count, dim, dim)`` array from a single stream; for large Monte Carlo runs."""
    rng = as_seed(seed).generator()
    parts = []
    remaining = count
    while remaining > 0:
        n = min(chunk, remaining)
        parts.append(haar_matrices(dim, n, rng))
        remaining -= n
    if not parts:
        return np.zeros((0, dim, dim), dtype=complex)
    return np.concatenate(parts)


def _require_same_dim(a: UnitaryMatrix, b: UnitaryMatrix) -> None:
    if a.dim != b.dim:
        raise InvalidDimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def amplitude_fidelity(target: UnitaryMatrix, actual: UnitaryMatrix) -> float:
    """``(1/M) Tr(|target^dag| |actual|)`` with ``|.|`` the entrywise modulus."""
    _require_same_dim(target, actual)
    value = float(np.sum(np.abs(target.entries) * np.abs(actual.entries)) / target.dim)
    return min(max(value, 0.0), 1.0)


def embed_unitary(inner: UnitaryMatrix, total_dim: int, mode_offset: int = 0) -> UnitaryMatrix:
    """Act as ``inner`` on modes ``[offset, offset + inner.dim)`` and as identity elsewhere."""
    if mode_offset < 0 or mode_offset + inner.dim > total_dim:
        raise InvalidDimensionError(
            f"cannot embed a {inner.dim}-mode unitary at offset {mode_offset} into {total_dim} modes"
        )
    out = np.eye(total_dim, dtype=complex)
    sl = slice(mode_offset, mode_offset + inner.dim)
    out[sl, sl] = inner.entries
    return UnitaryMatrix(out)


def compose(first: UnitaryMatrix, second: UnitaryMatrix) -> UnitaryMatrix:
    """Apply ``first`` and then ``second``: returns ``second @ first``."""
    _require_same_dim(first, second)
    return UnitaryMatrix(second.entries @ first.entries)


def compose_all(unitaries: Iterable[UnitaryMatrix]) -> UnitaryMatrix:
    it = iter(unitaries)
    acc = next(it)
    for u in it:
        acc = compose(acc, u)
    return acc


# -- file format ------------------------------------------------------------


def unitary_to_dict(u: UnitaryMatrix) -> dict:
    flat = u.entries.reshape(-1)
    return {"dim": u.dim, "entries": [[float(z.real), float(z.imag)] for z in flat]}


def unitary_from_dict(obj: dict) -> UnitaryMatrix:
    dim = int(obj["dim"])
    entries = obj["entries"]
    if len(entries) != dim * dim:
        raise InvalidDimensionError(f"expected {dim * dim} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return UnitaryMatrix(flat.reshape(dim, dim))


def write_unitaries(path: str | Path, unitaries: UnitaryMatrix | Sequence[UnitaryMatrix]) -> None:
    if isinstance(unitaries, UnitaryMatrix):
        payload: dict | list = unitary_to_dict(unitaries)
    else:
        payload = [unitary_to_dict(u) for u in unitaries]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_unitaries(path: str | Path) -> list[UnitaryMatrix]:
    """Read one unitary object or a list of them; every matrix is re-checked for unitarity."""
    payload = json.loads(Path(path).read_text())
    if isinstance(payload, dict) and "unitaries" in payload:
        payload = payload["unitaries"]
    if isinstance(payload, dict):
        return [unitary_from_dict(payload)]
    return [unitary_from_dict(obj) for obj in payload]
