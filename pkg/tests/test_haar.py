from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_demon.errors import InvalidDimensionError
from photonic_demon.haar import (
    RandomSeed,
    UnitaryMatrix,
    amplitude_fidelity,
    compose,
    compose_all,
    embed_unitary,
    read_unitaries,
    sample_haar,
    sample_haar_batch,
    sample_haar_ensemble,
    unitarity_error,
    write_unitaries,
)


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 8), seed=st.integers(0, 2**64 - 1))
def test_samples_are_unitary(dim, seed):
    u = sample_haar(dim, seed)
    assert u.dim == dim
    assert unitarity_error(u.entries) <= 1e-12


def test_same_seed_same_matrix_bitwise():
    a = sample_haar(5, RandomSeed(42, 3))
    b = sample_haar(5, RandomSeed(42, 3))
    assert a.entries.tobytes() == b.entries.tobytes()
    assert a != sample_haar(5, RandomSeed(42, 4))
    assert a != sample_haar(5, RandomSeed(43, 3))


def test_ensemble_uses_one_stream_per_unitary():
    ens = sample_haar_ensemble(3, 4, seed=7)
    for k, u in enumerate(ens):
        assert u == sample_haar(3, RandomSeed(7, k))


def test_seed_must_be_u64():
    with pytest.raises(ValueError):
        RandomSeed(-1)
    with pytest.raises(ValueError):
        RandomSeed(2**64)


def test_rejects_non_unitary_and_bad_shapes():
    with pytest.raises(InvalidDimensionError):
        UnitaryMatrix(np.array([[1.0, 0.0], [0.0, 2.0]]))
    with pytest.raises(InvalidDimensionError):
        UnitaryMatrix(np.ones((2, 3)))
    with pytest.raises(InvalidDimensionError):
        sample_haar(0, 1)


def test_entries_are_read_only():
    u = sample_haar(3, 0)
    with pytest.raises(ValueError):
        u.entries[0, 0] = 1.0


def test_entry_moments_match_haar():
    # E|U_ij|^2 = 1/M and E|U_ij|^4 = 2/(M(M+1)) for every entry
    M = 4
    u = sample_haar_batch(M, 200_000, seed=3)
    a2 = np.abs(u) ** 2
    n = u.shape[0]
    se2 = a2.std(axis=0) / np.sqrt(n)
    assert np.all(np.abs(a2.mean(axis=0) - 1 / M) < 5 * se2)
    a4 = a2**2
    se4 = a4.std(axis=0) / np.sqrt(n)
    assert np.all(np.abs(a4.mean(axis=0) - 2 / (M * (M + 1))) < 5 * se4)


def test_phases_are_uniform():
    # without the phase fix the diagonal of a QR factor is biased toward positive reals
    u = sample_haar_batch(3, 200_000, seed=5)
    z = u[:, 0, 0] / np.abs(u[:, 0, 0])
    assert abs(z.mean()) < 5 / np.sqrt(z.size)
    det = np.linalg.det(u)
    assert abs(det.mean()) < 5 / np.sqrt(det.size)


def test_left_invariance():
    # V U has the same entry-modulus law as U for a fixed V
    M = 3
    v = sample_haar(M, 99).entries
    u = sample_haar_batch(M, 100_000, seed=6)
    vu = np.einsum("ij,kjl->kil", v, u)
    q = np.abs(vu[:, 0, 0]) ** 2
    assert abs(q.mean() - 1 / M) < 5 * q.std() / np.sqrt(q.size)
    assert abs((q**2).mean() - 2 / (M * (M + 1))) < 5 * (q**2).std() / np.sqrt(q.size)


def test_embed_and_compose():
    u3 = sample_haar(3, 1)
    e = embed_unitary(u3, 4, 0)
    assert np.allclose(e.entries[:3, :3], u3.entries)
    assert e.entries[3, 3] == 1 and np.all(e.entries[3, :3] == 0)
    shifted = embed_unitary(UnitaryMatrix.beamsplitter(), 4, 2)
    assert np.allclose(shifted.entries[2:, 2:], UnitaryMatrix.beamsplitter().entries)
    with pytest.raises(InvalidDimensionError):
        embed_unitary(u3, 4, 2)
    u4 = sample_haar(4, 2)
    assert np.allclose(compose(e, u4).entries, u4.entries @ e.entries)
    assert compose_all([e, u4, UnitaryMatrix.identity(4)]) == compose(e, u4)


def test_permutation_matrix_routes_modes():
    p = UnitaryMatrix.permutation((2, 0, 1))
    assert np.allclose(p.entries @ np.eye(3)[:, 0], np.eye(3)[:, 2])


def test_amplitude_fidelity():
    u = sample_haar(4, 8)
    assert amplitude_fidelity(u, u) == pytest.approx(1.0)
    # entrywise modulus ignores phases
    phased = UnitaryMatrix(u.entries * np.exp(1j * np.arange(4)))
    assert amplitude_fidelity(u, phased) == pytest.approx(1.0)
    assert amplitude_fidelity(UnitaryMatrix.identity(2), UnitaryMatrix.permutation((1, 0))) == 0.0
    assert 0.0 <= amplitude_fidelity(u, sample_haar(4, 9)) < 1.0


def test_file_round_trip(tmp_path):
    us = sample_haar_ensemble(3, 3, seed=4)
    path = tmp_path / "u.json"
    write_unitaries(path, us)
    assert read_unitaries(path) == us
    write_unitaries(path, us[0])
    assert read_unitaries(path) == [us[0]]
    path.write_text(json.dumps({"dim": 2, "entries": [[1, 0], [0, 0], [0, 0], [2, 0]]}))
    with pytest.raises(InvalidDimensionError):
        read_unitaries(path)
