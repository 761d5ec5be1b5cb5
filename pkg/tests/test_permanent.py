from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_demon.errors import InvalidDimensionError, ProblemSizeError
from photonic_demon.permanent import MAX_RYSER_SIZE, permanent, permanent_naive


def random_complex(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_ryser_matches_definition(n, seed):
    a = random_complex(n, seed)
    assert permanent(a) == pytest.approx(permanent_naive(a), rel=1e-10, abs=1e-10)


def test_known_values():
    assert permanent(np.ones((4, 4))) == pytest.approx(24.0)
    assert permanent(np.eye(5)) == pytest.approx(1.0)
    assert permanent(np.array([[1, 2], [3, 4]])) == pytest.approx(10.0)
    # permanent of the all-ones n x n matrix is n!
    assert permanent(np.ones((7, 7))) == pytest.approx(5040.0)


def test_real_input_gives_float():
    assert isinstance(permanent(np.ones((3, 3))), float)
    assert isinstance(permanent(np.ones((3, 3), dtype=complex)), complex)


def test_empty_matrix_is_one():
    assert permanent(np.zeros((0, 0))) == 1.0


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_invariant_under_row_and_column_permutations(n, seed):
    a = random_complex(n, seed)
    rng = np.random.default_rng(seed)
    b = a[rng.permutation(n)][:, rng.permutation(n)]
    assert permanent(b) == pytest.approx(permanent(a), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_multilinear_in_rows(n, seed):
    a = random_complex(n, seed)
    b = a.copy()
    b[0] *= 2.5 - 1j
    assert permanent(b) == pytest.approx((2.5 - 1j) * permanent(a), rel=1e-10)


def test_rejects_non_square():
    with pytest.raises(InvalidDimensionError):
        permanent(np.ones((2, 3)))


def test_rejects_oversized():
    with pytest.raises(ProblemSizeError):
        permanent(np.ones((MAX_RYSER_SIZE + 1, MAX_RYSER_SIZE + 1)))
