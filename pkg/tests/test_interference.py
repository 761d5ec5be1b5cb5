from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_demon.errors import InvalidDimensionError, NumericalConsistencyError
from photonic_demon.haar import UnitaryMatrix, sample_haar, sample_haar_batch
from photonic_demon.interference import (
    DistinguishabilityModel,
    batch_probabilities,
    enumerate_outcomes,
    full_distribution,
    hom_visibility_bound,
    marginal_mode_distribution,
    mean_photon_numbers,
    outcome_probability_dist,
    outcome_probability_general,
    outcome_probability_indist,
    output_multiset,
    symmetry_factor,
)


def first_quantized_probability(U: np.ndarray, inputs, states: np.ndarray, s) -> float:
    """
    Reference by brute force: build the symmetrized N-photon wavefunction over
    (spatial x internal) modes and sum |amplitude|^2 over all spatial assignments
    with occupation ``s``, tracing out internal states.
    """
    M = U.shape[0]
    N, D = states.shape
    single = [np.kron(U[:, inputs[k]], states[k]) for k in range(N)]
    psi = np.zeros([M * D] * N, dtype=complex)
    for rho in itertools.permutations(range(N)):
        t = single[rho[0]]
        for k in range(1, N):
            t = np.multiply.outer(t, single[rho[k]])
        psi += t
    norm = np.vdot(psi, psi).real
    psi = psi.reshape([M, D] * N)
    total = 0.0
    for xs in itertools.product(range(M), repeat=N):
        if tuple(np.bincount(xs, minlength=M)) != tuple(s):
            continue
        index = tuple(v for x in xs for v in (x, slice(None)))
        total += np.sum(np.abs(psi[index]) ** 2)
    return total / norm


def random_states(n: int, dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# -- outcome bookkeeping ----------------------------------------------------------------


@pytest.mark.parametrize("M, N", [(1, 3), (2, 2), (3, 3), (4, 3), (5, 4)])
def test_outcome_count_and_order(M, N):
    outs = enumerate_outcomes(M, N)
    assert len(outs) == math.comb(M + N - 1, N)
    assert outs == sorted(outs)
    assert all(sum(s) == N for s in outs)


def test_multiset_and_symmetry_factor():
    assert output_multiset((1, 0, 2)) == (0, 2, 2)
    assert symmetry_factor((1, 0, 2)) == 2
    assert symmetry_factor((3, 0, 0, 0)) == 6


# -- worked examples --------------------------------------------------------------------


def test_hong_ou_mandel_beamsplitter():
    bs = UnitaryMatrix.beamsplitter()
    indist = full_distribution(bs, (0, 1), "indist")
    assert indist[(1, 1)] == pytest.approx(0.0, abs=1e-15)
    assert indist[(2, 0)] == pytest.approx(0.5)
    dist = full_distribution(bs, (0, 1), "dist")
    assert [dist[s] for s in [(2, 0), (1, 1), (0, 2)]] == pytest.approx([0.25, 0.5, 0.25])


@pytest.mark.parametrize("overlap", [0.0, 0.3, 0.5, 0.9, 1.0])
def test_hom_coincidence_with_partial_overlap(overlap):
    # P(1,1) = (1 - |<a|b>|^2) / 2 on a balanced beamsplitter
    model = DistinguishabilityModel.uniform(2, overlap)
    p = outcome_probability_general(UnitaryMatrix.beamsplitter(), (0, 1), (1, 1), model)
    assert p == pytest.approx((1 - overlap**2) / 2, abs=1e-14)


def test_identity_unitary_is_deterministic():
    u = UnitaryMatrix.identity(4)
    for model in ("indist", "dist", DistinguishabilityModel.uniform(3, 0.4)):
        dist = full_distribution(u, (0, 1, 2), model)
        assert dist[(1, 1, 1, 0)] == pytest.approx(1.0)


# -- oracle agreement ------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_general_route_matches_first_quantization(seed):
    M, N = 3, 3
    U = sample_haar(M, seed)
    states = random_states(N, 3, seed + 100)
    model = DistinguishabilityModel.from_states(states)
    for s in enumerate_outcomes(M, N):
        ref = first_quantized_probability(U.entries, (0, 1, 2), states, s)
        assert outcome_probability_general(U, (0, 1, 2), s, model) == pytest.approx(ref, abs=1e-12)


def test_general_route_matches_first_quantization_two_photons_four_modes():
    U = sample_haar(4, 21)
    states = random_states(2, 2, 5)
    model = DistinguishabilityModel.from_states(states)
    for s in enumerate_outcomes(4, 2):
        ref = first_quantized_probability(U.entries, (1, 3), states, s)
        assert outcome_probability_general(U, (1, 3), s, model) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(2, 5), N=st.integers(1, 4))
def test_endpoints_match_permanent_routes(seed, M, N):
    N = min(N, M)
    U = sample_haar(M, seed)
    inp = tuple(range(N))
    ones = DistinguishabilityModel.indistinguishable(N)
    eye = DistinguishabilityModel.distinguishable(N)
    for s in enumerate_outcomes(M, N):
        assert outcome_probability_general(U, inp, s, ones) == pytest.approx(
            outcome_probability_indist(U, inp, s), abs=1e-12
        )
        assert outcome_probability_general(U, inp, s, eye) == pytest.approx(
            outcome_probability_dist(U, inp, s), abs=1e-12
        )


@pytest.mark.parametrize("model", ["indist", "dist", DistinguishabilityModel.uniform(3, 0.6)])
def test_batch_route_matches_per_unitary(model):
    us = sample_haar_batch(4, 5, seed=9)
    outs, probs = batch_probabilities(us, (0, 1, 2), model)
    for k in range(5):
        ref = full_distribution(UnitaryMatrix(us[k]), (0, 1, 2), model)
        assert probs[k] == pytest.approx([ref[s] for s in outs], abs=1e-13)


# -- invariants --------------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), overlap=st.floats(0.0, 1.0))
def test_normalization_all_models(seed, overlap):
    U = sample_haar(4, seed)
    for model in ("indist", "dist", DistinguishabilityModel.uniform(3, overlap)):
        assert full_distribution(U, (0, 1, 2), model).total() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), data=st.data())
def test_output_relabeling_covariance(seed, data):
    M = 4
    perm = data.draw(st.permutations(range(M)))
    U = sample_haar(M, seed)
    V = U.permute_rows(perm)  # output k of V is output perm[k] of U
    for model in ("indist", "dist"):
        pu = full_distribution(U, (0, 1, 2), model)
        pv = full_distribution(V, (0, 1, 2), model)
        for s in pv.outcomes():
            t = [0] * M
            for k in range(M):
                t[perm[k]] = s[k]
            assert pv[s] == pytest.approx(pu[tuple(t)], abs=1e-13)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_mean_photon_numbers_agree_with_distribution(seed):
    U = sample_haar(4, seed)
    nbar = mean_photon_numbers(U, (0, 1, 2))
    assert nbar.sum() == pytest.approx(3.0, abs=1e-12)
    assert np.all(nbar <= 1 + 1e-12)
    for model in ("indist", "dist"):
        assert full_distribution(U, (0, 1, 2), model).mean_counts() == pytest.approx(nbar, abs=1e-12)


def test_marginal_distribution():
    U = sample_haar(3, 2)
    dist = full_distribution(U, (0, 1, 2), "indist")
    marg = marginal_mode_distribution(dist, 1)
    assert sorted(marg) == [0, 1, 2, 3]
    assert sum(marg.values()) == pytest.approx(1.0)
    with pytest.raises(InvalidDimensionError):
        marginal_mode_distribution(dist, 3)


# -- validation ----------------------------------------------------------------------------


def test_input_validation():
    U = sample_haar(3, 0)
    with pytest.raises(InvalidDimensionError):
        full_distribution(U, (0, 0), "indist")
    with pytest.raises(InvalidDimensionError):
        full_distribution(U, (0, 3), "indist")
    with pytest.raises(InvalidDimensionError):
        outcome_probability_indist(U, (0, 1), (1, 0, 0))
    with pytest.raises(ValueError):
        full_distribution(U, (0, 1), "fermions")


def test_gram_validation():
    with pytest.raises(ValueError):
        DistinguishabilityModel(np.array([[1, 0.5], [0.2, 1]]))
    with pytest.raises(ValueError):
        DistinguishabilityModel(np.array([[1, 2], [2, 1]]))
    with pytest.raises(ValueError):
        DistinguishabilityModel(np.array([[2, 0], [0, 1]]))
    with pytest.raises(InvalidDimensionError):
        full_distribution(sample_haar(3, 0), (0, 1), DistinguishabilityModel.uniform(3, 0.5))
    assert DistinguishabilityModel.uniform(3, 0.5).label == "partial"
    assert DistinguishabilityModel.uniform(3, 1.0).label == "indistinguishable"


def test_rounding_failure_is_reported():
    with pytest.raises(NumericalConsistencyError):
        from photonic_demon.interference import _finalize

        _finalize(complex(-1e-6, 0))


@pytest.mark.parametrize("visibility, bound", [(0.98, 0.98995), (0.90, 0.94868), (1.0, 1.0), (0.0, 0.0)])
def test_hom_visibility_bound(visibility, bound):
    assert hom_visibility_bound(visibility) == pytest.approx(bound, abs=1e-5)


def test_hom_visibility_range():
    with pytest.raises(ValueError):
        hom_visibility_bound(1.2)
