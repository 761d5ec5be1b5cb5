from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from photonic_demon.errors import ProblemSizeError
from photonic_demon.haar import sample_haar_batch, sample_haar_ensemble
from photonic_demon.haar_average import (
    haar_average,
    haar_average_dist,
    haar_average_empirical,
    haar_average_indist,
    total_variation,
)
from photonic_demon.interference import batch_probabilities, enumerate_outcomes, output_multiset, symmetry_factor
from photonic_demon.symmetric_group import haar_moment


def dist_probability_from_moments(s, M, N) -> float:
    """E[perm(|A|^2)] / mu(s) expanded into degree-N Haar moments of |U_ij|^2 products."""
    o = output_multiset(s)
    total = 0.0
    for pi in itertools.permutations(range(N)):
        rows = tuple(o[pi[k]] for k in range(N))
        cols = tuple(range(N))
        total += haar_moment((rows, rows), (cols, cols), M).real
    return total / symmetry_factor(s)


@pytest.mark.parametrize("M, N", [(2, 2), (3, 3), (4, 3), (5, 2), (6, 4)])
def test_indist_average_is_exactly_uniform(M, N):
    avg = haar_average_indist(M, N)
    expected = Fraction(1, math.comb(M + N - 1, N))
    assert set(avg.probs) == set(enumerate_outcomes(M, N))
    assert all(p == expected for p in avg.probs.values())
    assert sum(avg.probs.values()) == 1


def test_dist_average_values_at_four_modes_three_photons():
    avg = haar_average_dist(4, 3)
    assert avg[(3, 0, 0, 0)] == pytest.approx(1 / 120, abs=1e-15)
    assert avg[(0, 2, 1, 0)] == pytest.approx(1 / 24, abs=1e-15)
    assert avg[(1, 0, 1, 1)] == pytest.approx(7 / 60, abs=1e-15)
    assert avg.total() == pytest.approx(1.0, abs=1e-12)
    assert avg.statistics == "distinguishable"


@pytest.mark.parametrize("M, N", [(2, 2), (3, 2), (3, 3), (4, 3), (4, 4)])
def test_dist_average_matches_moment_expansion(M, N):
    avg = haar_average_dist(M, N)
    for s in enumerate_outcomes(M, N):
        assert avg[s] == pytest.approx(dist_probability_from_moments(s, M, N), abs=1e-13)


def test_bunching_is_enhanced_for_indistinguishable_photons():
    indist = haar_average_indist(4, 3)
    dist = haar_average_dist(4, 3)
    assert float(indist[(3, 0, 0, 0)]) > dist[(3, 0, 0, 0)]
    assert float(indist[(1, 1, 1, 0)]) < dist[(1, 1, 1, 0)]


@pytest.mark.parametrize("statistics", ["indist", "dist"])
def test_monte_carlo_average_converges(statistics):
    us = sample_haar_batch(4, 100_000, seed=17)
    outs, probs = batch_probabilities(us, (0, 1, 2), statistics)
    empirical = dict(zip(outs, probs.mean(axis=0)))
    assert total_variation(empirical, haar_average(4, 3, statistics).probs) < 0.01


def test_empirical_average_with_standard_errors():
    us = sample_haar_ensemble(4, 400, seed=2)
    emp = haar_average_empirical(us, (0, 1, 2), "dist")
    exact = haar_average_dist(4, 3)
    assert emp.n_unitaries == 400
    assert emp.total() == pytest.approx(1.0, abs=1e-9)
    for s in emp.outcomes():
        assert abs(emp[s] - exact[s]) < 5 * emp.std_errors[s] + 1e-12


def test_problem_size_limit():
    with pytest.raises(ProblemSizeError):
        haar_average_dist(8, 7)


def test_unknown_statistics():
    with pytest.raises(ValueError):
        haar_average(4, 3, "quantum")
