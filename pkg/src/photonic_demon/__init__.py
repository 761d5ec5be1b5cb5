"""Exact multiphoton interference, Haar averages and photonic Maxwell-demon statistics."""

from photonic_demon.errors import (
    InvalidDimensionError,
    NumericalConsistencyError,
    ProblemSizeError,
)
from photonic_demon.haar import (
    RandomSeed,
    UnitaryMatrix,
    amplitude_fidelity,
    compose,
    embed_unitary,
    sample_haar,
)

__all__ = [
    "InvalidDimensionError",
    "NumericalConsistencyError",
    "ProblemSizeError",
    "RandomSeed",
    "UnitaryMatrix",
    "amplitude_fidelity",
    "compose",
    "embed_unitary",
    "sample_haar",
]

__version__ = "0.1.0"
