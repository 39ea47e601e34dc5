"""Fixture condivise dai test."""

import numpy as np
import pytest

from src.calculations.linalg import HermitianOperator, StateVector
from src.calculations.montecarlo import RandomStream
from src.models.operators import ObservableSettings, RegisterSpec, uniform_superposition


@pytest.fixture
def rng():
    return RandomStream(20240607)


@pytest.fixture
def settings():
    return ObservableSettings()


@pytest.fixture
def plus_state():
    return uniform_superposition(RegisterSpec(qubits=1))


@pytest.fixture
def make_state():
    """Stato normalizzato casuale (complesso) di dimensione dim."""

    def _make(dim: int, seed: int = 0) -> StateVector:
        gen = np.random.default_rng(seed)
        amps = gen.normal(size=dim) + 1j * gen.normal(size=dim)
        return StateVector(amps / np.linalg.norm(amps))

    return _make


@pytest.fixture
def make_hermitian():
    """Matrice hermitiana casuale di dimensione dim."""

    def _make(dim: int, seed: int = 0) -> HermitianOperator:
        gen = np.random.default_rng(seed)
        m = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
        return HermitianOperator(0.5 * (m + m.conj().T))

    return _make
