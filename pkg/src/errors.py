"""
src/errors.py
Gerarchia delle eccezioni del simulatore.

- ParamError / DimensionError: parametri o flag non validi (CLI exit 2).
- NumericalError e sottoclassi: configurazioni numericamente non sicure (CLI exit 3).
- TrialError: un trial Monte Carlo è fallito (porta con sé l'indice del trial).
"""

from __future__ import annotations


class SimulationError(Exception):
    """Radice di tutti gli errori del pacchetto."""


class ParamError(SimulationError, ValueError):
    """Parametro fuori dominio (flag CLI, config, invarianti dei tipi)."""


class DimensionError(ParamError):
    """Dimensioni incompatibili o non potenza di due."""


class NumericalError(SimulationError):
    """Configurazione numerica non sicura."""


class NotHermitianError(NumericalError):
    """La matrice viola l'invariante di hermitianità."""


class DegeneracyAmbiguityError(NumericalError):
    """Il raggruppamento degli autovalori non è sicuro con la tolleranza data."""


class NormalizationError(NumericalError):
    """Lo stato richiesto normalizzato non lo è."""


class ZeroProbabilityCollapseError(NumericalError):
    """Collasso su un autospazio con probabilità (numericamente) nulla."""


class BasisError(NumericalError):
    """Base di misura non ortonormale o incompleta."""


class TrialError(SimulationError):
    """
    Un trial Monte Carlo ha sollevato un'eccezione.
    Gli args sono (index, message) così l'errore sopravvive al pickling
    tra processi del pool.
    """

    def __init__(self, index: int, message: str) -> None:
        super().__init__(index, message)
        self.index = index
        self.message = message

    def __str__(self) -> str:
        return f"trial {self.index} fallito: {self.message}"


__all__ = [
    "SimulationError",
    "ParamError",
    "DimensionError",
    "NumericalError",
    "NotHermitianError",
    "DegeneracyAmbiguityError",
    "NormalizationError",
    "ZeroProbabilityCollapseError",
    "BasisError",
    "TrialError",
]
