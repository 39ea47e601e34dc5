"""
src/config/constants.py
Centralizza tutti i parametri del simulatore:
- osservabili (a1 = 1 + delta, a2 = 1)
- tolleranze numeriche (normalizzazione, raggruppamento autovalori, collasso)
- default degli esperimenti Monte Carlo e dei report.

Usa dataclass frozen per riproducibilità + costanti derivate a livello modulo.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Tuple


# -----------------------------
# Osservabili (A, B, C e J)
# -----------------------------
@dataclass(frozen=True)
class ObservableParams:
    """Autovalori di default: a1 = 1 + delta, a2 = 1."""

    delta: float = 0.1
    a2: float = 1.0

    @property
    def a1(self) -> float:
        return 1.0 + self.delta


@dataclass(frozen=True)
class Tolerances:
    """Soglie numeriche condivise da tutti i moduli."""

    normalization: float = 1e-12
    hermiticity: float = 1e-12
    # Relativa: la soglia assoluta è group_tol * max(1, |lambda|_max).
    group_tol: float = 1e-9
    # Gap minimo tra gruppi adiacenti, in multipli di group_tol.
    group_gap_factor: float = 10.0
    orthonormality: float = 1e-10
    zero_probability: float = 1e-14
    eigen_separation: float = 1e-6


@dataclass(frozen=True)
class ExperimentParams:
    """Default per gli esperimenti Monte Carlo."""

    confidence: float = 0.99
    master_seed: int = 0
    cycle_trials: int = 1000
    search_runs: int = 1000
    distinguish_trials: int = 10_000

    @property
    def parallelism(self) -> int:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class ReportParams:
    """Schema dei report JSON/CSV."""

    schema_version: int = 1
    sweep_columns: Tuple[str, ...] = (
        "records",
        "m",
        "runs",
        "failures",
        "rate",
        "wilson_lo",
        "wilson_hi",
        "budget",
        "seed",
    )


# Istanze globali (immutabili, condivisibili tra processi).
OBSERVABLE_PARAMS = ObservableParams()
TOLERANCES = Tolerances()
EXPERIMENT_PARAMS = ExperimentParams()
REPORT_PARAMS = ReportParams()

# -----------------------------
# Costanti derivate
# -----------------------------
DEFAULT_DELTA = float(OBSERVABLE_PARAMS.delta)
DEFAULT_A1 = float(OBSERVABLE_PARAMS.a1)
DEFAULT_A2 = float(OBSERVABLE_PARAMS.a2)
DEFAULT_GROUP_TOL = float(TOLERANCES.group_tol)
ZERO_PROBABILITY = float(TOLERANCES.zero_probability)
DEFAULT_CONFIDENCE = float(EXPERIMENT_PARAMS.confidence)
SCHEMA_VERSION = int(REPORT_PARAMS.schema_version)
SWEEP_COLUMNS = REPORT_PARAMS.sweep_columns

ENGINES = ("dense", "analytic")
COLLAPSE_RULES = ("luders", "von_neumann")
READOUT_MODES = ("joint", "sequential")

# SplitMix64: maschera e moltiplicatori del finalizzatore.
MASK64 = (1 << 64) - 1
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB


def is_power_of_two(n: int) -> bool:
    """True se n = 2^j con j >= 0."""
    return n >= 1 and (n & (n - 1)) == 0


__all__ = [
    "ObservableParams",
    "Tolerances",
    "ExperimentParams",
    "ReportParams",
    "OBSERVABLE_PARAMS",
    "TOLERANCES",
    "EXPERIMENT_PARAMS",
    "REPORT_PARAMS",
    "DEFAULT_DELTA",
    "DEFAULT_A1",
    "DEFAULT_A2",
    "DEFAULT_GROUP_TOL",
    "ZERO_PROBABILITY",
    "DEFAULT_CONFIDENCE",
    "SCHEMA_VERSION",
    "SWEEP_COLUMNS",
    "ENGINES",
    "COLLAPSE_RULES",
    "READOUT_MODES",
    "MASK64",
    "SPLITMIX_MUL1",
    "SPLITMIX_MUL2",
    "is_power_of_two",
]
