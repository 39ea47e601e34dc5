"""
src/models/distinguish.py
Discriminazione tra Î e Ĵ = diag(1, 1 + delta) su m copie di (|0> + |1>)/sqrt(2).

Ogni copia: misura di Î o Ĵ, poi lettura nella base di interferenza {+, -}.
Regola: si dichiara J appena si osserva un "-", altrimenti I.
Con Î lo stato resta |+> e l'errore sotto verità I è esattamente zero;
sotto verità J ogni copia dà "-" con probabilità 1/2, errore 2^(-m).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.calculations.linalg import HermitianOperator, StateVector, eig_hermitian
from src.calculations.luders import (
    EigenspaceProjector,
    apparatus_basis,
    measure_von_neumann,
    measure_with_projectors,
    projectors,
)
from src.calculations.montecarlo import ErrorEstimate, RandomStream, monte_carlo
from src.config import constants as const
from src.errors import ParamError
from src.models.operators import RegisterSpec, uniform_superposition

logger = logging.getLogger(__name__)

TRUTHS = ("I", "J")
PLUS, MINUS = "plus", "minus"


@dataclass(frozen=True)
class DistinguishConfig:
    delta: float = const.DEFAULT_DELTA
    copies: int = 1
    trials: int = const.EXPERIMENT_PARAMS.distinguish_trials
    truth: str = "J"
    engine: str = "luders"
    group_tol: float = const.DEFAULT_GROUP_TOL

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ParamError(f"delta deve essere > 0, ricevuto {self.delta}")
        if self.copies < 1 or self.trials < 1:
            raise ParamError(f"copies e trials devono essere >= 1 ({self.copies}, {self.trials})")
        if self.truth not in TRUTHS:
            raise ParamError(f"truth deve essere I o J, ricevuto {self.truth!r}")
        if self.engine not in const.COLLAPSE_RULES:
            raise ParamError(f"engine sconosciuto {self.engine!r}")

    @property
    def theoretical_error(self) -> float:
        """2^(-m) sotto J con Lüders; zero sotto I."""
        if self.truth == "I" and self.engine == "luders":
            return 0.0
        if self.truth == "I":
            # von Neumann nella base computazionale distrugge la sovrapposizione.
            return 1.0 - 2.0 ** (-self.copies)
        return 2.0 ** (-self.copies)


def observable(truth: str, delta: float) -> HermitianOperator:
    """Î oppure Ĵ = diag(1, 1 + delta)."""
    if truth == "I":
        return HermitianOperator.identity(2)
    return HermitianOperator.diagonal([1.0, 1.0 + delta])


def input_state() -> StateVector:
    return uniform_superposition(RegisterSpec(qubits=1))


@lru_cache(maxsize=None)
def interference_basis() -> Tuple[StateVector, StateVector]:
    """|+> e |->."""
    plus = input_state()
    minus = StateVector(np.array([1.0, -1.0]) / np.sqrt(2.0))
    return plus, minus


@lru_cache(maxsize=64)
def _luders_projectors(truth: str, delta: float, group_tol: float) -> List[EigenspaceProjector]:
    return projectors(eig_hermitian(observable(truth, delta), group_tol))


@lru_cache(maxsize=64)
def _apparatus(truth: str, delta: float, group_tol: float):
    return apparatus_basis(eig_hermitian(observable(truth, delta), group_tol))


def distinguish_copy(
    truth: str,
    rng: RandomStream,
    delta: float = const.DEFAULT_DELTA,
    engine: str = "luders",
    group_tol: float = const.DEFAULT_GROUP_TOL,
) -> str:
    """Una copia: misura dell'osservabile, poi lettura in {+, -}. Due estrazioni."""
    phi = input_state()
    if engine == "von_neumann":
        basis, labels = _apparatus(truth, delta, group_tol)
        post = measure_von_neumann(phi, basis, labels, rng).post_state
    else:
        post = measure_with_projectors(phi, _luders_projectors(truth, delta, group_tol), rng).post_state
    readout = measure_von_neumann(post, interference_basis(), [1.0, -1.0], rng)
    return PLUS if readout.group_id == 0 else MINUS


@dataclass(frozen=True)
class DiscriminationTask:
    """Un trial del protocollo; esito vero = decisione corretta."""

    config: DistinguishConfig

    def __call__(self, rng: RandomStream) -> bool:
        cfg = self.config
        declared = "I"
        for _ in range(cfg.copies):
            if distinguish_copy(cfg.truth, rng, cfg.delta, cfg.engine, cfg.group_tol) == MINUS:
                declared = "J"
                break
        return declared == cfg.truth


def run_discrimination(
    cfg: DistinguishConfig,
    seed: int = const.EXPERIMENT_PARAMS.master_seed,
    parallelism: int = 1,
    confidence: float = const.DEFAULT_CONFIDENCE,
) -> ErrorEstimate:
    """Tasso d'errore empirico (failures / trials) con intervallo di Wilson."""
    estimate = monte_carlo(DiscriminationTask(cfg), cfg.trials, seed, parallelism, confidence)
    logger.info(
        "discriminazione truth=%s m=%d: errore %.5f (teorico %.5f)",
        cfg.truth, cfg.copies, estimate.error_rate, cfg.theoretical_error,
    )
    return estimate


__all__ = [
    "TRUTHS",
    "PLUS",
    "MINUS",
    "DistinguishConfig",
    "DiscriminationTask",
    "observable",
    "input_state",
    "interference_basis",
    "distinguish_copy",
    "run_discrimination",
]
