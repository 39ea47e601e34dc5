"""
src/models/search.py
Ricerca del record marcato in un database non strutturato:
- ciclo: test di appartenenza di una metà (misura di Lüders di Ĉ, rotazione
  che porta l'input su |00...0>, lettura dei qubit), ripetuto fino a m volte
- ricerca completa: log2(N) cicli, un bit dell'indice per ciclo (LSB per primo)
- contabilità dell'errore: budget log2(N) 2^(-m+1), forma a prodotto, probabilità esatta.

Ogni ciclo testa la metà con indice locale pari; rilevazione => metà pari.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.calculations.linalg import StateVector, UnitaryMap, eig_hermitian, householder_to_e0
from src.calculations.luders import (
    apparatus_basis,
    collapse,
    detection_probability,
    probabilities,
    projectors,
    readout_joint,
    readout_sequential,
    sample_index,
)
from src.calculations.montecarlo import RandomStream
from src.config import constants as const
from src.errors import ParamError
from src.models.operators import (
    ObservableSettings,
    RegisterSpec,
    SearchOperatorParams,
    analytic_projectors,
    build_observable,
    label_eigenvalues,
    uniform_superposition,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CycleConfig:
    """
    Un test di appartenenza su un sottoinsieme di subset_size record.
    marked_local è la risposta dell'oracolo (None = record marcato assente):
    serve solo a costruire B̂, la logica di decisione non lo legge.
    """

    subset_size: int
    marked_local: Optional[int] = None
    m: int = 1
    engine: str = "dense"
    settings: ObservableSettings = field(default_factory=ObservableSettings)
    collapse_rule: str = "luders"
    readout: str = "joint"

    def __post_init__(self) -> None:
        if not const.is_power_of_two(self.subset_size):
            raise ParamError(f"subset_size {self.subset_size} non è una potenza di due >= 1")
        if self.m < 1:
            raise ParamError(f"m deve essere >= 1, ricevuto {self.m}")
        if self.marked_local is not None and not 0 <= self.marked_local < self.subset_size:
            raise ParamError(f"indice locale {self.marked_local} fuori da [0, {self.subset_size})")
        if self.engine not in const.ENGINES:
            raise ParamError(f"engine sconosciuto {self.engine!r} (ammessi: {', '.join(const.ENGINES)})")
        if self.collapse_rule not in const.COLLAPSE_RULES:
            raise ParamError(f"regola di collasso sconosciuta {self.collapse_rule!r}")
        if self.readout not in const.READOUT_MODES:
            raise ParamError(f"modalità di lettura sconosciuta {self.readout!r}")
        if self.collapse_rule == "von_neumann" and self.engine != "dense":
            raise ParamError("la regola von_neumann richiede engine dense")

    @property
    def register_dim(self) -> int:
        # Un singoletto va in un registro D = 2 con indice 1 fittizio, mai marcato.
        return max(2, self.subset_size)

    @property
    def operator_params(self) -> SearchOperatorParams:
        return SearchOperatorParams.from_settings(self.register_dim, self.settings, self.marked_local)


@dataclass(frozen=True)
class TrialRecord:
    """Gruppo campionato e stringa di bit letta in un trial."""

    group_id: int
    bitstring: str

    @property
    def detected(self) -> bool:
        return "1" in self.bitstring


@dataclass(frozen=True)
class CycleOutcome:
    """Verdetto di un ciclo; detected=False implica trials_used = m."""

    detected: bool
    trials_used: int
    trial_records: Tuple[TrialRecord, ...]
    per_trial_detect_prob: float


@dataclass(frozen=True, eq=False)
class PreparedCycle:
    """
    Parte deterministica di un ciclo: φ, U, probabilità dei gruppi e, per ogni
    gruppo con probabilità non nulla, lo stato collassato già ruotato (U χ_k).
    Un trial = una estrazione per il gruppo + le estrazioni della lettura.
    """

    config: CycleConfig
    input_state: StateVector
    rotation: UnitaryMap
    eigenvalues: Tuple[float, ...]
    probabilities: Tuple[float, ...]
    rotated_states: Tuple[Optional[StateVector], ...]

    @property
    def detection_probability(self) -> float:
        return detection_probability(self.probabilities)

    def labels(self) -> List[str]:
        return label_eigenvalues(self.eigenvalues, self.config.operator_params)

    def trial(self, rng: RandomStream) -> TrialRecord:
        k = sample_index(self.probabilities, rng)
        state = self.rotated_states[k]
        if self.config.readout == "sequential":
            _, bits = readout_sequential(state, rng)
        else:
            _, bits = readout_joint(state, rng)
        return TrialRecord(group_id=k, bitstring=bits)


@lru_cache(maxsize=256)
def prepare_cycle(cfg: CycleConfig) -> PreparedCycle:
    """Costruisce (e memorizza) la parte deterministica del ciclo."""
    params = cfg.operator_params
    phi = uniform_superposition(RegisterSpec.from_dim(params.dim))
    rotation = householder_to_e0(phi)

    if cfg.collapse_rule == "von_neumann":
        dec = eig_hermitian(build_observable(params), params.group_tol)
        basis, labels = apparatus_basis(dec)
        probs = [float(abs(np.vdot(b.amps, phi.amps)) ** 2) for b in basis]
        posts: List[Optional[StateVector]] = [
            rotation.apply(b) if p > const.ZERO_PROBABILITY else None for b, p in zip(basis, probs)
        ]
        eigenvalues = tuple(labels)
    else:
        if cfg.engine == "analytic":
            ps = analytic_projectors(params)
        else:
            ps = projectors(eig_hermitian(build_observable(params), params.group_tol))
        probs = probabilities(phi, ps)
        posts = [
            rotation.apply(collapse(phi, proj)) if p > const.ZERO_PROBABILITY else None
            for proj, p in zip(ps, probs)
        ]
        eigenvalues = tuple(proj.eigenvalue for proj in ps)

    prepared = PreparedCycle(
        config=cfg,
        input_state=phi,
        rotation=rotation,
        eigenvalues=eigenvalues,
        probabilities=tuple(probs),
        rotated_states=tuple(posts),
    )
    logger.debug(
        "prepare_cycle: D=%d marked=%s engine=%s P_detect=%.6f",
        params.dim, cfg.marked_local, cfg.engine, prepared.detection_probability,
    )
    return prepared


def cycle_trial(cfg: CycleConfig, rng: RandomStream) -> TrialRecord:
    """Prepara, misura Ĉ, ruota e legge tutti i qubit."""
    return prepare_cycle(cfg).trial(rng)


def cycle_detection_probability(cfg: CycleConfig) -> float:
    """Probabilità esatta di una stringa non nulla in un singolo trial."""
    return prepare_cycle(cfg).detection_probability


def run_cycle(cfg: CycleConfig, rng: RandomStream) -> CycleOutcome:
    """
    Fino a m trial, stop al primo bit a 1. La rilevazione è un certificato:
    con record assente lo stato resta puro e non si legge mai un 1.
    """
    prepared = prepare_cycle(cfg)
    records: List[TrialRecord] = []
    for _ in range(cfg.m):
        record = prepared.trial(rng)
        records.append(record)
        if record.detected:
            break
    return CycleOutcome(
        detected=records[-1].detected,
        trials_used=len(records),
        trial_records=tuple(records),
        per_trial_detect_prob=prepared.detection_probability,
    )


# -----------------------------
# Ricerca completa
# -----------------------------
CycleDecision = Callable[[CycleConfig, RandomStream], CycleOutcome]


@dataclass(frozen=True)
class CycleTranscript:
    cycle: int
    candidates: int
    half_size: int
    contains_marked: bool
    chosen_half: str
    bit: int
    outcome: CycleOutcome

    @property
    def register_dim(self) -> int:
        return max(2, self.half_size)


@dataclass(frozen=True)
class SearchResult:
    """Indice recuperato, trascrizione per ciclo, budget teorico e tempi."""

    records: int
    true_marked: int
    m: int
    recovered_index: int
    cycle_transcripts: Tuple[CycleTranscript, ...]
    theoretical_bound: float
    success: bool
    verified: Optional[bool]
    wall_time_ms: float

    @property
    def trials_used(self) -> int:
        return sum(t.outcome.trials_used for t in self.cycle_transcripts)

    def get_dataframe(self) -> pd.DataFrame:
        """Una riga per ciclo."""
        return pd.DataFrame(
            [
                {
                    "cycle": t.cycle,
                    "candidates": t.candidates,
                    "half_size": t.half_size,
                    "register_dim": t.register_dim,
                    "contains_marked": t.contains_marked,
                    "detected": t.outcome.detected,
                    "trials_used": t.outcome.trials_used,
                    "per_trial_detect_prob": t.outcome.per_trial_detect_prob,
                    "chosen_half": t.chosen_half,
                    "bit": t.bit,
                }
                for t in self.cycle_transcripts
            ]
        )


def _check_search_args(records: int, m: int) -> int:
    if records < 2 or not const.is_power_of_two(records):
        raise ParamError(f"il numero di record {records} deve essere una potenza di due >= 2")
    if m < 1:
        raise ParamError(f"m deve essere >= 1, ricevuto {m}")
    return records.bit_length() - 1


def _oracle_phase(marked: int, index: int) -> int:
    return -1 if index == marked else 1


def run_search(
    records: int,
    true_marked: int,
    m: int,
    engine: str = "analytic",
    settings: Optional[ObservableSettings] = None,
    rng: Optional[RandomStream] = None,
    *,
    verify: bool = False,
    readout: str = "joint",
    decide: Optional[CycleDecision] = None,
) -> SearchResult:
    """
    log2(N) cicli. Al ciclo c l'insieme corrente ha i bit 0..c-1 già decisi;
    la metà pari (bit c = 0) è testata come registro proprio di dimensione N / 2^(c+1).
    decide sostituisce run_cycle (es. un oracolo senza errori per i test di logica).
    """
    n_cycles = _check_search_args(records, m)
    if not 0 <= true_marked < records:
        raise ParamError(f"indice marcato {true_marked} fuori da [0, {records})")
    settings = settings or ObservableSettings()
    rng = rng or RandomStream(const.EXPERIMENT_PARAMS.master_seed)
    decide = decide or run_cycle

    start = time.perf_counter()
    recovered = 0
    transcripts: List[CycleTranscript] = []
    for c in range(n_cycles):
        candidates = records >> c
        half = candidates // 2
        in_set = (true_marked & ((1 << c) - 1)) == recovered
        local = true_marked >> c
        contains = in_set and local % 2 == 0
        cfg = CycleConfig(
            subset_size=half,
            marked_local=(local >> 1) if contains else None,
            m=m,
            engine=engine,
            settings=settings,
            readout=readout,
        )
        outcome = decide(cfg, rng)
        bit = 0 if outcome.detected else 1
        recovered |= bit << c
        transcripts.append(
            CycleTranscript(
                cycle=c,
                candidates=candidates,
                half_size=half,
                contains_marked=contains,
                chosen_half="even" if bit == 0 else "odd",
                bit=bit,
                outcome=outcome,
            )
        )
        logger.debug(
            "ciclo %d: %d candidati, metà pari %s, rilevato=%s dopo %d trial",
            c, candidates, "contiene" if contains else "non contiene",
            outcome.detected, outcome.trials_used,
        )

    verified = _oracle_phase(true_marked, recovered) == -1 if verify else None
    return SearchResult(
        records=records,
        true_marked=true_marked,
        m=m,
        recovered_index=recovered,
        cycle_transcripts=tuple(transcripts),
        theoretical_bound=error_budget(records, m),
        success=recovered == true_marked,
        verified=verified,
        wall_time_ms=(time.perf_counter() - start) * 1000.0,
    )


def error_budget(records: int, m: int) -> float:
    """log2(N) 2^(-m+1), troncato in [0, 1]."""
    n_cycles = _check_search_args(records, m)
    return min(1.0, max(0.0, n_cycles * 2.0 ** (1 - m)))


def product_budget(records: int, m: int) -> float:
    """1 - Π_c (1 - min(1, 2^(-m+1))) sui log2(N) cicli."""
    n_cycles = _check_search_args(records, m)
    per_cycle = min(1.0, 2.0 ** (1 - m))
    return min(1.0, max(0.0, 1.0 - (1.0 - per_cycle) ** n_cycles))


def exact_failure_probability(
    records: int,
    true_marked: int,
    m: int,
    settings: Optional[ObservableSettings] = None,
    engine: str = "analytic",
) -> float:
    """
    1 - Π_c (1 - miss_c) lungo il cammino corretto: miss_c = (1 - P_detect)^m
    quando la metà pari contiene il record, 0 altrimenti (test a un lato).
    """
    n_cycles = _check_search_args(records, m)
    if not 0 <= true_marked < records:
        raise ParamError(f"indice marcato {true_marked} fuori da [0, {records})")
    settings = settings or ObservableSettings()
    survive = 1.0
    for c in range(n_cycles):
        local = true_marked >> c
        if local % 2:
            continue
        cfg = CycleConfig(
            subset_size=records >> (c + 1),
            marked_local=local >> 1,
            m=m,
            engine=engine,
            settings=settings,
        )
        miss = (1.0 - cycle_detection_probability(cfg)) ** m
        survive *= 1.0 - miss
    return 1.0 - survive


# -----------------------------
# Task Monte Carlo (picklabili)
# -----------------------------
@dataclass(frozen=True)
class CycleTask:
    """Un run_cycle; esito vero = rilevazione."""

    config: CycleConfig

    def __call__(self, rng: RandomStream) -> bool:
        return run_cycle(self.config, rng).detected


@dataclass(frozen=True)
class SearchRunSummary:
    success: bool
    recovered_index: int
    trials_used: int
    verified: Optional[bool] = None


@dataclass(frozen=True)
class SearchTask:
    """Una ricerca completa con record marcato noto."""

    records: int
    true_marked: int
    m: int
    engine: str = "analytic"
    settings: ObservableSettings = field(default_factory=ObservableSettings)
    verify: bool = False
    readout: str = "joint"

    def __call__(self, rng: RandomStream) -> SearchRunSummary:
        result = run_search(
            self.records,
            self.true_marked,
            self.m,
            self.engine,
            self.settings,
            rng,
            verify=self.verify,
            readout=self.readout,
        )
        return SearchRunSummary(
            success=result.success,
            recovered_index=result.recovered_index,
            trials_used=result.trials_used,
            verified=result.verified,
        )


def default_trials(records: int) -> int:
    """m = log2(N) + 2, la scelta che tiene l'errore cumulativo sotto 1/3."""
    return int(math.log2(records)) + 2


__all__ = [
    "CycleConfig",
    "TrialRecord",
    "CycleOutcome",
    "PreparedCycle",
    "CycleTranscript",
    "SearchResult",
    "SearchRunSummary",
    "CycleTask",
    "SearchTask",
    "prepare_cycle",
    "cycle_trial",
    "cycle_detection_probability",
    "run_cycle",
    "run_search",
    "error_budget",
    "product_budget",
    "exact_failure_probability",
    "default_trials",
]
