"""
src/calculations/montecarlo.py
Harness Monte Carlo deterministico:
- RandomStream: generatore numpy seedato con contatore delle estrazioni
- derive_trial_seed: seed per-trial (finalizzatore SplitMix64 su master XOR index)
- wilson_interval / ErrorEstimate: intervalli di confidenza binomiali
- run_trials / monte_carlo: esecuzione seriale o su pool di processi.

I conteggi aggregati non dipendono dal grado di parallelismo: ogni trial
usa soltanto il proprio stream derivato.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from functools import partial
from multiprocessing import Pool
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from scipy.stats import norm

from src.config import constants as const
from src.errors import ParamError, TrialError

logger = logging.getLogger(__name__)

TrialTask = Callable[["RandomStream"], Any]


class RandomStream:
    """
    Stream di numeri casuali seedato a 64 bit (PCG64).
    Conta le estrazioni: ogni uniform() o integers() consuma esattamente una estrazione.
    """

    def __init__(self, seed: int) -> None:
        self._seed = int(seed) & const.MASK64
        self._generator = np.random.Generator(np.random.PCG64(self._seed))
        self._draws = 0

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def draws(self) -> int:
        return self._draws

    def uniform(self) -> float:
        """Un valore in [0, 1)."""
        self._draws += 1
        return float(self._generator.random())

    def integers(self, low: int, high: int) -> int:
        """Un intero in [low, high)."""
        self._draws += 1
        return int(self._generator.integers(low, high))

    def derive(self, index: int) -> "RandomStream":
        """Stream figlio indipendente (stessa derivazione dei trial)."""
        return RandomStream(derive_trial_seed(self._seed, index))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self._seed}, draws={self._draws})"


def derive_trial_seed(master: int, index: int) -> int:
    """
    Finalizzatore SplitMix64 applicato a (master XOR index).
    È una biiezione su 64 bit: indici distinti danno seed distinti per lo stesso master.
    """
    z = (int(master) ^ int(index)) & const.MASK64
    z = ((z ^ (z >> 30)) * const.SPLITMIX_MUL1) & const.MASK64
    z = ((z ^ (z >> 27)) * const.SPLITMIX_MUL2) & const.MASK64
    return z ^ (z >> 31)


def wilson_interval(successes: int, n: int, confidence: float = const.DEFAULT_CONFIDENCE) -> Tuple[float, float]:
    """Intervallo score di Wilson per una proporzione binomiale."""
    if n < 1 or not 0 <= successes <= n:
        raise ParamError(f"wilson_interval richiede 0 <= successes <= n, n >= 1 (ricevuto {successes}/{n})")
    if not 0.0 < confidence < 1.0:
        raise ParamError(f"confidence deve stare in (0, 1), ricevuto {confidence}")

    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / n
    z2n = z * z / n
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class ErrorEstimate:
    """Conteggi successi/fallimenti con intervallo di Wilson sul tasso di successo."""

    successes: int
    failures: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    confidence: float

    @classmethod
    def from_counts(
        cls, successes: int, failures: int, confidence: float = const.DEFAULT_CONFIDENCE
    ) -> "ErrorEstimate":
        n = successes + failures
        lo, hi = wilson_interval(successes, n, confidence)
        rate = successes / n
        return cls(
            successes=int(successes),
            failures=int(failures),
            rate=min(max(rate, lo), hi),
            wilson_lo=lo,
            wilson_hi=hi,
            confidence=float(confidence),
        )

    @property
    def runs(self) -> int:
        return self.successes + self.failures

    @property
    def error_rate(self) -> float:
        return self.failures / self.runs

    @property
    def error_interval(self) -> Tuple[float, float]:
        # Wilson è simmetrico rispetto al complemento p -> 1 - p.
        return 1.0 - self.wilson_hi, 1.0 - self.wilson_lo

    def contains(self, p: float) -> bool:
        return self.wilson_lo <= p <= self.wilson_hi

    def as_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["runs"] = self.runs
        out["error_rate"] = self.error_rate
        out["error_lo"], out["error_hi"] = self.error_interval
        return out


def _run_trial(task: TrialTask, master_seed: int, index: int) -> Any:
    try:
        return task(RandomStream(derive_trial_seed(master_seed, index)))
    except TrialError:
        raise
    except Exception as exc:
        raise TrialError(index, f"{type(exc).__name__}: {exc}") from exc


def run_trials(task: TrialTask, runs: int, master_seed: int, parallelism: int = 1) -> List[Any]:
    """
    Esegue `runs` trial indipendenti e restituisce i risultati in ordine di indice.
    Con parallelism > 1 il task deve essere picklable (funzione di modulo o partial).
    """
    if runs < 1:
        raise ParamError(f"runs deve essere >= 1, ricevuto {runs}")
    if parallelism < 1:
        raise ParamError(f"parallelism deve essere >= 1, ricevuto {parallelism}")

    worker = partial(_run_trial, task, master_seed)
    workers = min(parallelism, runs)
    if workers == 1:
        return [worker(i) for i in range(runs)]

    chunksize = max(1, runs // (workers * 4))
    logger.debug("run_trials: %d trial su %d processi (chunk %d)", runs, workers, chunksize)
    with Pool(workers) as pool:
        return pool.map(worker, range(runs), chunksize=chunksize)


def monte_carlo(
    task: TrialTask,
    runs: int,
    master_seed: int,
    parallelism: int = 1,
    confidence: float = const.DEFAULT_CONFIDENCE,
) -> ErrorEstimate:
    """Conta i trial con esito vero e restituisce la stima con intervallo di Wilson."""
    results = run_trials(task, runs, master_seed, parallelism)
    successes = sum(1 for r in results if r)
    estimate = ErrorEstimate.from_counts(successes, runs - successes, confidence)
    logger.info(
        "monte_carlo: %d/%d successi (seed %d), CI [%.4g, %.4g]",
        successes, runs, master_seed, estimate.wilson_lo, estimate.wilson_hi,
    )
    return estimate


__all__ = [
    "RandomStream",
    "ErrorEstimate",
    "derive_trial_seed",
    "wilson_interval",
    "run_trials",
    "monte_carlo",
]
