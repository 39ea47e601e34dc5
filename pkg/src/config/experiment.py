"""
src/config/experiment.py
ExperimentConfig: configurazione risolta di un comando CLI.
Valori da flag > valori da file JSON > default (vedi src/data/loader.py).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional, Tuple, Union

from src.config import constants as const
from src.errors import ParamError

COMMANDS = ("cycle", "search", "sweep", "spectrum", "distinguish")
OUTPUT_FORMATS = ("json", "csv")
INTEGER_FIELDS = ("records", "dim", "m", "trials", "runs", "copies", "parallelism", "seed")

Marked = Union[int, str, None]


def parse_marked(value: Any) -> Marked:
    """'none'/None -> None, 'random' -> 'random', altrimenti intero."""
    if value is None:
        return None
    if isinstance(value, bool):
        raise ParamError(f"indice marcato non valido: {value!r}")
    if isinstance(value, int):
        return value
    text = str(value).strip().lower()
    if text == "none":
        return None
    if text == "random":
        return "random"
    try:
        return int(text)
    except ValueError as exc:
        raise ParamError(f"indice marcato non valido: {value!r} (intero, 'none' o 'random')") from exc


def parse_m_range(value: Any) -> Tuple[int, int]:
    """'lo..hi' oppure [lo, hi] -> (lo, hi) con 1 <= lo <= hi."""
    try:
        if isinstance(value, str):
            lo_text, hi_text = value.split("..")
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo, hi = (int(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ParamError(f"m-range non valido: {value!r} (atteso lo..hi)") from exc
    if not 1 <= lo <= hi:
        raise ParamError(f"m-range richiede 1 <= lo <= hi, ricevuto {lo}..{hi}")
    return lo, hi


@dataclass(frozen=True)
class ExperimentConfig:
    """Tutti i parametri di un esperimento; i campi non usati da un comando restano None."""

    command: str
    records: Optional[int] = None
    dim: Optional[int] = None
    marked: Marked = None
    delta: float = const.DEFAULT_DELTA
    a1: Optional[float] = None
    a2: float = const.DEFAULT_A2
    m: Optional[int] = None
    m_range: Optional[Tuple[int, int]] = None
    trials: Optional[int] = None
    runs: Optional[int] = None
    copies: Optional[int] = None
    truth: str = "J"
    seed: int = const.EXPERIMENT_PARAMS.master_seed
    engine: str = "analytic"
    collapse: str = "luders"
    readout: str = "joint"
    group_tol: float = const.DEFAULT_GROUP_TOL
    confidence: float = const.DEFAULT_CONFIDENCE
    verify: bool = False
    output_format: Optional[str] = None
    out: Optional[str] = None
    parallelism: int = const.EXPERIMENT_PARAMS.parallelism

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ParamError(f"comando sconosciuto {self.command!r}")
        object.__setattr__(self, "marked", parse_marked(self.marked))
        if self.m_range is not None:
            object.__setattr__(self, "m_range", parse_m_range(self.m_range))
        if self.a1 is None:
            object.__setattr__(self, "a1", 1.0 + self.delta)
        if self.output_format is None:
            object.__setattr__(self, "output_format", "csv" if self.command == "sweep" else "json")
        self._validate()

    def _validate(self) -> None:
        for name in INTEGER_FIELDS:
            value = getattr(self, name)
            if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
                raise ParamError(f"{name} deve essere un intero, ricevuto {value!r}")
        if self.delta == 0:
            raise ParamError("delta deve essere non nullo")
        for name in ("records", "dim"):
            value = getattr(self, name)
            if value is not None and (value < 2 or not const.is_power_of_two(value)):
                raise ParamError(f"{name} deve essere una potenza di due >= 2, ricevuto {value}")
        size = self.records if self.records is not None else self.dim
        if isinstance(self.marked, int) and size is not None and not 0 <= self.marked < size:
            raise ParamError(f"indice marcato {self.marked} fuori da [0, {size})")
        for name in ("m", "trials", "runs", "copies"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ParamError(f"{name} deve essere >= 1, ricevuto {value}")
        if self.parallelism < 1:
            raise ParamError(f"parallelism deve essere >= 1, ricevuto {self.parallelism}")
        if self.engine not in const.ENGINES:
            raise ParamError(f"engine sconosciuto {self.engine!r} (ammessi: {', '.join(const.ENGINES)})")
        if self.collapse not in const.COLLAPSE_RULES:
            raise ParamError(f"regola di collasso sconosciuta {self.collapse!r}")
        if self.readout not in const.READOUT_MODES:
            raise ParamError(f"modalità di lettura sconosciuta {self.readout!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ParamError(f"formato di output sconosciuto {self.output_format!r}")
        if self.output_format == "csv" and self.command != "sweep":
            raise ParamError("il formato csv è disponibile solo per sweep")
        if self.truth not in ("I", "J"):
            raise ParamError(f"truth deve essere I o J, ricevuto {self.truth!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ParamError(f"confidence deve stare in (0, 1), ricevuto {self.confidence}")
        if not self.group_tol > 0:
            raise ParamError(f"group_tol deve essere > 0, ricevuto {self.group_tol}")

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_dict(self) -> Dict[str, Any]:
        """Configurazione risolta, da incorporare nei report per il replay."""
        out = asdict(self)
        if self.m_range is not None:
            out["m_range"] = f"{self.m_range[0]}..{self.m_range[1]}"
        out["marked"] = "none" if self.marked is None else self.marked
        return out


__all__ = ["COMMANDS", "OUTPUT_FORMATS", "ExperimentConfig", "parse_marked", "parse_m_range"]
