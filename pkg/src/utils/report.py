"""
src/utils/report.py
Emissione dei risultati: report JSON (schema_version, config, results, timing_ms)
e tabelle CSV via pandas. Output su file (--out) oppure stdout.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

import numpy as np
import pandas as pd

from src.config import constants as const
from src.config.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def to_jsonable(obj: Any) -> Any:
    """Converte scalari/array numpy e tuple in tipi JSON nativi."""
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def build_report(config: ExperimentConfig, results: Mapping[str, Any], timing_ms: float) -> Dict[str, Any]:
    """Report di un singolo esperimento."""
    return {
        "schema_version": const.SCHEMA_VERSION,
        "config": to_jsonable(config.as_dict()),
        "results": to_jsonable(results),
        "timing_ms": round(float(timing_ms), 3),
    }


def sweep_frame(rows: Iterable[Mapping[str, Any]]) -> pd.DataFrame:
    """Tabella dello sweep con le colonne esatte dello schema."""
    df = pd.DataFrame(list(rows))
    return df.reindex(columns=list(const.SWEEP_COLUMNS))


def render_json(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def render_csv(df: pd.DataFrame) -> str:
    """CSV preceduto da una riga di commento con la versione dello schema."""
    header = f"# schema_version: {const.SCHEMA_VERSION}\n"
    return header + df.to_csv(index=False, lineterminator="\n")


def emit(text: str, out: Optional[str] = None) -> None:
    """Scrive su file o su stdout ('-' o None)."""
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Report scritto in %s", path)


__all__ = ["to_jsonable", "build_report", "sweep_frame", "render_json", "render_csv", "emit"]
