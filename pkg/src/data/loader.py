"""
src/data/loader.py
Carica i file di configurazione JSON degli esperimenti e li fonde con i flag CLI.
Precedenza: flag espliciti > file --config > default di ExperimentConfig.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from src.config.experiment import ExperimentConfig
from src.errors import ParamError

logger = logging.getLogger(__name__)


class ConfigLoader:
    """Legge e valida un file di configurazione (chiavi = nomi dei flag con underscore)."""

    @staticmethod
    def load(path: str) -> Dict[str, Any]:
        file_path = Path(path)
        try:
            with open(file_path, encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as exc:
            raise ParamError(f"file di configurazione non trovato: {file_path}") from exc
        except json.JSONDecodeError as exc:
            raise ParamError(f"JSON non valido in {file_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParamError(f"{file_path}: atteso un oggetto JSON")

        data = {key.replace("-", "_"): value for key, value in data.items()}
        allowed = set(ExperimentConfig.field_names()) - {"command"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ParamError(f"{file_path}: chiavi sconosciute {', '.join(unknown)}")
        logger.info("Config caricata da %s: %d chiavi", file_path, len(data))
        return data


class ConfigFactory:
    """Costruisce ExperimentConfig dai flag (e dall'eventuale file)."""

    @classmethod
    def build(
        cls, command: str, flags: Mapping[str, Any], config_path: Optional[str] = None
    ) -> ExperimentConfig:
        values: Dict[str, Any] = {}
        if config_path:
            values.update(ConfigLoader.load(config_path))
        values.update({k: v for k, v in flags.items() if v is not None or k == "marked"})
        try:
            return ExperimentConfig(command=command, **values)
        except TypeError as exc:
            raise ParamError(f"configurazione non valida: {exc}") from exc
