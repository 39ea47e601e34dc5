"""
src/cli/commands.py
Front end a riga di comando: cycle | search | sweep | spectrum | distinguish.
Exit code: 0 successo, 2 errore d'uso, 3 configurazione numerica non sicura.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.calculations.linalg import StateVector, eig_hermitian
from src.calculations.montecarlo import ErrorEstimate, RandomStream, monte_carlo, run_trials
from src.config import constants as const
from src.config.experiment import COMMANDS, ExperimentConfig, parse_m_range, parse_marked
from src.data.loader import ConfigFactory
from src.errors import NumericalError, ParamError, SimulationError
from src.models.distinguish import DistinguishConfig, run_discrimination
from src.models.operators import (
    ObservableSettings,
    SearchOperatorParams,
    analytic_groups,
    apply_C_fast,
    build_observable,
    label_eigenvalues,
)
from src.models.search import (
    CycleConfig,
    CycleTask,
    SearchTask,
    default_trials,
    error_budget,
    exact_failure_probability,
    prepare_cycle,
    product_budget,
)
from src.utils.report import build_report, emit, render_csv, render_json, sweep_frame

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _settings(cfg: ExperimentConfig) -> ObservableSettings:
    return ObservableSettings(a1=cfg.a1, a2=cfg.a2, group_tol=cfg.group_tol)


def _resolve_marked(cfg: ExperimentConfig, size: int) -> Optional[int]:
    """'random' pesca l'indice dal seed master prima di qualsiasi seed dei trial."""
    if cfg.marked == "random":
        return RandomStream(cfg.seed).integers(0, size)
    if cfg.marked is not None and not 0 <= cfg.marked < size:
        raise ParamError(f"indice marcato {cfg.marked} fuori da [0, {size})")
    return cfg.marked


def _failure_summary(failures: int, runs: int, confidence: float) -> Dict[str, Any]:
    estimate = ErrorEstimate.from_counts(runs - failures, failures, confidence)
    lo, hi = estimate.error_interval
    return {"failures": failures, "runs": runs, "rate": estimate.error_rate, "wilson_lo": lo, "wilson_hi": hi}


# -----------------------------
# Comandi
# -----------------------------
def cmd_cycle(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Test di appartenenza ripetuto su `trials` cicli indipendenti."""
    dim = cfg.dim or 8
    marked = _resolve_marked(cfg, dim)
    m = cfg.m or 1
    trials = cfg.trials or const.EXPERIMENT_PARAMS.cycle_trials
    cycle_cfg = CycleConfig(
        subset_size=dim,
        marked_local=marked,
        m=m,
        engine=cfg.engine,
        settings=_settings(cfg),
        collapse_rule=cfg.collapse,
        readout=cfg.readout,
    )
    prepared = prepare_cycle(cycle_cfg)
    estimate = monte_carlo(CycleTask(cycle_cfg), trials, cfg.seed, cfg.parallelism, cfg.confidence)
    p = prepared.detection_probability
    groups = [
        {"group_id": i, "label": label, "eigenvalue": value, "probability": prob}
        for i, (label, value, prob) in enumerate(
            zip(prepared.labels(), prepared.eigenvalues, prepared.probabilities)
        )
    ]
    return {
        "marked": marked,
        "exact_detection_probability": p,
        "exact_cycle_detection_probability": 1.0 - (1.0 - p) ** m,
        "empirical_detection_rate": estimate.rate,
        "wilson_lo": estimate.wilson_lo,
        "wilson_hi": estimate.wilson_hi,
        "detections": estimate.successes,
        "trials": estimate.runs,
        "groups": groups,
    }


def _search_failures(cfg: ExperimentConfig, records: int, marked: int, m: int, runs: int) -> Tuple[int, List[Any]]:
    task = SearchTask(
        records=records,
        true_marked=marked,
        m=m,
        engine=cfg.engine,
        settings=_settings(cfg),
        verify=cfg.verify,
        readout=cfg.readout,
    )
    summaries = run_trials(task, runs, cfg.seed, cfg.parallelism)
    failures = sum(1 for s in summaries if not s.success)
    return failures, summaries


def cmd_search(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Ricerche complete ripetute, confrontate con il budget d'errore."""
    records = cfg.records or 16
    marked = _resolve_marked(cfg, records)
    if marked is None:
        raise ParamError("search richiede --marked (intero o random)")
    m = cfg.m or default_trials(records)
    runs = cfg.runs or const.EXPERIMENT_PARAMS.search_runs

    failures, summaries = _search_failures(cfg, records, marked, m, runs)
    summary = _failure_summary(failures, runs, cfg.confidence)
    budget = error_budget(records, m)
    half_width = 0.5 * (summary["wilson_hi"] - summary["wilson_lo"])
    if summary["rate"] > budget + half_width:
        logger.warning("tasso di fallimento %.4g oltre il budget %.4g", summary["rate"], budget)

    results: Dict[str, Any] = {
        "marked": marked,
        "m": m,
        "cycles": records.bit_length() - 1,
        **summary,
        "error_budget": budget,
        "product_budget": product_budget(records, m),
        "exact_failure_probability": exact_failure_probability(
            records, marked, m, _settings(cfg), cfg.engine
        ),
        "mean_trials_used": float(np.mean([s.trials_used for s in summaries])),
        "per_run_success": [s.success for s in summaries],
    }
    if cfg.verify:
        results["per_run_verified"] = [s.verified for s in summaries]
    return results


def cmd_sweep(cfg: ExperimentConfig) -> List[Dict[str, Any]]:
    """Una riga CSV per ogni m nell'intervallo richiesto."""
    records = cfg.records or 16
    marked = _resolve_marked(cfg, records) if cfg.marked is not None else RandomStream(cfg.seed).integers(0, records)
    lo, hi = cfg.m_range or (1, default_trials(records))
    runs = cfg.runs or const.EXPERIMENT_PARAMS.search_runs
    rows = []
    for m in range(lo, hi + 1):
        failures, _ = _search_failures(cfg, records, marked, m, runs)
        summary = _failure_summary(failures, runs, cfg.confidence)
        rows.append(
            {
                "records": records,
                "m": m,
                "runs": runs,
                "failures": failures,
                "rate": summary["rate"],
                "wilson_lo": summary["wilson_lo"],
                "wilson_hi": summary["wilson_hi"],
                "budget": error_budget(records, m),
                "seed": cfg.seed,
            }
        )
        logger.info("sweep N=%d m=%d: %d/%d fallimenti", records, m, failures, runs)
    return rows


def _complement_residual(params: SearchOperatorParams, projector, eigenvalue: float) -> float:
    # Vettore di prova: la prima colonna di base con proiezione apprezzabile.
    for j in range(params.dim):
        candidate = projector.apply(StateVector.basis(params.dim, j))
        if candidate.norm() > 0.1:
            v = candidate.normalized()
            return float(np.linalg.norm(apply_C_fast(params, v).amps - eigenvalue * v.amps))
    return 0.0


def cmd_spectrum(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Autovalori raggruppati di Ĉ, molteplicità e residui."""
    dim = cfg.dim or 8
    marked = _resolve_marked(cfg, dim)
    params = SearchOperatorParams.from_settings(dim, _settings(cfg), marked)
    groups: List[Dict[str, Any]] = []

    if cfg.engine == "dense":
        operator = build_observable(params)
        dec = eig_hermitian(operator, params.group_tol)
        residuals = dec.residuals(operator)
        labels = label_eigenvalues([g.eigenvalue for g in dec.groups], params)
        for g, label in zip(dec.groups, labels):
            groups.append(
                {
                    "label": label,
                    "eigenvalue": g.eigenvalue,
                    "multiplicity": g.multiplicity,
                    "residual": float(np.max(residuals[list(g.members)])),
                }
            )
    else:
        for g in analytic_groups(params):
            proj = g.projector
            if proj.complement:
                residual = _complement_residual(params, proj, g.eigenvalue)
            else:
                v = StateVector(proj.basis[:, 0])
                residual = float(np.linalg.norm(apply_C_fast(params, v).amps - g.eigenvalue * v.amps))
            groups.append(
                {"label": g.label, "eigenvalue": g.eigenvalue, "multiplicity": g.multiplicity, "residual": residual}
            )

    return {
        "marked": marked,
        "groups": groups,
        "multiplicities": {g["label"]: g["multiplicity"] for g in groups},
        "max_residual": max(g["residual"] for g in groups),
    }


def cmd_distinguish(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Protocollo Î contro Ĵ su m copie."""
    dist_cfg = DistinguishConfig(
        delta=cfg.delta,
        copies=cfg.copies or 1,
        trials=cfg.trials or const.EXPERIMENT_PARAMS.distinguish_trials,
        truth=cfg.truth,
        engine=cfg.collapse,
        group_tol=cfg.group_tol,
    )
    estimate = run_discrimination(dist_cfg, cfg.seed, cfg.parallelism, cfg.confidence)
    lo, hi = estimate.error_interval
    return {
        "errors": estimate.failures,
        "trials": estimate.runs,
        "error_rate": estimate.error_rate,
        "wilson_lo": lo,
        "wilson_hi": hi,
        "theoretical_error": dist_cfg.theoretical_error,
        "reference_2_pow_minus_m": 2.0 ** (-dist_cfg.copies),
    }


COMMAND_HANDLERS: Dict[str, Callable[[ExperimentConfig], Any]] = {
    "cycle": cmd_cycle,
    "search": cmd_search,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "distinguish": cmd_distinguish,
}


# -----------------------------
# Parser
# -----------------------------
def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", dest="config_path", help="file JSON con i parametri (i flag hanno precedenza)")
    sub.add_argument("--seed", type=int, help="seed master")
    sub.add_argument("--delta", type=float, help="a1 = 1 + delta")
    sub.add_argument("--a1", type=float)
    sub.add_argument("--a2", type=float)
    sub.add_argument("--group-tol", dest="group_tol", type=float)
    sub.add_argument("--confidence", type=float)
    sub.add_argument("--parallelism", type=int)
    sub.add_argument("--format", dest="output_format", choices=("json", "csv"))
    sub.add_argument("--out", help="file di output (default stdout)")


def _marked_arg(value: str):
    try:
        return parse_marked(value)
    except ParamError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _m_range_arg(value: str):
    try:
        return parse_m_range(value)
    except ParamError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli_app.py",
        description="Simulatore della misura di Lüders e della ricerca a oracolo",
    )
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    subs = parser.add_subparsers(dest="command", required=True)

    cycle = subs.add_parser("cycle", argument_default=argparse.SUPPRESS, help="test di appartenenza")
    cycle.add_argument("--dim", type=int)
    cycle.add_argument("--marked", type=_marked_arg)
    cycle.add_argument("--m", type=int)
    cycle.add_argument("--trials", type=int)
    cycle.add_argument("--engine", choices=const.ENGINES)
    cycle.add_argument("--collapse", choices=const.COLLAPSE_RULES)
    cycle.add_argument("--readout", choices=const.READOUT_MODES)
    _add_common(cycle)

    search = subs.add_parser("search", argument_default=argparse.SUPPRESS, help="ricerca completa")
    search.add_argument("--records", type=int)
    search.add_argument("--marked", type=_marked_arg)
    search.add_argument("--m", type=int)
    search.add_argument("--runs", type=int)
    search.add_argument("--engine", choices=const.ENGINES)
    search.add_argument("--readout", choices=const.READOUT_MODES)
    search.add_argument("--verify", action="store_true")
    _add_common(search)

    sweep = subs.add_parser("sweep", argument_default=argparse.SUPPRESS, help="fallimenti al variare di m")
    sweep.add_argument("--records", type=int)
    sweep.add_argument("--marked", type=_marked_arg)
    sweep.add_argument("--m-range", dest="m_range", type=_m_range_arg, help="lo..hi")
    sweep.add_argument("--runs", type=int)
    sweep.add_argument("--engine", choices=const.ENGINES)
    _add_common(sweep)

    spectrum = subs.add_parser("spectrum", argument_default=argparse.SUPPRESS, help="spettro di Ĉ")
    spectrum.add_argument("--dim", type=int)
    spectrum.add_argument("--marked", type=_marked_arg)
    spectrum.add_argument("--engine", choices=const.ENGINES)
    _add_common(spectrum)

    distinguish = subs.add_parser("distinguish", argument_default=argparse.SUPPRESS, help="Î contro Ĵ")
    distinguish.add_argument("--copies", type=int)
    distinguish.add_argument("--trials", type=int)
    distinguish.add_argument("--truth", choices=("I", "J"))
    distinguish.add_argument("--collapse", choices=const.COLLAPSE_RULES)
    _add_common(distinguish)

    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    flags = dict(vars(args))
    command = flags.pop("command")
    flags.pop("log_level", None)
    config_path = flags.pop("config_path", None)
    return ConfigFactory.build(command, flags, config_path)


def run(cfg: ExperimentConfig) -> str:
    """Esegue il comando e restituisce il testo da emettere."""
    start = time.perf_counter()
    logger.info("comando %s: %s", cfg.command, cfg.as_dict())
    results = COMMAND_HANDLERS[cfg.command](cfg)
    timing_ms = (time.perf_counter() - start) * 1000.0
    logger.info("comando %s completato in %.1f ms", cfg.command, timing_ms)

    if cfg.command == "sweep" and cfg.output_format == "csv":
        return render_csv(sweep_frame(results))
    payload = {"rows": results} if cfg.command == "sweep" else results
    return render_json(build_report(cfg, payload, timing_ms))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        text = run(cfg)
        emit(text, cfg.out)
    except ParamError as exc:
        print(f"errore: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"errore numerico: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SimulationError as exc:
        # TrialError: risale alla causa numerica solo tramite il messaggio.
        print(f"errore: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_NUMERICAL",
    "COMMANDS",
    "cmd_cycle",
    "cmd_search",
    "cmd_sweep",
    "cmd_spectrum",
    "cmd_distinguish",
    "build_parser",
    "resolve_config",
    "run",
    "main",
]
