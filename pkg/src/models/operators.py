"""
src/models/operators.py
Costruttori degli operatori della ricerca:
- registro e funzione d'onda di input (trasformata di Walsh-Hadamard su e0)
- Â = R† G R con R = matrice di Walsh-Hadamard, G = diag(a1, a1, a2, ..., a2)
- oracolo B̂ (flip di fase sul record marcato) e Ĉ = (ÂB̂ + B̂Â)/2
- applicazione di Ĉ senza matrice in O(D) e struttura spettrale analitica di Ĉ.

I vettori pari/dispari u1, u2 sono sempre normalizzati.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.calculations.linalg import HermitianOperator, StateVector
from src.calculations.luders import EigenspaceProjector
from src.config import constants as const
from src.errors import DegeneracyAmbiguityError, DimensionError, ParamError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegisterSpec:
    """Registro di q >= 1 qubit, D = 2^q."""

    qubits: int

    def __post_init__(self) -> None:
        if self.qubits < 1:
            raise ParamError(f"il registro richiede almeno un qubit, ricevuto {self.qubits}")

    @classmethod
    def from_dim(cls, dim: int) -> "RegisterSpec":
        if dim < 2 or not const.is_power_of_two(dim):
            raise DimensionError(f"dimensione del registro {dim} non è una potenza di due >= 2")
        return cls(qubits=dim.bit_length() - 1)

    @property
    def dim(self) -> int:
        return 1 << self.qubits


def _check_eigenvalues(a1: float, a2: float) -> None:
    if a1 == 0.0 or a2 == 0.0:
        raise ParamError(f"a1 e a2 devono essere non nulli (a1={a1}, a2={a2})")
    if abs(a1 - a2) <= const.TOLERANCES.eigen_separation:
        raise ParamError(f"a1 e a2 devono differire più di {const.TOLERANCES.eigen_separation:g}")


@dataclass(frozen=True)
class ObservableSettings:
    """Autovalori di Â e tolleranza di raggruppamento, indipendenti dal registro."""

    a1: float = const.DEFAULT_A1
    a2: float = const.DEFAULT_A2
    group_tol: float = const.DEFAULT_GROUP_TOL

    def __post_init__(self) -> None:
        _check_eigenvalues(self.a1, self.a2)
        if not self.group_tol > 0:
            raise ParamError(f"group_tol deve essere > 0, ricevuto {self.group_tol}")

    @classmethod
    def from_delta(
        cls,
        delta: float = const.DEFAULT_DELTA,
        a2: float = const.DEFAULT_A2,
        a1: Optional[float] = None,
        group_tol: float = const.DEFAULT_GROUP_TOL,
    ) -> "ObservableSettings":
        """a1 = 1 + delta se non specificato."""
        return cls(a1=1.0 + delta if a1 is None else a1, a2=a2, group_tol=group_tol)

    @property
    def delta(self) -> float:
        return self.a1 - self.a2


@dataclass(frozen=True)
class SearchOperatorParams:
    """Parametri di Â/B̂/Ĉ su un registro; marked_local None = oracolo identità."""

    dim: int
    a1: float = const.DEFAULT_A1
    a2: float = const.DEFAULT_A2
    marked_local: Optional[int] = None
    group_tol: float = const.DEFAULT_GROUP_TOL

    def __post_init__(self) -> None:
        RegisterSpec.from_dim(self.dim)
        _check_eigenvalues(self.a1, self.a2)
        if self.marked_local is not None and not 0 <= self.marked_local < self.dim:
            raise ParamError(f"indice marcato {self.marked_local} fuori da [0, {self.dim})")

    @classmethod
    def from_settings(
        cls, dim: int, settings: ObservableSettings, marked_local: Optional[int] = None
    ) -> "SearchOperatorParams":
        return cls(
            dim=dim,
            a1=settings.a1,
            a2=settings.a2,
            marked_local=marked_local,
            group_tol=settings.group_tol,
        )

    @property
    def register(self) -> RegisterSpec:
        return RegisterSpec.from_dim(self.dim)


# -----------------------------
# Funzione d'onda di input
# -----------------------------
def walsh_hadamard(phi: StateVector) -> StateVector:
    """
    H^{⊗q} con la ricorsione a farfalla, O(D log D).
    Passo h: le coppie (i, i + h) con bit h nullo in i diventano (x + y, x - y).
    """
    dim = phi.dim
    if dim < 2:
        raise DimensionError(f"Walsh-Hadamard richiede dimensione >= 2, ricevuto {dim}")
    out = np.array(phi.amps, dtype=np.complex128)
    h = 1
    while h < dim:
        view = out.reshape(-1, 2, h)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = top - view[:, 1, :]
        h *= 2
    out /= math.sqrt(dim)
    return StateVector(out)


def uniform_superposition(reg: RegisterSpec) -> StateVector:
    """Walsh-Hadamard su |00...0>: tutte le ampiezze 1/sqrt(D)."""
    return walsh_hadamard(StateVector.basis(reg.dim, 0))


def walsh_hadamard_matrix(dim: int) -> np.ndarray:
    """Matrice di Sylvester normalizzata: riga 0 = tutti uno, riga 1 = segni alternati."""
    RegisterSpec.from_dim(dim)
    return scipy.linalg.hadamard(dim).astype(np.complex128) / math.sqrt(dim)


def parity_sums(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """u1 = somma normalizzata delle posizioni pari, u2 = delle dispari."""
    RegisterSpec.from_dim(dim)
    scale = 1.0 / math.sqrt(dim // 2)
    u1 = np.zeros(dim, dtype=np.complex128)
    u2 = np.zeros(dim, dtype=np.complex128)
    u1[0::2] = scale
    u2[1::2] = scale
    return u1, u2


# -----------------------------
# Osservabili densi
# -----------------------------
def build_A(p: SearchOperatorParams) -> HermitianOperator:
    """Â = R† G R; per D = 2 il blocco a2 è vuoto e Â = a1 I."""
    r = walsh_hadamard_matrix(p.dim)
    g = np.full(p.dim, p.a2, dtype=np.complex128)
    g[:2] = p.a1
    return HermitianOperator(r.conj().T @ (g[:, None] * r))


def build_oracle(p: SearchOperatorParams) -> HermitianOperator:
    """Diagonale con -1 sul record marcato, identità se assente."""
    diag = np.ones(p.dim, dtype=np.complex128)
    if p.marked_local is not None:
        diag[p.marked_local] = -1.0
    return HermitianOperator.diagonal(diag)


def build_C(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Ĉ = (ÂB̂ + B̂Â)/2, hermitiano per costruzione."""
    if a.dim != b.dim:
        raise DimensionError(f"Â dim {a.dim}, B̂ dim {b.dim}")
    return HermitianOperator(0.5 * (a.entries @ b.entries + b.entries @ a.entries))


def build_observable(p: SearchOperatorParams) -> HermitianOperator:
    """Ĉ denso per i parametri dati."""
    return build_C(build_A(p), build_oracle(p))


# -----------------------------
# Percorso senza matrice
# -----------------------------
def _apply_A_amps(p: SearchOperatorParams, amps: np.ndarray) -> np.ndarray:
    # Âφ = a2 φ + (a1 - a2)(<u1|φ>u1 + <u2|φ>u2), con u1, u2 a supporto pari/dispari.
    scale = 1.0 / math.sqrt(p.dim // 2)
    out = p.a2 * amps
    out[0::2] += (p.a1 - p.a2) * scale * scale * np.sum(amps[0::2])
    out[1::2] += (p.a1 - p.a2) * scale * scale * np.sum(amps[1::2])
    return out


def apply_A_fast(p: SearchOperatorParams, phi: StateVector) -> StateVector:
    """Âφ in O(D)."""
    if phi.dim != p.dim:
        raise DimensionError(f"parametri dim {p.dim}, stato dim {phi.dim}")
    return StateVector(_apply_A_amps(p, np.array(phi.amps)))


def apply_C_fast(p: SearchOperatorParams, phi: StateVector) -> StateVector:
    """
    Ĉφ in O(D): Ĉ = Â - (Â e_k e_k† + e_k e_k† Â).
    Con oracolo identità Ĉ = Â.
    """
    if phi.dim != p.dim:
        raise DimensionError(f"parametri dim {p.dim}, stato dim {phi.dim}")
    amps = np.array(phi.amps)
    out = _apply_A_amps(p, amps)
    k = p.marked_local
    if k is None:
        return StateVector(out)
    e_k = np.zeros(p.dim, dtype=np.complex128)
    e_k[k] = 1.0
    a_ek = _apply_A_amps(p, e_k)
    # Â hermitiano: e_k† Â φ = (Âφ)_k.
    out = out - a_ek * amps[k] - e_k * out[k]
    return StateVector(out)


# -----------------------------
# Spettro analitico di Ĉ
# -----------------------------
@dataclass(frozen=True, eq=False)
class Eigenpair:
    eigenvalue: float
    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class AnalyticGroup:
    """Gruppo di autovalori con etichetta (a1, a2, lambda_minus, lambda_plus, lambda)."""

    label: str
    eigenvalue: float
    multiplicity: int
    projector: EigenspaceProjector


@dataclass(frozen=True, eq=False)
class AnalyticSpectrum:
    """
    Spettro di Ĉ con record marcato:
    - a1 con l'autovettore superstite (u1 se k dispari, u2 se k pari)
    - a2 con molteplicità D - 3 (nessun membro per D = 2)
    - autocoppie perturbate nel piano span{u_rotto, v̂} (una sola per D = 2).
    """

    params: SearchOperatorParams
    surviving: Eigenpair
    a2_multiplicity: int
    perturbed: Tuple[Eigenpair, ...]
    broken: np.ndarray
    partner: Optional[np.ndarray]
    block: np.ndarray = field(repr=False)

    def eigenvalues(self) -> List[float]:
        values = [self.surviving.eigenvalue] + [e.eigenvalue for e in self.perturbed]
        if self.a2_multiplicity:
            values.append(self.params.a2)
        return sorted(values)

    def groups(self) -> List[AnalyticGroup]:
        """Gruppi in ordine crescente di autovalore, con proiettori pronti per Lüders."""
        p = self.params
        explicit = [("a1", self.surviving)]
        if len(self.perturbed) == 1:
            explicit.append(("lambda", self.perturbed[0]))
        else:
            explicit += [("lambda_minus", self.perturbed[0]), ("lambda_plus", self.perturbed[1])]

        entries = [
            (label, pair.eigenvalue, 1, pair.vector[:, None], False) for label, pair in explicit
        ]
        if self.a2_multiplicity:
            spanned = np.column_stack([pair.vector for _, pair in explicit])
            entries.append(("a2", p.a2, self.a2_multiplicity, spanned, True))
        entries.sort(key=lambda e: e[1])
        return [
            AnalyticGroup(
                label=label,
                eigenvalue=value,
                multiplicity=mult,
                projector=EigenspaceProjector(
                    group_id=gid, eigenvalue=value, basis=basis, complement=complement
                ),
            )
            for gid, (label, value, mult, basis, complement) in enumerate(entries)
        ]


def _symmetric_2x2(alpha: float, beta: float, gamma: float) -> List[Tuple[float, np.ndarray]]:
    """Autocoppie di [[alpha, beta], [beta, gamma]] in forma chiusa, crescenti."""
    mean = 0.5 * (alpha + gamma)
    radius = math.hypot(0.5 * (alpha - gamma), beta)
    if beta == 0.0:
        pairs = [(alpha, np.array([1.0, 0.0])), (gamma, np.array([0.0, 1.0]))]
        return sorted(pairs, key=lambda t: t[0])
    out = []
    for value in (mean - radius, mean + radius):
        first = np.array([beta, value - alpha])
        second = np.array([value - gamma, beta])
        vec = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
        out.append((value, vec / np.linalg.norm(vec)))
    return out


def analytic_spectrum(p: SearchOperatorParams) -> AnalyticSpectrum:
    """
    Nella base {u_rotto, v̂}, con e_k = s u_rotto + c v̂ (s = 1/sqrt(D/2)):
    blocco = [[a1(1 - 2s²), -(a1 + a2)sc], [-(a1 + a2)sc, a2(1 - 2c²)]].
    """
    if p.marked_local is None:
        raise ParamError("analytic_spectrum richiede un record marcato")
    k = p.marked_local
    u1, u2 = parity_sums(p.dim)
    surviving, broken = (u1, u2) if k % 2 == 1 else (u2, u1)
    s = float(broken[k].real)
    c = math.sqrt(max(0.0, 1.0 - s * s))

    alpha = p.a1 * (1.0 - 2.0 * s * s)
    beta = -(p.a1 + p.a2) * s * c
    gamma = p.a2 * (1.0 - 2.0 * c * c)

    if p.dim == 2:
        partner = None
        block = np.array([[alpha]])
        perturbed = (Eigenpair(alpha, broken.copy()),)
    else:
        e_k = np.zeros(p.dim, dtype=np.complex128)
        e_k[k] = 1.0
        partner = (e_k - s * broken) / c
        block = np.array([[alpha, beta], [beta, gamma]])
        perturbed = tuple(
            Eigenpair(value, vec[0] * broken + vec[1] * partner)
            for value, vec in _symmetric_2x2(alpha, beta, gamma)
        )

    a2_multiplicity = max(0, p.dim - 3)
    spectrum = AnalyticSpectrum(
        params=p,
        surviving=Eigenpair(p.a1, surviving),
        a2_multiplicity=a2_multiplicity,
        perturbed=perturbed,
        broken=broken,
        partner=partner,
        block=block,
    )
    _check_separation(spectrum.eigenvalues(), p.group_tol)
    logger.debug("analytic_spectrum: D=%d k=%d autovalori %s", p.dim, k, spectrum.eigenvalues())
    return spectrum


def _check_separation(values: Sequence[float], group_tol: float) -> None:
    ordered = sorted(values)
    tol = group_tol * max(1.0, max(abs(v) for v in ordered))
    limit = const.TOLERANCES.group_gap_factor * tol
    for lo, hi in zip(ordered, ordered[1:]):
        if hi - lo <= limit:
            raise DegeneracyAmbiguityError(
                f"autovalori {lo:.12g} e {hi:.12g} distano meno di {limit:.3e}: scegliere un altro delta"
            )


def analytic_groups(p: SearchOperatorParams) -> List[AnalyticGroup]:
    """Gruppi di Ĉ senza diagonalizzazione densa; senza record marcato Ĉ = Â."""
    if p.marked_local is not None:
        return analytic_spectrum(p).groups()

    u1, u2 = parity_sums(p.dim)
    span = np.column_stack([u1, u2])
    entries = [("a1", p.a1, 2, span, False)]
    if p.dim > 2:
        entries.append(("a2", p.a2, p.dim - 2, span, True))
    _check_separation([e[1] for e in entries], p.group_tol)
    entries.sort(key=lambda e: e[1])
    return [
        AnalyticGroup(
            label=label,
            eigenvalue=value,
            multiplicity=mult,
            projector=EigenspaceProjector(group_id=gid, eigenvalue=value, basis=basis, complement=complement),
        )
        for gid, (label, value, mult, basis, complement) in enumerate(entries)
    ]


def analytic_projectors(p: SearchOperatorParams) -> List[EigenspaceProjector]:
    return [g.projector for g in analytic_groups(p)]


def label_eigenvalues(values: Sequence[float], p: SearchOperatorParams) -> List[str]:
    """
    Etichette per gli autovalori di gruppo di un'autodecomposizione densa di Ĉ:
    a1/a2 se coincidono entro la tolleranza, altrimenti lambda_minus/lambda_plus in ordine.
    """
    tol = p.group_tol * max(1.0, max(abs(v) for v in values))
    labels: List[str] = []
    others = [v for v in values if abs(v - p.a1) > tol and abs(v - p.a2) > tol]
    names = ["lambda"] if len(others) == 1 else ["lambda_minus", "lambda_plus"]
    for v in values:
        if abs(v - p.a1) <= tol:
            labels.append("a1")
        elif abs(v - p.a2) <= tol:
            labels.append("a2")
        else:
            idx = others.index(v)
            labels.append(names[idx] if idx < len(names) else f"lambda_{idx}")
    return labels


__all__ = [
    "RegisterSpec",
    "ObservableSettings",
    "SearchOperatorParams",
    "Eigenpair",
    "AnalyticGroup",
    "AnalyticSpectrum",
    "walsh_hadamard",
    "uniform_superposition",
    "walsh_hadamard_matrix",
    "parity_sums",
    "build_A",
    "build_oracle",
    "build_C",
    "build_observable",
    "apply_A_fast",
    "apply_C_fast",
    "analytic_spectrum",
    "analytic_groups",
    "analytic_projectors",
    "label_eigenvalues",
]
