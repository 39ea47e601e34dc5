"""
src/calculations/luders.py
Motore di misura secondo il postulato di Lüders:
- proiettori sugli autospazi P_k = Σ_j |ψ_kj><ψ_kj|
- probabilità p_k = <φ|P_k|φ> e riduzione φ -> P_k φ / ‖P_k φ‖
- misura campionata (una estrazione uniforme per chiamata)
- modalità di confronto von Neumann su base completa dell'apparato
- lettura dei qubit (congiunta o qubit per qubit).

Gli stati misti sono rappresentati per campionamento (un trial = un collasso).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.calculations.linalg import (
    HermitianOperator,
    SpectralDecomposition,
    StateVector,
    eig_hermitian,
)
from src.calculations.montecarlo import RandomStream
from src.config import constants as const
from src.errors import BasisError, DimensionError, ZeroProbabilityCollapseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EigenspaceProjector:
    """
    Proiettore sull'autospazio di un gruppo di autovalori.
    basis ha colonne ortonormali; con complement=True il proiettore è
    I - basis basis† (usato dal motore analitico per il gruppo a2, di rango D-3).
    """

    group_id: int
    eigenvalue: float
    basis: np.ndarray
    complement: bool = False

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def rank(self) -> int:
        cols = int(self.basis.shape[1])
        return self.dim - cols if self.complement else cols

    def apply_amps(self, amps: np.ndarray) -> np.ndarray:
        coeffs = self.basis.conj().T @ amps
        inside = self.basis @ coeffs
        return amps - inside if self.complement else inside

    def apply(self, phi: StateVector) -> StateVector:
        if phi.dim != self.dim:
            raise DimensionError(f"proiettore dim {self.dim}, stato dim {phi.dim}")
        return StateVector(self.apply_amps(phi.amps))

    def probability(self, phi: StateVector) -> float:
        """<φ|P|φ> per φ normalizzato, troncato in [0, 1]."""
        inside = float(np.sum(np.abs(self.basis.conj().T @ phi.amps) ** 2))
        p = 1.0 - inside if self.complement else inside
        return min(1.0, max(0.0, p))

    def matrix(self) -> np.ndarray:
        outer = self.basis @ self.basis.conj().T
        return np.eye(self.dim, dtype=np.complex128) - outer if self.complement else outer


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Esito di una misura: gruppo, autovalore, probabilità e stato ridotto."""

    group_id: int
    eigenvalue: float
    probability: float
    post_state: StateVector


def projectors(dec: SpectralDecomposition) -> List[EigenspaceProjector]:
    """Un proiettore per gruppo; la scelta della base nel gruppo non conta."""
    return [
        EigenspaceProjector(
            group_id=g.group_id,
            eigenvalue=g.eigenvalue,
            basis=dec.group_basis(g.group_id),
        )
        for g in dec.groups
    ]


def probabilities(phi: StateVector, ps: Sequence[EigenspaceProjector]) -> List[float]:
    """p_k = <φ|P_k|φ>; la somma vale 1 entro 1e-10 se i proiettori sono completi."""
    phi.require_normalized()
    return [p.probability(phi) for p in ps]


def collapse(phi: StateVector, p: EigenspaceProjector) -> StateVector:
    """Riduzione di Lüders: P φ / ‖P φ‖."""
    projected = p.apply_amps(phi.amps)
    weight = float(np.vdot(projected, projected).real)
    if weight <= const.ZERO_PROBABILITY:
        raise ZeroProbabilityCollapseError(
            f"probabilità {weight:.3e} del gruppo {p.group_id} sotto la soglia {const.ZERO_PROBABILITY:g}"
        )
    return StateVector(projected / np.sqrt(weight))


def sample_index(probs: Sequence[float], rng: RandomStream) -> int:
    """
    CDF inversa sulla lista ordinata, con una sola estrazione uniforme.
    Pesi sotto la soglia di probabilità nulla valgono esattamente zero.
    """
    weights = np.asarray(probs, dtype=float)
    weights = np.where(weights > const.ZERO_PROBABILITY, weights, 0.0)
    nonzero = np.flatnonzero(weights)
    if nonzero.size == 0:
        raise ZeroProbabilityCollapseError("nessun esito con probabilità non nulla")
    cumulative = np.cumsum(weights)
    u = rng.uniform()
    idx = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
    return min(idx, int(nonzero[-1]))


def measure_with_projectors(
    phi: StateVector, ps: Sequence[EigenspaceProjector], rng: RandomStream
) -> MeasurementRecord:
    """Misura di Lüders con proiettori già costruiti (una estrazione)."""
    probs = probabilities(phi, ps)
    k = sample_index(probs, rng)
    return MeasurementRecord(
        group_id=ps[k].group_id,
        eigenvalue=ps[k].eigenvalue,
        probability=probs[k],
        post_state=collapse(phi, ps[k]),
    )


def measure_luders(
    phi: StateVector,
    operator: HermitianOperator,
    group_tol: float,
    rng: RandomStream,
) -> MeasurementRecord:
    """Misura dell'osservabile secondo Lüders; consuma esattamente una estrazione."""
    dec = eig_hermitian(operator, group_tol)
    return measure_with_projectors(phi, projectors(dec), rng)


def _check_orthonormal(basis: Sequence[StateVector], dim: int) -> np.ndarray:
    if len(basis) != dim or any(b.dim != dim for b in basis):
        raise BasisError(f"servono {dim} vettori di dimensione {dim}, ricevuti {len(basis)}")
    columns = np.column_stack([b.amps for b in basis])
    gram = columns.conj().T @ columns
    deviation = float(np.max(np.abs(gram - np.eye(dim))))
    if deviation > const.TOLERANCES.orthonormality:
        raise BasisError(f"base non ortonormale (deviazione Gram {deviation:.3e})")
    return columns


def measure_von_neumann(
    phi: StateVector,
    basis: Sequence[StateVector],
    labels: Sequence[float],
    rng: RandomStream,
) -> MeasurementRecord:
    """
    Proiezione di von Neumann su una base completa scelta dall'apparato:
    esito i con probabilità |<b_i|φ>|^2, stato finale b_i.
    """
    phi.require_normalized()
    columns = _check_orthonormal(basis, phi.dim)
    if len(labels) != phi.dim:
        raise BasisError(f"servono {phi.dim} etichette, ricevute {len(labels)}")
    probs = np.abs(columns.conj().T @ phi.amps) ** 2
    i = sample_index(probs, rng)
    return MeasurementRecord(
        group_id=i,
        eigenvalue=float(labels[i]),
        probability=float(min(1.0, probs[i])),
        post_state=basis[i],
    )


def apparatus_basis(dec: SpectralDecomposition) -> Tuple[List[StateVector], List[float]]:
    """
    Base "dell'apparato" deterministica: per ogni gruppo, QR con pivoting
    delle colonne del proiettore (prime d_k colonne di Q).
    Per il gruppo a1 di Â restituisce proprio somma pari e somma dispari.
    """
    vectors: List[StateVector] = []
    labels: List[float] = []
    for p in projectors(dec):
        q, _, _ = scipy.linalg.qr(p.matrix(), pivoting=True)
        for j in range(p.rank):
            vectors.append(StateVector(q[:, j]))
            labels.append(p.eigenvalue)
    return vectors, labels


def bitstring(index: int, qubits: int) -> str:
    """Indice -> stringa di bit, qubit più significativo a sinistra."""
    return format(index, f"0{qubits}b") if qubits > 0 else ""


def readout_joint(state: StateVector, rng: RandomStream) -> Tuple[int, str]:
    """Lettura di tutti i qubit in un colpo: una estrazione su |amps|^2."""
    index = sample_index(state.probabilities(), rng)
    return index, bitstring(index, state.qubits)


def readout_sequential(state: StateVector, rng: RandomStream) -> Tuple[int, str]:
    """
    Lettura qubit per qubit (dal più significativo): ogni qubit dalla marginale
    dello stato corrente, poi collasso. Consuma esattamente q estrazioni.
    """
    amps = np.array(state.amps, dtype=np.complex128)
    positions = np.arange(state.dim)
    index = 0
    for bit in reversed(range(state.qubits)):
        ones = ((positions >> bit) & 1).astype(bool)
        weights = np.abs(amps) ** 2
        p1 = float(np.sum(weights[ones]))
        p0 = float(np.sum(weights[~ones]))
        outcome = sample_index([p0, p1], rng)
        keep = ones if outcome == 1 else ~ones
        amps = np.where(keep, amps, 0.0)
        amps /= np.linalg.norm(amps)
        index |= outcome << bit
    return index, bitstring(index, state.qubits)


def detection_probability(probs: Sequence[float]) -> float:
    """P(bitstring non nulla) = 1 - Σ p_k^2 dopo la rotazione che porta φ su e0."""
    arr = np.asarray(probs, dtype=float)
    return float(1.0 - np.sum(arr * arr))


__all__ = [
    "EigenspaceProjector",
    "MeasurementRecord",
    "projectors",
    "probabilities",
    "collapse",
    "sample_index",
    "measure_with_projectors",
    "measure_luders",
    "measure_von_neumann",
    "apparatus_basis",
    "bitstring",
    "readout_joint",
    "readout_sequential",
    "detection_probability",
]
