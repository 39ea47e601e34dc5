"""
src/calculations/linalg.py
Substrato di algebra lineare complessa densa:
- StateVector / HermitianOperator (valori immutabili, validati alla costruzione)
- autodecomposizione self-adjoint con raggruppamento delle degenerazioni
- riflessione di Householder che porta uno stato su e0.

Tutte le funzioni sono pure; gli array interni sono in sola lettura.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.config import constants as const
from src.errors import (
    DegeneracyAmbiguityError,
    DimensionError,
    NormalizationError,
    NotHermitianError,
    ParamError,
)

logger = logging.getLogger(__name__)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Vettore di ampiezze complesse su un registro di q qubit (dim = 2^q)."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amps, dtype=np.complex128)
        if arr.ndim != 1 or not const.is_power_of_two(arr.size):
            raise DimensionError(
                f"StateVector richiede dimensione potenza di due, ricevuto shape {arr.shape}"
            )
        object.__setattr__(self, "amps", _frozen(arr))

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        """Vettore della base computazionale e_index."""
        if not 0 <= index < dim:
            raise DimensionError(f"indice {index} fuori da [0, {dim})")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return int(self.amps.size)

    @property
    def qubits(self) -> int:
        return self.dim.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = const.TOLERANCES.normalization) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def require_normalized(self) -> None:
        """Solleva NormalizationError se |‖amps‖ - 1| > 1e-12."""
        if not self.is_normalized():
            raise NormalizationError(f"stato non normalizzato (norma {self.norm():.15g})")

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise NormalizationError("impossibile normalizzare il vettore nullo")
        return StateVector(self.amps / norm)

    def probabilities(self) -> np.ndarray:
        """|amps|^2 nella base computazionale."""
        return np.abs(self.amps) ** 2

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|, confronto a meno di fase globale."""
        return abs(inner(self, other))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Matrice densa D×D self-adjoint (Â, B̂, Ĉ, Î, Ĵ)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionError(f"matrice quadrata richiesta, ricevuto shape {arr.shape}")
        scale = max(1.0, float(np.linalg.norm(arr)))
        skew = float(np.linalg.norm(arr - arr.conj().T))
        if skew > const.TOLERANCES.hermiticity * scale:
            raise NotHermitianError(f"‖M - M†‖_F = {skew:.3e} oltre la tolleranza")
        object.__setattr__(self, "entries", _frozen(arr))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def diagonal(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def apply(self, phi: StateVector) -> StateVector:
        if phi.dim != self.dim:
            raise DimensionError(f"operatore dim {self.dim}, stato dim {phi.dim}")
        return StateVector(self.entries @ phi.amps)


@dataclass(frozen=True)
class EigenGroup:
    """Autovalore distinto con la sua molteplicità d_k."""

    group_id: int
    eigenvalue: float
    multiplicity: int
    members: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Autovalori crescenti, autovettori ortonormali (colonne) e gruppi degeneri.
    group_tol è la soglia assoluta effettivamente usata per il raggruppamento.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    groups: Tuple[EigenGroup, ...]
    group_tol: float

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    def multiplicities(self) -> List[int]:
        return [g.multiplicity for g in self.groups]

    def group_basis(self, group_id: int) -> np.ndarray:
        """Colonne ortonormali che generano l'autospazio del gruppo."""
        return self.vectors[:, list(self.groups[group_id].members)]

    def residuals(self, operator: HermitianOperator) -> np.ndarray:
        """‖M v_j - λ_j v_j‖₂ per ogni autocoppia."""
        diff = operator.entries @ self.vectors - self.vectors * self.eigenvalues
        return np.linalg.norm(diff, axis=0)


def inner(u: StateVector, v: StateVector) -> complex:
    """<u|v>, coniugato-lineare nel primo argomento."""
    if u.dim != v.dim:
        raise DimensionError(f"prodotto scalare tra dim {u.dim} e dim {v.dim}")
    return complex(np.vdot(u.amps, v.amps))


def eig_hermitian(
    operator: HermitianOperator, group_tol: float = const.DEFAULT_GROUP_TOL
) -> SpectralDecomposition:
    """
    Autodecomposizione con raggruppamento: autovalori entro
    group_tol * max(1, |λ|_max) dal primo del gruppo finiscono nello stesso gruppo.
    Se due gruppi adiacenti distano <= 10 * soglia il raggruppamento non è
    affidabile e si solleva DegeneracyAmbiguityError.
    """
    if not group_tol > 0:
        raise ParamError(f"group_tol deve essere > 0, ricevuto {group_tol}")

    values, vectors = np.linalg.eigh(operator.entries)
    values = np.asarray(values, dtype=float)
    tol = group_tol * max(1.0, float(np.max(np.abs(values))))

    bounds: List[Tuple[int, int]] = []
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i] - values[start] > tol:
            bounds.append((start, i))
            start = i

    gap_limit = const.TOLERANCES.group_gap_factor * tol
    for (_, prev_end), (next_start, _) in zip(bounds, bounds[1:]):
        gap = values[next_start] - values[prev_end - 1]
        if gap <= gap_limit:
            raise DegeneracyAmbiguityError(
                f"gap {gap:.3e} tra gli autovalori {values[prev_end - 1]:.12g} e "
                f"{values[next_start]:.12g} non supera {gap_limit:.3e}"
            )

    groups = tuple(
        EigenGroup(
            group_id=gid,
            eigenvalue=float(np.mean(values[s:e])),
            multiplicity=e - s,
            members=tuple(range(s, e)),
        )
        for gid, (s, e) in enumerate(bounds)
    )
    logger.debug("eig_hermitian: D=%d, %d gruppi %s", values.size, len(groups), [g.multiplicity for g in groups])
    return SpectralDecomposition(
        eigenvalues=_frozen(values),
        vectors=_frozen(np.asarray(vectors, dtype=np.complex128)),
        groups=groups,
        group_tol=tol,
    )


@dataclass(frozen=True, eq=False)
class UnitaryMap:
    """
    Mappa unitaria in forma di Householder: U = I - 2 w w† con ‖w‖ = 1.
    reflector None rappresenta l'identità.
    """

    dim: int
    reflector: Optional[np.ndarray] = None

    def apply_amps(self, amps: np.ndarray) -> np.ndarray:
        if self.reflector is None:
            return np.array(amps, dtype=np.complex128)
        w = self.reflector
        return amps - 2.0 * w * np.vdot(w, amps)

    def apply(self, phi: StateVector) -> StateVector:
        if phi.dim != self.dim:
            raise DimensionError(f"mappa dim {self.dim}, stato dim {phi.dim}")
        return StateVector(self.apply_amps(phi.amps))

    def apply_adjoint(self, phi: StateVector) -> StateVector:
        # Una riflessione è self-adjoint.
        return self.apply(phi)

    def to_dense(self) -> np.ndarray:
        eye = np.eye(self.dim, dtype=np.complex128)
        if self.reflector is None:
            return eye
        w = self.reflector
        return eye - 2.0 * np.outer(w, w.conj())


def householder_to_e0(phi: StateVector) -> UnitaryMap:
    """
    Riflessione che porta phi su e0 (a meno di fase globale).
    w = phi - α e0 con α = fase di phi_0; identità se phi è già e0.
    """
    phi.require_normalized()
    first = phi.amps[0]
    alpha = first / abs(first) if abs(first) > 0 else 1.0
    w = np.array(phi.amps, dtype=np.complex128)
    w[0] -= alpha
    norm = float(np.linalg.norm(w))
    if norm <= const.TOLERANCES.normalization:
        return UnitaryMap(dim=phi.dim)
    return UnitaryMap(dim=phi.dim, reflector=_frozen(w / norm))


__all__ = [
    "StateVector",
    "HermitianOperator",
    "EigenGroup",
    "SpectralDecomposition",
    "UnitaryMap",
    "inner",
    "eig_hermitian",
    "householder_to_e0",
]
