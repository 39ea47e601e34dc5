"""Test di src/calculations/linalg.py"""

import numpy as np
import pytest

from src.calculations.linalg import (
    HermitianOperator,
    StateVector,
    eig_hermitian,
    householder_to_e0,
    inner,
)
from src.errors import (
    DegeneracyAmbiguityError,
    DimensionError,
    NormalizationError,
    NotHermitianError,
    ParamError,
)
from src.models.operators import RegisterSpec, SearchOperatorParams, build_observable, uniform_superposition


def test_inner_basis_and_uniform():
    e0 = StateVector.basis(4, 0)
    e1 = StateVector.basis(4, 1)
    e2 = StateVector.basis(4, 2)
    assert inner(e0, e0) == pytest.approx(1.0)
    assert inner(e0, e1) == pytest.approx(0.0)
    assert inner(uniform_superposition(RegisterSpec(2)), e2) == pytest.approx(0.5)


def test_inner_is_conjugate_linear_in_first_argument():
    u = StateVector(np.array([1j, 0.0]))
    v = StateVector(np.array([1.0, 0.0]))
    assert inner(u, v) == pytest.approx(-1j)


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner(StateVector.basis(2, 0), StateVector.basis(4, 0))


@pytest.mark.parametrize("size", [3, 6, 0])
def test_state_vector_requires_power_of_two(size):
    with pytest.raises(DimensionError):
        StateVector(np.ones(size))


def test_state_vector_is_read_only():
    phi = StateVector.basis(4, 1)
    with pytest.raises(ValueError):
        phi.amps[0] = 1.0


def test_require_normalized():
    phi = StateVector(np.array([1.0, 1.0]))
    assert not phi.is_normalized()
    with pytest.raises(NormalizationError):
        phi.require_normalized()
    phi.normalized().require_normalized()


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        HermitianOperator(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_eig_identity_single_group():
    dec = eig_hermitian(HermitianOperator.identity(2), 1e-9)
    assert len(dec.groups) == 1
    assert dec.groups[0].eigenvalue == pytest.approx(1.0)
    assert dec.groups[0].multiplicity == 2


def test_eig_diagonal_two_groups():
    dec = eig_hermitian(HermitianOperator.diagonal([1.0, 1.1]), 1e-9)
    assert [g.eigenvalue for g in dec.groups] == pytest.approx([1.0, 1.1])
    assert dec.multiplicities() == [1, 1]


def test_eig_search_observable_multiplicities():
    op = build_observable(SearchOperatorParams(dim=8, a1=1.1, a2=1.0, marked_local=3))
    dec = eig_hermitian(op, 1e-9)
    values = [g.eigenvalue for g in dec.groups]
    assert values == sorted(values)
    assert dec.multiplicities() == [1, 5, 1, 1]
    assert dec.groups[1].eigenvalue == pytest.approx(1.0, abs=1e-9)
    assert dec.groups[3].eigenvalue == pytest.approx(1.1, abs=1e-9)


def test_eig_ambiguous_gap_raises():
    with pytest.raises(DegeneracyAmbiguityError):
        eig_hermitian(HermitianOperator.diagonal([1.0, 1.0 + 5e-9]), 1e-9)


def test_eig_rejects_non_positive_tolerance():
    with pytest.raises(ParamError):
        eig_hermitian(HermitianOperator.identity(2), 0.0)


@pytest.mark.parametrize("dim", [2, 8, 64])
def test_eig_reconstruction_and_residuals(dim, make_hermitian):
    op = make_hermitian(dim, seed=dim)
    dec = eig_hermitian(op, 1e-9)
    norm = op.frobenius_norm()
    rebuilt = (dec.vectors * dec.eigenvalues) @ dec.vectors.conj().T
    assert np.linalg.norm(op.entries - rebuilt) <= 1e-9 * norm
    assert np.all(dec.residuals(op) <= 1e-10 * norm)
    gram = dec.vectors.conj().T @ dec.vectors
    assert np.max(np.abs(gram - np.eye(dim))) <= 1e-10
    assert sum(dec.multiplicities()) == dim


def test_householder_fixed_point():
    u = householder_to_e0(StateVector.basis(4, 0))
    assert u.reflector is None
    np.testing.assert_allclose(u.to_dense(), np.eye(4))


def test_householder_maps_uniform_to_e0_and_back():
    phi = uniform_superposition(RegisterSpec(2))
    u = householder_to_e0(phi)
    e0 = StateVector.basis(4, 0)
    assert u.apply(phi).fidelity(e0) == pytest.approx(1.0, abs=1e-12)
    assert u.apply(e0).fidelity(phi) == pytest.approx(1.0, abs=1e-12)


def test_householder_is_unitary_reflection(make_state):
    phi = make_state(16, seed=3)
    u = householder_to_e0(phi)
    m = u.to_dense()
    np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
    np.testing.assert_allclose(m @ m, np.eye(16), atol=1e-12)
    assert u.apply(phi).fidelity(StateVector.basis(16, 0)) == pytest.approx(1.0, abs=1e-12)


def test_unitary_map_round_trip(make_state):
    u = householder_to_e0(make_state(8, seed=1))
    v = make_state(8, seed=2)
    back = u.apply(u.apply_adjoint(v))
    assert np.linalg.norm(back.amps - v.amps) <= 1e-12


def test_householder_requires_normalized():
    with pytest.raises(NormalizationError):
        householder_to_e0(StateVector(np.array([1.0, 1.0])))
