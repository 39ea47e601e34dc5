"""Test di src/models/operators.py"""

import numpy as np
import pytest

from src.calculations.linalg import HermitianOperator, StateVector, eig_hermitian
from src.calculations.luders import projectors
from src.errors import DegeneracyAmbiguityError, DimensionError, ParamError
from src.models.operators import (
    ObservableSettings,
    RegisterSpec,
    SearchOperatorParams,
    analytic_groups,
    analytic_spectrum,
    apply_A_fast,
    apply_C_fast,
    build_A,
    build_C,
    build_oracle,
    build_observable,
    label_eigenvalues,
    parity_sums,
    uniform_superposition,
    walsh_hadamard,
    walsh_hadamard_matrix,
)


def test_register_spec():
    assert RegisterSpec(3).dim == 8
    assert RegisterSpec.from_dim(16).qubits == 4
    with pytest.raises(ParamError):
        RegisterSpec(0)
    with pytest.raises(DimensionError):
        RegisterSpec.from_dim(12)


def test_uniform_superposition():
    np.testing.assert_allclose(uniform_superposition(RegisterSpec(1)).amps, [2 ** -0.5] * 2)
    np.testing.assert_allclose(uniform_superposition(RegisterSpec(2)).amps, [0.5] * 4)
    phi = uniform_superposition(RegisterSpec(5))
    np.testing.assert_allclose(np.abs(phi.amps), np.full(32, 32 ** -0.5))
    assert phi.is_normalized()


def test_walsh_hadamard_involution(make_state):
    v = make_state(16, seed=4)
    np.testing.assert_allclose(walsh_hadamard(walsh_hadamard(v)).amps, v.amps, atol=1e-12)


def test_walsh_hadamard_alternating_row():
    np.testing.assert_allclose(walsh_hadamard(StateVector.basis(4, 1)).amps, [0.5, -0.5, 0.5, -0.5])


def test_walsh_hadamard_matches_matrix(make_state):
    v = make_state(8, seed=9)
    np.testing.assert_allclose(walsh_hadamard(v).amps, walsh_hadamard_matrix(8) @ v.amps, atol=1e-12)


def test_walsh_hadamard_rejects_single_amplitude():
    with pytest.raises(DimensionError):
        walsh_hadamard(StateVector(np.array([1.0])))


def test_build_A_eigenvectors():
    a4 = build_A(SearchOperatorParams(dim=4, a1=1.1, a2=1.0))
    np.testing.assert_allclose(a4.entries @ np.ones(4), 1.1 * np.ones(4), atol=1e-12)
    assert eig_hermitian(a4).multiplicities() == [2, 2]

    a8 = build_A(SearchOperatorParams(dim=8, a1=1.1, a2=1.0))
    alternating = np.array([1, -1] * 4) / np.sqrt(8)
    assert np.linalg.norm(a8.entries @ alternating - 1.1 * alternating) <= 1e-12


def test_build_A_on_pair_is_scalar():
    np.testing.assert_allclose(build_A(SearchOperatorParams(dim=2)).entries, 1.1 * np.eye(2), atol=1e-12)


@pytest.mark.parametrize("dim", [4, 8, 16])
def test_A_multiplicities(dim):
    dec = eig_hermitian(build_A(SearchOperatorParams(dim=dim)))
    assert dec.multiplicities() == [dim - 2, 2]


def test_build_oracle():
    np.testing.assert_allclose(build_oracle(SearchOperatorParams(dim=4, marked_local=2)).entries, np.diag([1, 1, -1, 1]))
    np.testing.assert_allclose(build_oracle(SearchOperatorParams(dim=4)).entries, np.eye(4))
    b = build_oracle(SearchOperatorParams(dim=8, marked_local=5)).entries
    np.testing.assert_allclose(b @ b, np.eye(8))


def test_marked_out_of_range():
    with pytest.raises(ParamError):
        SearchOperatorParams(dim=4, marked_local=4)


def test_build_C_identity_oracle_is_A():
    p = SearchOperatorParams(dim=8)
    np.testing.assert_array_equal(build_observable(p).entries, build_A(p).entries)


def test_build_C_on_pair():
    p = SearchOperatorParams(dim=2, marked_local=0)
    np.testing.assert_allclose(build_observable(p).entries, p.a1 * build_oracle(p).entries, atol=1e-12)


@pytest.mark.parametrize("marked", [0, 3, 7])
def test_build_C_hermitian(marked):
    c = build_observable(SearchOperatorParams(dim=8, a1=1.3, a2=0.7, marked_local=marked)).entries
    assert np.linalg.norm(c - c.conj().T) <= 1e-12 * np.linalg.norm(c)


def test_build_C_dimension_mismatch():
    with pytest.raises(DimensionError):
        build_C(HermitianOperator.identity(2), HermitianOperator.identity(4))


@pytest.mark.parametrize(
    "a1,a2",
    [(1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (1.0 + 1e-7, 1.0)],
)
def test_invalid_eigenvalues(a1, a2):
    with pytest.raises(ParamError):
        ObservableSettings(a1=a1, a2=a2)


def test_settings_from_delta():
    s = ObservableSettings.from_delta(0.5)
    assert s.a1 == pytest.approx(1.5)
    assert s.a2 == 1.0
    assert s.delta == pytest.approx(0.5)


def test_apply_C_fast_unmarked_uniform():
    p = SearchOperatorParams(dim=16)
    phi = uniform_superposition(RegisterSpec.from_dim(16))
    np.testing.assert_allclose(apply_C_fast(p, phi).amps, p.a1 * phi.amps, atol=1e-12)


def test_apply_C_fast_surviving_even_sum():
    p = SearchOperatorParams(dim=8, marked_local=3)
    u1 = StateVector(parity_sums(8)[0])
    assert np.linalg.norm(apply_C_fast(p, u1).amps - p.a1 * u1.amps) <= 1e-10


@pytest.mark.parametrize("marked", [None, 0, 9, 15])
def test_fast_paths_match_dense(marked, make_state):
    p = SearchOperatorParams(dim=16, marked_local=marked)
    phi = make_state(16, seed=31)
    dense_c = build_observable(p).entries @ phi.amps
    assert np.linalg.norm(apply_C_fast(p, phi).amps - dense_c) <= 1e-10 * np.linalg.norm(dense_c)
    dense_a = build_A(p).entries @ phi.amps
    assert np.linalg.norm(apply_A_fast(p, phi).amps - dense_a) <= 1e-10 * np.linalg.norm(dense_a)


def test_analytic_spectrum_multiplicities_d8():
    groups = analytic_groups(SearchOperatorParams(dim=8, marked_local=3))
    assert {g.label: g.multiplicity for g in groups} == {
        "a1": 1,
        "a2": 5,
        "lambda_minus": 1,
        "lambda_plus": 1,
    }


def test_analytic_spectrum_pair():
    p = SearchOperatorParams(dim=2, marked_local=1)
    spectrum = analytic_spectrum(p)
    assert spectrum.eigenvalues() == pytest.approx([-p.a1, p.a1])
    assert spectrum.a2_multiplicity == 0
    np.testing.assert_allclose(np.abs(spectrum.surviving.vector), [1.0, 0.0])
    np.testing.assert_allclose(np.abs(spectrum.perturbed[0].vector), [0.0, 1.0])


@pytest.mark.parametrize("marked,survivor", [(3, 0), (4, 1), (0, 1), (7, 0)])
def test_surviving_vector_parity(marked, survivor):
    p = SearchOperatorParams(dim=8, marked_local=marked)
    spectrum = analytic_spectrum(p)
    expected = parity_sums(8)[survivor]
    np.testing.assert_allclose(spectrum.surviving.vector, expected)
    c = build_observable(p).entries
    assert np.linalg.norm(c @ expected - p.a1 * expected) <= 1e-10


@pytest.mark.parametrize("dim", [4, 8, 16])
def test_analytic_eigenpairs_residuals(dim):
    for marked in range(dim):
        p = SearchOperatorParams(dim=dim, marked_local=marked)
        spectrum = analytic_spectrum(p)
        c_norm = build_observable(p).frobenius_norm()
        for pair in (spectrum.surviving,) + spectrum.perturbed:
            residual = apply_C_fast(p, StateVector(pair.vector)).amps - pair.eigenvalue * pair.vector
            assert np.linalg.norm(residual) <= 1e-9 * c_norm


@pytest.mark.parametrize("dim", [2, 4, 8, 16, 32])
def test_analytic_matches_dense(dim):
    for marked in range(dim):
        p = SearchOperatorParams(dim=dim, marked_local=marked)
        dense = projectors(eig_hermitian(build_observable(p), p.group_tol))
        analytic = [g.projector for g in analytic_groups(p)]
        assert len(dense) == len(analytic)
        for d, a in zip(dense, analytic):
            assert a.eigenvalue == pytest.approx(d.eigenvalue, abs=1e-9)
            assert a.rank == d.rank
            np.testing.assert_allclose(a.matrix(), d.matrix(), atol=1e-9)


@pytest.mark.parametrize("dim", [4, 8, 16, 32])
def test_dense_multiplicities_with_marked(dim):
    for marked in range(dim):
        p = SearchOperatorParams(dim=dim, marked_local=marked)
        dec = eig_hermitian(build_observable(p), p.group_tol)
        labels = label_eigenvalues([g.eigenvalue for g in dec.groups], p)
        assert dict(zip(labels, dec.multiplicities())) == {
            "a1": 1,
            "a2": dim - 3,
            "lambda_minus": 1,
            "lambda_plus": 1,
        }


@pytest.mark.parametrize("marked", [0, 5])
def test_perturbation_rank(marked):
    p = SearchOperatorParams(dim=16, marked_local=marked)
    a = build_A(p).entries
    perturbation = build_observable(p).entries - a
    threshold = 1e-9 * np.linalg.norm(a)
    assert np.linalg.matrix_rank(perturbation, tol=threshold) <= 2
    e_k = np.zeros(16)
    e_k[marked] = 1.0
    one_sided = a @ np.outer(e_k, e_k)
    assert np.linalg.matrix_rank(one_sided, tol=threshold) == 1
    singular = np.linalg.svd(one_sided, compute_uv=False)
    assert int(np.sum(singular <= threshold)) == 15


@pytest.mark.parametrize("marked", [2, 3])
def test_broken_vector_couples_to_partner(marked):
    """Ĉ û_rotto resta nel piano {û_rotto, v̂} con coefficiente su v̂ non nullo."""
    p = SearchOperatorParams(dim=8, marked_local=marked)
    spectrum = analytic_spectrum(p)
    image = apply_C_fast(p, StateVector(spectrum.broken)).amps
    d1 = np.vdot(spectrum.broken, image)
    d2 = np.vdot(spectrum.partner, image)
    residual = image - d1 * spectrum.broken - d2 * spectrum.partner
    assert np.linalg.norm(residual) <= 1e-9
    assert abs(d2) > 1e-9 * abs(p.a1 + p.a2)
    assert d1.real == pytest.approx(spectrum.block[0, 0])
    assert d2.real == pytest.approx(spectrum.block[1, 0])


def test_analytic_spectrum_requires_marked():
    with pytest.raises(ParamError):
        analytic_spectrum(SearchOperatorParams(dim=8))


def test_unmarked_analytic_groups():
    groups = analytic_groups(SearchOperatorParams(dim=8))
    assert [(g.label, g.multiplicity) for g in groups] == [("a2", 6), ("a1", 2)]


def test_ambiguous_grouping_rejected():
    p = SearchOperatorParams(dim=8, marked_local=3, group_tol=0.05)
    with pytest.raises(DegeneracyAmbiguityError):
        analytic_spectrum(p)
    with pytest.raises(DegeneracyAmbiguityError):
        eig_hermitian(build_observable(p), p.group_tol)


def test_label_eigenvalues():
    p = SearchOperatorParams(dim=8)
    assert label_eigenvalues([-0.9, 1.0, 1.05, 1.1], p) == ["lambda_minus", "a2", "lambda_plus", "a1"]
    assert label_eigenvalues([-1.1, 1.1], p) == ["lambda", "a1"]
