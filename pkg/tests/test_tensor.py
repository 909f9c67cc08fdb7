import numpy as np
import pytest

from qeclab.application.codes.paulis import I2, X, Z
from qeclab.domain.entities import DensityMatrix, HermitianOperator, PureState
from qeclab.domain.errors import DimensionError
from qeclab.domain.tensor import (
    append_fresh_ancillas,
    apply_local,
    conjugate_local,
    embed,
    n_qubits_of,
    operator_norm,
    partial_trace,
    partial_trace_matrix,
    state_fidelity,
    tensor_product,
    trace_norm,
)
from qeclab.domain.values import HilbertLayout


def test_qubit_zero_is_most_significant():
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    out = apply_local(X, (0,), psi, 2)
    assert out[2] == pytest.approx(1.0)
    assert PureState.from_bits("10").amplitudes[2] == 1.0


def test_embed_matches_kron():
    np.testing.assert_allclose(embed(X, (1,), 2), np.kron(I2, X))
    np.testing.assert_allclose(embed(Z, (0,), 3), np.kron(Z, np.eye(4)))


def test_apply_local_two_sites_out_of_order():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    # control on qubit 2, target on qubit 0
    full = embed(cnot, (2, 0), 3)
    psi = PureState.from_bits("001").amplitudes
    np.testing.assert_allclose(full @ psi, PureState.from_bits("101").amplitudes)


def test_conjugate_local_equals_dense_product(random_density):
    rho = random_density(3)
    u = embed(X, (1,), 3)
    np.testing.assert_allclose(conjugate_local(X, (1,), rho, 3), u @ rho @ u.conj().T, atol=1e-14)


def test_partial_trace_of_product(random_density):
    a = random_density(1)
    b = random_density(2)
    full = np.kron(a, b)
    np.testing.assert_allclose(partial_trace_matrix(full, 3, [1, 2]), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace_matrix(full, 3, [0]), b, atol=1e-14)


def test_partial_trace_keeps_layout():
    psi = PureState.from_bits("010").with_ancillas(2)
    reduced = partial_trace(psi.density(), psi.layout.ancilla_sites)
    assert reduced.layout == HilbertLayout(3, 0)
    np.testing.assert_allclose(reduced.data, PureState.from_bits("010").projector())


def test_norms():
    op = np.diag([1.0, -2.0]).astype(complex)
    assert trace_norm(op) == pytest.approx(3.0)
    assert operator_norm(op) == pytest.approx(2.0)
    shift = np.array([[0, 1], [0, 0]], dtype=complex)
    assert trace_norm(shift) == pytest.approx(1.0)
    assert operator_norm(shift) == pytest.approx(1.0)


def test_append_fresh_ancillas():
    out = append_fresh_ancillas(np.eye(2, dtype=complex) / 2, 2)
    assert out.shape == (8, 8)
    assert out[0, 0] == pytest.approx(0.5)
    assert out[4, 4] == pytest.approx(0.5)
    assert np.trace(out) == pytest.approx(1.0)


def test_dimension_checks():
    assert n_qubits_of(8) == 3
    with pytest.raises(DimensionError):
        n_qubits_of(6)
    with pytest.raises(DimensionError):
        HilbertLayout(10, 3)
    with pytest.raises(DimensionError):
        apply_local(X, (3,), np.eye(4), 2)
    with pytest.raises(DimensionError):
        tensor_product(np.eye(2), np.ones((2, 3)))


def test_entities_validate():
    layout = HilbertLayout(1)
    with pytest.raises(ValueError):
        DensityMatrix(layout, np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix(layout, np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        PureState(layout, np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        HermitianOperator(layout, np.array([[0, 1], [0, 0]]))
    assert DensityMatrix.maximally_mixed(layout).purity() == pytest.approx(0.5)


def test_state_fidelity():
    psi = PureState.from_bits("0")
    rho = DensityMatrix.maximally_mixed(HilbertLayout(1))
    assert state_fidelity(psi, rho) == pytest.approx(0.5)
    assert state_fidelity(psi, psi.density()) == pytest.approx(1.0)


@pytest.mark.parametrize("sites", [(-1,), (3,), (0, 3)])
def test_site_checks_match_layout(sites):
    layout = HilbertLayout(2, 1)
    with pytest.raises(DimensionError, match="out of range for 3 qubits"):
        layout.check_sites(sites)
    op = np.eye(2 ** len(sites), dtype=complex)
    with pytest.raises(DimensionError, match="out of range for 3 qubits"):
        apply_local(op, sites, np.eye(8), 3)
    with pytest.raises(DimensionError, match="out of range for 3 qubits"):
        partial_trace_matrix(np.eye(8), 3, sites)
    with pytest.raises(DimensionError, match="out of range for 3 qubits"):
        partial_trace(DensityMatrix(layout, np.eye(8) / 8), sites)


def test_duplicate_sites_rejected_for_local_operators():
    with pytest.raises(DimensionError, match="duplicate site"):
        apply_local(np.eye(4), (1, 1), np.eye(8), 3)
    # traced sites form a set
    np.testing.assert_allclose(partial_trace_matrix(np.eye(8), 3, (1, 1)), 2 * np.eye(4))
