"""
Dense tensor algebra over multi-qubit Hilbert spaces.
- Qubit 0 is the most significant bit of a basis index.
- Local operators are applied by reshaping into per-qubit axes, never by
  materializing the full Kronecker product unless `embed` is asked for it.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from qeclab.domain.entities import DensityMatrix, PureState
from qeclab.domain.errors import DimensionError, NumericalError
from qeclab.domain.values import HilbertLayout
from qeclab.settings import DEFAULT_TOLERANCES


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2 ** n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    for m in (a, b):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"tensor_product: operand of shape {m.shape} is not square")
    if a.shape[0] * b.shape[0] > DEFAULT_TOLERANCES.max_dim:
        raise DimensionError(
            f"tensor_product: dimension {a.shape[0] * b.shape[0]} exceeds {DEFAULT_TOLERANCES.max_dim}"
        )
    return np.kron(a, b)


@lru_cache(maxsize=None)
def _flat_layout(n: int) -> HilbertLayout:
    return HilbertLayout(n)


def partial_trace_matrix(mat: np.ndarray, n_qubits: int, over: Iterable[int]) -> np.ndarray:
    """Trace the listed qubits out of any 2^n x 2^n matrix (not only states)."""
    traced = set(_flat_layout(n_qubits).check_sites(sorted(set(over))))
    keep = [q for q in range(n_qubits) if q not in traced]
    t = np.asarray(mat).reshape((2,) * (2 * n_qubits))
    rows = list(range(n_qubits))
    cols = [n_qubits + q if q in keep else q for q in range(n_qubits)]
    out = keep + [n_qubits + q for q in keep]
    res = np.einsum(t, rows + cols, out)
    d = 2 ** len(keep)
    return np.asarray(res).reshape(d, d)


def partial_trace(rho: DensityMatrix, over: Iterable[int]) -> DensityMatrix:
    layout = rho.layout
    traced = set(layout.check_sites(sorted(set(over))))
    reduced = partial_trace_matrix(rho.data, layout.n_qubits, traced)
    reg_left = sum(1 for q in layout.register_sites if q not in traced)
    anc_left = sum(1 for q in layout.ancilla_sites if q not in traced)
    return DensityMatrix(HilbertLayout(reg_left, anc_left), reduced)


def apply_local(op: np.ndarray, sites: Sequence[int], mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """Return (op on `sites`) @ mat for a 2^n-row matrix or vector."""
    sites = _flat_layout(n_qubits).check_sites(sites)
    k = len(sites)
    op = np.asarray(op)
    if op.shape != (2 ** k, 2 ** k):
        raise DimensionError(f"operator of shape {op.shape} does not act on {k} qubits")
    mat = np.asarray(mat)
    trailing = mat.shape[1:]
    t = mat.reshape((2,) * n_qubits + trailing)
    res = np.tensordot(op.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), list(sites)))
    res = np.moveaxis(res, list(range(k)), list(sites))
    return res.reshape(mat.shape)


def conjugate_local(op: np.ndarray, sites: Sequence[int], mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """Return K X K† with K = op on `sites`."""
    left = apply_local(op, sites, mat, n_qubits)
    return apply_local(op, sites, left.conj().T, n_qubits).conj().T


def embed(op: np.ndarray, sites: Sequence[int], layout: HilbertLayout | int) -> np.ndarray:
    """Full-dimension operator acting as `op` on `sites` and identity elsewhere."""
    n = layout if isinstance(layout, int) else layout.n_qubits
    if 2 ** n > DEFAULT_TOLERANCES.max_dim:
        raise DimensionError(f"embed: {n} qubits exceed the dense limit")
    return apply_local(op, sites, np.eye(2 ** n, dtype=complex), n)


def operator_norm(op: np.ndarray) -> float:
    """Largest singular value (the ∞-norm)."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError(f"operator_norm: shape {op.shape} is not square")
    try:
        if np.allclose(op, op.conj().T, atol=DEFAULT_TOLERANCES.hermiticity, rtol=0.0):
            ev = np.linalg.eigvalsh(op)
            return float(max(abs(ev[0]), abs(ev[-1])))
        return float(np.linalg.svd(op, compute_uv=False)[0])
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"operator_norm: eigensolver did not converge: {e}") from e


def trace_norm(op: np.ndarray) -> float:
    """Sum of singular values (the 1-norm)."""
    op = np.asarray(op)
    try:
        if np.allclose(op, op.conj().T, atol=DEFAULT_TOLERANCES.hermiticity, rtol=0.0):
            return float(np.sum(np.abs(np.linalg.eigvalsh(op))))
        return float(np.sum(np.linalg.svd(op, compute_uv=False)))
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"trace_norm: eigensolver did not converge: {e}") from e


def expectation(psi: np.ndarray, mat: np.ndarray) -> float:
    """Real part of <psi|mat|psi>."""
    return float(np.real(np.vdot(psi, mat @ psi)))


def state_fidelity(psi: PureState, rho: DensityMatrix) -> float:
    if psi.layout.total_dim != rho.layout.total_dim:
        raise DimensionError(
            f"state_fidelity: dimension mismatch {psi.layout.total_dim} vs {rho.layout.total_dim}"
        )
    value = np.vdot(psi.amplitudes, rho.data @ psi.amplitudes)
    if abs(value.imag) > DEFAULT_TOLERANCES.hermiticity:
        raise NumericalError(f"state_fidelity: imaginary residue {value.imag:.3e}")
    return float(min(1.0, max(0.0, value.real)))


def append_fresh_ancillas(mat: np.ndarray, count: int) -> np.ndarray:
    """X -> X ⊗ |0...0><0...0|."""
    if count == 0:
        return mat
    fresh = np.zeros((2 ** count, 2 ** count), dtype=complex)
    fresh[0, 0] = 1.0
    return np.kron(mat, fresh)
