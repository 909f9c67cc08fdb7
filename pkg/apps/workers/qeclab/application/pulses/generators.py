from __future__ import annotations

import numpy as np
from scipy.linalg import schur

from qeclab.application.codes.gates import is_unitary
from qeclab.domain.errors import NumericalError


def principal_generator(u: np.ndarray) -> np.ndarray:
    """
    Hermitian g with u = exp(-i g) and eigenphases of u taken in (-π, π].
    The spectrum of g therefore lies in [-π, π).
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"gate matrix of shape {u.shape} is not square")
    if not is_unitary(u):
        raise ValueError("gate matrix is not unitary")
    try:
        t, z = schur(u, output="complex")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Schur decomposition failed: {e}") from e
    theta = np.angle(np.diag(t))
    theta = np.where(theta <= -np.pi + 1e-15, np.pi, theta)
    g = -(z * theta) @ z.conj().T
    return 0.5 * (g + g.conj().T)
