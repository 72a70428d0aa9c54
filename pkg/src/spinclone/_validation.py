"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DomainError


def check_qubit_inputs(X, atol: float = 1e-12) -> np.ndarray:
    """Coerce ``X`` into an ``(n_samples, 2)`` complex array of normalized qubits.

    sklearn's ``check_array`` rejects complex data, hence this helper.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        arr = arr.astype(np.complex128)
    if not np.issubdtype(arr.dtype, np.number):
        raise DomainError(f"qubit inputs must be numeric, got dtype {arr.dtype}")
    arr = np.atleast_2d(arr.astype(np.complex128))
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"expected shape (n_samples, 2), got {arr.shape}")
    if arr.shape[0] == 0:
        raise DomainError("need at least one input qubit")
    if not np.all(np.isfinite(arr)):
        raise DomainError("qubit inputs contain NaN or inf")
    norms = np.sum(np.abs(arr) ** 2, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > atol)
    if bad.size:
        raise DomainError(f"rows {bad.tolist()} are not normalized qubit states")
    return arr


def check_copies(M, minimum: int = 2) -> int:
    if isinstance(M, bool) or not isinstance(M, numbers.Integral) or M < minimum:
        raise DomainError(f"number of copies must be an integer >= {minimum}, got {M!r}")
    return int(M)


def haar_random_qubits(n: int, seed) -> np.ndarray:
    """``n`` Haar-uniform qubit states as rows ``(alpha, beta)``."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
