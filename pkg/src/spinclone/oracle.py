"""Brute-force references for the test suite.

Nothing here shares code with the sparse path: operators are built by
Kronecker products of 2x2 blocks, partial traces by explicit outer products,
Dicke states by enumerating bit patterns. Not meant for production use.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .exceptions import DomainError
from .hilbert import PauliString, PauliTermSum, QubitRegister, StateVector

MAX_QUBITS = 14

# basis-index order (down, up): Z is +1 on up
_MATS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[-1, 0], [0, 1]], dtype=np.complex128),
}


def pauli_matrix(label: str) -> np.ndarray:
    return _MATS[label].copy()


def _kron_string(n: int, factors: dict[int, str]) -> np.ndarray:
    out = np.eye(1, dtype=np.complex128)
    # qubit 0 is the least significant bit, so it goes rightmost
    for q in reversed(range(n)):
        out = np.kron(out, _MATS[factors.get(q, "I")])
    return out


def to_dense(op: PauliTermSum) -> np.ndarray:
    n = op.n_qubits
    if n > MAX_QUBITS:
        raise DomainError(f"dense oracle capped at {MAX_QUBITS} qubits, got {n}")
    mat = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for term in op.terms:
        mat += term.coefficient * _kron_string(n, dict(term.factors))
    return mat


def dense_expm_apply(op: np.ndarray, psi: StateVector | np.ndarray, t: float) -> np.ndarray:
    """``exp(-i op t) psi`` through a full Hermitian eigendecomposition."""
    vec = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    if op.shape != (vec.shape[0], vec.shape[0]):
        raise DomainError("operator and vector dimensions differ")
    w, v = np.linalg.eigh(op)
    return v @ np.diag(np.exp(-1j * w * t)) @ v.conj().T @ vec


def dense_partial_trace(amplitudes: np.ndarray, keep: int) -> np.ndarray:
    """Reduced density matrix of ``keep``, rows ordered (up, down)."""
    amps = np.asarray(amplitudes)
    dim = amps.shape[0]
    full = np.outer(amps, amps.conj())
    rho = np.zeros((2, 2), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            if (i ^ j) & ~(1 << keep):
                continue
            bi, bj = (i >> keep) & 1, (j >> keep) & 1
            rho[1 - bi, 1 - bj] += full[i, j]
    return rho


def enumerate_dicke(n: int, k: int) -> np.ndarray:
    """Dicke amplitudes by listing every k-subset of n qubits."""
    subsets = list(combinations(range(n), k))
    amps = np.zeros(1 << n, dtype=np.complex128)
    for s in subsets:
        amps[sum(1 << q for q in s)] = 1.0
    return amps / np.sqrt(len(subsets))


def dense_spin_flip(n: int) -> np.ndarray:
    return _kron_string(n, {q: "X" for q in range(n)})


def dense_total_z(n: int) -> np.ndarray:
    out = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for q in range(n):
        out += _kron_string(n, {q: "Z"})
    return out


def dense_collective(n: int, qubits, label: str) -> np.ndarray:
    """``sum_q sigma^label_q / 2`` over ``qubits``: a collective spin component."""
    out = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for q in qubits:
        out += _kron_string(n, {q: label}) / 2
    return out


def random_pauli_sum(rng: np.random.Generator, n: int, n_terms: int) -> PauliTermSum:
    terms = []
    for _ in range(n_terms):
        labels = rng.choice(list("IXYZ"), size=n)
        facs = tuple((q, p) for q, p in enumerate(labels) if p != "I")
        terms.append(PauliString(facs, float(rng.normal())))
    return PauliTermSum(QubitRegister.plain(n), tuple(terms))


def random_state(rng: np.random.Generator, n: int) -> StateVector:
    z = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(QubitRegister.plain(n), z / np.linalg.norm(z))
