"""Time evolution ``exp(-iHt)|psi>`` of full-register states."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .exceptions import AccuracyError, DomainError
from .hilbert import PauliTermSum, StateVector, partial_trace_single
from .model import CloneConfig, build_clone_hamiltonian, machine_input_state

DENSE_MAX_QUBITS = 14
DENSE_DEFAULT_MAX_QUBITS = 12


class Method(enum.Enum):
    DENSE_EIGEN = "dense"
    KRYLOV = "krylov"


@dataclass(frozen=True)
class EvolutionSpec:
    """How to propagate: method, elapsed time and Krylov error control.

    ``method=None`` picks dense diagonalization up to 12 qubits and Krylov
    above that.
    """

    time: float
    method: Method | None = None
    tolerance: float = 1e-12
    max_krylov_dim: int = 40

    def __post_init__(self):
        if not math.isfinite(self.time):
            raise DomainError(f"evolution time must be finite, got {self.time}")
        if not self.tolerance > 0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_krylov_dim < 1:
            raise DomainError("max_krylov_dim must be >= 1")
        if self.method is not None:
            object.__setattr__(self, "method", Method(self.method))

    def resolve(self, n_qubits: int) -> Method:
        if self.method is None:
            return Method.DENSE_EIGEN if n_qubits <= DENSE_DEFAULT_MAX_QUBITS else Method.KRYLOV
        if self.method is Method.DENSE_EIGEN and n_qubits > DENSE_MAX_QUBITS:
            raise DomainError(
                f"dense evolution is limited to {DENSE_MAX_QUBITS} qubits, got {n_qubits}"
            )
        return self.method


@lru_cache(maxsize=8)
def spectral_decomposition(h: PauliTermSum) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of ``h`` (cached per operator)."""
    if h.n_qubits > DENSE_MAX_QUBITS:
        raise DomainError(f"dense diagonalization limited to {DENSE_MAX_QUBITS} qubits")
    mat = h.to_sparse().toarray()
    if not np.any(mat.imag):
        mat = mat.real
    w, v = np.linalg.eigh(mat)
    v = v.astype(np.complex128)
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def lanczos_expm(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    t: float,
    tol: float = 1e-12,
    max_dim: int = 40,
) -> tuple[np.ndarray, float, int]:
    """Approximate ``exp(-i t A) v`` for Hermitian ``A`` given as a matvec.

    The Krylov space is grown one vector at a time with full
    reorthogonalization until the a-posteriori estimate
    ``||v|| * beta_m * |e_m^T exp(-i t T_m) e_1|`` drops below ``tol``.

    Returns
    -------
    result : ndarray
    error_estimate : float
    dim : int
        Krylov dimension used.
    """
    v = np.asarray(v, dtype=np.complex128)
    beta0 = float(np.linalg.norm(v))
    if beta0 == 0.0 or t == 0.0:
        return v.copy(), 0.0, 0
    n = v.shape[0]
    max_dim = min(max_dim, n)
    basis = np.zeros((max_dim + 1, n), dtype=np.complex128)
    basis[0] = v / beta0
    alphas = np.zeros(max_dim)
    betas = np.zeros(max_dim)
    err = math.inf
    for m in range(1, max_dim + 1):
        w = matvec(basis[m - 1])
        alphas[m - 1] = np.vdot(basis[m - 1], w).real
        w = w - alphas[m - 1] * basis[m - 1]
        if m > 1:
            w -= betas[m - 2] * basis[m - 2]
        for _ in range(2):
            w -= basis[:m].T @ (basis[:m].conj() @ w)
        b = float(np.linalg.norm(w))

        tri = np.diag(alphas[:m]) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
        evals, evecs = np.linalg.eigh(tri)
        y = evecs @ (np.exp(-1j * t * evals) * evecs[0].conj())
        scale = max(1.0, float(np.max(np.abs(evals))))
        if b <= 1e-14 * scale:
            # invariant subspace: the projection is exact
            return beta0 * (basis[:m].T @ y), 0.0, m
        err = beta0 * b * abs(y[-1])
        if err <= tol:
            return beta0 * (basis[:m].T @ y), err, m
        betas[m - 1] = b
        basis[m] = w / b
    raise AccuracyError(
        f"Krylov propagation did not converge within {max_dim} vectors "
        f"(error estimate {err:.3e} > {tol:.1e})",
        residual=err,
    )


def evolve(h: PauliTermSum, psi: StateVector, spec: EvolutionSpec) -> StateVector:
    """Return ``exp(-i h t) psi`` with ``t = spec.time``."""
    if h.n_qubits != psi.n_qubits:
        raise DomainError("operator and state live on different registers")
    if not psi.is_normalized(1e-10):
        raise DomainError(f"state must be normalized, norm = {psi.norm()}")
    if spec.time == 0.0:
        return psi
    method = spec.resolve(psi.n_qubits)
    if method is Method.DENSE_EIGEN:
        w, v = spectral_decomposition(h)
        coeffs = v.conj().T @ psi.amplitudes
        return psi.with_amplitudes(v @ (np.exp(-1j * w * spec.time) * coeffs))
    out, _, _ = lanczos_expm(
        h.matvec, psi.amplitudes, spec.time, spec.tolerance, spec.max_krylov_dim
    )
    return psi.with_amplitudes(out)


def _check_input(alpha: complex, beta: complex) -> None:
    total = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(total - 1.0) > 1e-12:
        raise DomainError(f"input qubit not normalized: |alpha|^2 + |beta|^2 = {total}")


def single_copy_fidelities(
    cfg: CloneConfig,
    inputs: np.ndarray,
    phi_grid: np.ndarray,
    method: Method | None = None,
) -> np.ndarray:
    """Fidelity of every target copy for several inputs along a phi grid.

    Parameters
    ----------
    inputs : array of shape (n_inputs, 2)
        Rows ``(alpha, beta)`` of normalized input qubits.
    phi_grid : array of shape (n_phi,)
        Rescaled times; the evolution time is ``phi / (sqrt(3) * j1)``.

    Returns
    -------
    ndarray of shape (n_inputs, n_phi, M)
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.complex128))
    phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if not np.all(np.isfinite(phi_grid)):
        raise DomainError("phi grid must be finite")
    for alpha, beta in inputs:
        _check_input(alpha, beta)
    h = build_clone_hamiltonian(cfg)
    method = EvolutionSpec(0.0, method).resolve(h.n_qubits)
    targets = range(1, cfg.M + 1)
    times = np.array([cfg.time_at(p) for p in phi_grid])
    out = np.empty((len(inputs), len(phi_grid), cfg.M))

    for s, (alpha, beta) in enumerate(inputs):
        psi0 = machine_input_state(cfg.M, alpha, beta)
        if method is Method.DENSE_EIGEN:
            w, v = spectral_decomposition(h)
            coeffs = v.conj().T @ psi0.amplitudes
            states = {
                k: psi0.with_amplitudes(v @ (np.exp(-1j * w * t) * coeffs))
                for k, t in enumerate(times)
            }
        else:
            # march through the grid in time order; each step is short
            states = {}
            current, t_prev = psi0, 0.0
            for k in np.argsort(times, kind="stable"):
                current = evolve(h, current, EvolutionSpec(times[k] - t_prev, Method.KRYLOV))
                t_prev = times[k]
                states[int(k)] = current
        for k, state in states.items():
            for col, q in enumerate(targets):
                out[s, k, col] = partial_trace_single(state, q).fidelity(alpha, beta)
    return out


def fidelity_trajectory(
    cfg: CloneConfig,
    alpha: complex,
    beta: complex,
    phi_grid,
    method: Method | None = None,
) -> np.ndarray:
    """Rows ``(phi, F_target1, ..., F_targetM)`` for one input qubit."""
    phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    fids = single_copy_fidelities(cfg, [[alpha, beta]], phi_grid, method)[0]
    return np.column_stack([phi_grid, fids])
