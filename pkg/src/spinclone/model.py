"""The spin-star cloning machine: Hamiltonian, machine state and 2-D reduction.

Register layout (see :meth:`QubitRegister.cloning`): input qubit 0, targets
1..M, ancillas M+1..2M-2. The machine state ``|R>`` lives on the targets and
ancillas only and is placed on qubits 1..2M-2 when combined with the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .exceptions import ConfigError, DomainError, ModelError
from .hilbert import (
    DensityMatrix2,
    PauliTermSum,
    QubitRegister,
    Role,
    StateVector,
    apply_pauli_sum,
    dicke_state,
    overlap,
    tensor_embed,
    two_body,
)

CONDITION_RTOL = 1e-12

UP = StateVector(QubitRegister.plain(1), [0.0, 1.0])
DOWN = StateVector(QubitRegister.plain(1), [1.0, 0.0])


def _check_copies(M: int) -> None:
    if int(M) != M or M < 2:
        raise ConfigError(f"number of copies M must be an integer >= 2, got {M}")


@dataclass(frozen=True)
class CloneConfig:
    """Couplings of the star Hamiltonian.

    ``j1``/``lambda1`` couple the input to each target, ``j2``/``lambda2`` the
    input to each ancilla. The defaults are the optimal machine with coupling
    1 and anisotropy 2.
    """

    M: int
    j1: float = 1.0
    j2: float = -1.0
    lambda1: float = 2.0
    lambda2: float = -2.0

    def __post_init__(self):
        _check_copies(self.M)
        for name in ("j1", "j2", "lambda1", "lambda2"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    @classmethod
    def optimal(cls, M: int, coupling: float = 1.0, anisotropy: float = 2.0) -> "CloneConfig":
        return cls(M, coupling, -coupling, anisotropy, -anisotropy)

    @property
    def register(self) -> QubitRegister:
        return QubitRegister.cloning(self.M)

    @property
    def coupling(self) -> float:
        return self.j1

    @property
    def anisotropy(self) -> float:
        return self.lambda1

    def optimal_condition(self) -> bool:
        """True when ``j1 == -j2`` and ``lambda1 == -lambda2`` (relative 1e-12)."""
        close = lambda a, b: math.isclose(a, b, rel_tol=CONDITION_RTOL, abs_tol=1e-300)
        return close(self.j1, -self.j2) and close(self.lambda1, -self.lambda2)

    @property
    def t0(self) -> float:
        """Evolution time at which the rescaled time reaches pi/2."""
        return sqrt(3.0) * math.pi / (6.0 * self.j1)

    def phi(self, t: float) -> float:
        return sqrt(3.0) * self.j1 * t

    def time_at(self, phi: float) -> float:
        return phi / (sqrt(3.0) * self.j1)


@dataclass(frozen=True)
class CloningAmplitudes:
    M: int
    gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class AbBasis:
    a: StateVector
    b: StateVector


@dataclass(frozen=True, eq=False)
class Effective2x2:
    """Generator of the dynamics restricted to span{|a>, |b>}."""

    h: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.h)


def build_clone_hamiltonian(cfg: CloneConfig) -> PauliTermSum:
    """XXZ star Hamiltonian coupling the input qubit to targets and ancillas."""
    reg = cfg.register
    terms = []
    for group, j, lam in (
        (reg.indices(Role.TARGET), cfg.j1, cfg.lambda1),
        (reg.indices(Role.ANCILLA), cfg.j2, cfg.lambda2),
    ):
        for q in group:
            terms.append(two_body(j / 2, "X", 0, q))
            terms.append(two_body(j / 2, "Y", 0, q))
            terms.append(two_body(j * lam / 2, "Z", 0, q))
    return PauliTermSum(reg, tuple(terms))


def normalization_constant(M: int) -> float:
    _check_copies(M)
    return sqrt(6.0 / ((M - 1) * M * (M + 1)))


def build_r_state(M: int) -> StateVector:
    """Initial machine state on targets (qubits 0..M-1) and ancillas (M..2M-3)."""
    _check_copies(M)
    reg = QubitRegister.machine(M)
    targets = reg.indices(Role.TARGET)
    ancillas = reg.indices(Role.ANCILLA)
    C = normalization_constant(M)
    amps = np.zeros(reg.dim, dtype=np.complex128)
    for i in range(1, M):
        term = tensor_embed(
            [(dicke_state(M, i), targets), (dicke_state(M - 2, M - 1 - i), ancillas)], reg
        )
        amps += C * sqrt(i * (M - i)) * term.amplitudes
    return StateVector(reg, amps)


def gamma_coefficients(M: int) -> CloningAmplitudes:
    _check_copies(M)
    i = np.arange(M)
    return CloningAmplitudes(M, np.sqrt(2.0 * (M - i) / (M * (M + 1))))


def target_output_state(M: int, input_up: bool) -> StateVector:
    """Ideal output of the optimal 1->M cloner for a basis input.

    The second Dicke factor lives on the input qubit together with the
    ancillas (M-1 qubits).
    """
    _check_copies(M)
    reg = QubitRegister.cloning(M)
    targets = reg.indices(Role.TARGET)
    rest = [0] + reg.indices(Role.ANCILLA)
    gamma = gamma_coefficients(M).gamma
    amps = np.zeros(reg.dim, dtype=np.complex128)
    for i in range(M):
        if input_up:
            coeff, n_up = gamma[i], M - i
        else:
            coeff, n_up = gamma[M - 1 - i], M - 1 - i
        term = tensor_embed(
            [(dicke_state(M, n_up), targets), (dicke_state(M - 1, i), rest)], reg
        )
        amps += coeff * term.amplitudes
    return StateVector(reg, amps)


def machine_input_state(M: int, alpha: complex, beta: complex) -> StateVector:
    """``(alpha|up> + beta|down>)_I (x) |R>`` on the cloning register."""
    reg = QubitRegister.cloning(M)
    qubit = StateVector(QubitRegister.plain(1), [beta, alpha])
    return tensor_embed([(qubit, [0]), (build_r_state(M), list(range(1, reg.n_qubits)))], reg)


def build_ab_basis(M: int) -> AbBasis:
    _check_copies(M)
    reg = QubitRegister.cloning(M)
    targets = reg.indices(Role.TARGET)
    ancillas = reg.indices(Role.ANCILLA)
    a = machine_input_state(M, 1.0, 0.0)
    C = normalization_constant(M)
    amps = np.zeros(reg.dim, dtype=np.complex128)
    for j in range(1, M):
        term = tensor_embed(
            [
                (DOWN, [0]),
                (dicke_state(M, j + 1), targets),
                (dicke_state(M - 2, M - 1 - j), ancillas),
            ],
            reg,
        )
        amps += sqrt(j * (j + 1)) * term.amplitudes
    b = StateVector(reg, sqrt(2.0) * C / 2.0 * amps)
    return AbBasis(a, b)


def subspace_closure_residual(cfg: CloneConfig) -> float:
    """Largest norm of ``H|a>`` or ``H|b>`` leaking out of span{a, b}."""
    h = build_clone_hamiltonian(cfg)
    basis = build_ab_basis(cfg.M)
    worst = 0.0
    for psi in (basis.a, basis.b):
        hpsi = apply_pauli_sum(h, psi)
        leak = hpsi.amplitudes.copy()
        for e in (basis.a, basis.b):
            leak -= overlap(e, hpsi) * e.amplitudes
        worst = max(worst, float(np.linalg.norm(leak)))
    return worst


def _require_condition(cfg: CloneConfig) -> None:
    if not cfg.optimal_condition():
        raise ModelError(
            "two-dimensional reduction needs j1 == -j2 and lambda1 == -lambda2, "
            f"got {cfg}"
        )


def effective_hamiltonian(cfg: CloneConfig) -> Effective2x2:
    _require_condition(cfg)
    J, lam = cfg.j1, cfg.lambda1
    return Effective2x2(np.array([[0.0, sqrt(2.0) * J], [sqrt(2.0) * J, -J * lam]]))


def analytic_propagator_2d(cfg: CloneConfig, t: float) -> np.ndarray:
    """Closed-form ``exp(-i H_eff t)`` in the (a, b) basis.

    sigma_z is diag(1, -1) with |a> as the +1 state.
    """
    _require_condition(cfg)
    J, lam = cfg.j1, cfg.lambda1
    root = sqrt(lam * lam + 8.0)
    theta = 0.5 * J * t * root
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    gen = (lam * sz + 2.0 * sqrt(2.0) * sx) / root
    return np.exp(0.5j * J * t * lam) * (np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * gen)


def spin_flip_apply(state: StateVector) -> StateVector:
    """Flip every qubit: amplitude at ``k`` moves to ``(2**n - 1) ^ k``."""
    return StateVector(state.register, state.amplitudes[::-1])


def analytic_fidelity(M: int, phi) -> float | np.ndarray:
    _check_copies(M)
    c2 = np.cos(phi) ** 2
    return 0.5 * c2 + (2 * M + 1) / (3 * M) * (1.0 - c2)


def optimal_fidelity(M: int) -> float:
    _check_copies(M)
    return (2 * M + 1) / (3 * M)


def analytic_single_copy_density(M: int, phi: float, alpha: complex, beta: complex) -> DensityMatrix2:
    _check_copies(M)
    pa, pb = abs(alpha) ** 2, abs(beta) ** 2
    if abs(pa + pb - 1.0) > 1e-12:
        raise DomainError(f"input not normalized: |alpha|^2 + |beta|^2 = {pa + pb}")
    coherence = (M + 2) * np.conj(beta) * alpha
    block = np.array(
        [
            [pa * (1 + 2 * M) + pb * (M - 1), coherence],
            [np.conj(coherence), pb * (1 + 2 * M) + pa * (M - 1)],
        ]
    )
    s2 = np.sin(phi) ** 2
    return DensityMatrix2(0.5 * np.cos(phi) ** 2 * np.eye(2) + s2 / (3 * M) * block)
