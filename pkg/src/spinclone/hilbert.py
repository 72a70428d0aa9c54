"""Qubit registers, state vectors, Pauli-string operators and partial traces.

Basis convention: bit ``i`` of a basis index (least significant first) is the
state of qubit ``i``; bit value 1 is spin up, 0 is spin down. With this
convention ``Z`` acts as ``+1`` on up and ``-1`` on down, i.e. it is
``diag(-1, +1)`` in basis-index order. ``Y|0> = i|1>`` and ``Y|1> = -i|0>``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import DomainError, LayoutError, ShapeError

NORM_TOL = 1e-12


class Role(enum.Enum):
    INPUT = "input"
    TARGET = "target"
    ANCILLA = "ancilla"
    OTHER = "other"


@dataclass(frozen=True)
class QubitRegister:
    """A register of ``n_qubits`` qubits with a role assigned to each index."""

    n_qubits: int
    layout: tuple[Role, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 0:
            raise DomainError(f"n_qubits must be >= 0, got {self.n_qubits}")
        if not self.layout:
            object.__setattr__(self, "layout", (Role.OTHER,) * self.n_qubits)
        elif len(self.layout) != self.n_qubits:
            raise LayoutError("layout length must equal n_qubits")

    @classmethod
    def plain(cls, n_qubits: int) -> "QubitRegister":
        return cls(n_qubits)

    @classmethod
    def cloning(cls, M: int) -> "QubitRegister":
        """Input at 0, targets at 1..M, ancillas at M+1..2M-2."""
        if M < 2:
            raise DomainError(f"cloning register needs M >= 2, got {M}")
        layout = (Role.INPUT,) + (Role.TARGET,) * M + (Role.ANCILLA,) * (M - 2)
        return cls(2 * M - 1, layout)

    @classmethod
    def machine(cls, M: int) -> "QubitRegister":
        """Targets at 0..M-1, ancillas at M..2M-3 (no input qubit)."""
        if M < 2:
            raise DomainError(f"machine register needs M >= 2, got {M}")
        return cls(2 * M - 2, (Role.TARGET,) * M + (Role.ANCILLA,) * (M - 2))

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def indices(self, role: Role) -> list[int]:
        return [i for i, r in enumerate(self.layout) if r is role]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the ``2**n`` computational basis of a register.

    The amplitude array is copied and made read-only on construction.
    """

    register: QubitRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.register.dim:
            raise ShapeError(
                f"expected {self.register.dim} amplitudes, got {amps.shape[0]}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.register.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.register, self.amplitudes / nrm)

    def with_amplitudes(self, amplitudes) -> "StateVector":
        return StateVector(self.register, amplitudes)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_size(self.register, other.register)
        return StateVector(self.register, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_size(self.register, other.register)
        return StateVector(self.register, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.register, self.amplitudes * scalar)

    __rmul__ = __mul__

    def to_json(self) -> str:
        return json.dumps(state_to_dict(self))


def _check_same_size(a: QubitRegister, b: QubitRegister) -> None:
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"register size mismatch: {a.n_qubits} vs {b.n_qubits}")


def basis_state(register: QubitRegister, index: int) -> StateVector:
    amps = np.zeros(register.dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(register, amps)


def state_to_dict(state: StateVector) -> dict:
    """Serialize as ``{"n_qubits": n, "amplitudes": [[re, im], ...]}``."""
    return {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }


def state_from_dict(payload: Mapping) -> StateVector:
    n = int(payload["n_qubits"])
    pairs = np.asarray(payload["amplitudes"], dtype=float).reshape(-1, 2)
    return StateVector(QubitRegister.plain(n), pairs[:, 0] + 1j * pairs[:, 1])


def state_from_json(text: str) -> StateVector:
    return state_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Pauli operators
# ---------------------------------------------------------------------------

_PAULI_LABELS = frozenset("XYZ")


@dataclass(frozen=True)
class PauliString:
    """``coefficient * prod_q P_q`` with identity on qubits not listed.

    ``factors`` is stored as a sorted tuple of ``(qubit, label)`` pairs.
    """

    factors: tuple[tuple[int, str], ...]
    coefficient: float = 1.0

    def __post_init__(self):
        if isinstance(self.factors, Mapping):
            items = self.factors.items()
        else:
            items = self.factors
        facs = tuple(sorted((int(q), str(p).upper()) for q, p in items))
        qubits = [q for q, _ in facs]
        if len(set(qubits)) != len(qubits):
            raise DomainError(f"repeated qubit in Pauli string {facs}")
        for q, p in facs:
            if p not in _PAULI_LABELS:
                raise DomainError(f"unknown Pauli label {p!r}")
            if q < 0:
                raise DomainError(f"negative qubit index {q}")
        coeff = complex(self.coefficient)
        if coeff.imag != 0.0:
            raise DomainError("Pauli string coefficients must be real")
        object.__setattr__(self, "factors", facs)
        object.__setattr__(self, "coefficient", coeff.real)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def flip_mask(self) -> int:
        mask = 0
        for q, p in self.factors:
            if p in "XY":
                mask |= 1 << q
        return mask

    def phases(self, n_qubits: int) -> np.ndarray:
        """Phase picked up by each basis index ``k`` (before the bit flip)."""
        idx = np.arange(1 << n_qubits)
        phase = np.ones(idx.shape[0], dtype=np.complex128)
        for q, p in self.factors:
            bit = (idx >> q) & 1
            if p == "Z":
                phase *= 2 * bit - 1
            elif p == "Y":
                phase *= 1j * (1 - 2 * bit)
        return phase

    def label(self) -> str:
        return " ".join(f"{p}{q}" for q, p in self.factors) or "I"


def two_body(coefficient: float, label: str, q1: int, q2: int) -> PauliString:
    return PauliString(((q1, label), (q2, label)), coefficient)


@dataclass(frozen=True)
class PauliTermSum:
    """A Hermitian operator stored as a real-weighted sum of Pauli strings."""

    register: QubitRegister
    terms: tuple[PauliString, ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if t.factors and t.factors[-1][0] >= self.register.n_qubits:
                raise ShapeError(
                    f"term {t.label()} exceeds register of {self.register.n_qubits} qubits"
                )
        object.__setattr__(self, "terms", terms)

    @property
    def n_qubits(self) -> int:
        return self.register.n_qubits

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliTermSum") -> "PauliTermSum":
        _check_same_size(self.register, other.register)
        return PauliTermSum(self.register, self.terms + other.terms)

    def scaled(self, factor: float) -> "PauliTermSum":
        return PauliTermSum(
            self.register,
            tuple(PauliString(t.factors, t.coefficient * factor) for t in self.terms),
        )

    @cached_property
    def _compiled(self) -> list[tuple[int, np.ndarray]]:
        # group by flip mask: H psi = sum_mask (d_mask * psi)[k ^ mask]
        n = self.n_qubits
        groups: dict[int, np.ndarray] = {}
        for t in self.terms:
            mask = t.flip_mask()
            diag = t.coefficient * t.phases(n)
            if mask in groups:
                groups[mask] = groups[mask] + diag
            else:
                groups[mask] = diag
        return sorted(groups.items())

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        """Apply to a raw amplitude array (1-D, or 2-D with states as columns)."""
        vec = np.asarray(vec)
        idx = np.arange(self.register.dim)
        out = np.zeros(vec.shape, dtype=np.complex128)
        for mask, diag in self._compiled:
            weighted = diag * vec if vec.ndim == 1 else diag[:, None] * vec
            out += weighted[idx ^ mask] if mask else weighted
        return out

    def to_sparse(self) -> sp.csr_matrix:
        dim = self.register.dim
        idx = np.arange(dim)
        mat = sp.csr_matrix((dim, dim), dtype=np.complex128)
        for mask, diag in self._compiled:
            mat = mat + sp.csr_matrix((diag, (idx ^ mask, idx)), shape=(dim, dim))
        return mat.tocsr()

    def expectation(self, state: StateVector) -> float:
        return float(np.vdot(state.amplitudes, self.matvec(state.amplitudes)).real)


def apply_pauli_sum(op: PauliTermSum, state: StateVector) -> StateVector:
    """Return ``op |state>``."""
    _check_same_size(op.register, state.register)
    return StateVector(state.register, op.matvec(state.amplitudes))


def total_z(register: QubitRegister, qubits: Iterable[int] | None = None) -> PauliTermSum:
    """Sum of ``Z_q`` over ``qubits`` (all qubits by default)."""
    qs = range(register.n_qubits) if qubits is None else qubits
    return PauliTermSum(register, tuple(PauliString(((q, "Z"),), 1.0) for q in qs))


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


def dicke_state(n: int, k: int) -> StateVector:
    """Normalized equal superposition of all ``n``-qubit states with ``k`` spins up.

    ``n = 0`` gives the one-amplitude unit state of the empty register.
    """
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    popcount = np.array([bin(i).count("1") for i in range(1 << n)])
    amps[popcount == k] = 1.0 / sqrt(comb(n, k))
    return StateVector(QubitRegister.plain(n), amps)


def tensor_embed(
    parts: Sequence[tuple[StateVector, Sequence[int]]],
    register: QubitRegister,
) -> StateVector:
    """Place a product of sub-register states onto ``register``.

    Each part is ``(state, indices)``: qubit ``j`` of ``state`` becomes qubit
    ``indices[j]`` of the result. The index sets must partition the register.
    """
    seen: list[int] = []
    for state, indices in parts:
        if len(indices) != state.n_qubits:
            raise LayoutError(
                f"state of {state.n_qubits} qubits given {len(indices)} indices"
            )
        seen.extend(indices)
    if len(seen) != len(set(seen)):
        raise LayoutError("sub-register index sets overlap")
    if sorted(seen) != list(range(register.n_qubits)):
        raise LayoutError("sub-register index sets do not cover the register")

    amps = np.ones(1, dtype=np.complex128)
    positions = np.zeros(1, dtype=np.int64)
    for state, indices in parts:
        sub = np.arange(state.register.dim)
        placed = np.zeros_like(sub)
        for j, q in enumerate(indices):
            placed |= ((sub >> j) & 1) << q
        nz = np.flatnonzero(state.amplitudes)
        amps = np.multiply.outer(amps, state.amplitudes[nz]).reshape(-1)
        positions = (positions[:, None] | placed[nz][None, :]).reshape(-1)
    out = np.zeros(register.dim, dtype=np.complex128)
    np.add.at(out, positions, amps)
    return StateVector(register, out)


def overlap(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugating the first argument."""
    _check_same_size(a.register, b.register)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix2:
    """Single-qubit density matrix, rows/columns ordered (up, down)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (2, 2):
            raise ShapeError(f"expected a 2x2 matrix, got {mat.shape}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def up_up(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def down_down(self) -> float:
        return float(self.matrix[1, 1].real)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def fidelity(self, alpha: complex, beta: complex) -> float:
        """``<in|rho|in>`` for ``|in> = alpha|up> + beta|down>``."""
        v = np.array([alpha, beta], dtype=np.complex128)
        return float(np.vdot(v, self.matrix @ v).real)


def partial_trace_single(state: StateVector, keep: int) -> DensityMatrix2:
    """Reduced density matrix of qubit ``keep``."""
    n = state.n_qubits
    if not 0 <= keep < n:
        raise DomainError(f"qubit {keep} outside register of {n} qubits")
    psi = state.amplitudes.reshape(1 << (n - 1 - keep), 2, 1 << keep)
    rho = np.einsum("hbl,hcl->bc", psi, psi.conj())
    # basis-index order is (down, up); flip to (up, down)
    return DensityMatrix2(rho[::-1, ::-1])

