"""Preparing the machine state as the ground state of a target-ancilla Hamiltonian.

The preparation Hamiltonian acts on the machine register only (targets at
0..M-1, ancillas at M..2M-3):

* an XXZ coupling with anisotropy -1 between every target and every ancilla,
  ``J' (J+_T J-_A + J-_T J+_A - 2 Jz_T Jz_A)``;
* an all-pairs Ising term ``(Delta/2) sum_{p<q} Z_p Z_q``.

For ``J' < 0`` and ``Delta > 0`` its ground state is nondegenerate and equals
the machine state built by :func:`spinclone.model.build_r_state`.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse.linalg as spla

from .exceptions import ConfigError, DegeneracyError
from .hilbert import (
    PauliString,
    PauliTermSum,
    QubitRegister,
    Role,
    StateVector,
    overlap,
    two_body,
)
from .model import build_r_state

DENSE_MAX_COPIES = 5
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class PrepConfig:
    M: int
    jprime: float = -1.0
    delta: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 3:
            raise ConfigError(
                f"preparation needs M >= 3 (M = 2 has no ancillas), got {self.M}"
            )
        if not (math.isfinite(self.jprime) and math.isfinite(self.delta)):
            raise ConfigError("couplings must be finite")

    @property
    def register(self) -> QubitRegister:
        return QubitRegister.machine(self.M)

    def sign_condition(self) -> bool:
        """Whether the couplings satisfy J' < 0 and Delta > 0."""
        return self.jprime < 0 and self.delta > 0

    @property
    def predicted_ground_energy(self) -> float:
        M = self.M
        return self.jprime * (M * M - 4) / 2 - self.delta * (M - 1) / 2


@dataclass(frozen=True)
class SpectrumLevel:
    """One level ``(j_t, j_a, j, jz)`` of the preparation Hamiltonian."""

    j_t: Fraction
    j_a: Fraction
    j: Fraction
    jz: Fraction
    energy: float
    degeneracy: int


@dataclass(frozen=True)
class EigenCheck:
    e0: float
    e1: float
    residual0: float
    residual1: float


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    state: StateVector
    gap: float


def build_prep_parts(cfg: PrepConfig) -> tuple[PauliTermSum, PauliTermSum]:
    """Return the exchange part and the Ising part separately."""
    reg = cfg.register
    targets = reg.indices(Role.TARGET)
    ancillas = reg.indices(Role.ANCILLA)
    jp = cfg.jprime
    exchange = []
    for t in targets:
        for a in ancillas:
            # J+_t J-_a + J-_t J+_a = (X_t X_a + Y_t Y_a) / 2,  Jz_t Jz_a = Z_t Z_a / 4
            exchange.append(two_body(jp / 2, "X", t, a))
            exchange.append(two_body(jp / 2, "Y", t, a))
            exchange.append(two_body(-jp / 2, "Z", t, a))
    pairs = (
        list(combinations(targets, 2))
        + list(combinations(ancillas, 2))
        + [(t, a) for t in targets for a in ancillas]
    )
    ising = [two_body(cfg.delta / 2, "Z", p, q) for p, q in pairs]
    return PauliTermSum(reg, tuple(exchange)), PauliTermSum(reg, tuple(ising))


def build_prep_hamiltonian(cfg: PrepConfig) -> PauliTermSum:
    h0, h1 = build_prep_parts(cfg)
    return h0 + h1


def conjugate_by_target_z(op: PauliTermSum) -> PauliTermSum:
    """Conjugate by the product of Z over all target qubits.

    Every X or Y factor sitting on a target flips the sign of its term.
    """
    targets = set(op.register.indices(Role.TARGET))
    terms = []
    for term in op.terms:
        flips = sum(1 for q, p in term.factors if q in targets and p in "XY")
        terms.append(PauliString(term.factors, term.coefficient * (-1) ** flips))
    return PauliTermSum(op.register, tuple(terms))


def r_state_eigen_check(cfg: PrepConfig) -> EigenCheck:
    """Rayleigh quotients of |R> for both parts and the eigen-residual norms."""
    h0, h1 = build_prep_parts(cfg)
    r = build_r_state(cfg.M).amplitudes
    out = []
    for h in (h0, h1):
        hr = h.matvec(r)
        e = float(np.vdot(r, hr).real)
        out.extend([e, float(np.linalg.norm(hr - e * r))])
    return EigenCheck(e0=out[0], e1=out[2], residual0=out[1], residual1=out[3])


def multiplet_count(n_spins: int, twice_s: int) -> int:
    """Number of spin-s multiplets among ``n_spins`` spin-1/2 particles."""
    k = (n_spins - twice_s) // 2
    if (n_spins - twice_s) % 2 or k < 0:
        return 0
    return comb(n_spins, k) - (comb(n_spins, k - 1) if k >= 1 else 0)


def _twice_spins(n_spins: int) -> range:
    return range(n_spins % 2, n_spins + 1, 2)


def enumerate_spectrum(cfg: PrepConfig) -> list[SpectrumLevel]:
    """Closed-form levels, sorted by energy then quantum numbers."""
    M, jp, delta = cfg.M, cfg.jprime, cfg.delta
    shift = -delta * (M - 1) / 2
    levels = []
    for tt in _twice_spins(M):
        for ta in _twice_spins(M - 2):
            deg = multiplet_count(M, tt) * multiplet_count(M - 2, ta)
            jt, ja = Fraction(tt, 2), Fraction(ta, 2)
            for tj in range(abs(tt - ta), tt + ta + 1, 2):
                j = Fraction(tj, 2)
                coupling = j * (j + 1) - jt * (jt + 1) - ja * (ja + 1)
                for tz in range(-tj, tj + 1, 2):
                    jz = Fraction(tz, 2)
                    energy = -jp * float(coupling) + delta * float(jz * jz) + shift
                    levels.append(SpectrumLevel(jt, ja, j, jz, energy, deg))
    levels.sort(key=lambda lv: (lv.energy, -lv.j_t, -lv.j_a, lv.j, lv.jz))
    return levels


def total_dimension(levels) -> int:
    return sum(lv.degeneracy for lv in levels)


def energy_clusters(energies, degeneracies=None, tol: float = 1e-8) -> list[tuple[float, int]]:
    """Group sorted energies closer than ``tol`` into ``(energy, count)`` pairs."""
    energies = np.asarray(energies, dtype=float)
    if degeneracies is None:
        degeneracies = np.ones(len(energies), dtype=int)
    order = np.argsort(energies, kind="stable")
    clusters: list[list] = []
    for k in order:
        e, d = float(energies[k]), int(degeneracies[k])
        if clusters and e - clusters[-1][2] <= tol:
            clusters[-1][1] += d
            clusters[-1][2] = e
        else:
            clusters.append([e, d, e])
    return [(c[0], c[1]) for c in clusters]


def predicted_gap(cfg: PrepConfig) -> float:
    levels = enumerate_spectrum(cfg)
    clusters = energy_clusters([lv.energy for lv in levels], [lv.degeneracy for lv in levels])
    return clusters[1][0] - clusters[0][0]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[k]) / vec[k])


def solve_ground_state(
    cfg: PrepConfig, dense: bool | None = None, check_degeneracy: bool = True
) -> GroundState:
    """Lowest eigenpair of the preparation Hamiltonian.

    Dense diagonalization for M <= 5, sparse Lanczos (ARPACK) above, unless
    ``dense`` forces a choice. Raises :class:`DegeneracyError` when the two
    lowest eigenvalues are closer than ``1e-9`` times the energy scale.
    """
    h = build_prep_hamiltonian(cfg)
    mat = h.to_sparse()
    if not np.any(mat.data.imag):
        mat = mat.real
    if dense is None:
        dense = cfg.M <= DENSE_MAX_COPIES
    if dense:
        w, v = np.linalg.eigh(mat.toarray())
    else:
        w, v = spla.eigsh(mat, k=4, which="SA", tol=1e-14)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    e0 = float(w[0])
    gap = float(w[1] - w[0])
    if check_degeneracy and gap < DEGENERACY_RTOL * max(1.0, abs(e0)):
        raise DegeneracyError(f"ground level is degenerate (gap {gap:.3e})", gap=gap)
    vec = v[:, 0].astype(np.complex128)
    vec = _fix_phase(vec / np.linalg.norm(vec))
    return GroundState(e0, StateVector(cfg.register, vec), gap)


def ground_state_overlap(ground: GroundState, M: int) -> float:
    return abs(overlap(build_r_state(M), ground.state))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def spectrum_to_csv(levels) -> str:
    """CSV ``jt,ja,j,jz,energy,degeneracy`` with a ``# total_dimension=`` footer."""
    buf = io.StringIO()
    buf.write("jt,ja,j,jz,energy,degeneracy\n")
    for lv in levels:
        row = [_fmt(lv.j_t), _fmt(lv.j_a), _fmt(lv.j), _fmt(lv.jz), _fmt(lv.energy), str(lv.degeneracy)]
        buf.write(",".join(row) + "\n")
    buf.write(f"# total_dimension={total_dimension(levels)}\n")
    return buf.getvalue()
