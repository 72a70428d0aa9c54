"""scikit-learn style wrappers around the cloning machine and its preparation.

``UniversalCloner`` is a transformer: ``fit`` builds the star Hamiltonian for
its hyper-parameters and ``transform`` maps input qubits ``(alpha, beta)`` to
the fidelity of each of the M copies at rescaled time ``phi``::

    >>> cloner = UniversalCloner(n_copies=3).fit()
    >>> cloner.transform([[1.0, 0.0]]).round(6)
    array([[0.777778, 0.777778, 0.777778]])
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_copies, check_qubit_inputs
from .evolution import Method, single_copy_fidelities, spectral_decomposition
from .exceptions import DomainError
from .model import CloneConfig, analytic_fidelity, build_clone_hamiltonian
from .preparation import PrepConfig, ground_state_overlap, solve_ground_state


class UniversalCloner(TransformerMixin, BaseEstimator):
    """Optimal 1->M cloner on a spin star.

    Parameters
    ----------
    n_copies : int, default=3
    coupling : float, default=1.0
        Input-target exchange coupling; input-ancilla coupling is its negative.
    anisotropy : float, default=2.0
    phi : float, default=pi/2
        Rescaled evolution time ``sqrt(3) * coupling * t``.
    method : {None, "dense", "krylov"}
    """

    def __init__(self, n_copies=3, coupling=1.0, anisotropy=2.0, phi=math.pi / 2, method=None):
        self.n_copies = n_copies
        self.coupling = coupling
        self.anisotropy = anisotropy
        self.phi = phi
        self.method = method

    def fit(self, X=None, y=None):
        M = check_copies(self.n_copies)
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")
        if self.coupling == 0:
            raise DomainError("coupling must be nonzero")
        self.config_ = CloneConfig.optimal(M, float(self.coupling), float(self.anisotropy))
        self.method_ = None if self.method is None else Method(self.method)
        self.hamiltonian_ = build_clone_hamiltonian(self.config_)
        if self.method_ is not Method.KRYLOV and self.hamiltonian_.n_qubits <= 12:
            spectral_decomposition(self.hamiltonian_)
        self.evolution_time_ = self.config_.time_at(self.phi)
        if X is not None:
            check_qubit_inputs(X)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        """Fidelity of each copy, shape ``(n_samples, n_copies)``."""
        check_is_fitted(self, "config_")
        X = check_qubit_inputs(X)
        return single_copy_fidelities(self.config_, X, [self.phi], self.method_)[:, 0, :]

    def score(self, X, y=None):
        """Negative worst deviation from the closed-form fidelity law."""
        fids = self.transform(X)
        return -float(np.max(np.abs(fids - analytic_fidelity(self.config_.M, self.phi))))


class MachineStatePreparer(BaseEstimator):
    """Ground-state solver for the machine-state preparation Hamiltonian.

    After ``fit`` the attributes ``ground_energy_``, ``ground_state_``,
    ``gap_`` and ``overlap_with_r_`` are available.
    """

    def __init__(self, n_copies=3, jprime=-1.0, delta=1.0):
        self.n_copies = n_copies
        self.jprime = jprime
        self.delta = delta

    def fit(self, X=None, y=None):
        M = check_copies(self.n_copies, minimum=3)
        self.config_ = PrepConfig(M, float(self.jprime), float(self.delta))
        ground = solve_ground_state(self.config_)
        self.ground_energy_ = ground.energy
        self.ground_state_ = ground.state
        self.gap_ = ground.gap
        self.overlap_with_r_ = ground_state_overlap(ground, M)
        return self
