from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinclone.evolution import (
    EvolutionSpec,
    Method,
    evolve,
    fidelity_trajectory,
    lanczos_expm,
    single_copy_fidelities,
)
from spinclone.exceptions import AccuracyError, DomainError
from spinclone.hilbert import PauliString, PauliTermSum, QubitRegister, StateVector, overlap, total_z
from spinclone.model import (
    CloneConfig,
    analytic_fidelity,
    build_clone_hamiltonian,
    machine_input_state,
    target_output_state,
)
from spinclone.oracle import dense_expm_apply, random_pauli_sum, random_state, to_dense

BOTH = [Method.DENSE_EIGEN, Method.KRYLOV]


class TestSpec:
    def test_auto_method(self):
        assert EvolutionSpec(1.0).resolve(12) is Method.DENSE_EIGEN
        assert EvolutionSpec(1.0).resolve(13) is Method.KRYLOV

    def test_dense_cap(self):
        with pytest.raises(DomainError):
            EvolutionSpec(1.0, Method.DENSE_EIGEN).resolve(15)

    @pytest.mark.parametrize("kwargs", [{"time": float("nan")}, {"time": 1.0, "tolerance": 0.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            EvolutionSpec(**kwargs)

    def test_method_from_string(self):
        assert EvolutionSpec(1.0, "krylov").method is Method.KRYLOV


class TestEvolve:
    @pytest.mark.parametrize("method", BOTH)
    def test_zero_time(self, method, rng):
        psi = random_state(rng, 3)
        h = random_pauli_sum(rng, 3, 5)
        np.testing.assert_array_equal(evolve(h, psi, EvolutionSpec(0.0, method)).amplitudes, psi.amplitudes)

    @pytest.mark.parametrize("method", BOTH)
    def test_z_eigenphase(self, method):
        h = PauliTermSum(QubitRegister.plain(1), (PauliString(((0, "Z"),)),))
        psi = StateVector(QubitRegister.plain(1), [0, 1])  # spin up
        out = evolve(h, psi, EvolutionSpec(pi, method))
        np.testing.assert_allclose(out.amplitudes, [0, -1], atol=1e-14)

    @pytest.mark.parametrize("method", BOTH)
    def test_m3_endpoint(self, method):
        cfg = CloneConfig(3)
        h = build_clone_hamiltonian(cfg)
        out = evolve(h, machine_input_state(3, 1, 0), EvolutionSpec(cfg.t0, method))
        assert abs(overlap(target_output_state(3, True), out)) >= 1 - 1e-9

    def test_requires_normalized(self, rng):
        h = random_pauli_sum(rng, 2, 3)
        psi = random_state(rng, 2) * 2.0
        with pytest.raises(DomainError):
            evolve(h, psi, EvolutionSpec(1.0))

    def test_register_mismatch(self, rng):
        with pytest.raises(DomainError):
            evolve(random_pauli_sum(rng, 2, 3), random_state(rng, 3), EvolutionSpec(1.0))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 8), st.floats(-3, 3), st.sampled_from(BOTH), st.integers(0, 2**32 - 1))
    def test_norm_and_oracle(self, n, t, method, seed):
        rng = np.random.default_rng(seed)
        h = random_pauli_sum(rng, n, 6)
        psi = random_state(rng, n)
        out = evolve(h, psi, EvolutionSpec(t, method))
        assert abs(out.norm() - 1) < 1e-10
        np.testing.assert_allclose(out.amplitudes, dense_expm_apply(to_dense(h), psi, t), atol=1e-10)

    def test_norm_ten_qubits(self, rng):
        h = random_pauli_sum(rng, 10, 15)
        out = evolve(h, random_state(rng, 10), EvolutionSpec(0.7, Method.KRYLOV))
        assert abs(out.norm() - 1) < 1e-10

    @pytest.mark.parametrize("M", [2, 3, 4, 5, 6])
    def test_methods_agree(self, M):
        cfg = CloneConfig(M)
        h = build_clone_hamiltonian(cfg)
        psi = machine_input_state(M, 0.6, 0.8j)
        for t in (cfg.t0 / 3, cfg.t0, 2 * cfg.t0):
            dense = evolve(h, psi, EvolutionSpec(t, Method.DENSE_EIGEN))
            krylov = evolve(h, psi, EvolutionSpec(t, Method.KRYLOV))
            assert (dense - krylov).norm() < 1e-8

    @pytest.mark.parametrize("method", BOTH)
    def test_composition(self, method, rng):
        h = build_clone_hamiltonian(CloneConfig(4, 0.7, -1.1, 1.5, 0.3))
        psi = random_state(rng, h.n_qubits)
        whole = evolve(h, psi, EvolutionSpec(1.4, method))
        split = evolve(h, evolve(h, psi, EvolutionSpec(0.5, method)), EvolutionSpec(0.9, method))
        assert (whole - split).norm() < 1e-10

    def test_magnetization_conserved(self, rng):
        h = build_clone_hamiltonian(CloneConfig(4, 0.7, -1.1, 1.5, 0.3))
        sz = total_z(h.register)
        psi = random_state(rng, h.n_qubits)
        m0 = sz.expectation(psi)
        for t in np.linspace(0.1, 3.0, 7):
            assert abs(sz.expectation(evolve(h, psi, EvolutionSpec(t))) - m0) < 1e-10


class TestLanczos:
    def test_non_convergence_reports_residual(self, rng):
        h = random_pauli_sum(rng, 6, 20)
        with pytest.raises(AccuracyError) as info:
            lanczos_expm(h.matvec, random_state(rng, 6).amplitudes, 5.0, max_dim=3)
        assert info.value.residual > 1e-12

    def test_invariant_subspace_breakdown(self):
        # eigenvector: the Krylov space is one-dimensional
        h = PauliTermSum(QubitRegister.plain(2), (PauliString(((0, "Z"), (1, "Z"))),))
        v = np.array([0, 1, 0, 0], dtype=complex)
        out, err, dim = lanczos_expm(h.matvec, v, 0.4)
        assert dim == 1 and err == 0.0
        np.testing.assert_allclose(out, np.exp(0.4j) * v, atol=1e-15)

    def test_error_estimate_is_honest(self, rng):
        h = random_pauli_sum(rng, 7, 12)
        psi = random_state(rng, 7)
        out, err, _ = lanczos_expm(h.matvec, psi.amplitudes, 1.1, tol=1e-8)
        exact = dense_expm_apply(to_dense(h), psi, 1.1)
        assert np.linalg.norm(out - exact) < 10 * max(err, 1e-13)


class TestTrajectory:
    def test_shape(self):
        out = fidelity_trajectory(CloneConfig(3), 1, 0, [0.0, 1.0])
        assert out.shape == (2, 4)
        assert out[:, 0].tolist() == [0.0, 1.0]

    @pytest.mark.parametrize("method", BOTH)
    def test_periodic_points(self, method):
        alpha, beta = 0.6, 0.8 * np.exp(0.3j)
        out = fidelity_trajectory(CloneConfig(4), alpha, beta, [0.0, pi / 2, pi], method)
        np.testing.assert_allclose(out[0, 1:], 0.5, atol=1e-12)
        np.testing.assert_allclose(out[1, 1:], 0.75, atol=1e-10)
        np.testing.assert_allclose(out[2, 1:], 0.5, atol=1e-10)

    @pytest.mark.parametrize("M", [2, 3])
    def test_matches_law_on_fine_grid(self, M):
        grid = np.linspace(0, 2 * pi, 100)
        out = fidelity_trajectory(CloneConfig(M), 1 / sqrt(2), 1j / sqrt(2), grid)
        dev = np.abs(out[:, 1:] - analytic_fidelity(M, grid)[:, None]).max()
        assert dev < 1e-9

    def test_krylov_unsorted_grid(self):
        grid = np.array([2.0, 0.5, 1.0, 0.5])
        dense = single_copy_fidelities(CloneConfig(3), [[0.6, 0.8]], grid, Method.DENSE_EIGEN)
        krylov = single_copy_fidelities(CloneConfig(3), [[0.6, 0.8]], grid, Method.KRYLOV)
        np.testing.assert_allclose(dense, krylov, atol=1e-10)

    def test_rejects_unnormalized_input(self):
        with pytest.raises(DomainError):
            fidelity_trajectory(CloneConfig(2), 1, 1, [0.0])

    def test_rejects_nonfinite_grid(self):
        with pytest.raises(DomainError):
            fidelity_trajectory(CloneConfig(2), 1, 0, [np.inf])
