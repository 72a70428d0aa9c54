from fractions import Fraction

import numpy as np
import pytest

from spinclone.exceptions import ConfigError, DegeneracyError
from spinclone.hilbert import overlap
from spinclone.model import build_r_state, spin_flip_apply
from spinclone.oracle import dense_collective, to_dense
from spinclone.preparation import (
    PrepConfig,
    build_prep_hamiltonian,
    build_prep_parts,
    conjugate_by_target_z,
    energy_clusters,
    enumerate_spectrum,
    ground_state_overlap,
    multiplet_count,
    predicted_gap,
    r_state_eigen_check,
    solve_ground_state,
    spectrum_to_csv,
    total_dimension,
)

H = Fraction(1, 2)


def collective(M):
    n = 2 * M - 2
    targets, ancillas = range(M), range(M, n)
    return {
        (grp, lab): dense_collective(n, qs, lab)
        for grp, qs in (("T", targets), ("A", ancillas), ("all", range(n)))
        for lab in "XYZ"
    }


class TestConfig:
    def test_rejects_m2(self):
        with pytest.raises(ConfigError):
            PrepConfig(2)

    def test_sign_condition(self):
        assert PrepConfig(3).sign_condition()
        assert not PrepConfig(3, jprime=1.0).sign_condition()
        assert not PrepConfig(3, delta=-1.0).sign_condition()


class TestHamiltonian:
    def test_term_counts_m3(self):
        h0, h1 = build_prep_parts(PrepConfig(3))
        assert len(h0) == 9 and len(h1) == 6

    @pytest.mark.parametrize("M", [3, 4])
    def test_parts_commute(self, M):
        h0, h1 = (to_dense(h) for h in build_prep_parts(PrepConfig(M, -0.8, 1.7)))
        assert np.abs(h0 @ h1 - h1 @ h0).max() < 1e-12

    @pytest.mark.parametrize("M", [3, 4])
    def test_ising_part_is_collective(self, M):
        delta = 1.7
        _, h1 = build_prep_parts(PrepConfig(M, -1.0, delta))
        jz = collective(M)[("all", "Z")]
        expected = delta * jz @ jz - delta * (M - 1) / 2 * np.eye(jz.shape[0])
        np.testing.assert_allclose(to_dense(h1), expected, atol=1e-12)

    @pytest.mark.parametrize("M", [3, 4])
    def test_exchange_part_is_collective(self, M):
        jp = -0.6
        h0, _ = build_prep_parts(PrepConfig(M, jp))
        c = collective(M)
        # J+_T J-_A + J-_T J+_A = 2 (Jx_T Jx_A + Jy_T Jy_A)
        expected = jp * (
            2 * c[("T", "X")] @ c[("A", "X")]
            + 2 * c[("T", "Y")] @ c[("A", "Y")]
            - 2 * c[("T", "Z")] @ c[("A", "Z")]
        )
        np.testing.assert_allclose(to_dense(h0), expected, atol=1e-12)

    def test_target_z_conjugation(self):
        M, jp = 3, -0.6
        cfg = PrepConfig(M, jp)
        h0, h1 = build_prep_parts(cfg)
        n = 2 * M - 2
        qt = np.diag([(-1) ** sum(((k >> q) & 1) == 0 for q in range(M)) for k in range(2**n)]).astype(complex)
        c = collective(M)
        heisenberg = -jp * 2 * sum(c[("T", lab)] @ c[("A", lab)] for lab in "XYZ")
        np.testing.assert_allclose(qt @ to_dense(h0) @ qt, heisenberg, atol=1e-12)
        np.testing.assert_allclose(to_dense(conjugate_by_target_z(h0)), heisenberg, atol=1e-12)
        np.testing.assert_allclose(qt @ to_dense(h1) @ qt, to_dense(h1), atol=1e-12)


class TestRStateEigen:
    def test_m3(self):
        chk = r_state_eigen_check(PrepConfig(3, -1.0, 1.0))
        assert chk.e0 == pytest.approx(-2.5, abs=1e-12)
        assert chk.e1 == pytest.approx(-1.0, abs=1e-12)
        assert chk.residual0 < 1e-10 and chk.residual1 < 1e-10

    def test_m5(self):
        chk = r_state_eigen_check(PrepConfig(5, -2.0, 0.5))
        assert chk.e0 == pytest.approx(-21.0, abs=1e-12)
        assert chk.e1 == pytest.approx(-1.0, abs=1e-12)
        assert chk.residual0 < 1e-10 and chk.residual1 < 1e-10


class TestSpectrum:
    def test_multiplet_counts(self):
        assert multiplet_count(3, 3) == 1 and multiplet_count(3, 1) == 2
        assert multiplet_count(4, 0) == 2 and multiplet_count(4, 2) == 3
        assert multiplet_count(4, 1) == 0

    def test_m3_quantum_numbers(self):
        levels = enumerate_spectrum(PrepConfig(3))
        assert {lv.j_t for lv in levels} == {3 * H, H}
        assert {lv.j_a for lv in levels} == {H}

    def test_m3_level_energy(self):
        levels = enumerate_spectrum(PrepConfig(3, -1.0, 1.0))
        (lv,) = [lv for lv in levels if (lv.j_t, lv.j_a, lv.j, lv.jz) == (3 * H, H, 1, 0)]
        assert lv.energy == pytest.approx(-3.5, abs=1e-14)

    @pytest.mark.parametrize("M", range(3, 9))
    def test_unique_minimum(self, M):
        cfg = PrepConfig(M, -1.3, 0.4)
        levels = enumerate_spectrum(cfg)
        ground = levels[0]
        assert (ground.j_t, ground.j_a, ground.j, ground.jz) == (Fraction(M, 2), Fraction(M - 2, 2), 1, 0)
        assert ground.degeneracy == 1
        assert ground.energy == pytest.approx(cfg.predicted_ground_energy, abs=1e-12)
        assert levels[1].energy > ground.energy + 1e-6

    @pytest.mark.parametrize("M", range(3, 9))
    def test_dimension(self, M):
        assert total_dimension(enumerate_spectrum(PrepConfig(M))) == 4 ** (M - 1)

    @pytest.mark.parametrize("M", [3, 4])
    def test_matches_dense_diagonalization(self, M):
        cfg = PrepConfig(M, -0.7, 1.3)
        levels = enumerate_spectrum(cfg)
        analytic = energy_clusters([lv.energy for lv in levels], [lv.degeneracy for lv in levels])
        numeric = energy_clusters(np.linalg.eigvalsh(to_dense(build_prep_hamiltonian(cfg))))
        assert [d for _, d in analytic] == [d for _, d in numeric]
        np.testing.assert_allclose([e for e, _ in analytic], [e for e, _ in numeric], atol=1e-10)

    def test_csv(self):
        text = spectrum_to_csv(enumerate_spectrum(PrepConfig(3)))
        lines = text.splitlines()
        assert lines[0] == "jt,ja,j,jz,energy,degeneracy"
        assert lines[1] == "1.5,0.5,1,0,-3.5,1"
        assert lines[-1] == "# total_dimension=16"
        assert sum(int(l.split(",")[-1]) for l in lines[1:-1]) == 16


class TestGroundState:
    def test_m3(self):
        g = solve_ground_state(PrepConfig(3, -1.0, 1.0))
        assert g.energy == pytest.approx(-3.5, abs=1e-9)
        assert ground_state_overlap(g, 3) > 1 - 1e-10

    def test_m4(self):
        assert solve_ground_state(PrepConfig(4, -1.0, 0.5)).energy == pytest.approx(-6.75, abs=1e-9)

    def test_phase_convention(self):
        vec = solve_ground_state(PrepConfig(4)).state.amplitudes
        k = np.argmax(np.abs(vec))
        assert vec[k].imag == 0 and vec[k].real > 0
        assert abs(np.linalg.norm(vec) - 1) < 1e-12

    @pytest.mark.parametrize("M", [3, 4, 5, 6])
    def test_equals_r_state(self, M):
        cfg = PrepConfig(M)
        g = solve_ground_state(cfg)
        assert ground_state_overlap(g, M) >= 1 - 1e-10
        assert g.gap == pytest.approx(predicted_gap(cfg), abs=1e-9)
        assert abs(overlap(g.state, spin_flip_apply(g.state))) == pytest.approx(1, abs=1e-10)

    def test_sparse_matches_dense(self):
        cfg = PrepConfig(5, -0.9, 0.6)
        sparse, dense = solve_ground_state(cfg, dense=False), solve_ground_state(cfg, dense=True)
        assert sparse.energy == pytest.approx(dense.energy, abs=1e-10)
        assert abs(overlap(sparse.state, dense.state)) == pytest.approx(1, abs=1e-10)

    def test_degenerate_ground_level_detected(self):
        # without the Ising part the j = 1 triplet is threefold degenerate
        with pytest.raises(DegeneracyError) as info:
            solve_ground_state(PrepConfig(3, -1.0, 0.0))
        assert info.value.gap < 1e-9

    def test_r_state_m3_symmetric(self):
        # M = 3: four-particle symmetric state, still the unique ground state
        g = solve_ground_state(PrepConfig(3, -2.0, 0.3))
        assert abs(overlap(build_r_state(3), g.state)) > 1 - 1e-10
