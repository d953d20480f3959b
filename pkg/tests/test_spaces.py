import math

import numpy as np
import pytest

from ioncat import (
    EXCITED,
    GROUND,
    Operator,
    PureState,
    SpaceSignature,
    TruncationScheme,
    annihilation,
    apply,
    coherent_leakage,
    coherent_state,
    compose,
    cos_position,
    displacement,
    embed,
    fidelity,
    fock_state,
    guard_band_resident,
    herm_eig,
    interior_block,
    max_abs,
    number,
    parity_diag,
    phase_of_position,
    position,
    product_state,
    unitarity_defect,
)


class TestQubitConvention:
    def test_ladder_operators_exact(self):
        from ioncat import SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Z

        ket_e, ket_g = fock_state(2, EXCITED), fock_state(2, GROUND)
        assert np.array_equal(SIGMA_PLUS, np.outer(ket_e, ket_g.conj()))
        assert np.array_equal(SIGMA_MINUS, np.outer(ket_g, ket_e.conj()))
        assert np.array_equal(SIGMA_X, SIGMA_PLUS + SIGMA_MINUS)
        assert np.array_equal(SIGMA_Z @ ket_e, ket_e)       # sigma_z |e> = +|e>
        assert np.array_equal(SIGMA_Z @ ket_g, -ket_g)


class TestTruncationScheme:
    def test_total_dimension(self):
        tr = TruncationScheme(25, 8, 5)
        assert tr.total == 2 * 25 * 8
        assert tr.signature.dims == (25, 8, 2)

    @pytest.mark.parametrize("nv,nc,guard", [(1, 8, 1), (8, 1, 1), (8, 8, 0), (8, 8, 8), (8, 4, 5)])
    def test_invalid_schemes_rejected(self, nv, nc, guard):
        with pytest.raises(ValueError):
            TruncationScheme(nv, nc, guard)

    def test_interior_mask_counts(self):
        tr = TruncationScheme(6, 4, 2)
        mask = tr.interior_mask()
        assert mask.sum() == (6 - 2) * (4 - 2) * 2

    def test_guard_band_resident(self):
        assert guard_band_resident(9, 10, 5)
        assert not guard_band_resident(4, 10, 5)


class TestLadderOperators:
    def test_lowering_single_quantum(self):
        a = annihilation(6)
        assert np.array_equal(a @ fock_state(6, 1), fock_state(6, 0))

    def test_lowering_fourth_level(self):
        a = annihilation(6)
        assert np.array_equal(a @ fock_state(6, 4), 2.0 * fock_state(6, 3))

    def test_commutator_interior_and_corner(self):
        dim = 12
        a = annihilation(dim)
        comm = a @ a.conj().T - a.conj().T @ a
        # canonical on every row except the truncation corner
        body = comm[: dim - 1, : dim - 1]
        assert max_abs(body - np.eye(dim - 1)) <= 1e-12
        assert comm[dim - 1, dim - 1] == pytest.approx(1 - dim, abs=1e-12)

    def test_small_dim_rejected(self):
        with pytest.raises(ValueError, match=">= 2"):
            annihilation(1)


class TestFockState:
    def test_vacuum_norm(self):
        assert np.linalg.norm(fock_state(10, 0)) == 1.0

    def test_boundary_level_allowed(self):
        v = fock_state(10, 9)
        assert np.linalg.norm(v) == 1.0
        assert guard_band_resident(9, 10)

    def test_orthonormality(self):
        states = [fock_state(10, n) for n in range(10)]
        gram = np.array([[np.vdot(u, v) for v in states] for u in states])
        assert np.array_equal(gram, np.eye(10).astype(complex))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            fock_state(10, 10)


class TestCoherentState:
    def test_zero_amplitude_is_vacuum(self):
        assert np.array_equal(coherent_state(20, 0.0), fock_state(20, 0))

    def test_amplitudes_closed_form(self):
        # c_n = exp(-|a|^2/2) a^n / sqrt(n!) for a = 0.5
        v = coherent_state(20, 0.5)
        assert v[0] == pytest.approx(math.exp(-0.125), abs=1e-12)
        assert v[1] == pytest.approx(math.exp(-0.125) * 0.5, abs=1e-12)

    def test_eigenrelation_on_interior(self):
        dim, guard, alpha = 20, 5, 0.25j
        v = coherent_state(dim, alpha, guard)
        residual = annihilation(dim) @ v - alpha * v
        assert max_abs(residual[: dim - guard]) <= 1e-8

    def test_unit_norm_after_renormalization(self):
        for alpha in (0.5, 1.0j, 1.2 - 0.3j):
            assert abs(np.linalg.norm(coherent_state(20, alpha)) - 1.0) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.5, 1.0j, 1.2, 1.5 - 0.5j])
    def test_leakage_reported_small_under_precondition(self, alpha):
        assert coherent_leakage(20, alpha) <= 1e-10

    def test_excessive_amplitude_rejected(self):
        with pytest.raises(ValueError, match="exceeds the"):
            coherent_state(20, 2.0)  # |a|^2 = 4 > (20-5)/4

    def test_relaxed_guard_allows_larger_amplitude(self):
        v = coherent_state(20, 2.0, guard=0)
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12


class TestDisplacement:
    def test_zero_displacement_identity(self):
        assert max_abs(displacement(16, 0.0) - np.eye(16)) <= 1e-14

    def test_inverse_displacement(self):
        d_fwd = displacement(20, 0.8 + 0.3j)
        d_bwd = displacement(20, -(0.8 + 0.3j))
        assert max_abs((d_fwd @ d_bwd)[:15, :15] - np.eye(15)) <= 1e-12

    def test_displaced_vacuum_is_coherent(self):
        alpha = 0.25j
        got = displacement(20, alpha) @ fock_state(20, 0)
        assert fidelity(got, coherent_state(20, alpha)) >= 1 - 1e-10

    def test_unitary(self):
        assert unitarity_defect(displacement(20, 1.1 - 0.4j)) <= 1e-9

    def test_excessive_amplitude_rejected(self):
        with pytest.raises(ValueError, match="exceeds the"):
            displacement(20, 3.0)

    def test_phase_of_position_matches_displacement(self):
        # exp(i theta (a + a^dag)) is the displacement by i*theta
        theta = 0.4
        assert max_abs(phase_of_position(18, theta) - displacement(18, 1j * theta)) <= 1e-12


class TestCosPosition:
    def test_zero_angle_identity(self):
        assert np.array_equal(cos_position(16, 0.0), np.eye(16).astype(complex))

    def test_hermitian_with_bounded_spectrum(self):
        c = cos_position(20, 0.7)
        assert max_abs(c - c.conj().T) == 0.0
        w, _ = herm_eig(c)
        assert w.min() >= -1 - 1e-12 and w.max() <= 1 + 1e-12

    def test_matches_displacement_average(self):
        dim, eta, guard = 20, 0.5, 5
        via_disp = (displacement(dim, 1j * eta) + displacement(dim, -1j * eta)) / 2
        gap = cos_position(dim, eta) - via_disp
        assert max_abs(gap[: dim - guard, : dim - guard]) <= 1e-9

    def test_negative_angle_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            cos_position(8, -0.1)


class TestEmbedAndCompose:
    def test_factorized_action(self):
        tr = TruncationScheme(5, 4, 1)
        op = embed(annihilation(5), "vib", tr)
        start = product_state(fock_state(5, 1), fock_state(4, 0), fock_state(2, EXCITED), tr)
        target = product_state(fock_state(5, 0), fock_state(4, 0), fock_state(2, EXCITED), tr)
        assert np.array_equal(apply(op, start).vec, target.vec)

    @pytest.mark.parametrize("slot,dim", [("vib", 5), ("cav", 4), ("qubit", 2)])
    def test_identity_embedding(self, slot, dim):
        tr = TruncationScheme(5, 4, 1)
        out = embed(np.eye(dim), slot, tr)
        assert np.array_equal(out.mat, np.eye(tr.total).astype(complex))

    def test_cross_slot_commutator_vanishes_exactly(self):
        tr = TruncationScheme(5, 4, 1)
        av = embed(annihilation(5), "vib", tr)
        bc = embed(annihilation(4), "cav", tr)
        assert np.array_equal((av @ bc).mat, (bc @ av).mat)

    def test_slot_dimension_mismatch_rejected(self):
        tr = TruncationScheme(5, 4, 1)
        with pytest.raises(ValueError, match="does not match slot"):
            embed(annihilation(4), "vib", tr)

    def test_unknown_slot_rejected(self):
        tr = TruncationScheme(5, 4, 1)
        with pytest.raises(ValueError, match="unknown slot"):
            embed(np.eye(5), "spin", tr)

    def test_compose_shape_validation(self):
        tr = TruncationScheme(5, 4, 1)
        with pytest.raises(ValueError, match="does not match slot"):
            compose(np.eye(5), np.eye(5), np.eye(2), tr)

    def test_number_operator_spectrum_multiplicity(self):
        tr = TruncationScheme(6, 3, 1)
        w, _ = herm_eig(embed(number(6), "vib", tr).mat)
        values, counts = np.unique(np.round(w).astype(int), return_counts=True)
        assert np.array_equal(values, np.arange(6))
        assert np.all(counts == 2 * 3)

    def test_canonical_relations_on_interior(self):
        tr = TruncationScheme(10, 6, 2)
        for slot, dim in (("vib", 10), ("cav", 6)):
            low = embed(annihilation(dim), slot, tr)
            comm = (low @ low.dag()).mat - (low.dag() @ low).mat
            assert max_abs(interior_block(comm, tr) - np.eye(int(tr.interior_mask().sum()))) <= 1e-9


class TestTaggedTypes:
    def test_operator_shape_checked(self):
        with pytest.raises(ValueError, match="does not match signature"):
            Operator(np.eye(5), SpaceSignature(2, 2))

    def test_state_shape_checked(self):
        with pytest.raises(ValueError, match="does not match signature"):
            PureState(np.zeros(5, dtype=complex), SpaceSignature(2, 2))

    def test_non_finite_rejected(self):
        bad = np.full(8, np.inf, dtype=complex)
        with pytest.raises(ValueError, match="non-finite"):
            PureState(bad, SpaceSignature(2, 2))

    def test_apply_signature_mismatch(self):
        tr_a, tr_b = TruncationScheme(3, 2, 1), TruncationScheme(2, 3, 1)
        op = embed(np.eye(3), "vib", tr_a)
        psi = product_state(fock_state(2, 0), fock_state(3, 0), fock_state(2, 0), tr_b)
        with pytest.raises(ValueError, match="signature mismatch"):
            apply(op, psi)

    def test_operator_product_signature_mismatch(self):
        a = embed(np.eye(3), "vib", TruncationScheme(3, 2, 1))
        b = embed(np.eye(2), "vib", TruncationScheme(2, 3, 1))
        with pytest.raises(ValueError, match="signature mismatch"):
            a @ b

    def test_parity_diagonal(self):
        assert np.array_equal(parity_diag(4), np.array([1.0, -1.0, 1.0, -1.0]))

    def test_position_is_hermitian(self):
        x = position(9)
        assert max_abs(x - x.conj().T) == 0.0
