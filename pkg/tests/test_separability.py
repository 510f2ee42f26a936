"""
Tests for separability models, membership checks and witness certificates.
"""

import numpy as np
import pytest

from geophase.models import (
    CertificateError,
    CertificateMode,
    ModelKind,
    Normalization,
    SeparabilityError,
    Witness,
    WitnessCertificate,
)
from geophase.services.sdp_solver import sdp_solver
from geophase.services.separability import (
    audit_witness,
    build_gr_dual,
    build_rr_dual,
    build_rr_primal,
    decomposition_violation,
    extract_witness,
    k_product_structures,
    make_model,
    membership_check,
    model_for_k,
    model_structures,
    ppt_violation,
    sample_product_kets,
    verify_certificate,
)
from geophase.services.states import (
    maximally_mixed,
    partial_transpose_matrix,
    random_separable_state,
)


class TestModels:
    """Test cases for model selection."""

    def test_two_qubits_exact(self):
        """Test the exact model for qubit-qubit and qubit-qutrit."""
        assert model_for_k((2, 2), 2).kind is ModelKind.EXACT_TWO_QUBIT
        assert model_for_k((2, 3), 2).kind is ModelKind.EXACT_TWO_QUBIT

    def test_two_qutrits_fall_back(self):
        """Test the PPT fallback for two qutrits."""
        assert model_for_k((3, 3), 2).kind is ModelKind.INTERSECT_PPT

    def test_three_qubits(self):
        """Test model selection for three qubits."""
        assert model_for_k((2, 2, 2), 3).kind is ModelKind.INTERSECT_PPT
        assert model_for_k((2, 2, 2), 2).kind is ModelKind.MIXTURE_PPT

    def test_unsupported_k(self):
        """Test rejection of an unsupported k."""
        with pytest.raises(SeparabilityError):
            model_for_k((2, 2, 2, 2), 3)

    def test_exact_rejects_large(self):
        """Test the exact model rejecting large dimensions."""
        with pytest.raises(SeparabilityError):
            make_model(ModelKind.EXACT_TWO_QUBIT, (3, 3))

    def test_cut_count(self, mixture_model):
        """Test the bipartitions of the mixture model."""
        assert len(mixture_model.bipartitions) == 3
        assert mixture_model.tag == "ppt-mixture"


class TestMembership:
    """Test cases for membership checks."""

    def test_bell_outside_ppt(self, bell_state, exact_model):
        """Test the Bell state failing the PPT check."""
        membership = membership_check(bell_state, exact_model)
        assert not membership.inside
        assert membership.violation == pytest.approx(-0.5)

    def test_mixed_inside(self, exact_model):
        """Test the maximally mixed state passing the PPT check."""
        assert membership_check(maximally_mixed((2, 2)), exact_model).inside

    def test_separable_inside_intersection(self, intersect_model):
        """Test a separable state inside the PPT intersection."""
        rho = random_separable_state((2, 2, 2), 3, 5)
        assert ppt_violation(rho.matrix, intersect_model) >= -1e-12

    def test_ghz_outside_mixture(self, ghz_state, mixture_model):
        """Test GHZ outside the PPT mixture."""
        membership = membership_check(ghz_state, mixture_model)
        assert not membership.inside
        # RR of GHZ against the PPT mixture is positive, violation = -RR/d
        assert membership.violation < -1e-3

    def test_mixed_inside_mixture(self, mixture_model):
        """Test the maximally mixed state inside the PPT mixture."""
        assert membership_check(maximally_mixed((2, 2, 2)), mixture_model).inside

    def test_dims_mismatch(self, bell_state, mixture_model):
        """Test rejection of mismatched dimensions."""
        with pytest.raises(SeparabilityError):
            membership_check(bell_state, mixture_model)

    def test_decomposition_violation(self, mixture_model):
        """Test the decomposition violation measure."""
        target = np.eye(8) / 8
        components = [target / 3] * 3
        assert decomposition_violation(target, components, mixture_model) == pytest.approx(0.0, abs=1e-12)
        broken = [target / 2] * 3
        assert decomposition_violation(target, broken, mixture_model) < -1e-3


class TestWitnessExtraction:
    """Test cases for dual programs and certificates."""

    def test_rr_witness_exact(self, bell_state, exact_model):
        """Test the RR witness of the Bell state."""
        program = build_rr_dual(bell_state, exact_model)
        solution = sdp_solver.solve(program.problem)
        witness = extract_witness(solution, program, exact_model, Normalization.TRACE_D)
        assert np.trace(witness.matrix).real == pytest.approx(4.0, abs=1e-9)
        assert witness.expectation(bell_state.matrix) == pytest.approx(-2.0, abs=1e-5)
        assert verify_certificate(witness) <= 1e-7 * (1 + np.linalg.norm(witness.matrix))

    def test_gr_witness_mixture(self, ghz_state, mixture_model):
        """Test the GR witness of GHZ against the PPT mixture."""
        program = build_gr_dual(ghz_state, mixture_model)
        solution = sdp_solver.solve(program.problem)
        witness = extract_witness(solution, program, mixture_model, Normalization.BOUNDED_BY_IDENTITY)
        assert witness.certificate.mode is CertificateMode.PER_PARTITION
        assert len(witness.certificate.p) == 3
        assert np.linalg.eigvalsh(witness.matrix)[-1] <= 1.0 + 1e-9
        assert witness.expectation(ghz_state.matrix) < 0

    def test_non_optimal_solution_rejected(self, bell_state, exact_model):
        """Test rejection of a non-optimal solution."""
        program = build_rr_dual(bell_state, exact_model)
        solution = sdp_solver.solve(program.problem, max_iter=1)
        with pytest.raises(SeparabilityError):
            extract_witness(solution, program, exact_model, Normalization.TRACE_D)

    def test_tampered_certificate(self, bell_state, exact_model):
        """Test that a tampered witness fails verification."""
        program = build_rr_dual(bell_state, exact_model)
        solution = sdp_solver.solve(program.problem)
        witness = extract_witness(solution, program, exact_model, Normalization.TRACE_D)
        cert = witness.certificate
        tampered = Witness(
            matrix=witness.matrix + 1e-3 * np.eye(4),
            normalization=witness.normalization,
            dims=witness.dims,
            certificate=cert,
        )
        with pytest.raises(CertificateError):
            verify_certificate(tampered)

    def test_negative_component(self):
        """Test that a negative certificate component fails verification."""
        dims = (2, 2)
        cert = WitnessCertificate(
            CertificateMode.SUMMED,
            make_model(ModelKind.EXACT_TWO_QUBIT, dims).bipartitions,
            (-np.eye(4),),
            (np.zeros((4, 4)),),
        )
        witness = Witness(-np.eye(4), Normalization.TRACE_D, dims, certificate=cert)
        with pytest.raises(CertificateError):
            verify_certificate(witness)

    def test_summed_reconstruction(self, exact_model):
        """Test reconstruction from a summed certificate."""
        q = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
        q[0, 3] = q[3, 0] = 0.5
        cert = WitnessCertificate(
            CertificateMode.SUMMED, exact_model.bipartitions, (np.eye(4) * 0.1,), (q,)
        )
        matrix = 0.1 * np.eye(4) + partial_transpose_matrix(q, (2, 2), exact_model.bipartitions[0])
        witness = Witness(matrix, Normalization.TRACE_D, (2, 2), certificate=cert)
        assert verify_certificate(witness) == pytest.approx(0.0, abs=1e-12)


class TestAudit:
    """Test cases for product-state sampling and the witness audit."""

    def test_sample_shapes_and_norms(self, rng):
        """Test product sample shapes and norms."""
        kets = sample_product_kets((2, 2, 2), k_product_structures(3, 2), 50, rng)
        assert kets.shape == (50, 8)
        assert np.allclose(np.linalg.norm(kets, axis=1), 1.0)

    def test_product_samples_are_product(self, rng):
        """Test that product samples have Schmidt rank one."""
        kets = sample_product_kets((2, 2, 2), [((0,), (1,), (2,))], 20, rng)
        for ket in kets:
            singular = np.linalg.svd(ket.reshape(2, 4), compute_uv=False)
            assert singular[1] == pytest.approx(0.0, abs=1e-12)

    def test_party_order_restored(self, rng):
        """Test party order restored for a non-contiguous structure."""
        # Structure (AC | B): the B factor must sit in the middle digit
        kets = sample_product_kets((2, 2, 2), [((0, 2), (1,))], 10, rng)
        for ket in kets:
            singular = np.linalg.svd(ket.reshape(2, 2, 2).transpose(1, 0, 2).reshape(2, 4), compute_uv=False)
            assert singular[1] == pytest.approx(0.0, abs=1e-12)

    def test_empty_structures(self, rng):
        """Test rejection of an empty structure list."""
        with pytest.raises(SeparabilityError):
            sample_product_kets((2, 2), [], 10, rng)

    def test_audit_passes_and_fails(self, mixture_model):
        """Test the audit on a valid and an invalid witness."""
        ok = Witness(np.eye(8), Normalization.TRACE_D, (2, 2, 2))
        assert audit_witness(ok, model_structures(mixture_model), 200).passed
        bad = Witness(-np.eye(8), Normalization.TRACE_D, (2, 2, 2))
        report = audit_witness(bad, model_structures(mixture_model), 200)
        assert not report.passed
        assert report.min_value == pytest.approx(-1.0)

    def test_structures(self, intersect_model, mixture_model):
        """Test product structures per model."""
        assert model_structures(intersect_model) == [((0,), (1,), (2,))]
        assert len(model_structures(mixture_model)) == 3


class TestPrimal:
    """Test cases for the primal program builders."""

    def test_rr_primal_mixed(self, exact_model):
        """Test the RR primal of the maximally mixed state."""
        program = build_rr_primal(maximally_mixed((2, 2)), exact_model)
        solution = sdp_solver.solve(program.problem)
        assert solution.is_optimal
        # t can shrink to 1 - d * lambda_min(rho^{T_B}) = 0 here
        assert program.objective_value(solution) == pytest.approx(-1.0, abs=1e-6)
