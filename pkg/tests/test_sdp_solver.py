"""
Tests for the interior-point solver and the complex cone-program layer.
"""

import dataclasses
import json

import numpy as np
import pytest

from geophase.config import settings
from geophase.models import Bipartition, SdpStatus, SeparabilityError, SolverError
from geophase.services.cone_programs import ConeProgram, Term, hermitian_basis
from geophase.services.sdp_solver import (
    InteriorPointSolver,
    compress_embedding,
    hermitian_embedding,
    make_problem,
    validate_certificates,
)


def _trace_one_problem(c):
    """min <C, X> subject to Tr X = 1, X >= 0."""
    n = c.shape[0]
    return make_problem([n], [c], [np.eye(n)[None, :, :]], np.array([1.0]))


class TestInteriorPointSolver:
    """Test cases for the standard-form solver."""

    def setup_method(self):
        """Set up test fixtures."""
        self.solver = InteriorPointSolver(settings)

    def test_minimum_eigenvalue(self, rng):
        """Test min <C, X> over density matrices against the smallest eigenvalue."""
        g = rng.standard_normal((5, 5))
        c = (g + g.T) / 2
        solution = self.solver.solve(_trace_one_problem(c))
        assert solution.is_optimal
        assert solution.primal_objective == pytest.approx(np.linalg.eigvalsh(c)[0], abs=1e-6)
        assert solution.dual_objective == pytest.approx(np.linalg.eigvalsh(c)[0], abs=1e-6)

    def test_certificates_pass(self):
        """Test that an optimal pair passes every certificate."""
        problem = _trace_one_problem(np.diag([3.0, 1.0, 2.0]))
        solution = self.solver.solve(problem)
        report = validate_certificates(problem, solution)
        assert report.passed, report.failed()

    def test_perturbed_solution_fails(self):
        """Test that a perturbed primal fails primal feasibility."""
        problem = _trace_one_problem(np.diag([3.0, 1.0, 2.0]))
        solution = self.solver.solve(problem)
        bad = dataclasses.replace(solution, x=[solution.x[0] + 1e-3 * np.eye(3)])
        assert "primal_feasibility" in validate_certificates(problem, bad).failed()

    def test_two_blocks(self):
        """Test a program over two scalar blocks."""
        # min x1 + 2 x2 with x1 + x2 = 1 as two scalar blocks
        a = [np.ones((1, 1, 1)), np.ones((1, 1, 1))]
        problem = make_problem([1, 1], [np.eye(1), 2 * np.eye(1)], a, np.array([1.0]))
        solution = self.solver.solve(problem)
        assert solution.is_optimal
        assert solution.primal_objective == pytest.approx(1.0, abs=1e-6)

    def test_infeasible(self):
        """Test that an infeasible program is not reported optimal."""
        # X >= 0 with X_11 = -1
        e = np.zeros((1, 2, 2))
        e[0, 0, 0] = 1.0
        problem = make_problem([2], [np.eye(2)], [e], np.array([-1.0]))
        solution = self.solver.solve(problem)
        assert not solution.is_optimal
        assert solution.status in (SdpStatus.PRIMAL_INFEASIBLE, SdpStatus.SLOW_PROGRESS)

    def test_dump_dir(self, tmp_path):
        """Test the JSON dump of a solved problem."""
        config = settings.model_copy(update={"sdp_dump_dir": str(tmp_path)})
        InteriorPointSolver(config).solve(_trace_one_problem(np.eye(2)))
        dumps = list(tmp_path.glob("sdp_*.json"))
        assert len(dumps) == 1
        assert json.loads(dumps[0].read_text())["blocks"] == [2]

    def test_bitwise_deterministic(self, rng):
        """Test that solving the same problem twice gives identical iterates."""
        g = rng.standard_normal((6, 6))
        problem = _trace_one_problem((g + g.T) / 2)
        first = self.solver.solve(problem)
        second = InteriorPointSolver(settings).solve(problem)
        assert first.iterations == second.iterations
        assert first.primal_objective == second.primal_objective
        assert np.array_equal(first.y, second.y)
        for a, b in zip(first.x + first.s, second.x + second.s):
            assert np.array_equal(a, b)


class TestMakeProblem:
    """Test cases for redundant-row handling."""

    def test_redundant_rows_removed(self):
        """Test that a multiple of another row is dropped."""
        a = np.stack([np.eye(2), 2 * np.eye(2)])
        problem = make_problem([2], [np.eye(2)], [a], np.array([1.0, 2.0]))
        assert problem.constraint_count == 1
        assert len(problem.removed_rows) == 1

    def test_inconsistent_rows(self):
        """Test rejection of dependent rows with inconsistent right-hand sides."""
        a = np.stack([np.eye(2), 2 * np.eye(2)])
        with pytest.raises(SolverError):
            make_problem([2], [np.eye(2)], [a], np.array([1.0, 3.0]))

    def test_shape_mismatch(self):
        """Test rejection of a cost of the wrong block size."""
        with pytest.raises(SolverError):
            make_problem([3], [np.eye(2)], [np.eye(2)[None]], np.array([1.0]))


class TestConeProgram:
    """Test cases for the complex Hermitian layer."""

    def test_embedding_doubles_spectrum(self):
        """Test that the real embedding doubles each eigenvalue and compresses back."""
        h = np.array([[1.0, 1j], [-1j, 2.0]])
        emb = np.linalg.eigvalsh(hermitian_embedding(h))
        assert np.allclose(emb, np.repeat(np.linalg.eigvalsh(h), 2))
        assert np.allclose(compress_embedding(hermitian_embedding(h)), h)

    def test_basis_orthonormal(self):
        """Test the Hilbert-Schmidt orthonormal Hermitian basis."""
        basis = hermitian_basis(3)
        gram = np.array([[np.trace(a @ b).real for b in basis] for a in basis])
        assert len(basis) == 9
        assert np.allclose(gram, np.eye(9))

    def test_complex_minimum_eigenvalue(self):
        """Test a complex Hermitian minimum-eigenvalue program."""
        c = np.array([[1.0, 1j], [-1j, 1.0]])
        prog = ConeProgram((2,), label="min-eig")
        z = prog.hermitian("z")
        prog.add_scalar_constraint({z: np.eye(2)}, 1.0)
        prog.set_objective({z: c})
        solution = InteriorPointSolver(settings).solve(prog.problem)
        assert solution.is_optimal
        assert prog.objective_value(solution) == pytest.approx(0.0, abs=1e-6)
        optimum = prog.unpack(solution)["z"]
        assert np.trace(optimum).real == pytest.approx(1.0, abs=1e-7)
        assert np.real(np.trace(c @ optimum)) == pytest.approx(0.0, abs=1e-6)

    def test_matrix_constraint_with_transpose(self):
        """Test a matrix constraint through a partial transpose."""
        # Z - (Y)^{T_B} = 0 and Y = rho force Z = rho^{T_B}
        rho = np.eye(4) / 4
        prog = ConeProgram((2, 2))
        y = prog.hermitian("y")
        z = prog.hermitian("z")
        prog.add_matrix_constraint([Term(y)], rho)
        prog.add_matrix_constraint([Term(z), Term(y, -1.0, Bipartition(2, (1,)))], np.zeros((4, 4)))
        prog.set_objective({z: np.eye(4)})
        solution = InteriorPointSolver(settings).solve(prog.problem)
        assert solution.is_optimal
        assert np.allclose(prog.unpack(solution)["z"], rho, atol=1e-7)

    def test_offset_and_scalar(self):
        """Test a scalar variable with an objective offset."""
        prog = ConeProgram((2,))
        t = prog.scalar("t")
        prog.add_matrix_constraint([Term(t, matrix=np.eye(2))], 3 * np.eye(2))
        prog.set_objective({t: 1.0}, offset=-1.0)
        solution = InteriorPointSolver(settings).solve(prog.problem)
        assert prog.objective_value(solution) == pytest.approx(2.0, abs=1e-6)
        assert prog.unpack(solution)["t"] == pytest.approx(3.0, abs=1e-6)

    def test_unknown_variable(self):
        """Test rejection of an undeclared variable."""
        prog = ConeProgram((2,))
        with pytest.raises(SeparabilityError):
            prog.add_scalar_constraint({"missing": 1.0}, 0.0)
